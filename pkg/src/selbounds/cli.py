"""Command-line front end.

Every library operation is exposed as a subcommand. Results print to
stdout as JSON by default; ``--format text`` emits the compact quoted
lines familiar from interactive statistical consoles. ``--round N``
rounds every number in the output to N decimals (presentation only).

Exit codes: 0 success, 2 for invalid or out-of-domain input, 1 for
computation failures (degenerate strata, zero denominators, failed
constructions).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import dataset as ds
from .bounds import (
    EstimandKind,
    ObservedSummary,
    SensitivityParamsSub,
    SensitivityParamsTotal,
    af_bound,
    sv_bound,
)
from .errors import (
    InvalidInputError,
    ParameterDomainError,
    SelBoundsError,
)
from .mstructure import MStructureSpec, sv_bound_parameters_m
from .sharpness import sharpness_grid, sv_bound_sharp

_VALIDATION_EXIT = 2
_COMPUTE_EXIT = 1


def _rounded(obj, digits):
    if digits is None:
        return obj
    if isinstance(obj, float):
        return round(obj, digits)
    if isinstance(obj, dict):
        return {k: _rounded(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v, digits) for v in obj]
    return obj


def _emit(args, payload: dict, text_lines) -> None:
    if args.format == "text":
        for line in text_lines(payload):
            print(line)
    else:
        print(json.dumps(_rounded(payload, args.round), indent=2, sort_keys=True))


def _fmt_num(value, digits):
    if isinstance(value, bool):
        return "TRUE" if value else "FALSE"
    if digits is not None and isinstance(value, float):
        value = round(value, digits)
    return f"{value:g}" if isinstance(value, float) else str(value)


def _estimand(args) -> EstimandKind:
    return EstimandKind.from_code(args.estimand)


def _cmd_sv_params(args) -> None:
    spec = MStructureSpec.from_json_file(args.model)
    result = sv_bound_parameters_m(
        spec, _estimand(args), args.py1_t1_s1, args.py1_t0_s1
    )
    payload = result.to_dict()

    def text(p):
        lines = []
        for key, val in result.bounding_factors.items():
            lines.append(f'"{key}" {_fmt_num(val, args.round)}')
        for key, val in result.params.to_dict().items():
            lines.append(f'"{key}" {_fmt_num(val, args.round)}')
        lines.append(f'"Reverse treatment" {_fmt_num(result.reversed_treatment, None)}')
        return lines

    _emit(args, payload, text)


def _params_from_args(args, estimand: EstimandKind):
    if estimand.is_subpopulation:
        missing = [n for n in ("rr_uy_s1", "rr_tu_s1") if getattr(args, n) is None]
        if missing:
            raise InvalidInputError(
                f"{estimand.value} needs --rr-uy-s1 and --rr-tu-s1"
            )
        return SensitivityParamsSub(rr_uy_s1=args.rr_uy_s1, rr_tu_s1=args.rr_tu_s1)
    missing = [
        n
        for n in ("rr_uy_t1", "rr_uy_t0", "rr_su_t1", "rr_su_t0")
        if getattr(args, n) is None
    ]
    if missing:
        raise InvalidInputError(
            f"{estimand.value} needs --rr-uy-t1, --rr-uy-t0, --rr-su-t1 and --rr-su-t0"
        )
    return SensitivityParamsTotal(
        rr_uy_t1=args.rr_uy_t1,
        rr_uy_t0=args.rr_uy_t0,
        rr_su_t1=args.rr_su_t1,
        rr_su_t0=args.rr_su_t0,
    )


def _observed_from_args(args) -> ObservedSummary | None:
    given = args.py1_t1_s1 is not None or args.py1_t0_s1 is not None
    if not given:
        return None
    if args.py1_t1_s1 is None or args.py1_t0_s1 is None:
        raise InvalidInputError("--py1-t1-s1 and --py1-t0-s1 must be given together")
    return ObservedSummary(
        pY1_T1_S1=args.py1_t1_s1,
        pY1_T0_S1=args.py1_t0_s1,
        pT1_S1=getattr(args, "pt1_s1", None),
        pS1=getattr(args, "ps1", None),
    )


def _cmd_sv_bound(args) -> None:
    estimand = _estimand(args)
    params = _params_from_args(args, estimand)
    observed = _observed_from_args(args)
    result = sv_bound(estimand, params, observed)
    _emit(
        args,
        result.to_dict(),
        lambda p: [f'"SV bound" {_fmt_num(result.value, args.round)}'],
    )


def _cmd_af_bound(args) -> None:
    estimand = _estimand(args)
    if args.csv is not None:
        wanted = {"outcome": args.outcome_col, "treatment": args.treatment_col}
        if args.selection_col is not None:
            wanted["selection"] = args.selection_col
        cols = ds.read_csv_columns(args.csv, wanted, float_roles=("selection",))
        treatment = cols["treatment"]
        if args.reverse_treatment:
            treatment = 1 - treatment
        if args.selection_col is not None:
            selection = ds.selection_from_column(cols["selection"])
        else:
            selection = args.selection_prob
        if selection is None:
            raise InvalidInputError(
                "provide --selection-col or --selection-prob with --csv"
            )
        result = ds.af_bound_from_data(estimand, cols["outcome"], treatment, selection)
    else:
        observed = _observed_from_args(args)
        if observed is None:
            raise InvalidInputError(
                "provide either --csv or the summary flags --py1-t1-s1/--py1-t0-s1"
            )
        result = af_bound(estimand, observed)
    _emit(
        args,
        result.to_dict(),
        lambda p: [f'"AF bound" {_fmt_num(result.value, args.round)}'],
    )


def _cmd_sharp(args) -> None:
    verdict = sv_bound_sharp(
        args.bf_u,
        args.p0,
        sv_bound=args.sv,
        af_bound=args.af,
        estimand=EstimandKind.from_code(args.estimand),
    )
    _emit(args, verdict.to_dict(), lambda p: [f'"{verdict.verdict.message}"'])


def _axis(lo: float, hi: float, steps: int, name: str):
    if steps < 1:
        raise InvalidInputError(f"{name} steps must be >= 1", field=name)
    if steps == 1:
        return [lo]
    if hi <= lo:
        raise InvalidInputError(f"{name} max must exceed min", field=name)
    return list(np.linspace(lo, hi, steps))


def _cmd_grid(args) -> None:
    grid = sharpness_grid(
        _axis(args.uy_min, args.uy_max, args.uy_steps, "uy"),
        _axis(args.tu_min, args.tu_max, args.tu_steps, "tu"),
        args.p0,
        af_bound=args.af,
    )
    payload = grid.to_dict()

    def text(p):
        lines = [f"sharp limit {_fmt_num(grid.sharp_limit, args.round)}"]
        for uy, row_b, row_v in zip(grid.uy_axis, grid.bounds, grid.verdicts):
            cells = "  ".join(
                f"{_fmt_num(b, args.round)}:{v.value}" for b, v in zip(row_b, row_v)
            )
            lines.append(f"RR_UY={_fmt_num(uy, args.round)}  {cells}")
        return lines

    _emit(args, payload, text)


def _load_spec(args) -> MStructureSpec:
    if args.zika:
        return ds.zika_spec(selections=args.selections)
    if args.model is None:
        raise InvalidInputError("provide --model FILE or --zika")
    return MStructureSpec.from_json_file(args.model)


def _cmd_simulate(args) -> None:
    spec = _load_spec(args)
    data = ds.simulate(spec, args.n, args.seed)
    ds.write_csv(data, args.out)
    _emit(
        args,
        {"rows": data.n, "out": str(args.out), "seed": args.seed},
        lambda p: [f"wrote {data.n} rows to {args.out}"],
    )


def _cmd_summarize(args) -> None:
    data = ds.read_csv(args.csv)
    summary = ds.summarize(data, args.stage)
    payload = summary.to_dict()

    def text(p):
        lines = [f"stage {summary.stage}: {summary.n_selected}/{summary.n_rows} selected"]
        for name, cells in summary.proportions.items():
            lines.append(
                f"{name}: T=0 {_fmt_num(cells['t0'], args.round)}  "
                f"T=1 {_fmt_num(cells['t1'], args.round)}  "
                f"overall {_fmt_num(cells['overall'], args.round)}"
            )
        return lines

    _emit(args, payload, text)


def _cmd_serve(args) -> None:
    from .service import serve

    serve(port=args.port, static_dir=args.static)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selbounds",
        description="Bounds on selection bias for binary-outcome studies",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--round", type=int, default=None, metavar="N",
                       help="round printed numbers to N decimals")
        p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("sv-params", help="sensitivity parameters from a model spec")
    p.add_argument("--model", required=True, help="model spec JSON file")
    p.add_argument("--estimand", required=True)
    p.add_argument("--py1-t1-s1", type=float, required=True, dest="py1_t1_s1")
    p.add_argument("--py1-t0-s1", type=float, required=True, dest="py1_t0_s1")
    common(p)
    p.set_defaults(func=_cmd_sv_params)

    p = sub.add_parser("sv-bound", help="sensitivity-parameter bound")
    p.add_argument("--estimand", required=True)
    for flag in ("rr-uy-s1", "rr-tu-s1", "rr-uy-t1", "rr-uy-t0", "rr-su-t1", "rr-su-t0"):
        p.add_argument(f"--{flag}", type=float, default=None,
                       dest=flag.replace("-", "_"))
    p.add_argument("--py1-t1-s1", type=float, default=None, dest="py1_t1_s1")
    p.add_argument("--py1-t0-s1", type=float, default=None, dest="py1_t0_s1")
    common(p)
    p.set_defaults(func=_cmd_sv_bound)

    p = sub.add_parser("af-bound", help="assumption-free bound from data or summaries")
    p.add_argument("--estimand", required=True)
    p.add_argument("--csv", default=None, help="CSV file with 0/1 columns")
    p.add_argument("--outcome-col", default="mic_ceph", dest="outcome_col")
    p.add_argument("--treatment-col", default="zika", dest="treatment_col")
    p.add_argument("--selection-col", default=None, dest="selection_col")
    p.add_argument("--selection-prob", type=float, default=None, dest="selection_prob",
                   help="scalar selection probability (rows must be pre-selected)")
    p.add_argument("--reverse-treatment", action="store_true", dest="reverse_treatment",
                   help="recode the treatment column as 1-T before bounding")
    p.add_argument("--py1-t1-s1", type=float, default=None, dest="py1_t1_s1")
    p.add_argument("--py1-t0-s1", type=float, default=None, dest="py1_t0_s1")
    p.add_argument("--pt1-s1", type=float, default=None, dest="pt1_s1")
    p.add_argument("--ps1", type=float, default=None, dest="ps1")
    common(p)
    p.set_defaults(func=_cmd_af_bound)

    p = sub.add_parser("sharp", help="sharpness verdict for a subpopulation bound")
    p.add_argument("--bf-u", type=float, required=True, dest="bf_u")
    p.add_argument("--p0", type=float, required=True,
                   help="observed P(Y=1|T=0,I_S=1)")
    p.add_argument("--sv", type=float, default=None, help="SV bound value")
    p.add_argument("--af", type=float, default=None, help="AF bound value")
    p.add_argument("--estimand", default="rr-sub")
    common(p)
    p.set_defaults(func=_cmd_sharp)

    p = sub.add_parser("grid", help="sharpness classification over a parameter grid")
    p.add_argument("--uy-min", type=float, required=True, dest="uy_min")
    p.add_argument("--uy-max", type=float, required=True, dest="uy_max")
    p.add_argument("--uy-steps", type=int, required=True, dest="uy_steps")
    p.add_argument("--tu-min", type=float, required=True, dest="tu_min")
    p.add_argument("--tu-max", type=float, required=True, dest="tu_max")
    p.add_argument("--tu-steps", type=int, required=True, dest="tu_steps")
    p.add_argument("--p0", type=float, required=True)
    p.add_argument("--af", type=float, default=None)
    common(p)
    p.set_defaults(func=_cmd_grid)

    p = sub.add_parser("simulate", help="draw a synthetic register dataset")
    p.add_argument("--model", default=None, help="model spec JSON file")
    p.add_argument("--zika", action="store_true", help="use the bundled example model")
    p.add_argument("--selections", type=int, default=2, choices=(1, 2),
                   help="number of selection criteria for --zika")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output CSV path")
    common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("summarize", help="stagewise proportions of a dataset")
    p.add_argument("--csv", required=True)
    p.add_argument("--stage", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_summarize)

    p = sub.add_parser("serve", help="run the JSON service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static", default=None, help="directory of workbench assets")
    common(p)
    p.set_defaults(func=_cmd_serve)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on flag errors, which matches our contract
        return int(exc.code or 0)
    try:
        args.func(args)
    except (InvalidInputError, ParameterDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _VALIDATION_EXIT
    except SelBoundsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _COMPUTE_EXIT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _VALIDATION_EXIT
    return 0


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
