"""Synthetic register simulation, data summaries and data-driven bounds.

The bundled example model mimics a register study of a rare exposure
(zika infection during pregnancy) and a rare outcome (microcephaly) with
two selection criteria: the pregnancy ends in birth, and the birth happens
in a public hospital. Column names follow that story:

    zika (T), mic_ceph (Y), birth (S1), hospital (S2), sel_ind (I_S),
    urban (V), ses (U)

Simulation draws rows independently in causal order V, U, T|V, Y|T,U,
S_k|V,U,T using a counter-based generator (Philox keyed by the seed; the
j-th uniform of row i sits at stream position i*d + j with d = 4 + K), so
identical (spec, n, seed) produce bit-identical datasets regardless of
how the block is evaluated. Non-selected rows are kept: a register sees
everyone, the selection indicator just marks the study population.

Summaries are exact integer counts divided once at the end, so proportions
carry no accumulated floating-point error.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .bounds import BoundResult, EstimandKind, ObservedSummary, af_bound
from .errors import DegenerateStratumError, InvalidInputError
from .links import LinkKind, link_eval
from .mstructure import MStructureSpec

__all__ = [
    "Dataset",
    "DataSummary",
    "zika_spec",
    "zika_learner",
    "ZIKA_LEARNER_SEED",
    "ZIKA_LEARNER_N",
    "simulate",
    "summarize",
    "af_bound_from_data",
    "read_csv",
    "write_csv",
]

# frozen draw for the bundled zika_learner fixture
ZIKA_LEARNER_SEED = 206
ZIKA_LEARNER_N = 5000

_CORE_COLUMNS = ("zika", "mic_ceph")
_TAIL_COLUMNS = ("sel_ind", "urban", "ses")


def zika_spec(selections: int = 2) -> MStructureSpec:
    """The bundled register model (logistic links throughout).

    ``selections`` keeps only the first 1 or 2 selection criteria, which
    is how the one-selection variants of the example are produced.
    """
    if selections not in (1, 2):
        raise InvalidInputError("selections must be 1 or 2", field="selections")
    s_rows = (
        (1.2, 0.0, 2.0, -4.0),   # birth: pushed down by infection, up by SES
        (2.2, 0.5, -2.75, 0.0),  # public hospital: pushed down by SES
    )
    return MStructureSpec(
        v_dist=[(1, 0.85), (0, 0.15)],
        u_dist=[(1, 0.5), (0, 0.5)],
        t_coef=(-6.2, 1.75),
        y_coef=(-5.2, 5.0, -1.0),
        s_coef=s_rows[:selections],
        link=LinkKind.LOGISTIC,
    )


def selection_column_names(k: int) -> tuple[str, ...]:
    """Column names for K selection criteria (zika names for the first two)."""
    base = ["birth", "hospital"]
    if k <= 2:
        return tuple(base[:k])
    return tuple(base + [f"s{i}" for i in range(3, k + 1)])


@dataclass(frozen=True)
class Dataset:
    """Column-oriented binary dataset with a fixed schema.

    ``selection_cols`` names the per-criterion indicator columns, in
    order; ``sel_ind`` must equal their rowwise product.
    """

    columns: dict = field(default_factory=dict)
    selection_cols: tuple[str, ...] = ("birth", "hospital")

    def __post_init__(self):
        lengths = {name: len(col) for name, col in self.columns.items()}
        if len(set(lengths.values())) > 1:
            raise InvalidInputError(f"column lengths differ: {lengths}")
        expected = self.column_order()
        missing = [c for c in expected if c not in self.columns]
        if missing:
            raise InvalidInputError(f"dataset is missing columns: {', '.join(missing)}")
        for name in (*_CORE_COLUMNS, *self.selection_cols, "sel_ind"):
            col = self.columns[name]
            if len(col) and not np.isin(col, (0, 1)).all():
                raise InvalidInputError(f"column {name!r} must be binary 0/1")
        prod = np.ones(self.n, dtype=np.int64)
        for name in self.selection_cols:
            prod = prod * np.asarray(self.columns[name])
        if not np.array_equal(prod, np.asarray(self.columns["sel_ind"])):
            raise InvalidInputError(
                "sel_ind must equal the rowwise product of the selection columns"
            )

    def column_order(self) -> tuple[str, ...]:
        return (*_CORE_COLUMNS, *self.selection_cols, *_TAIL_COLUMNS)

    @property
    def n(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        if self.selection_cols != other.selection_cols:
            return False
        if set(self.columns) != set(other.columns):
            return False
        return all(
            np.array_equal(self.columns[name], other.columns[name])
            for name in self.columns
        )

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise InvalidInputError(f"dataset has no column {name!r}") from None


def _draw_discrete(uniforms: np.ndarray, entries) -> np.ndarray:
    values = np.array([v for v, _ in entries], dtype=np.int64)
    cum = np.cumsum([p for _, p in entries])
    idx = np.searchsorted(cum, uniforms, side="right")
    return values[np.clip(idx, 0, len(values) - 1)]


def _link_vec(link: LinkKind, x: np.ndarray) -> np.ndarray:
    # vectorized counterpart of link_eval for the simulator hot path
    if link is LinkKind.LOGISTIC:
        out = np.empty_like(x, dtype=np.float64)
        pos = x >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
        ex = np.exp(x[~pos])
        out[~pos] = ex / (1.0 + ex)
        return out
    return np.array([link_eval(link, xi) for xi in np.asarray(x, dtype=np.float64)])


def simulate(spec: MStructureSpec, n: int, seed: int) -> Dataset:
    """Draw ``n`` independent rows from the model.

    Deterministic in (spec, n, seed); every row is retained together with
    its per-criterion selection indicators and their product.
    """
    n = int(n)
    if n < 0:
        raise InvalidInputError(f"n must be >= 0, got {n}", field="n")
    k = spec.n_selections
    d = 4 + k
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    uniforms = rng.random((n, d)) if n else np.zeros((0, d))

    v = _draw_discrete(uniforms[:, 0], spec.v_dist.entries)
    u = _draw_discrete(uniforms[:, 1], spec.u_dist.entries)
    t0c, t1c = spec.t_coef
    t = (uniforms[:, 2] < _link_vec(spec.link, t0c + t1c * v)).astype(np.int64)
    y0c, ytc, yuc = spec.y_coef
    y = (uniforms[:, 3] < _link_vec(spec.link, y0c + ytc * t + yuc * u)).astype(np.int64)

    sel_cols = {}
    names = selection_column_names(k)
    sel_ind = np.ones(n, dtype=np.int64)
    for j, (name, (s0c, svc, suc, stc)) in enumerate(zip(names, spec.s_coef)):
        s = (uniforms[:, 4 + j] < _link_vec(spec.link, s0c + svc * v + suc * u + stc * t)).astype(np.int64)
        sel_cols[name] = s
        sel_ind = sel_ind * s

    columns = {"zika": t, "mic_ceph": y}
    columns.update(sel_cols)
    columns.update({"sel_ind": sel_ind, "urban": v, "ses": u})
    return Dataset(columns=columns, selection_cols=names)


def _stage_mask(data: Dataset, stage: int) -> np.ndarray:
    if stage < 0 or stage > len(data.selection_cols):
        raise InvalidInputError(
            f"stage must be between 0 and {len(data.selection_cols)}, got {stage}",
            field="stage",
        )
    mask = np.ones(data.n, dtype=bool)
    for name in data.selection_cols[:stage]:
        mask &= np.asarray(data.columns[name]) == 1
    return mask


def _exact_prop(values: np.ndarray, mask: np.ndarray, what: str) -> float:
    count = int(mask.sum())
    if count == 0:
        raise DegenerateStratumError(f"stratum {what} is empty")
    return int(np.asarray(values)[mask].sum()) / count


@dataclass(frozen=True)
class DataSummary:
    """Stagewise proportions plus the observed summary for the bounds.

    ``proportions`` maps variable name -> {"t0", "t1", "overall"} within
    the stage's selected subset.
    """

    stage: int
    n_rows: int
    n_selected: int
    proportions: dict
    observed: ObservedSummary

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "n_rows": self.n_rows,
            "n_selected": self.n_selected,
            "proportions": {k: dict(v) for k, v in self.proportions.items()},
            "observed": self.observed.to_dict(),
        }


def summarize(data: Dataset, stage: int) -> DataSummary:
    """Exact-count proportions after the first ``stage`` selections.

    ``stage`` 0 summarizes the whole register (selection prevalence 1 by
    convention). Raises :class:`DegenerateStratumError`, naming the
    stratum, when a needed cell is empty.
    """
    mask = _stage_mask(data, stage)
    t = np.asarray(data.columns["zika"])
    y = np.asarray(data.columns["mic_ceph"])
    n_sel = int(mask.sum())
    if data.n == 0:
        raise DegenerateStratumError("dataset is empty")

    props = {}
    for name in ("mic_ceph", "urban", "ses"):
        vals = np.asarray(data.columns[name]) == 1
        props[name] = {
            "t0": _exact_prop(vals, mask & (t == 0), f"(T=0, stage {stage})"),
            "t1": _exact_prop(vals, mask & (t == 1), f"(T=1, stage {stage})"),
            "overall": _exact_prop(vals, mask, f"(stage {stage})"),
        }
    observed = ObservedSummary(
        pY1_T1_S1=props["mic_ceph"]["t1"],
        pY1_T0_S1=props["mic_ceph"]["t0"],
        pT1_S1=_exact_prop(t == 1, mask, f"(stage {stage})"),
        pS1=n_sel / data.n if stage > 0 else 1.0,
    )
    return DataSummary(
        stage=stage,
        n_rows=data.n,
        n_selected=n_sel,
        proportions=props,
        observed=observed,
    )


def _as_binary(values, name: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional", field=name)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise InvalidInputError(f"{name} must contain only 0/1 values", field=name)
    return arr.astype(np.int64)


def af_bound_from_data(
    estimand: EstimandKind,
    outcome,
    treatment,
    selection,
) -> BoundResult:
    """Assumption-free bound computed from raw vectors.

    ``selection`` is either a 0/1 indicator vector aligned with the other
    two, or a scalar selection probability, in which case ``outcome`` and
    ``treatment`` must already be restricted to the selected rows. The
    treatment must be pre-coded by the caller so the bias is positive.
    """
    outcome = _as_binary(outcome, "outcome")
    treatment = _as_binary(treatment, "treatment")
    if outcome.shape != treatment.shape:
        raise InvalidInputError("outcome and treatment must have equal length")

    if np.isscalar(selection) or getattr(selection, "ndim", None) == 0:
        p_s1 = float(selection)
        if not (0.0 <= p_s1 <= 1.0):
            raise InvalidInputError(
                f"scalar selection probability must be in [0, 1], got {p_s1!r}",
                field="selection",
            )
        sel_outcome, sel_treatment = outcome, treatment
    else:
        sel = _as_binary(selection, "selection")
        if sel.shape != outcome.shape:
            raise InvalidInputError("selection must have the same length as the data")
        keep = sel == 1
        if not keep.any():
            raise DegenerateStratumError("no rows are selected")
        # indicator and scalar variants agree exactly: both reduce to
        # integer counts over the selected subset
        p_s1 = int(keep.sum()) / sel.size
        sel_outcome, sel_treatment = outcome[keep], treatment[keep]

    if sel_outcome.size == 0:
        raise DegenerateStratumError("no rows are selected")
    t1 = sel_treatment == 1
    t0 = ~t1
    if not t1.any():
        raise DegenerateStratumError("stratum (T=1, selected) is empty")
    if not t0.any():
        raise DegenerateStratumError("stratum (T=0, selected) is empty")
    observed = ObservedSummary(
        pY1_T1_S1=int(sel_outcome[t1].sum()) / int(t1.sum()),
        pY1_T0_S1=int(sel_outcome[t0].sum()) / int(t0.sum()),
        pT1_S1=int(t1.sum()) / sel_outcome.size,
        pS1=p_s1,
    )
    return af_bound(estimand, observed)


def write_csv(data: Dataset, path) -> None:
    """Write the dataset as UTF-8 comma-separated values with a header."""
    order = data.column_order()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(order)
        for row in zip(*(np.asarray(data.columns[c]) for c in order)):
            writer.writerow([int(x) for x in row])


def read_csv(path) -> Dataset:
    """Read a dataset written by :func:`write_csv` (lossless round-trip).

    The header must contain the canonical columns; selection columns are
    recognized by name. Every value must be 0 or 1; a malformed cell
    raises :class:`InvalidInputError` with its line number.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InvalidInputError(f"{path}: file is empty, expected a header row") from None
        header = [h.strip() for h in header]
        known_tail = set(_CORE_COLUMNS) | set(_TAIL_COLUMNS)
        sel_names = tuple(h for h in header if h not in known_tail)
        cols = {name: [] for name in header}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise InvalidInputError(
                    f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}"
                )
            for name, cell in zip(header, row):
                cell = cell.strip()
                if cell not in ("0", "1"):
                    raise InvalidInputError(
                        f"{path}: line {lineno}: column {name!r} must be 0 or 1, "
                        f"got {cell!r}"
                    )
                cols[name].append(int(cell))
    columns = {name: np.asarray(vals, dtype=np.int64) for name, vals in cols.items()}
    return Dataset(columns=columns, selection_cols=sel_names)


def read_csv_columns(path, wanted: dict, float_roles=()) -> dict:
    """Read selected columns from an arbitrary-header CSV.

    ``wanted`` maps a role name (e.g. "outcome") to the CSV column to pull.
    Values must be 0/1 except for roles listed in ``float_roles``, which
    accept probabilities in [0, 1] (a constant probability column stands
    in for a scalar selection probability). Used by the CLI and service
    for user-supplied analysis files.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return _columns_from_reader(csv.reader(fh), wanted, str(path), set(float_roles))


def read_csv_columns_text(text: str, wanted: dict, float_roles=()) -> dict:
    """Same as :func:`read_csv_columns` for in-memory CSV text."""
    import io

    return _columns_from_reader(csv.reader(io.StringIO(text)), wanted, "<csv>", set(float_roles))


def _columns_from_reader(reader, wanted: dict, where: str, float_roles) -> dict:
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise InvalidInputError(f"{where}: file is empty, expected a header row") from None
    index = {}
    for role, col in wanted.items():
        if col not in header:
            raise InvalidInputError(
                f"{where}: column {col!r} not found in header {header}", field=role
            )
        index[role] = header.index(col)
    out = {role: [] for role in wanted}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        for role, idx in index.items():
            if idx >= len(row):
                raise InvalidInputError(f"{where}: line {lineno}: row too short")
            cell = row[idx].strip()
            if cell in ("0", "1"):
                out[role].append(int(cell))
                continue
            if role in float_roles:
                try:
                    value = float(cell)
                except ValueError:
                    value = None
                if value is not None and 0.0 <= value <= 1.0:
                    out[role].append(value)
                    continue
                raise InvalidInputError(
                    f"{where}: line {lineno}: column {wanted[role]!r} must be 0/1 or a "
                    f"probability, got {cell!r}"
                )
            raise InvalidInputError(
                f"{where}: line {lineno}: column {wanted[role]!r} must be 0 or 1, "
                f"got {cell!r}"
            )
    arrays = {}
    for role, vals in out.items():
        if role in float_roles and any(not float(v).is_integer() for v in vals):
            arrays[role] = np.asarray(vals, dtype=np.float64)
        else:
            arrays[role] = np.asarray(vals, dtype=np.int64)
    return arrays


def selection_from_column(values) -> "np.ndarray | float":
    """Interpret a selection column: 0/1 entries form an indicator, a
    constant probability column collapses to its scalar (the rows are then
    the pre-selected subpopulation)."""
    arr = np.asarray(values)
    if arr.size == 0:
        raise InvalidInputError("selection column is empty", field="selection")
    if np.isin(arr, (0, 1)).all():
        return arr.astype(np.int64)
    first = float(arr[0])
    if np.all(arr == arr[0]) and 0.0 <= first <= 1.0:
        return first
    raise InvalidInputError(
        "selection column must be 0/1 indicators or a single constant probability",
        field="selection",
    )


def zika_learner() -> Dataset:
    """The frozen bundled dataset (5000 rows, two selections, fixed seed)."""
    from importlib import resources

    ref = resources.files("selbounds").joinpath("data/zika_learner.csv")
    with resources.as_file(ref) as path:
        return read_csv(path)
