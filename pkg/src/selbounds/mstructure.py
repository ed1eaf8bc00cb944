"""Exactly enumerable discrete selection model and its derived quantities.

The model
---------
Two independent latent discrete variables V and U drive a binary treatment
T, a binary outcome Y and K >= 1 binary selection criteria S_1..S_K:

    P(T=1 | V=v)          = g(t0 + t1*v)
    P(Y=1 | T=t, U=u)     = g(y0 + yT*t + yU*u)
    P(S_k=1 | V,U,T)      = g(sk0 + skV*v + skU*u + skT*t)
    I_S = prod_k S_k

with g a logistic or probit link. The selection criteria are conditionally
independent given (V, U, T), so the joint selection probability is the
product of the per-criterion link evaluations. Everything downstream
(causal and observed estimands, sensitivity parameters) is computed by
exact enumeration over the finite (v, u, t) cells; nothing is simulated.

Treatment recoding is performed on the evaluated probability tables by
relabelling t <-> 1-t, never on the coefficients, because negating link
coefficients does not represent recoding exactly. Tables store both
P(T=1|v) and P(T=0|v) (evaluated as g(x) and g(-x)) so that reversal is an
exact swap and an exact involution.

All values are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

from .bounds import (
    EstimandKind,
    ObservedSummary,
    SensitivityParamsSub,
    SensitivityParamsTotal,
    bounding_factor,
)
from .errors import (
    DegenerateStratumError,
    InvalidInputError,
    ZeroProbabilityError,
)
from .links import LinkKind, link_eval

__all__ = [
    "DiscreteDist",
    "MStructureSpec",
    "ConditionalTables",
    "EstimandReport",
    "MStructureBoundResult",
    "evaluate_tables",
    "reverse_treatment",
    "enumerate_joint",
    "observed_summary",
    "selection_prevalence",
    "causal_estimands",
    "sv_params_total",
    "sv_params_sub",
    "sv_bound_parameters_m",
]

_PROB_SUM_TOL = 1e-9


@dataclass(frozen=True)
class DiscreteDist:
    """A finite discrete distribution given as (value, probability) pairs.

    Values are integer codes (a continuous variable must be discretized by
    the caller). Probabilities must be nonnegative and sum to 1 within
    1e-9; at least two distinct values are required.
    """

    entries: tuple[tuple[int, float], ...]

    def __init__(self, entries):
        norm = []
        for item in entries:
            try:
                value, prob = item
            except (TypeError, ValueError):
                raise InvalidInputError(
                    f"distribution entries must be (value, prob) pairs, got {item!r}"
                ) from None
            value = int(value)
            prob = float(prob)
            if not math.isfinite(prob) or prob < 0.0:
                raise InvalidInputError(
                    f"probability for value {value} must be >= 0, got {prob!r}"
                )
            norm.append((value, prob))
        if len(norm) < 2:
            raise InvalidInputError("a discrete distribution needs at least 2 entries")
        values = [v for v, _ in norm]
        if len(set(values)) != len(values):
            raise InvalidInputError(f"distribution values must be distinct, got {values}")
        total = sum(p for _, p in norm)
        if abs(total - 1.0) > _PROB_SUM_TOL:
            raise InvalidInputError(
                f"distribution probabilities must sum to 1 (got {total!r})"
            )
        object.__setattr__(self, "entries", tuple(norm))

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.entries)

    @property
    def probs(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.entries)


def _coef_tuple(raw, length: int, name: str) -> tuple[float, ...]:
    try:
        coefs = tuple(float(c) for c in raw)
    except (TypeError, ValueError):
        raise InvalidInputError(f"{name} must be a sequence of {length} numbers") from None
    if len(coefs) != length:
        raise InvalidInputError(
            f"{name} must have exactly {length} coefficients, got {len(coefs)}"
        )
    if not all(math.isfinite(c) for c in coefs):
        raise InvalidInputError(f"{name} coefficients must be finite, got {coefs}")
    return coefs


@dataclass(frozen=True)
class MStructureSpec:
    """A fully specified selection model.

    ``t_coef`` is (intercept, slope on V); ``y_coef`` is (intercept, slope
    on T, slope on U); each of the K >= 1 rows of ``s_coef`` is (intercept,
    slope on V, slope on U, slope on T).
    """

    v_dist: DiscreteDist
    u_dist: DiscreteDist
    t_coef: tuple[float, float]
    y_coef: tuple[float, float, float]
    s_coef: tuple[tuple[float, float, float, float], ...]
    link: LinkKind = LinkKind.LOGISTIC

    def __init__(self, v_dist, u_dist, t_coef, y_coef, s_coef, link=LinkKind.LOGISTIC):
        if not isinstance(v_dist, DiscreteDist):
            v_dist = DiscreteDist(v_dist)
        if not isinstance(u_dist, DiscreteDist):
            u_dist = DiscreteDist(u_dist)
        if isinstance(link, str):
            link = LinkKind.from_code(link)
        rows = tuple(s_coef) if not isinstance(s_coef, tuple) else s_coef
        if len(rows) < 1:
            raise InvalidInputError("at least one selection model row is required")
        object.__setattr__(self, "v_dist", v_dist)
        object.__setattr__(self, "u_dist", u_dist)
        object.__setattr__(self, "t_coef", _coef_tuple(t_coef, 2, "Tcoef"))
        object.__setattr__(self, "y_coef", _coef_tuple(y_coef, 3, "Ycoef"))
        object.__setattr__(
            self,
            "s_coef",
            tuple(_coef_tuple(row, 4, f"Scoef[{k}]") for k, row in enumerate(rows)),
        )
        object.__setattr__(self, "link", link)

    @property
    def n_selections(self) -> int:
        return len(self.s_coef)

    def to_dict(self) -> dict:
        return {
            "Vval": [[v, p] for v, p in self.v_dist.entries],
            "Uval": [[u, p] for u, p in self.u_dist.entries],
            "Tcoef": list(self.t_coef),
            "Ycoef": list(self.y_coef),
            "Scoef": [list(row) for row in self.s_coef],
            "Mmodel": self.link.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MStructureSpec":
        """Build a spec from the JSON model schema (Vval/Uval/Tcoef/Ycoef/Scoef/Mmodel)."""
        if not isinstance(data, dict):
            raise InvalidInputError("model spec must be a JSON object")
        missing = [k for k in ("Vval", "Uval", "Tcoef", "Ycoef", "Scoef") if k not in data]
        if missing:
            raise InvalidInputError(f"model spec is missing keys: {', '.join(missing)}")
        return cls(
            v_dist=data["Vval"],
            u_dist=data["Uval"],
            t_coef=data["Tcoef"],
            y_coef=data["Ycoef"],
            s_coef=[tuple(row) for row in data["Scoef"]],
            link=LinkKind.from_code(data.get("Mmodel", "L")),
        )

    @classmethod
    def from_json_file(cls, path) -> "MStructureSpec":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidInputError(f"cannot parse model file {path}: {exc}") from None
        return cls.from_dict(data)


@dataclass(frozen=True)
class ConditionalTables:
    """Evaluated conditional probability tables of a spec.

    ``p_t1``/``p_t0`` map v to P(T=1|v)/P(T=0|v); ``p_y1`` maps (t, u) to
    P(Y=1|t, u); ``p_sel`` maps (v, u, t) to the joint selection
    probability P(I_S=1|v, u, t). ``reversed_treatment`` records whether
    the treatment has been relabelled relative to the originating spec.
    """

    v_probs: dict
    u_probs: dict
    p_t1: dict
    p_t0: dict
    p_y1: dict
    p_sel: dict
    link: LinkKind
    reversed_treatment: bool = False

    @property
    def v_values(self) -> tuple:
        return tuple(self.v_probs)

    @property
    def u_values(self) -> tuple:
        return tuple(self.u_probs)


def evaluate_tables(spec: MStructureSpec) -> ConditionalTables:
    """Evaluate a spec into its conditional probability tables."""
    g = spec.link
    t0c, t1c = spec.t_coef
    y0c, ytc, yuc = spec.y_coef
    v_probs = {v: p for v, p in spec.v_dist.entries}
    u_probs = {u: p for u, p in spec.u_dist.entries}
    p_t1 = {v: link_eval(g, t0c + t1c * v) for v in v_probs}
    p_t0 = {v: link_eval(g, -(t0c + t1c * v)) for v in v_probs}
    p_y1 = {
        (t, u): link_eval(g, y0c + ytc * t + yuc * u)
        for t in (0, 1)
        for u in u_probs
    }
    p_sel = {}
    for v in v_probs:
        for u in u_probs:
            for t in (0, 1):
                prob = 1.0
                for s0c, svc, suc, stc in spec.s_coef:
                    prob *= link_eval(g, s0c + svc * v + suc * u + stc * t)
                p_sel[(v, u, t)] = prob
    return ConditionalTables(
        v_probs=v_probs,
        u_probs=u_probs,
        p_t1=p_t1,
        p_t0=p_t0,
        p_y1=p_y1,
        p_sel=p_sel,
        link=g,
        reversed_treatment=False,
    )


def reverse_treatment(tables: ConditionalTables) -> ConditionalTables:
    """Relabel t <-> 1-t in every table; an exact involution.

    Only references are swapped or rekeyed, so applying the operation twice
    restores the input bit for bit.
    """
    return replace(
        tables,
        p_t1=dict(tables.p_t0),
        p_t0=dict(tables.p_t1),
        p_y1={(1 - t, u): p for (t, u), p in tables.p_y1.items()},
        p_sel={(v, u, 1 - t): p for (v, u, t), p in tables.p_sel.items()},
        reversed_treatment=not tables.reversed_treatment,
    )


def _vut_cells(tables: ConditionalTables):
    """Yield ((v, u, t), weight, sel_prob) with weight = P(v)P(u)P(t|v)."""
    for v, pv in tables.v_probs.items():
        for u, pu in tables.u_probs.items():
            for t in (0, 1):
                pt = tables.p_t1[v] if t == 1 else tables.p_t0[v]
                yield (v, u, t), pv * pu * pt, tables.p_sel[(v, u, t)]


def enumerate_joint(tables: ConditionalTables) -> dict:
    """Explicit joint probability table over (V, U, T, Y, I_S).

    Returns a mapping (v, u, t, y, s) -> probability whose cells sum to 1
    up to floating-point round-off.
    """
    joint = {}
    for (v, u, t), w, q in _vut_cells(tables):
        py1 = tables.p_y1[(t, u)]
        for y, py in ((1, py1), (0, 1.0 - py1)):
            joint[(v, u, t, y, 1)] = w * py * q
            joint[(v, u, t, y, 0)] = w * py * (1.0 - q)
    return joint


def _u_given_ts(tables: ConditionalTables, t: int, s: int) -> dict:
    """P(U=u | T=t, I_S=s), raising on an empty stratum."""
    num = {u: 0.0 for u in tables.u_probs}
    for (v, u, tt), w, q in _vut_cells(tables):
        if tt == t:
            num[u] += w * (q if s == 1 else 1.0 - q)
    total = sum(num.values())
    if total <= 0.0:
        raise DegenerateStratumError(
            f"stratum (T={t}, I_S={s}) has probability 0"
        )
    return {u: x / total for u, x in num.items()}


def _u_given_s1(tables: ConditionalTables) -> dict:
    num = {u: 0.0 for u in tables.u_probs}
    for (v, u, t), w, q in _vut_cells(tables):
        num[u] += w * q
    total = sum(num.values())
    if total <= 0.0:
        raise DegenerateStratumError("stratum (I_S=1) has probability 0")
    return {u: x / total for u, x in num.items()}


def selection_prevalence(tables: ConditionalTables) -> float:
    """P(I_S=1) under the model."""
    return sum(w * q for _, w, q in _vut_cells(tables))


def _py1_given_t_s1(tables: ConditionalTables, t: int) -> float:
    pu = _u_given_ts(tables, t, 1)
    return sum(tables.p_y1[(t, u)] * p for u, p in pu.items())


def observed_summary(tables: ConditionalTables) -> ObservedSummary:
    """Population-exact observed summary implied by the model.

    The outcome conditionals use P(Y=1|T=t,I_S=1) = sum_u P(Y=1|t,u)
    P(U=u|T=t,I_S=1), which is exact because Y is independent of selection
    given (T, U) in this model.
    """
    ps1 = selection_prevalence(tables)
    if ps1 <= 0.0:
        raise DegenerateStratumError("stratum (I_S=1) has probability 0")
    pt1_s1 = (
        sum(w * q for (v, u, t), w, q in _vut_cells(tables) if t == 1) / ps1
    )
    return ObservedSummary(
        pY1_T1_S1=_py1_given_t_s1(tables, 1),
        pY1_T0_S1=_py1_given_t_s1(tables, 0),
        pT1_S1=pt1_s1,
        pS1=ps1,
    )


@dataclass(frozen=True)
class EstimandReport:
    """Causal and observed estimands of a model, on both scales.

    ``beta_r``/``beta_d`` are the total-population relative risk and risk
    difference of the potential outcomes; ``beta_rs``/``beta_ds`` are their
    analogues conditional on selection; ``beta_r_obs``/``beta_d_obs`` are
    the observed contrasts among the selected.
    """

    beta_r: float
    beta_d: float
    beta_rs: float
    beta_ds: float
    beta_r_obs: float
    beta_d_obs: float

    def causal_value(self, estimand: EstimandKind) -> float:
        return {
            EstimandKind.RR_TOT: self.beta_r,
            EstimandKind.RD_TOT: self.beta_d,
            EstimandKind.RR_SUB: self.beta_rs,
            EstimandKind.RD_SUB: self.beta_ds,
        }[estimand]

    def observed_value(self, estimand: EstimandKind) -> float:
        return self.beta_r_obs if estimand.is_relative else self.beta_d_obs

    def to_dict(self) -> dict:
        return {
            "beta_R": self.beta_r,
            "beta_D": self.beta_d,
            "beta_RS": self.beta_rs,
            "beta_DS": self.beta_ds,
            "beta_R_obs": self.beta_r_obs,
            "beta_D_obs": self.beta_d_obs,
        }


def causal_estimands(tables: ConditionalTables) -> EstimandReport:
    """Causal and observed estimands by exact enumeration.

    Total-population potential-outcome probabilities marginalize the
    outcome model over P(U); subpopulation ones use P(U | I_S=1) weights,
    valid because the potential outcomes are independent of selection
    given U in this model.
    """
    pu_marg = tables.u_probs
    py_t = {
        t: sum(tables.p_y1[(t, u)] * p for u, p in pu_marg.items()) for t in (0, 1)
    }
    pu_sel = _u_given_s1(tables)
    py_t_sel = {
        t: sum(tables.p_y1[(t, u)] * p for u, p in pu_sel.items()) for t in (0, 1)
    }
    if py_t[0] <= 0.0 or py_t_sel[0] <= 0.0:
        raise ZeroProbabilityError(
            "relative-risk estimands undefined: P(Y(0)=1) is 0"
        )
    obs1 = _py1_given_t_s1(tables, 1)
    obs0 = _py1_given_t_s1(tables, 0)
    if obs0 <= 0.0:
        raise ZeroProbabilityError(
            "observed relative risk undefined: P(Y=1|T=0,I_S=1) is 0"
        )
    return EstimandReport(
        beta_r=py_t[1] / py_t[0],
        beta_d=py_t[1] - py_t[0],
        beta_rs=py_t_sel[1] / py_t_sel[0],
        beta_ds=py_t_sel[1] - py_t_sel[0],
        beta_r_obs=obs1 / obs0,
        beta_d_obs=obs1 - obs0,
    )


def _ratio_spread(values) -> float:
    """max/min of positive values; raises if the minimum is 0."""
    hi = max(values)
    lo = min(values)
    if lo <= 0.0:
        raise ZeroProbabilityError(
            "sensitivity parameter undefined: an outcome probability is 0"
        )
    return hi / lo


def sv_params_total(tables: ConditionalTables) -> SensitivityParamsTotal:
    """Total-population sensitivity parameters by exact enumeration.

    RR_UY|T=t is the max/min spread of P(Y=1|T=t,U=u) over u. RR_SU|T=1
    compares P(U=u|T=1,I_S=1) against P(U=u|T=1,I_S=0); RR_SU|T=0 compares
    the unselected against the selected stratum.
    """
    rr_uy_t1 = _ratio_spread([tables.p_y1[(1, u)] for u in tables.u_probs])
    rr_uy_t0 = _ratio_spread([tables.p_y1[(0, u)] for u in tables.u_probs])
    u_t1_s1 = _u_given_ts(tables, 1, 1)
    u_t1_s0 = _u_given_ts(tables, 1, 0)
    u_t0_s1 = _u_given_ts(tables, 0, 1)
    u_t0_s0 = _u_given_ts(tables, 0, 0)
    rr_su_t1 = max(
        _safe_ratio(u_t1_s1[u], u_t1_s0[u], f"P(U={u}|T=1,I_S=0)")
        for u in tables.u_probs
    )
    rr_su_t0 = max(
        _safe_ratio(u_t0_s0[u], u_t0_s1[u], f"P(U={u}|T=0,I_S=1)")
        for u in tables.u_probs
    )
    return SensitivityParamsTotal(
        rr_uy_t1=rr_uy_t1, rr_uy_t0=rr_uy_t0, rr_su_t1=rr_su_t1, rr_su_t0=rr_su_t0
    )


def _safe_ratio(num: float, den: float, den_name: str) -> float:
    if den <= 0.0:
        if num <= 0.0:
            return 0.0  # empty level on both sides carries no information
        raise ZeroProbabilityError(f"sensitivity parameter undefined: {den_name} is 0")
    return num / den


def sv_params_sub(tables: ConditionalTables) -> SensitivityParamsSub:
    """Subpopulation sensitivity parameters by exact enumeration.

    Conditioning the outcome model on I_S=1 leaves P(Y=1|T,U) unchanged
    (selection is independent of Y given T and U), so RR_UY|S=1 is the
    larger of the two within-arm spreads. RR_TU|S=1 compares
    P(U=u|T=1,I_S=1) against P(U=u|T=0,I_S=1).
    """
    rr_uy = max(
        _ratio_spread([tables.p_y1[(t, u)] for u in tables.u_probs]) for t in (0, 1)
    )
    u_t1 = _u_given_ts(tables, 1, 1)
    u_t0 = _u_given_ts(tables, 0, 1)
    rr_tu = max(
        _safe_ratio(u_t1[u], u_t0[u], f"P(U={u}|T=0,I_S=1)") for u in tables.u_probs
    )
    return SensitivityParamsSub(rr_uy_s1=rr_uy, rr_tu_s1=rr_tu)


@dataclass(frozen=True)
class MStructureBoundResult:
    """Sensitivity parameters extracted from a model, oriented for positive bias."""

    estimand: EstimandKind
    params: SensitivityParamsTotal | SensitivityParamsSub
    bounding_factors: dict
    reversed_treatment: bool
    causal_value: float
    observed_value: float
    note: str | None = None

    def to_dict(self) -> dict:
        out = dict(self.bounding_factors)
        out.update(self.params.to_dict())
        out["reverse_treatment"] = self.reversed_treatment
        out["estimand"] = self.estimand.value
        out["causal_value"] = self.causal_value
        out["observed_value"] = self.observed_value
        if self.note:
            out["note"] = self.note
        return out


def sv_bound_parameters_m(
    spec: MStructureSpec,
    estimand: EstimandKind,
    pY1_T1_S1: float,
    pY1_T0_S1: float,
) -> MStructureBoundResult:
    """Sensitivity parameters for a model, with automatic treatment orientation.

    Compares the estimand-specific causal value implied by the model
    against the observed value formed from the two supplied probabilities
    P(Y=1|T=t,I_S=1). When the observed value undershoots the causal one
    (negative bias) the treatment is relabelled and the parameters are
    recomputed on the reversed tables; ties leave the coding untouched.
    The risk-difference estimands use the risk-difference contrast for this
    check, noted in the result.
    """
    p1 = float(pY1_T1_S1)
    p0 = float(pY1_T0_S1)
    if estimand.is_relative:
        for name, val in (("pY1_T1_S1", p1), ("pY1_T0_S1", p0)):
            if not (0.0 < val < 1.0):
                raise InvalidInputError(
                    f"{name} must lie strictly in (0, 1) for {estimand.value}",
                    field=name,
                )
    else:
        for name, val in (("pY1_T1_S1", p1), ("pY1_T0_S1", p0)):
            if not (0.0 <= val <= 1.0):
                raise InvalidInputError(
                    f"{name} must be a probability in [0, 1]", field=name
                )

    tables = evaluate_tables(spec)
    report = causal_estimands(tables)
    causal = report.causal_value(estimand)
    observed = (p1 / p0) if estimand.is_relative else (p1 - p0)
    contrast = observed / causal - 1.0 if estimand.is_relative else observed - causal

    note = None
    reversed_flag = False
    if contrast < 0.0:
        tables = reverse_treatment(tables)
        reversed_flag = True
    elif contrast == 0.0:
        note = "observed and causal estimands are equal: zero bias, no reversal"
    if not estimand.is_relative:
        extra = "reversal check used the risk-difference contrast"
        note = f"{note}; {extra}" if note else extra

    if estimand.is_subpopulation:
        params = sv_params_sub(tables)
        factors = {"BF_U": bounding_factor(params.rr_uy_s1, params.rr_tu_s1)}
    else:
        params = sv_params_total(tables)
        factors = {
            "BF_1": bounding_factor(params.rr_uy_t1, params.rr_su_t1),
            "BF_0": bounding_factor(params.rr_uy_t0, params.rr_su_t0),
        }
    return MStructureBoundResult(
        estimand=estimand,
        params=params,
        bounding_factors=factors,
        reversed_treatment=reversed_flag,
        causal_value=causal,
        observed_value=observed,
        note=note,
    )
