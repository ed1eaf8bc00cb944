"""Closed-form bounds on selection bias for binary-outcome studies.

Conventions
-----------
Binary treatment T and outcome Y; I_S is the selection indicator (1 = kept
by every selection criterion). Four estimands are supported, identified by
:class:`EstimandKind`:

- relative risk and risk difference in the total population, and
- the same contrasts in the selected subpopulation (conditional on I_S=1).

The selection bias is ``observed / causal`` on the relative-risk scale and
``observed - causal`` on the risk-difference scale. All bounds here bound
the bias from above and presume the treatment has been coded so the bias is
positive; recoding is the caller's responsibility and :func:`bias` warns
when a computed bias points the other way.

Two families of bounds are implemented:

- sensitivity-parameter (Smith-VanderWeele style, "SV") bounds driven by
  relative-risk summaries of the unmeasured structure, combined through the
  bounding factor a*b/(a+b-1); and
- assumption-free ("AF") bounds driven entirely by observed-data summaries,
  obtained by substituting the smallest possible causal contrast consistent
  with the data.

All functions are pure and safe for unrestricted concurrent use.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

from .errors import (
    InvalidInputError,
    ParameterDomainError,
    ZeroProbabilityError,
)

__all__ = [
    "EstimandKind",
    "SensitivityParamsTotal",
    "SensitivityParamsSub",
    "ObservedSummary",
    "BoundResult",
    "bounding_factor",
    "sv_bound",
    "af_bound",
    "bias",
]


class EstimandKind(enum.Enum):
    """The four supported causal estimands."""

    RR_TOT = "RR_tot"
    RD_TOT = "RD_tot"
    RR_SUB = "RR_sub"
    RD_SUB = "RD_sub"

    @property
    def is_relative(self) -> bool:
        return self in (EstimandKind.RR_TOT, EstimandKind.RR_SUB)

    @property
    def is_subpopulation(self) -> bool:
        return self in (EstimandKind.RR_SUB, EstimandKind.RD_SUB)

    @classmethod
    def from_code(cls, code: str) -> "EstimandKind":
        """Parse codes like ``"RR_sub"`` or ``"rr-sub"`` (case-insensitive)."""
        norm = str(code).strip().lower().replace("-", "_")
        for kind in cls:
            if kind.value.lower() == norm:
                return kind
        raise InvalidInputError(
            f"unknown estimand {code!r}; expected one of "
            "RR_tot, RD_tot, RR_sub, RD_sub",
            field="estimand",
        )


def _require_ge_one(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 1.0:
        raise ParameterDomainError(
            f"{name} must be a finite value >= 1, got {value!r}", field=name
        )
    return value


def _require_prob(value: float, name: str) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0) or not math.isfinite(value):
        raise InvalidInputError(
            f"{name} must be a probability in [0, 1], got {value!r}", field=name
        )
    return value


@dataclass(frozen=True)
class SensitivityParamsTotal:
    """Sensitivity parameters for the total-population bounds.

    ``rr_uy_t1``/``rr_uy_t0`` are the maximal relative risks of the outcome
    across levels of the unmeasured variable within each treatment arm;
    ``rr_su_t1``/``rr_su_t0`` are the maximal factors by which selection
    shifts the prevalence of a level of the unmeasured variable within each
    arm. All four are >= 1 by definition.
    """

    rr_uy_t1: float
    rr_uy_t0: float
    rr_su_t1: float
    rr_su_t0: float

    def __post_init__(self):
        for name in ("rr_uy_t1", "rr_uy_t0", "rr_su_t1", "rr_su_t0"):
            _require_ge_one(getattr(self, name), name)

    def to_dict(self) -> dict:
        return {
            "RR_UY|T=1": self.rr_uy_t1,
            "RR_UY|T=0": self.rr_uy_t0,
            "RR_SU|T=1": self.rr_su_t1,
            "RR_SU|T=0": self.rr_su_t0,
        }


@dataclass(frozen=True)
class SensitivityParamsSub:
    """Sensitivity parameters for the subpopulation bounds.

    ``rr_uy_s1`` is the maximal within-arm outcome relative risk across
    levels of the unmeasured variable among the selected; ``rr_tu_s1`` is
    the maximal factor by which treatment shifts the prevalence of a level
    of the unmeasured variable among the selected. Both are >= 1.
    """

    rr_uy_s1: float
    rr_tu_s1: float

    def __post_init__(self):
        _require_ge_one(self.rr_uy_s1, "rr_uy_s1")
        _require_ge_one(self.rr_tu_s1, "rr_tu_s1")

    def to_dict(self) -> dict:
        return {"RR_UY|S=1": self.rr_uy_s1, "RR_TU|S=1": self.rr_tu_s1}


@dataclass(frozen=True)
class ObservedSummary:
    """Observed-data probabilities feeding the bounds.

    ``pY1_T1_S1`` and ``pY1_T0_S1`` are P(Y=1 | T=t, I_S=1); ``pT1_S1`` is
    P(T=1 | I_S=1); ``pS1`` is the selection prevalence P(I_S=1). The last
    two are optional because the SV subpopulation bounds do not need them.
    """

    pY1_T1_S1: float
    pY1_T0_S1: float
    pT1_S1: float | None = None
    pS1: float | None = None

    def __post_init__(self):
        _require_prob(self.pY1_T1_S1, "pY1_T1_S1")
        _require_prob(self.pY1_T0_S1, "pY1_T0_S1")
        if self.pT1_S1 is not None:
            _require_prob(self.pT1_S1, "pT1_S1")
        if self.pS1 is not None:
            _require_prob(self.pS1, "pS1")

    def to_dict(self) -> dict:
        out = {"pY1_T1_S1": self.pY1_T1_S1, "pY1_T0_S1": self.pY1_T0_S1}
        if self.pT1_S1 is not None:
            out["pT1_S1"] = self.pT1_S1
        if self.pS1 is not None:
            out["pS1"] = self.pS1
        return out


@dataclass(frozen=True)
class BoundResult:
    """A computed bound: its value, its components, and an input echo."""

    estimand: EstimandKind
    value: float
    components: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "estimand": self.estimand.value,
            "value": self.value,
            "components": dict(self.components),
            "inputs": dict(self.inputs),
        }


def bounding_factor(rr_a: float, rr_b: float) -> float:
    """Combine two relative-risk parameters into a bounding factor.

    Returns a*b/(a+b-1), which lies in [1, min(a, b)] for a, b >= 1 and
    equals 1 exactly when either argument is 1.
    """
    a = _require_ge_one(rr_a, "rr_a")
    b = _require_ge_one(rr_b, "rr_b")
    if a == 1.0 or b == 1.0:
        return 1.0  # exact collapse at the boundary
    return a * b / (a + b - 1.0)


def _observed_pair(observed: ObservedSummary | None, estimand: EstimandKind):
    if observed is None:
        raise InvalidInputError(
            f"observed outcome probabilities are required for {estimand.value}",
            field="observed",
        )
    return observed.pY1_T1_S1, observed.pY1_T0_S1


def sv_bound(
    estimand: EstimandKind,
    params: SensitivityParamsTotal | SensitivityParamsSub,
    observed: ObservedSummary | None = None,
) -> BoundResult:
    """Sensitivity-parameter bound on the selection bias of ``estimand``.

    Total-population estimands take :class:`SensitivityParamsTotal` and
    combine the two per-arm bounding factors BF_1 and BF_0; subpopulation
    estimands take :class:`SensitivityParamsSub` and use the single factor
    BF_U. Risk-difference variants additionally require the observed
    success probabilities:

    - RR_tot: BF_1 * BF_0
    - RD_tot: BF_1 - P(Y=1|T=1,I_S=1)/BF_1 + P(Y=1|T=0,I_S=1) * BF_0
    - RR_sub: BF_U
    - RD_sub: max[P(Y=1|T=0,I_S=1)*(BF_U - 1),
                  P(Y=1|T=1,I_S=1)*(1 - 1/BF_U)]

    The treatment must already be coded so the bias is positive.
    """
    if estimand.is_subpopulation:
        if not isinstance(params, SensitivityParamsSub):
            raise InvalidInputError(
                f"{estimand.value} requires subpopulation sensitivity parameters",
                field="params",
            )
        bf_u = bounding_factor(params.rr_uy_s1, params.rr_tu_s1)
        components = {"BF_U": bf_u}
        if estimand is EstimandKind.RR_SUB:
            value = bf_u
        else:
            p1, p0 = _observed_pair(observed, estimand)
            value = max(p0 * (bf_u - 1.0), p1 * (1.0 - 1.0 / bf_u))
    else:
        if not isinstance(params, SensitivityParamsTotal):
            raise InvalidInputError(
                f"{estimand.value} requires total-population sensitivity parameters",
                field="params",
            )
        bf_1 = bounding_factor(params.rr_uy_t1, params.rr_su_t1)
        bf_0 = bounding_factor(params.rr_uy_t0, params.rr_su_t0)
        components = {"BF_1": bf_1, "BF_0": bf_0}
        if estimand is EstimandKind.RR_TOT:
            value = bf_1 * bf_0
        else:
            # risk-difference bound, with the leading factor entering
            # unscaled by the observed probability
            p1, p0 = _observed_pair(observed, estimand)
            value = bf_1 - p1 / bf_1 + p0 * bf_0

    inputs = {"params": params.to_dict()}
    if observed is not None:
        inputs["observed"] = observed.to_dict()
    return BoundResult(estimand=estimand, value=value, components=components, inputs=inputs)


def af_bound(estimand: EstimandKind, observed: ObservedSummary) -> BoundResult:
    """Assumption-free bound on the selection bias of ``estimand``.

    Uses only observed-data summaries: the bound substitutes the largest
    untreated success probability consistent with the data,

        P(Y(0)=1)^max = min[P(T=1|I_S=1)P(I_S=1) + 2 P(I_S=0)
                            + P(Y=1|T=0,I_S=1)P(T=0|I_S=1)P(I_S=1), 1]

    for the total population and

        P(Y(0)=1|I_S=1)^max = min[P(T=1|I_S=1)
                                  + P(Y=1|T=0,I_S=1)P(T=0|I_S=1), 1]

    for the subpopulation. ``pS1`` is required for the total-population
    rows only; the treatment must be pre-coded so the bias is positive.
    """
    p1 = observed.pY1_T1_S1
    p0 = observed.pY1_T0_S1
    if observed.pT1_S1 is None:
        raise InvalidInputError(
            f"pT1_S1 is required for the assumption-free {estimand.value} bound",
            field="pT1_S1",
        )
    pt1 = observed.pT1_S1
    if not estimand.is_subpopulation:
        if observed.pS1 is None:
            raise InvalidInputError(
                f"pS1 is required for the assumption-free {estimand.value} bound",
                field="pS1",
            )
        ps1 = observed.pS1
        y0_max = min(pt1 * ps1 + 2.0 * (1.0 - ps1) + p0 * (1.0 - pt1) * ps1, 1.0)
        if estimand is EstimandKind.RR_TOT:
            for name, val in (("pY1_T0_S1", p0), ("pT1_S1", pt1), ("pS1", ps1)):
                if val == 0.0:
                    raise ZeroProbabilityError(
                        f"assumption-free {estimand.value} bound undefined: {name} is 0"
                    )
            value = y0_max / (p0 * pt1 * ps1)
        else:
            value = y0_max + p1 * (1.0 - pt1 * ps1) - p0
        components = {"pY0_max": y0_max}
    else:
        y0_max = min(pt1 + p0 * (1.0 - pt1), 1.0)
        if estimand is EstimandKind.RR_SUB:
            for name, val in (("pY1_T0_S1", p0), ("pT1_S1", pt1)):
                if val == 0.0:
                    raise ZeroProbabilityError(
                        f"assumption-free {estimand.value} bound undefined: {name} is 0"
                    )
            value = y0_max / (p0 * pt1)
        else:
            value = y0_max + p1 * (1.0 - pt1) - p0
        components = {"pY0_S1_max": y0_max}

    return BoundResult(
        estimand=estimand,
        value=value,
        components=components,
        inputs={"observed": observed.to_dict()},
    )


def bias(estimand: EstimandKind, causal: float, observed: float) -> float:
    """Selection bias of ``estimand``: observed/causal (RR) or observed-causal (RD).

    Warns when the result indicates a negative bias (RR < 1 or RD < 0),
    since the bounds only apply after the treatment is recoded to make the
    bias positive.
    """
    causal = float(causal)
    observed = float(observed)
    if estimand.is_relative:
        if causal <= 0.0:
            raise ZeroProbabilityError(
                f"bias({estimand.value}) undefined: causal relative risk must be > 0"
            )
        value = observed / causal
        if value < 1.0:
            warnings.warn(
                f"bias({estimand.value}) = {value:.6g} < 1: reverse the treatment "
                "coding before applying the bounds",
                UserWarning,
                stacklevel=2,
            )
        return value
    value = observed - causal
    if value < 0.0:
        warnings.warn(
            f"bias({estimand.value}) = {value:.6g} < 0: reverse the treatment "
            "coding before applying the bounds",
            UserWarning,
            stacklevel=2,
        )
    return value
