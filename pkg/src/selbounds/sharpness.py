"""Sharpness classification for subpopulation sensitivity bounds.

A bound is *sharp* when some distribution consistent with the stated
sensitivity parameters makes the bias equal to the bound. For the selected
subpopulation the bound BF_U is sharp whenever

    BF_U <= 1 / P(Y=1 | T=0, I_S=1),

and it is certainly *not* sharp when it exceeds the assumption-free bound
(the largest bias the data allow). Between those two thresholds the
classification is inconclusive. Total-population bounds are generally not
attainable, so requesting their sharpness is a typed error rather than a
silent verdict.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .bounds import EstimandKind, bounding_factor
from .errors import ParameterDomainError, UnsupportedEstimandError

__all__ = ["Verdict", "SharpnessVerdict", "SharpnessGrid", "sv_bound_sharp", "sharpness_grid"]


class Verdict(enum.Enum):
    SHARP = "sharp"
    INCONCLUSIVE = "inconclusive"
    NOT_SHARP = "not_sharp"

    @property
    def message(self) -> str:
        return {
            Verdict.SHARP: "SV bound is sharp.",
            Verdict.INCONCLUSIVE: "SV bound is inconclusive.",
            Verdict.NOT_SHARP: "SV bound is not sharp.",
        }[self]


@dataclass(frozen=True)
class SharpnessVerdict:
    """Classification of a subpopulation bound, with its thresholds echoed."""

    verdict: Verdict
    reason: str
    sharp_limit: float
    sv_bound: float | None = None
    af_bound: float | None = None

    def to_dict(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "message": self.verdict.message,
            "reason": self.reason,
            "sharp_limit": self.sharp_limit,
        }
        if self.sv_bound is not None:
            out["sv_bound"] = self.sv_bound
        if self.af_bound is not None:
            out["af_bound"] = self.af_bound
        return out


def sv_bound_sharp(
    bf_u: float,
    pY1_T0_S1: float,
    sv_bound: float | None = None,
    af_bound: float | None = None,
    estimand: EstimandKind = EstimandKind.RR_SUB,
) -> SharpnessVerdict:
    """Classify a subpopulation bound as sharp, inconclusive or not sharp.

    ``sv_bound`` and ``af_bound`` are optional; they are only needed to
    detect the not-sharp region, so with either missing the result is never
    ``NOT_SHARP``. The boundary BF_U == 1/p is classified sharp; the
    boundary sv == af stays inconclusive (not-sharp requires strictly
    exceeding the assumption-free bound).
    """
    if not estimand.is_subpopulation:
        raise UnsupportedEstimandError(
            f"sharpness is only defined for subpopulation estimands; total-population "
            f"bounds are generally unattainable ({estimand.value} requested)",
            field="estimand",
        )
    bf_u = float(bf_u)
    if bf_u < 1.0:
        raise ParameterDomainError(f"BF_U must be >= 1, got {bf_u!r}", field="bf_u")
    p0 = float(pY1_T0_S1)
    if not (0.0 < p0 <= 1.0):
        raise ParameterDomainError(
            f"pY1_T0_S1 must lie in (0, 1], got {p0!r}", field="pY1_T0_S1"
        )
    limit = 1.0 / p0
    if bf_u <= limit:
        verdict = Verdict.SHARP
        reason = f"BF_U = {bf_u:.6g} <= 1/pY1_T0_S1 = {limit:.6g}"
    elif sv_bound is not None and af_bound is not None and sv_bound > af_bound:
        verdict = Verdict.NOT_SHARP
        reason = f"SV bound {sv_bound:.6g} exceeds AF bound {af_bound:.6g}"
    elif sv_bound is not None and af_bound is not None:
        verdict = Verdict.INCONCLUSIVE
        reason = (
            f"BF_U = {bf_u:.6g} exceeds the sharp limit {limit:.6g} but the SV bound "
            f"does not exceed the AF bound {af_bound:.6g}"
        )
    else:
        verdict = Verdict.INCONCLUSIVE
        reason = (
            f"BF_U = {bf_u:.6g} exceeds the sharp limit {limit:.6g}; supply both the "
            "SV and AF bounds to check for non-sharpness"
        )
    return SharpnessVerdict(
        verdict=verdict,
        reason=reason,
        sharp_limit=limit,
        sv_bound=sv_bound,
        af_bound=af_bound,
    )


@dataclass(frozen=True)
class SharpnessGrid:
    """Bound values and verdicts over a grid of sensitivity parameters.

    Rows follow ``uy_axis`` and columns follow ``tu_axis`` (row-major).
    """

    uy_axis: tuple[float, ...]
    tu_axis: tuple[float, ...]
    bounds: tuple[tuple[float, ...], ...]
    verdicts: tuple[tuple[Verdict, ...], ...]
    sharp_limit: float
    af_bound: float | None = None

    def to_dict(self) -> dict:
        return {
            "uy_axis": list(self.uy_axis),
            "tu_axis": list(self.tu_axis),
            "bounds": [list(row) for row in self.bounds],
            "verdicts": [[v.value for v in row] for row in self.verdicts],
            "sharp_limit": self.sharp_limit,
            "af_bound": self.af_bound,
        }


def _validate_axis(values, name: str) -> tuple[float, ...]:
    axis = tuple(float(x) for x in values)
    if not axis:
        raise ParameterDomainError(f"{name} must not be empty", field=name)
    if any(x < 1.0 for x in axis):
        raise ParameterDomainError(f"{name} values must all be >= 1", field=name)
    if any(b <= a for a, b in zip(axis, axis[1:])):
        raise ParameterDomainError(f"{name} values must be strictly increasing", field=name)
    return axis


def sharpness_grid(
    uy_axis,
    tu_axis,
    pY1_T0_S1: float,
    af_bound: float | None = None,
) -> SharpnessGrid:
    """Classify the subpopulation bound over a parameter grid.

    Each cell computes BF_U for its (RR_UY|S=1, RR_TU|S=1) pair; the
    subpopulation relative-risk bound equals BF_U, so each cell is
    classified exactly as a pointwise :func:`sv_bound_sharp` call. Cells
    are independent, so the result does not depend on traversal order.
    """
    uy = _validate_axis(uy_axis, "uy_axis")
    tu = _validate_axis(tu_axis, "tu_axis")
    p0 = float(pY1_T0_S1)
    if not (0.0 < p0 <= 1.0):
        raise ParameterDomainError(
            f"pY1_T0_S1 must lie in (0, 1], got {p0!r}", field="pY1_T0_S1"
        )
    bounds = []
    verdicts = []
    for a in uy:
        row_b = []
        row_v = []
        for b in tu:
            bf = bounding_factor(a, b)
            cell = sv_bound_sharp(bf, p0, sv_bound=bf, af_bound=af_bound)
            row_b.append(bf)
            row_v.append(cell.verdict)
        bounds.append(tuple(row_b))
        verdicts.append(tuple(row_v))
    return SharpnessGrid(
        uy_axis=uy,
        tu_axis=tu,
        bounds=tuple(bounds),
        verdicts=tuple(verdicts),
        sharp_limit=1.0 / p0,
        af_bound=af_bound,
    )
