"""Constructive distributions that realize prescribed sensitivity parameters.

These constructions serve two purposes. First, they witness variation
independence: for any targets strictly above 1 and any interior observed
margins there is a joint distribution with a three-level unmeasured
variable whose sensitivity parameters hit the targets exactly while
reproducing the observed margins. Second, they witness attainment: when
the bounding factor does not exceed the reciprocal of the control-arm
success probability, a two-level construction makes the subpopulation bias
equal to its bound. Both are exercised heavily by the test suite as
independent oracles for the closed-form bounds.

Construction sketch (total population)
--------------------------------------
Write R1 = RR_SU|T=1, R0 = RR_SU|T=0, D = R0*R1 - 1 and pick a small
epsilon > 0. The unmeasured variable U takes values {0, 1, 2} with

    P(U=0|T=0,I_S=0) = (1-e) R0 (R1-1) / D    P(U=0|T=0,I_S=1) = (1-e)(R1-1)/D
    P(U=1|T=0,I_S=0) = (1-e) (R0-1) / D       P(U=1|T=0,I_S=1) = (1-e)R1(R0-1)/D
    P(U=2|T=0,I_S=.) = e

and the mirrored table for T=1 (selected and unselected swapped). The
outcome probabilities then tilt the observed P(Y=1|T=t,I_S=1) up and down
by the RR_UY targets in such a way that the selected-stratum margins are
reproduced identically in epsilon. Epsilon is found by halving from 1e-3
until every constructed probability lies inside [1e-12, 1 - 1e-12]; after
60 halvings the construction fails with :class:`ConstructionError`.

The subpopulation construction is analogous but conditions everything on
I_S=1; the attainment construction uses a binary U with
P(U=1|T=1,I_S=1) = 1 and P(U=1|T=0,I_S=1) = 1/RR_TU|S=1.

Observed margins
----------------
The "observed data distribution" enters through its identifiable
components: P(T), P(I_S|T) and P(Y=1|T,I_S=1) for the total population,
and P(T|I_S=1), P(Y=1|T,I_S=1) for the subpopulation. The constructions
reproduce exactly these components; the unselected-stratum outcome
probabilities P(Y=1|T,I_S=0) are a by-product of the construction and are
not free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bounds import SensitivityParamsSub, SensitivityParamsTotal, bounding_factor
from .errors import (
    ConstructionError,
    DegenerateStratumError,
    ParameterDomainError,
    SharpnessConditionError,
    ZeroProbabilityError,
)

__all__ = [
    "ObservedTotal",
    "ObservedSub",
    "JointDistTotal",
    "JointDistSub",
    "params_from_joint_total",
    "params_from_joint_sub",
    "construct_vi_total",
    "construct_vi_sub",
    "construct_sharp",
    "bias_from_joint_sub",
]

_EPS_START = 1e-3
_EPS_HALVINGS = 60
_PROB_FLOOR = 1e-12


def _require_interior(value: float, name: str) -> float:
    value = float(value)
    if not (0.0 < value < 1.0):
        raise ParameterDomainError(
            f"{name} must lie strictly in (0, 1), got {value!r}", field=name
        )
    return value


@dataclass(frozen=True)
class ObservedTotal:
    """Identifiable components of P(Y, T, I_S), all strictly interior."""

    p_t1: float
    p_s1_t1: float
    p_s1_t0: float
    p_y1_t1_s1: float
    p_y1_t0_s1: float

    def __post_init__(self):
        for name in ("p_t1", "p_s1_t1", "p_s1_t0", "p_y1_t1_s1", "p_y1_t0_s1"):
            _require_interior(getattr(self, name), name)


@dataclass(frozen=True)
class ObservedSub:
    """Identifiable components of P(Y, T | I_S=1), all strictly interior."""

    p_t1_s1: float
    p_y1_t1_s1: float
    p_y1_t0_s1: float

    def __post_init__(self):
        for name in ("p_t1_s1", "p_y1_t1_s1", "p_y1_t0_s1"):
            _require_interior(getattr(self, name), name)


@dataclass(frozen=True)
class JointDistTotal:
    """Joint distribution over (Y, T, U, I_S) in factored form.

    ``p_u_given_ts`` maps (t, s) to the U distribution in that stratum;
    ``p_y1_given_tu`` maps (t, u) to P(Y=1|T=t,U=u). Y is independent of
    I_S given (T, U) by construction.
    """

    p_t1: float
    p_s1_given_t: dict
    p_u_given_ts: dict
    p_y1_given_tu: dict
    u_support: tuple[int, ...]
    epsilon: float

    def cells(self) -> dict:
        """Explicit table (y, t, u, s) -> probability, summing to 1."""
        out = {}
        for t in (0, 1):
            pt = self.p_t1 if t == 1 else 1.0 - self.p_t1
            for s in (0, 1):
                ps = self.p_s1_given_t[t] if s == 1 else 1.0 - self.p_s1_given_t[t]
                for u in self.u_support:
                    pu = self.p_u_given_ts[(t, s)][u]
                    py1 = self.p_y1_given_tu[(t, u)]
                    out[(1, t, u, s)] = pt * ps * pu * py1
                    out[(0, t, u, s)] = pt * ps * pu * (1.0 - py1)
        return out

    def to_dict(self) -> dict:
        """JSON-ready form, for fixture storage and counterexample reports."""
        return {
            "p_t1": self.p_t1,
            "p_s1_given_t": {str(t): p for t, p in self.p_s1_given_t.items()},
            "p_u_given_ts": {
                f"t={t},s={s}": {str(u): p for u, p in dist.items()}
                for (t, s), dist in self.p_u_given_ts.items()
            },
            "p_y1_given_tu": {
                f"t={t},u={u}": p for (t, u), p in self.p_y1_given_tu.items()
            },
            "u_support": list(self.u_support),
            "epsilon": self.epsilon,
        }

    def observed_margins(self) -> ObservedTotal:
        """Identifiable components recovered by marginalizing the cell table."""
        cells = self.cells()
        pt1 = sum(p for (y, t, u, s), p in cells.items() if t == 1)
        p_ts = {
            (t, s): sum(p for (y, tt, u, ss), p in cells.items() if tt == t and ss == s)
            for t in (0, 1)
            for s in (0, 1)
        }
        py1_ts1 = {}
        for t in (0, 1):
            denom = p_ts[(t, 1)]
            if denom <= 0.0:
                raise DegenerateStratumError(f"stratum (T={t}, I_S=1) has probability 0")
            py1_ts1[t] = (
                sum(p for (y, tt, u, s), p in cells.items() if y == 1 and tt == t and s == 1)
                / denom
            )
        return ObservedTotal(
            p_t1=pt1,
            p_s1_t1=p_ts[(1, 1)] / (p_ts[(1, 1)] + p_ts[(1, 0)]),
            p_s1_t0=p_ts[(0, 1)] / (p_ts[(0, 1)] + p_ts[(0, 0)]),
            p_y1_t1_s1=py1_ts1[1],
            p_y1_t0_s1=py1_ts1[0],
        )


@dataclass(frozen=True)
class JointDistSub:
    """Distribution over (Y, T, U) conditional on I_S=1, in factored form."""

    p_t1_s1: float
    p_u_given_t: dict
    p_y1_given_tu: dict
    u_support: tuple[int, ...]
    epsilon: float | None = None

    def cells(self) -> dict:
        """Explicit table (y, t, u) -> probability given I_S=1, summing to 1."""
        out = {}
        for t in (0, 1):
            pt = self.p_t1_s1 if t == 1 else 1.0 - self.p_t1_s1
            for u in self.u_support:
                pu = self.p_u_given_t[t][u]
                py1 = self.p_y1_given_tu[(t, u)]
                out[(1, t, u)] = pt * pu * py1
                out[(0, t, u)] = pt * pu * (1.0 - py1)
        return out

    def to_dict(self) -> dict:
        """JSON-ready form, for fixture storage and counterexample reports."""
        return {
            "p_t1_s1": self.p_t1_s1,
            "p_u_given_t": {
                str(t): {str(u): p for u, p in dist.items()}
                for t, dist in self.p_u_given_t.items()
            },
            "p_y1_given_tu": {
                f"t={t},u={u}": p for (t, u), p in self.p_y1_given_tu.items()
            },
            "u_support": list(self.u_support),
            "epsilon": self.epsilon,
        }

    def p_u_marginal(self) -> dict:
        """P(U=u | I_S=1) by total probability over the treatment arms."""
        pt1 = self.p_t1_s1
        return {
            u: pt1 * self.p_u_given_t[1][u] + (1.0 - pt1) * self.p_u_given_t[0][u]
            for u in self.u_support
        }

    def observed_margins(self) -> ObservedSub:
        return ObservedSub(
            p_t1_s1=self.p_t1_s1,
            p_y1_t1_s1=self._py1_obs(1),
            p_y1_t0_s1=self._py1_obs(0),
        )

    def _py1_obs(self, t: int) -> float:
        return sum(
            self.p_y1_given_tu[(t, u)] * self.p_u_given_t[t][u] for u in self.u_support
        )


def params_from_joint_total(joint: JointDistTotal) -> SensitivityParamsTotal:
    """Literal evaluation of the total-population parameter definitions."""
    uy = {}
    for t in (0, 1):
        vals = [joint.p_y1_given_tu[(t, u)] for u in joint.u_support]
        if min(vals) <= 0.0:
            raise ZeroProbabilityError(
                f"RR_UY|T={t} undefined: min_u P(Y=1|T={t},U=u) is 0"
            )
        uy[t] = max(vals) / min(vals)
    su = {}
    for t, s_num, s_den in ((1, 1, 0), (0, 0, 1)):
        num = joint.p_u_given_ts[(t, s_num)]
        den = joint.p_u_given_ts[(t, s_den)]
        ratios = []
        for u in joint.u_support:
            if den[u] <= 0.0:
                if num[u] <= 0.0:
                    continue
                raise DegenerateStratumError(
                    f"P(U={u}|T={t},I_S={s_den}) is 0 with positive numerator"
                )
            ratios.append(num[u] / den[u])
        if not ratios:
            raise DegenerateStratumError(f"stratum (T={t}) has no populated U levels")
        su[t] = max(ratios)
    return SensitivityParamsTotal(
        rr_uy_t1=uy[1], rr_uy_t0=uy[0], rr_su_t1=su[1], rr_su_t0=su[0]
    )


def params_from_joint_sub(joint: JointDistSub) -> SensitivityParamsSub:
    """Literal evaluation of the subpopulation parameter definitions."""
    spreads = []
    for t in (0, 1):
        vals = [joint.p_y1_given_tu[(t, u)] for u in joint.u_support]
        if min(vals) <= 0.0:
            raise ZeroProbabilityError(
                f"RR_UY|S=1 undefined: min_u P(Y=1|T={t},U=u,I_S=1) is 0"
            )
        spreads.append(max(vals) / min(vals))
    ratios = []
    for u in joint.u_support:
        den = joint.p_u_given_t[0][u]
        num = joint.p_u_given_t[1][u]
        if den <= 0.0:
            if num <= 0.0:
                continue
            raise DegenerateStratumError(
                f"P(U={u}|T=0,I_S=1) is 0 with positive numerator"
            )
        ratios.append(num / den)
    if not ratios:
        raise DegenerateStratumError("no populated U levels shared by both arms")
    return SensitivityParamsSub(rr_uy_s1=max(spreads), rr_tu_s1=max(ratios))


def _require_above_one(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 1.0:
        raise ParameterDomainError(
            f"{name} must be strictly above 1 (boundary targets are excluded), "
            f"got {value!r}",
            field=name,
        )
    return value


def _eps_search(build, what: str):
    """Halve epsilon from the starting value until ``build`` yields a table
    whose probabilities all lie in [1e-12, 1-1e-12]."""
    eps = _EPS_START
    for _ in range(_EPS_HALVINGS + 1):
        probs, payload = build(eps)
        if all(_PROB_FLOOR <= p <= 1.0 - _PROB_FLOOR for p in probs):
            return eps, payload
        eps *= 0.5
    raise ConstructionError(
        f"epsilon search failed for {what}: no epsilon in "
        f"[{_EPS_START * 0.5 ** _EPS_HALVINGS:.3g}, {_EPS_START:.3g}] keeps all "
        "probabilities inside (0, 1)"
    )


def construct_vi_total(
    targets: SensitivityParamsTotal, observed: ObservedTotal
) -> JointDistTotal:
    """Three-level construction hitting the total-population targets exactly.

    Requires every target strictly above 1 and an interior observed
    distribution. The result reproduces the observed margins and returns
    the targets under :func:`params_from_joint_total`, both to within
    floating-point round-off.
    """
    r_su1 = _require_above_one(targets.rr_su_t1, "rr_su_t1")
    r_su0 = _require_above_one(targets.rr_su_t0, "rr_su_t0")
    r_uy1 = _require_above_one(targets.rr_uy_t1, "rr_uy_t1")
    r_uy0 = _require_above_one(targets.rr_uy_t0, "rr_uy_t0")
    p1 = observed.p_y1_t1_s1
    p0 = observed.p_y1_t0_s1
    d = r_su0 * r_su1 - 1.0

    def build(eps):
        u_ts = {
            (0, 0): {
                0: (1.0 - eps) * r_su0 * (r_su1 - 1.0) / d,
                1: (1.0 - eps) * (r_su0 - 1.0) / d,
                2: eps,
            },
            (0, 1): {
                0: (1.0 - eps) * (r_su1 - 1.0) / d,
                1: (1.0 - eps) * r_su1 * (r_su0 - 1.0) / d,
                2: eps,
            },
            (1, 1): {
                0: (1.0 - eps) * r_su1 * (r_su0 - 1.0) / d,
                1: (1.0 - eps) * (r_su1 - 1.0) / d,
                2: eps,
            },
            (1, 0): {
                0: (1.0 - eps) * (r_su0 - 1.0) / d,
                1: (1.0 - eps) * r_su0 * (r_su1 - 1.0) / d,
                2: eps,
            },
        }
        # tilt factors keep the selected-stratum outcome margins identical
        # in epsilon while spreading the arms by the RR_UY targets
        q1 = u_ts[(0, 1)][1]
        q0 = u_ts[(1, 1)][0]
        y_tu = {
            (0, 0): p0,
            (0, 1): p0 * r_uy0 * (q1 + eps) / (r_uy0 * q1 + eps),
            (0, 2): p0 * (q1 + eps) / (r_uy0 * q1 + eps),
            (1, 0): p1 * r_uy1 * (q0 + eps) / (r_uy1 * q0 + eps),
            (1, 1): p1,
            (1, 2): p1 * (q0 + eps) / (r_uy1 * q0 + eps),
        }
        probs = [p for stratum in u_ts.values() for p in stratum.values()]
        probs += list(y_tu.values())
        return probs, (u_ts, y_tu)

    eps, (u_ts, y_tu) = _eps_search(build, "the total-population construction")
    return JointDistTotal(
        p_t1=observed.p_t1,
        p_s1_given_t={1: observed.p_s1_t1, 0: observed.p_s1_t0},
        p_u_given_ts=u_ts,
        p_y1_given_tu=y_tu,
        u_support=(0, 1, 2),
        epsilon=eps,
    )


def construct_vi_sub(targets: SensitivityParamsSub, observed: ObservedSub) -> JointDistSub:
    """Three-level construction hitting the subpopulation targets exactly."""
    r_tu = _require_above_one(targets.rr_tu_s1, "rr_tu_s1")
    r_uy = _require_above_one(targets.rr_uy_s1, "rr_uy_s1")
    p1 = observed.p_y1_t1_s1
    p0 = observed.p_y1_t0_s1

    def build(eps):
        u_t = {
            0: {
                0: (1.0 - eps) * r_tu / (r_tu + 1.0),
                1: (1.0 - eps) / (r_tu + 1.0),
                2: eps,
            },
            1: {
                0: (1.0 - eps) / (r_tu + 1.0),
                1: (1.0 - eps) * r_tu / (r_tu + 1.0),
                2: eps,
            },
        }
        q = u_t[1][1]
        y_tu = {
            (0, 0): p0,
            (0, 1): p0,
            (0, 2): p0,
            (1, 0): p1,
            (1, 1): p1 * r_uy * (q + eps) / (r_uy * q + eps),
            (1, 2): p1 * (q + eps) / (r_uy * q + eps),
        }
        probs = [p for arm in u_t.values() for p in arm.values()]
        probs += list(y_tu.values())
        return probs, (u_t, y_tu)

    eps, (u_t, y_tu) = _eps_search(build, "the subpopulation construction")
    return JointDistSub(
        p_t1_s1=observed.p_t1_s1,
        p_u_given_t=u_t,
        p_y1_given_tu=y_tu,
        u_support=(0, 1, 2),
        epsilon=eps,
    )


def construct_sharp(
    rr_tu: float, rr_uy: float, observed: ObservedSub
) -> tuple[JointDistSub, float, float]:
    """Binary-U construction whose bias attains the subpopulation bounds.

    Requires BF_U(rr_uy, rr_tu) <= 1/P(Y=1|T=0,I_S=1); otherwise the
    loaded control-arm outcome probability would exceed 1 and a
    :class:`SharpnessConditionError` is raised. Returns the distribution
    together with its achieved relative-risk bias (equal to BF_U) and its
    achieved risk-difference bias (equal to the closed-form bound).
    """
    rr_tu = float(rr_tu)
    rr_uy = float(rr_uy)
    if rr_tu < 1.0 or rr_uy < 1.0:
        raise ParameterDomainError("sensitivity parameters must be >= 1")
    bf_u = bounding_factor(rr_uy, rr_tu)
    p1 = observed.p_y1_t1_s1
    p0 = observed.p_y1_t0_s1
    if bf_u * p0 > 1.0:
        raise SharpnessConditionError(
            f"attainment requires BF_U <= 1/pY1_T0_S1; got BF_U = {bf_u:.6g} > "
            f"{1.0 / p0:.6g}"
        )
    u_t = {
        1: {0: 0.0, 1: 1.0},
        0: {0: 1.0 - 1.0 / rr_tu, 1: 1.0 / rr_tu},
    }
    y_tu = {
        (0, 0): p0 * bf_u / rr_uy,
        (0, 1): p0 * bf_u,
        (1, 0): p1 / rr_uy,
        (1, 1): p1,
    }
    joint = JointDistSub(
        p_t1_s1=observed.p_t1_s1,
        p_u_given_t=u_t,
        p_y1_given_tu=y_tu,
        u_support=(0, 1),
        epsilon=None,
    )
    bias_rr, bias_rd = bias_from_joint_sub(joint)
    return joint, bias_rr, bias_rd


def bias_from_joint_sub(joint: JointDistSub) -> tuple[float, float]:
    """Achieved subpopulation biases of a joint distribution.

    The relative-risk bias divides the observed contrast by the causal
    one, with P(Y(t)=1|I_S=1) = sum_u P(Y=1|T=t,U=u,I_S=1) P(U=u|I_S=1)
    (exchangeability given U among the selected). The risk-difference
    bias is the larger of the two one-sided biases obtained by evaluating
    each arm's counterfactual under the opposite arm's U distribution;
    this is the quantity the closed-form risk-difference bound caps, and
    the attainment construction makes it equal to that bound.
    """
    p_u = joint.p_u_marginal()
    py_causal = {
        t: sum(joint.p_y1_given_tu[(t, u)] * p_u[u] for u in joint.u_support)
        for t in (0, 1)
    }
    p1 = joint._py1_obs(1)
    p0 = joint._py1_obs(0)
    if py_causal[0] <= 0.0:
        raise ZeroProbabilityError("causal relative risk undefined: P(Y(0)=1|I_S=1) is 0")
    if p0 <= 0.0:
        raise ZeroProbabilityError(
            "observed relative risk undefined: P(Y=1|T=0,I_S=1) is 0"
        )
    bias_rr = (p1 / p0) / (py_causal[1] / py_causal[0])
    cross0 = sum(
        joint.p_y1_given_tu[(0, u)] * joint.p_u_given_t[1][u] for u in joint.u_support
    )
    cross1 = sum(
        joint.p_y1_given_tu[(1, u)] * joint.p_u_given_t[0][u] for u in joint.u_support
    )
    bias_rd = max(cross0 - p0, p1 - cross1)
    return bias_rr, bias_rd
