"""Shared fixtures and independent enumeration oracles.

The ``Oracle`` class recomputes every model quantity by direct summation
over the finite (v, u, t) cells, written straight from the defining
formulas and independent of the library's table machinery, so the two
paths check each other. Probit probabilities use scipy's normal CDF to
stay independent of the library's erfc-based evaluation.
"""

import itertools
import math

import numpy as np
import pytest
from scipy.stats import norm

from selbounds import DiscreteDist, LinkKind, MStructureSpec


def oracle_link(link: str, x: float) -> float:
    if link == "L":
        return 1.0 / (1.0 + math.exp(-x))
    return float(norm.cdf(x))


class Oracle:
    """Brute-force enumeration of a discrete selection model."""

    def __init__(self, vvals, uvals, tcoef, ycoef, scoef, link="L", reverse=False):
        self.vvals = list(vvals)
        self.uvals = list(uvals)
        self.tcoef = tuple(tcoef)
        self.ycoef = tuple(ycoef)
        self.scoef = [tuple(r) for r in scoef]
        self.link = link
        self.reverse = reverse

    def p_t1(self, v):
        return oracle_link(self.link, self.tcoef[0] + self.tcoef[1] * v)

    def p_y1(self, t, u):
        t = 1 - t if self.reverse else t
        return oracle_link(self.link, self.ycoef[0] + self.ycoef[1] * t + self.ycoef[2] * u)

    def p_sel(self, v, u, t):
        t = 1 - t if self.reverse else t
        p = 1.0
        for c0, cv, cu, ct in self.scoef:
            p *= oracle_link(self.link, c0 + cv * v + cu * u + ct * t)
        return p

    def cells(self):
        for (v, pv), (u, pu), t in itertools.product(self.vvals, self.uvals, (0, 1)):
            t_orig = 1 - t if self.reverse else t
            pt = self.p_t1(v) if t_orig == 1 else 1.0 - self.p_t1(v)
            yield (v, u, t), pv * pu * pt, self.p_sel(v, u, t)

    def joint(self):
        out = {}
        for (v, u, t), w, q in self.cells():
            py = self.p_y1(t, u)
            for y, p in ((1, py), (0, 1.0 - py)):
                out[(v, u, t, y, 1)] = w * p * q
                out[(v, u, t, y, 0)] = w * p * (1.0 - q)
        return out

    def p_s1(self):
        return sum(w * q for _, w, q in self.cells())

    def p_t1_given_s1(self):
        num = sum(w * q for (v, u, t), w, q in self.cells() if t == 1)
        return num / self.p_s1()

    def u_given_ts(self, t, s):
        num = {}
        for (v, u, tt), w, q in self.cells():
            if tt == t:
                num[u] = num.get(u, 0.0) + w * (q if s == 1 else 1.0 - q)
        tot = sum(num.values())
        return {u: x / tot for u, x in num.items()}

    def u_given_s1(self):
        num = {}
        for (v, u, t), w, q in self.cells():
            num[u] = num.get(u, 0.0) + w * q
        tot = sum(num.values())
        return {u: x / tot for u, x in num.items()}

    def obs_py1(self, t):
        pu = self.u_given_ts(t, 1)
        return sum(self.p_y1(t, u) * p for u, p in pu.items())

    def estimands(self):
        pu = {u: p for u, p in self.uvals}
        num = sum(self.p_y1(1, u) * p for u, p in pu.items())
        den = sum(self.p_y1(0, u) * p for u, p in pu.items())
        pus = self.u_given_s1()
        nums = sum(self.p_y1(1, u) * p for u, p in pus.items())
        dens = sum(self.p_y1(0, u) * p for u, p in pus.items())
        obs1, obs0 = self.obs_py1(1), self.obs_py1(0)
        return {
            "beta_r": num / den,
            "beta_d": num - den,
            "beta_rs": nums / dens,
            "beta_ds": nums - dens,
            "beta_r_obs": obs1 / obs0,
            "beta_d_obs": obs1 - obs0,
        }

    def sv_sub(self):
        us = [u for u, _ in self.uvals]
        rr_uy = max(
            max(self.p_y1(t, u) for u in us) / min(self.p_y1(t, u) for u in us)
            for t in (0, 1)
        )
        pu1 = self.u_given_ts(1, 1)
        pu0 = self.u_given_ts(0, 1)
        rr_tu = max(pu1[u] / pu0[u] for u in us)
        return rr_uy, rr_tu

    def sv_total(self):
        us = [u for u, _ in self.uvals]
        rr_uy_t1 = max(self.p_y1(1, u) for u in us) / min(self.p_y1(1, u) for u in us)
        rr_uy_t0 = max(self.p_y1(0, u) for u in us) / min(self.p_y1(0, u) for u in us)
        p11, p10 = self.u_given_ts(1, 1), self.u_given_ts(1, 0)
        p01, p00 = self.u_given_ts(0, 1), self.u_given_ts(0, 0)
        rr_su_t1 = max(p11[u] / p10[u] for u in us)
        rr_su_t0 = max(p00[u] / p01[u] for u in us)
        return rr_uy_t1, rr_uy_t0, rr_su_t1, rr_su_t0


ZIKA_VVALS = [(1, 0.85), (0, 0.15)]
ZIKA_UVALS = [(1, 0.5), (0, 0.5)]
ZIKA_TCOEF = (-6.2, 1.75)
ZIKA_YCOEF = (-5.2, 5.0, -1.0)
ZIKA_SCOEF = [(1.2, 0.0, 2.0, -4.0), (2.2, 0.5, -2.75, 0.0)]


def zika_oracle(selections=2, reverse=False) -> Oracle:
    return Oracle(
        ZIKA_VVALS,
        ZIKA_UVALS,
        ZIKA_TCOEF,
        ZIKA_YCOEF,
        ZIKA_SCOEF[:selections],
        link="L",
        reverse=reverse,
    )


def random_model(rng: np.random.Generator, n_sel=None, link=None):
    """A random well-behaved model, returned as (spec, oracle).

    Coefficients stay in [-1, 1] and supports in {0, 1, 2}, keeping every
    conditional probability safely inside (0, 1) for both links.
    """
    def dist(n):
        probs = rng.dirichlet(np.ones(n) * 2.0)
        probs = np.clip(probs, 0.02, None)
        probs = probs / probs.sum()
        return [(i, float(p)) for i, p in enumerate(probs)]

    nv = int(rng.integers(2, 4))
    nu = int(rng.integers(2, 4))
    k = int(n_sel if n_sel is not None else rng.integers(1, 4))
    coef = lambda n: tuple(float(c) for c in rng.uniform(-1.0, 1.0, n))
    link = link or ("L" if rng.random() < 0.7 else "P")
    vvals, uvals = dist(nv), dist(nu)
    tcoef, ycoef = coef(2), coef(3)
    scoef = [coef(4) for _ in range(k)]
    spec = MStructureSpec(
        v_dist=DiscreteDist(vvals),
        u_dist=DiscreteDist(uvals),
        t_coef=tcoef,
        y_coef=ycoef,
        s_coef=scoef,
        link=LinkKind.from_code(link),
    )
    return spec, Oracle(vvals, uvals, tcoef, ycoef, scoef, link=link)


@pytest.fixture
def zika_spec_two():
    from selbounds import zika_spec

    return zika_spec(selections=2)


@pytest.fixture
def zika_spec_one():
    from selbounds import zika_spec

    return zika_spec(selections=1)
