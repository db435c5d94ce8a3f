"""Near-extremal odd increasing rational functions by bump stacking.

Starting from R(x) = x, each stage adds a bump

    G(x) = R(x) + 8 (R'(0) - 2 eps) * g**2 x / (g**2 + x**2)

with eps in (0, R'(0)/2) and g small enough that
8 (R'(0) - 2 eps) g**2 / alpha**2 < beta, where R' > R'(0) - eps on
|x| < alpha and R' > beta on [-1, 1].  Then G'(0) = 9 R'(0) - 16 eps and
||G|| <= ||R|| + 4 (R'(0) - 2 eps) g, so the ratio R'(0)/||R|| grows by a
factor close to 9 per stage while R stays odd and strictly increasing.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import ratcore
from .errors import CertificateMissing, GammaUnderflow, InvalidEpsilon, NonPositiveSlope
from .ratcore import (LinearPlusBumps, MonotoneCertificate, certify_increasing,
                      chebyshev_points, derivative_at, golden_section_min, scale_points,
                      scale_spread, sup_norm)

__all__ = ["StageParams", "ConstructionReport", "plateau_radius", "min_slope", "add_bump",
           "construct", "ratio", "STAGE_COLUMNS"]

log = logging.getLogger(__name__)

GAMMA_FLOOR = 1e-150
STURM_SPREAD_LIMIT = 1e12
PLATEAU_GRID = 256
STAGE_COLUMNS = ("j", "epsilon", "alpha", "beta", "gamma", "amplitude", "deriv0", "norm", "ratio")


@dataclass(frozen=True)
class StageParams:
    epsilon: float
    alpha: float
    beta: float
    gamma: float
    amplitude: float
    safety: float
    deriv0: float = float("nan")
    norm: float = float("nan")
    ratio: float = float("nan")
    certificate: str = ""

    def row(self, j):
        return (j, self.epsilon, self.alpha, self.beta, self.gamma, self.amplitude,
                self.deriv0, self.norm, self.ratio)


@dataclass
class ConstructionReport:
    n: int
    function: LinearPlusBumps
    stages: list
    derivative_at_zero: float
    norm: float
    ratio: float
    certificate: MonotoneCertificate
    rho: float = 0.01
    partial: bool = False

    @property
    def target(self):
        return 9.0 ** (self.n - 1)

    @property
    def ratio_fraction(self):
        return self.ratio / self.target

    def stage_rows(self):
        return [s.row(j + 1) for j, s in enumerate(self.stages)]

    def to_dict(self):
        from .io import function_to_dict
        return {"n": self.n, "rho": self.rho, "partial": self.partial,
                "function": function_to_dict(self.function),
                "declared_degree": ratcore.declared_degree(self.function),
                "derivative_at_zero": self.derivative_at_zero, "norm": self.norm,
                "ratio": self.ratio, "target": self.target,
                "ratio_fraction": self.ratio_fraction,
                "certificate": self.certificate.to_dict(),
                "stages": [dict(zip(STAGE_COLUMNS, s.row(j + 1)))
                           | {"safety": s.safety, "certificate": s.certificate}
                           for j, s in enumerate(self.stages)]}


def _even_deriv(R, x):
    # R' on +-x; for odd R these agree, otherwise take the smaller
    return np.minimum(R.deriv(x), R.deriv(-x))


def plateau_radius(R, eps: float) -> float:
    """Largest alpha (found by log-bisection) with R' > R'(0) - eps on [-alpha, alpha]."""
    d0 = float(R.deriv(np.float64(0.0)))
    floor = d0 - eps
    sp = scale_points(R)

    def ok(alpha):
        xs = np.concatenate([np.linspace(0.0, alpha, PLATEAU_GRID + 1), sp[sp <= alpha]])
        return bool(np.min(_even_deriv(R, xs)) > floor)

    if ok(1.0):
        return 1.0
    lo, hi = math.log(1e-300), 0.0
    if not ok(math.exp(lo)):
        return 1e-300
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if ok(math.exp(mid)):
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-6:
            break
    return math.exp(lo) * (1.0 - 1.0 / PLATEAU_GRID)


def min_slope(R, grid: int = ratcore.DEFAULT_NORM_GRID) -> float:
    """Minimum of R' on [-1, 1]: Chebyshev grid plus feature points, golden-section refined."""
    sp = scale_points(R)
    xs = np.unique(np.concatenate([chebyshev_points(grid), sp, -sp, [0.0]]))
    d = R.deriv(xs)
    i = int(np.argmin(d))
    best = float(d[i])
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
    if hi > lo:
        _, v = golden_section_min(lambda t: float(R.deriv(np.float64(t))), lo, hi)
        best = min(best, v)
    if best <= 0:
        raise NonPositiveSlope(f"minimum slope {best} is not positive")
    return best


def _certify_stage(G, eps, beta, safety):
    if scale_spread(G) <= STURM_SPREAD_LIMIT:
        cert = certify_increasing(G, "strict")
        return cert if cert.ok else None
    # analytic floor: eps inside the plateau, (1 - safety) * beta outside it
    floor = min(eps, (1.0 - safety) * beta)
    grid_min = min_slope(G)
    if floor <= 0 or grid_min <= 0:
        return None
    return MonotoneCertificate(ratcore.fingerprint(G), "strict", "grid", True,
                               {"grid_min": grid_min, "analytic_floor": floor})


def _stage(R: LinearPlusBumps, eps: float, safety: float = 0.5,
           norm_budget: Optional[float] = None, norm: Optional[float] = None):
    d0 = float(R.deriv(np.float64(0.0)))
    if not (0.0 < eps < d0 / 2.0):
        raise InvalidEpsilon(f"epsilon must lie in (0, {d0 / 2}), got {eps}")
    if not (0.0 < safety < 1.0):
        raise ValueError("safety must lie in (0, 1)")
    if norm is None:
        norm = float(R(np.float64(1.0)))
    amp = 8.0 * (d0 - 2.0 * eps)
    alpha = plateau_radius(R, eps)
    beta = min_slope(R)
    g_prev = float(R.scales[-1]) if R.bumps else 1.0
    g_max = alpha * math.sqrt(safety * beta / amp)
    if norm_budget is not None:
        g_max = min(g_max, norm_budget * norm / (4.0 * (d0 - 2.0 * eps)))
    # largest dyadic fraction of the previous scale below g_max (strictly below g_prev
    # once a bump exists)
    m = max(0, math.ceil(math.log2(g_prev / g_max))) if g_max < g_prev else 0
    if R.bumps:
        m = max(m, 1)
    gamma = math.ldexp(g_prev, -m)
    while gamma > GAMMA_FLOOR:
        if amp * gamma * gamma / (alpha * alpha) <= safety * beta:
            G = R.with_bump(amp, gamma)
            cert = _certify_stage(G, eps, beta, safety)
            if cert is not None:
                break
            log.debug("gamma=%g failed certification; halving", gamma)
        gamma *= 0.5
    else:
        raise GammaUnderflow(f"no admissible bump scale above {GAMMA_FLOOR}")

    d_new = float(G.deriv(np.float64(0.0)))
    expect = 9.0 * d0 - 16.0 * eps
    assert abs(d_new - expect) <= 8 * np.finfo(float).eps * abs(expect), (d_new, expect)
    new_norm = sup_norm(G, cert)
    assert new_norm <= norm + 4.0 * (d0 - 2.0 * eps) * gamma + 1e-12 * max(1.0, norm), \
        (new_norm, norm, gamma)
    params = StageParams(eps, alpha, beta, gamma, amp, safety, d_new, new_norm,
                         d_new / new_norm, cert.method)
    return G, params, cert


def add_bump(R: LinearPlusBumps, eps: float, safety: float = 0.5,
             norm_budget: Optional[float] = None) -> LinearPlusBumps:
    """One stage of the construction; see :func:`construct` for the policy knobs."""
    G, _, _ = _stage(R, eps, safety, norm_budget)
    return G


def ratio(R, cert) -> float:
    """R'(0)/||R|| with the norm read from a monotone certificate."""
    if cert is None or not cert.ok or not cert.valid_for(R):
        raise CertificateMissing("ratio needs a valid monotone certificate for R")
    return float(derivative_at(R, 0.0)) / sup_norm(R, cert)


def construct(n: int, rho: float = 0.01, safety: float = 0.5,
              norm_budget: Optional[float] = None) -> ConstructionReport:
    """Stack n-1 bumps on R(x) = x with eps_j = rho * R_j'(0).

    ``norm_budget`` caps each stage's worst-case norm growth
    4 (R'(0) - 2 eps) gamma at that fraction of the current norm; it defaults
    to ``rho``.  Without it the largest admissible first bump inflates the
    norm by about 45% and the ratio stalls near two thirds of 9**(n-1).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not (0.0 < rho < 0.5):
        raise ValueError("rho must lie in (0, 1/2)")
    budget = rho if norm_budget is None else norm_budget
    R = LinearPlusBumps(1.0)
    cert = certify_increasing(R, "strict")
    norm = sup_norm(R, cert)
    stages = []
    for j in range(1, n):
        d0 = float(R.deriv(np.float64(0.0)))
        prev_ratio = d0 / norm
        try:
            G, params, cert_new = _stage(R, rho * d0, safety, budget, norm)
        except GammaUnderflow as e:
            e.partial = ConstructionReport(j, R, stages, d0, norm, prev_ratio, cert, rho, True)
            raise
        lower = (9.0 - 16.0 * rho) * prev_ratio / (1.0 + 4.0 * d0 * params.gamma / norm)
        assert params.ratio >= lower * (1.0 - 1e-12), (params.ratio, lower)
        R, cert, norm = G, cert_new, params.norm
        stages.append(params)
    d0 = float(R.deriv(np.float64(0.0)))
    return ConstructionReport(n, R, stages, d0, norm, d0 / norm, cert, rho)
