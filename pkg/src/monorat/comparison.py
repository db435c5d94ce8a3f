"""Interpolation-node pipeline and upper-bound verification.

Given an increasing target f on [0, 1] with f(0) = 0, f(1) = 1 and
f'(0) > 9**n / 2, the slope function g(x) = f(x)/x crosses the levels
1, 3, 9, ..., 3 * 9**(n-1) at thresholds

    0 < u_n < v_n < u_{n-1} < ... < u_1 < v_1 <= 1,
    g(u_i) = 3 * 9**(i-1),  g(v_i) = 9**(i-1).

On the box prod [u_i, v_i] the residuals

    f_s(y) = sum_k 4 * 9**(k-1) * y_k**2 y_s / (y_k**2 + 3 y_s**2) - f(y_s)

satisfy the Miranda face conditions, so the nodes z solving f_s(z) = 0 exist
and the Miranda solver finds them.  The comparison function
``L = KernelSum(4 * 9**(k-1), z) - R`` then has at least 4n+1 sign changes on
[-1, 1], more than a function in Q_{4n} can have unless it vanishes.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import ratcore
from .errors import (CertificateMissing, DegreeError, LevelNotBracketed, NoConvergence, ParityError,
                     PatternViolation, SlopeTooSmall)
from .miranda import BoxN, SolverConfig, VectorField, solve
from .ratcore import Difference, KernelSum, OddExtension, derivative_at, evaluate

__all__ = [
    "TargetFn", "f_delta", "ThresholdTable", "NodeVector", "BoundReport",
    "SignPatternReport", "slope_fn", "find_thresholds", "build_residual_system",
    "solve_interpolation_nodes", "build_comparison_L", "sign_pattern_check",
    "verify_theorem1", "verify_corollary1", "transfer_bound_profile",
    "odd_extension", "comparison_weights",
]

log = logging.getLogger(__name__)

BLEND_BELOW = 1e-8
THRESHOLD_RTOL = 1e-12
COROLLARY_MARGIN = 1e-4
COROLLARY_POINTS = 10_000


def comparison_weights(n):
    """Kernel weights 4 * 9**(k-1), k = 1..n."""
    return 4.0 * 9.0 ** np.arange(n)


@dataclass(frozen=True, eq=False)
class TargetFn:
    """Increasing target on [0, 1] with f(0) = 0 and f(1) = 1.

    ``f`` must accept numpy arrays.  ``df`` is optional and only needed to
    build a comparison function from the odd extension of the target.
    """

    f: Callable
    f0_slope: float
    name: str = "target"
    df: Optional[Callable] = None

    def __post_init__(self):
        if abs(float(self.f(np.float64(0.0)))) > 1e-12:
            raise ValueError(f"{self.name}: f(0) must be 0")
        if abs(float(self.f(np.float64(1.0))) - 1.0) > 1e-12:
            raise ValueError(f"{self.name}: f(1) must be 1")
        vals = self.f(np.linspace(0.0, 1.0, 1000))
        if not np.all(np.diff(vals) > 0):
            raise ValueError(f"{self.name}: f is not increasing on the sample grid")
        object.__setattr__(self, "f0_slope", float(self.f0_slope))

    def __call__(self, x):
        return self.f(x)


def f_delta(delta: float) -> TargetFn:
    """The target (1 + delta) x / (x + delta); slope (1 + delta)/delta at the origin."""
    d = float(delta)
    if d <= 0:
        raise ValueError("delta must be positive")
    return TargetFn(lambda x: (1.0 + d) * x / (x + d), (1.0 + d) / d, f"f_delta({d!r})",
                    lambda x: (1.0 + d) * d / (x + d) ** 2)


def odd_extension(target: TargetFn) -> OddExtension:
    if target.df is None:
        raise ValueError(f"{target.name} has no derivative; cannot build its odd extension")
    return OddExtension(target.f, target.df, target.name)


def slope_fn(f: TargetFn, x):
    """g(x) = f(x)/x with g(0) = f'(0); linear blend on (0, 1e-8) against cancellation."""
    x = np.asarray(x, dtype=float)
    xs = np.maximum(x, BLEND_BELOW)
    g = f.f(xs) / xs
    t = x / BLEND_BELOW
    out = np.where(x >= BLEND_BELOW, g, f.f0_slope + t * (g - f.f0_slope))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class ThresholdTable:
    u: np.ndarray
    v: np.ndarray

    @property
    def n(self):
        return self.u.size

    @property
    def u_levels(self):
        return 3.0 * 9.0 ** np.arange(self.n)

    @property
    def v_levels(self):
        return 9.0 ** np.arange(self.n)

    def chain(self):
        """v_1, u_1, v_2, u_2, ..., u_n (decreasing)."""
        return np.ravel(np.column_stack([self.v, self.u]))

    def ordering_ok(self):
        c = self.chain()
        return bool(c[0] <= 1.0 and c[-1] > 0 and np.all(np.diff(c) < 0))

    def scale_separation_ok(self):
        """v_i < 3 * 9**(k-i) * u_k for all 1 <= k < i <= n."""
        for i in range(self.n):
            for k in range(i):
                if not self.v[i] < 3.0 * 9.0 ** (k - i) * self.u[k]:
                    return False
        return True


@dataclass(frozen=True, eq=False)
class NodeVector:
    z: np.ndarray
    residual_inf: float
    residuals: np.ndarray
    table: ThresholdTable
    iterations: int = 0

    @property
    def n(self):
        return self.z.size

    def interlaced(self):
        return bool(np.all(self.table.u <= self.z) and np.all(self.z <= self.table.v)
                    and np.all(np.diff(self.z) < 0))

    def csv_rows(self):
        return [(i + 1, float(self.table.u[i]), float(self.table.v[i]), float(self.z[i]),
                 float(self.residuals[i])) for i in range(self.n)]

    def to_dict(self):
        return {"z": self.z.tolist(), "u": self.table.u.tolist(), "v": self.table.v.tolist(),
                "residuals": self.residuals.tolist(), "residual_inf": self.residual_inf,
                "iterations": self.iterations}


def _bisect_level(g, level, lo, hi):
    """Point in (lo, hi) with g = level, given g(lo) > level >= g(hi)."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) > level:
            lo = mid
        else:
            hi = mid
    return lo if abs(g(lo) - level) <= abs(g(hi) - level) else hi


def find_thresholds(f: TargetFn, n: int) -> ThresholdTable:
    """Right-to-left level crossings of g = f/x; strict ordering by construction."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not f.f0_slope > 9.0 ** n / 2.0:
        raise SlopeTooSmall(f"f'(0) = {f.f0_slope} does not exceed 9^{n}/2 = {9.0 ** n / 2}")
    g = lambda x: slope_fn(f, x)
    levels = []
    for i in range(n):
        levels += [9.0 ** i, 3.0 * 9.0 ** i]
    right = 1.0
    out = []
    for level in levels:
        if not out and abs(g(right) - level) <= THRESHOLD_RTOL * level:
            out.append(right)
            continue
        hi, lo = right, right / 2.0
        while g(lo) <= level:
            hi, lo = lo, lo / 2.0
            if lo < 1e-300:
                raise LevelNotBracketed(f"g never reaches level {level} below x={right}")
        x = _bisect_level(g, level, lo, hi)
        if abs(g(x) - level) > THRESHOLD_RTOL * level:
            raise LevelNotBracketed(f"could not solve g(x) = {level} to tolerance")
        out.append(x)
        right = x
    out = np.array(out)
    table = ThresholdTable(u=out[1::2].copy(), v=out[0::2].copy())
    if not table.ordering_ok():
        raise LevelNotBracketed("threshold ordering chain violated")
    return table


def residual_field(f: TargetFn, n: int) -> VectorField:
    w = comparison_weights(n)

    def fn(y):
        y = np.asarray(y, dtype=float)
        ys = y[..., :, None]
        yk = y[..., None, :]
        terms = w * yk * yk * ys / (yk * yk + 3.0 * ys * ys)
        return terms.sum(axis=-1) - f.f(y)

    return VectorField(n, fn)


def build_residual_system(f: TargetFn, table: ThresholdTable):
    """The node residual field and the box prod [u_i, v_i] it lives on."""
    return residual_field(f, table.n), BoxN(table.u, table.v)


def solve_interpolation_nodes(f: TargetFn, n: int, cfg: SolverConfig = SolverConfig()) -> NodeVector:
    table = find_thresholds(f, n)
    F, box = build_residual_system(f, table)
    rep = solve(F, box, cfg)
    if not rep.ok:
        raise NoConvergence(f"node solve failed: {rep.status}", None, rep.residual_inf,
                            rep.iterations)
    z = rep.solution
    res = F(z)
    nodes = NodeVector(z, float(np.max(np.abs(res))), res, table, rep.iterations)
    if not nodes.interlaced():
        raise NoConvergence("solution is not interlaced with the thresholds", z,
                            nodes.residual_inf, rep.iterations)
    return nodes


def _odd_on_grid(R, points=257):
    x = np.linspace(0.0, 1.0, points)
    a, b = np.asarray(R(x)), np.asarray(R(-x))
    return bool(np.allclose(a, -b, rtol=1e-12, atol=1e-14 * max(1.0, np.max(np.abs(a)))))


def build_comparison_L(R, nodes: NodeVector) -> Difference:
    """L = KernelSum(4 * 9**(k-1), z) - R."""
    if not _odd_on_grid(R):
        raise ParityError("R is not odd on the sample grid")
    K = KernelSum(tuple(zip(comparison_weights(nodes.n), nodes.z)))
    return Difference(K, R)


@dataclass
class SignPatternReport:
    n: int
    dL0: float
    dL_nodes: np.ndarray
    dL_node_bounds: np.ndarray
    node_values: np.ndarray
    gaps: list
    gap_changes: list
    right_changes: int
    left_changes: int
    zero_count: int
    degree_bound: Optional[int]
    ok: bool

    @property
    def exceeds_degree(self):
        return self.degree_bound is not None and self.zero_count > self.degree_bound

    def to_dict(self):
        return {"n": self.n, "dL0": self.dL0, "dL_nodes": self.dL_nodes.tolist(),
                "node_values": self.node_values.tolist(),
                "gaps": [list(g) for g in self.gaps], "gap_changes": self.gap_changes,
                "right_changes": self.right_changes, "left_changes": self.left_changes,
                "zero_count": self.zero_count, "degree_bound": self.degree_bound,
                "ok": self.ok}


def _sign_changes(v):
    s = np.sign(v)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _gap_samples(a, b, m):
    t = np.linspace(0.0, 1.0, m + 2)[1:-1]
    edge = np.geomspace(1e-6, 1e-2, 16)
    t = np.unique(np.concatenate([t, edge, 1.0 - edge]))
    return a + (b - a) * t


def sign_pattern_check(L, nodes: NodeVector, base_points: int = 10_000, tol: float = 1e-10,
                       raise_on_violation: bool = True) -> SignPatternReport:
    """Derivative signs at 0 and at the nodes, and a sign change in every gap.

    Zero count = 1 (origin) + sign changes on (0, 1] + sign changes on [-1, 0),
    a lower bound on the number of zeros of L.
    """
    n = nodes.n
    z = np.sort(nodes.z)
    dL0 = float(derivative_at(L, 0.0))
    dLz = np.atleast_1d(derivative_at(L, nodes.z))
    w = comparison_weights(n)
    bounds = np.array([w[:s].sum() - 0.5 * 9.0 ** s for s in range(n)])
    node_vals = np.atleast_1d(evaluate(L, nodes.z))

    edges = np.concatenate([[0.0], z])
    gaps = list(zip(edges[:-1], edges[1:]))
    m = max(base_points // (n + 1), 64)
    gap_changes = []
    samples = []
    for a, b in gaps:
        xs = _gap_samples(a, b, m)
        gap_changes.append(_sign_changes(evaluate(L, xs)) > 0)
        samples.append(xs)
    if z[-1] < 1.0:
        samples.append(_gap_samples(z[-1], 1.0, m))
    xs = np.concatenate(samples)
    right = _sign_changes(evaluate(L, xs))
    left = _sign_changes(evaluate(L, -xs[::-1]))

    violation = None
    if not dL0 < 0:
        violation = ("L'(0) is not negative", (0.0, 0.0))
    elif not np.all(dLz < 0):
        s = int(np.flatnonzero(dLz >= 0)[0])
        violation = (f"L'(z_{s + 1}) is not negative", (nodes.z[s], nodes.z[s]))
    elif not all(gap_changes):
        i = gap_changes.index(False)
        violation = ("no sign change in gap", tuple(map(float, gaps[i])))
    elif np.max(np.abs(node_vals)) > 10 * tol:
        violation = ("L does not vanish at the nodes", (float(z[0]), float(z[-1])))
    deg = ratcore.declared_degree(L)
    rep = SignPatternReport(n, dL0, dLz, bounds, node_vals, [tuple(map(float, g)) for g in gaps],
                            gap_changes, right, left, 1 + right + left, deg, violation is None)
    if violation is not None and raise_on_violation:
        raise PatternViolation(violation[0], violation[1])
    return rep


# ---------------------------------------------------------------------------
# bound verification

@dataclass
class BoundReport:
    kind: str
    subject: str
    n: int
    derivative_at_zero: float
    norm: float
    ratio: float
    upper_bound: float
    verdict: str
    worst_x: float
    margin: float
    certificate_mode: str = ""

    @property
    def passed(self):
        return self.verdict == "PASS"

    def to_dict(self):
        return dict(self.__dict__)


def _require_certificate(R, cert):
    if cert is None or not cert.ok:
        raise CertificateMissing("a monotone certificate is required")
    if not cert.valid_for(R):
        raise CertificateMissing("certificate was issued for different coefficient data")


def verify_theorem1(R, n: int, cert) -> BoundReport:
    """Check R'(0) <= 9**n / 2 * R(1) for odd increasing R in Q_{2n}."""
    _require_certificate(R, cert)
    deg = ratcore.declared_degree(R)
    if deg is None or deg > 2 * n:
        raise DegreeError(f"declared degree {deg} exceeds 2n = {2 * n}")
    if not cert.odd:
        raise ParityError("the slope bound at the origin needs an odd function")
    r1 = float(evaluate(R, 1.0))
    d0 = float(derivative_at(R, 0.0))
    ratio = d0 / r1
    bound = 0.5 * 9.0 ** n
    verdict = "PASS" if ratio <= bound else "FAIL"
    if verdict == "FAIL":
        log.error("slope bound at the origin failed: ratio=%r bound=%r R=%r", ratio, bound, R)
    return BoundReport("theorem1", ratcore.fingerprint(R), n, d0, r1, ratio, bound, verdict,
                       0.0, bound / ratio if ratio > 0 else math.inf, cert.mode)


def corollary_grid(R, points=COROLLARY_POINTS, margin=COROLLARY_MARGIN):
    """Endpoint-excluded uniform grid, plus the origin and the form's feature points."""
    xs = np.linspace(-1.0 + margin, 1.0 - margin, points)
    sp = ratcore.scale_points(R)
    sp = sp[sp <= 1.0 - margin]
    return np.unique(np.concatenate([xs, sp, -sp, [0.0]]))


def verify_corollary1(R, n: int, cert, points=COROLLARY_POINTS,
                      margin=COROLLARY_MARGIN) -> BoundReport:
    """Check max R'(x)(1 - x**2)/||R|| <= 9**n for increasing R in Q_n."""
    _require_certificate(R, cert)
    deg = ratcore.declared_degree(R)
    if deg is None or deg > n:
        raise DegreeError(f"declared degree {deg} exceeds n = {n}")
    norm = ratcore.sup_norm(R, cert)
    xs = corollary_grid(R, points, margin)
    s = derivative_at(R, xs) * (1.0 - xs * xs) / norm
    i = int(np.argmax(s))
    bound = 9.0 ** n
    verdict = "PASS" if s[i] <= bound else "FAIL"
    return BoundReport("corollary1", ratcore.fingerprint(R), n, float(derivative_at(R, 0.0)),
                       norm, float(s[i]), bound, verdict, float(xs[i]),
                       bound / float(s[i]) if s[i] > 0 else math.inf, cert.mode)


def transfer_bound_profile(R, n: int, x0s, norm: float):
    """For each x0: (H'(0), (1 - x0) R'(x0), 9**n/2 * ||R||) via the odd transfer H."""
    out = []
    for x0 in np.atleast_1d(x0s):
        H = ratcore.transfer_to_odd(R, float(x0))
        out.append((float(derivative_at(H, 0.0)), (1.0 - x0) * float(derivative_at(R, x0)),
                    0.5 * 9.0 ** n * norm))
    return np.array(out)
