"""Rational function forms on [-1, 1], their calculus, norms and monotonicity.

Three concrete forms are supported, plus two composite ones:

* :class:`RationalFn` -- a general ratio p/q of real polynomials.
* :class:`KernelSum` -- odd sums ``sum c_k z_k**2 x / (z_k**2 + 3 x**2)``.
* :class:`LinearPlusBumps` -- ``s x + sum a_j g_j**2 x / (g_j**2 + x**2)``.
* :class:`Difference` -- ``left - right`` for any two forms.
* :class:`Transfer` -- the odd symmetrisation of a function about a point.

Kernel forms are always evaluated term by term in the scaled variable
``t = x / scale``.  Expanding them into a single p/q is only done for degree
bookkeeping and exact Sturm certification, where rational arithmetic keeps
the result exact regardless of how far apart the scales are.
"""
from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import sturm
from .errors import DegenerateInput, DomainError, OverflowRisk

__all__ = [
    "RationalFn", "KernelSum", "LinearPlusBumps", "Difference", "Transfer",
    "OddExtension", "FnExpr", "MonotoneCertificate", "MonotoneFailure",
    "evaluate", "derivative_at", "sup_norm", "certify_increasing",
    "certify_increasing_grid", "to_rational", "transfer_to_odd",
    "exact_expansion", "declared_degree", "fingerprint", "is_odd_exact",
    "scale_points", "scale_spread", "golden_section_min", "chebyshev_points",
    "kernel_bump", "kernel_bump_slope",
]

DEFAULT_NORM_GRID = 2049
DEFAULT_NORM_RTOL = 1e-12
DEFAULT_RANGE_THRESHOLD = 1e12


def _trim_float(coeffs):
    c = [float(v) for v in coeffs]
    while len(c) > 1 and c[-1] == 0.0:
        c.pop()
    return tuple(c) if c else (0.0,)


def kernel_bump(x, scale, stretch=1.0):
    """``x / (1 + stretch (x/scale)**2)``; equals scale**2 x / (scale**2 + stretch x**2)."""
    t = x / scale
    return x / (1.0 + stretch * t * t)


def kernel_bump_slope(x, scale, stretch=1.0):
    """Derivative of :func:`kernel_bump`; 1 at the origin, written to survive t**2 -> inf."""
    t = x / scale
    w = 1.0 / (1.0 + stretch * t * t)
    return w * (2.0 * w - 1.0)


# ---------------------------------------------------------------------------
# forms

@dataclass(frozen=True)
class RationalFn:
    """p/q with coefficients stored in ascending degree order.

    The denominator is certified root-free on [-1, 1] at construction.
    """

    numer: tuple
    denom: tuple
    declared_degree: Optional[int] = None

    def __post_init__(self):
        numer = _trim_float(self.numer)
        denom = _trim_float(self.denom)
        if not all(math.isfinite(c) for c in numer + denom):
            raise DegenerateInput("non-finite coefficient")
        if all(c == 0.0 for c in denom):
            raise DegenerateInput("denominator is identically zero")
        n_num = len(numer) - 1 if any(numer) else 0
        need = max(n_num, len(denom) - 1)
        deg = need if self.declared_degree is None else int(self.declared_degree)
        if deg < need:
            raise DomainError(f"declared degree {deg} below actual degree {need}")
        if len(denom) > 1:
            inner, ma, mb = sturm.roots_in_closed(denom, -1, 1)
            if inner or ma or mb:
                raise DomainError("denominator vanishes on [-1, 1]")
        object.__setattr__(self, "numer", numer)
        object.__setattr__(self, "denom", denom)
        object.__setattr__(self, "declared_degree", deg)

    def __call__(self, x):
        return npoly.polyval(x, self.numer) / npoly.polyval(x, self.denom)

    def deriv(self, x):
        p = npoly.polyval(x, self.numer)
        q = npoly.polyval(x, self.denom)
        dp = npoly.polyval(x, npoly.polyder(self.numer)) if len(self.numer) > 1 else 0.0 * q
        dq = npoly.polyval(x, npoly.polyder(self.denom)) if len(self.denom) > 1 else 0.0 * q
        return (dp * q - p * dq) / (q * q)

    def key(self):
        return ("rational", tuple(c.hex() for c in self.numer),
                tuple(c.hex() for c in self.denom), self.declared_degree)


@dataclass(frozen=True)
class KernelSum:
    """Sum of weighted kernels ``c z**2 x / (z**2 + 3 x**2)``, nodes stored largest first."""

    terms: tuple

    def __post_init__(self):
        terms = tuple((float(c), float(z)) for c, z in self.terms)
        if not terms:
            raise DegenerateInput("empty kernel sum")
        for c, z in terms:
            if not (c > 0 and math.isfinite(c)):
                raise DomainError(f"kernel weight must be positive, got {c}")
            if not (0.0 < z <= 1.0):
                raise DomainError(f"kernel node must lie in (0, 1], got {z}")
        zs = [z for _, z in terms]
        if any(a <= b for a, b in zip(zs, zs[1:])):
            raise DomainError("kernel nodes must be strictly decreasing")
        object.__setattr__(self, "terms", terms)

    @property
    def weights(self):
        return np.array([c for c, _ in self.terms])

    @property
    def nodes(self):
        return np.array([z for _, z in self.terms])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c, z in self.terms:
            out = out + c * kernel_bump(x, z, 3.0)
        return out

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c, z in self.terms:
            out = out + c * kernel_bump_slope(x, z, 3.0)
        return out

    def key(self):
        return ("kernel-sum", tuple((c.hex(), z.hex()) for c, z in self.terms))


@dataclass(frozen=True)
class LinearPlusBumps:
    """``slope * x + sum a g**2 x / (g**2 + x**2)``, scales stored largest first."""

    slope: float
    bumps: tuple = ()

    def __post_init__(self):
        slope = float(self.slope)
        bumps = tuple((float(a), float(g)) for a, g in self.bumps)
        if not (slope > 0 and math.isfinite(slope)):
            raise DomainError(f"slope must be positive, got {slope}")
        for a, g in bumps:
            if not (a > 0 and math.isfinite(a)):
                raise DomainError(f"bump amplitude must be positive, got {a}")
            if not (g > 0 and math.isfinite(g)):
                raise DomainError(f"bump scale must be positive, got {g}")
        gs = [g for _, g in bumps]
        if any(a <= b for a, b in zip(gs, gs[1:])):
            raise DomainError("bump scales must be strictly decreasing")
        object.__setattr__(self, "slope", slope)
        object.__setattr__(self, "bumps", bumps)

    @property
    def amplitudes(self):
        return np.array([a for a, _ in self.bumps])

    @property
    def scales(self):
        return np.array([g for _, g in self.bumps])

    def with_bump(self, amplitude, gamma):
        return LinearPlusBumps(self.slope, self.bumps + ((amplitude, gamma),))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self.slope * x
        for a, g in self.bumps:
            out = out + a * kernel_bump(x, g)
        return out

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, self.slope)
        for a, g in self.bumps:
            out = out + a * kernel_bump_slope(x, g)
        return out

    def key(self):
        return ("linear-plus-bumps", self.slope.hex(),
                tuple((a.hex(), g.hex()) for a, g in self.bumps))


@dataclass(frozen=True)
class Difference:
    left: "FnExpr"
    right: "FnExpr"

    def __call__(self, x):
        return self.left(x) - self.right(x)

    def deriv(self, x):
        return self.left.deriv(x) - self.right.deriv(x)

    def key(self):
        return ("difference", self.left.key(), self.right.key())


@dataclass(frozen=True)
class Transfer:
    """``H(y) = (R(x0 + y h) - R(x0 - y h)) / 2`` with ``h = 1 - x0``."""

    base: "FnExpr"
    x0: float

    def __post_init__(self):
        x0 = float(self.x0)
        if not (0.0 < x0 < 1.0):
            raise DomainError(f"transfer point must lie in (0, 1), got {x0}")
        object.__setattr__(self, "x0", x0)

    @property
    def h(self):
        return 1.0 - self.x0

    def _args(self, y):
        y = np.asarray(y, dtype=float)
        a = np.clip(self.x0 + y * self.h, -1.0, 1.0)
        b = np.clip(self.x0 - y * self.h, -1.0, 1.0)
        return a, b

    def __call__(self, y):
        a, b = self._args(y)
        return 0.5 * (self.base(a) - self.base(b))

    def deriv(self, y):
        a, b = self._args(y)
        return 0.5 * self.h * (self.base.deriv(a) + self.base.deriv(b))

    def key(self):
        return ("transfer", self.base.key(), self.x0.hex())


@dataclass(frozen=True, eq=False)
class OddExtension:
    """Odd extension ``sign(x) f(|x|)`` of a function given on [0, 1].

    Not rational; it exists so non-rational comparison targets can flow
    through the same evaluate/derivative interface.
    """

    f: Callable
    df: Callable
    name: str = "target"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.sign(x) * self.f(np.abs(x))

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        return self.df(np.abs(x))

    def key(self):
        return ("odd-extension", self.name, id(self))


FnExpr = Union[RationalFn, KernelSum, LinearPlusBumps, Difference, Transfer, OddExtension]


def fingerprint(f) -> str:
    return hashlib.sha256(repr(f.key()).encode()).hexdigest()[:20]


# ---------------------------------------------------------------------------
# evaluation

def _check_domain(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0) or np.any(np.isnan(x)):
        raise DomainError("evaluation point outside [-1, 1]")
    return x


def _out(v):
    v = np.asarray(v)
    return float(v) if v.ndim == 0 else v


def evaluate(f, x):
    """f(x) for scalar or array x in [-1, 1]."""
    return _out(f(_check_domain(x)))


def derivative_at(f, x):
    """Closed-form derivative f'(x) for scalar or array x in [-1, 1]."""
    return _out(f.deriv(_check_domain(x)))


def declared_degree(f) -> Optional[int]:
    """Q_n membership bound tracked through compositions; None when not rational."""
    if isinstance(f, RationalFn):
        return f.declared_degree
    if isinstance(f, KernelSum):
        return 2 * len(f.terms)
    if isinstance(f, LinearPlusBumps):
        return 2 * len(f.bumps) + 1
    if isinstance(f, Difference):
        a, b = declared_degree(f.left), declared_degree(f.right)
        return None if a is None or b is None else a + b
    if isinstance(f, Transfer):
        d = declared_degree(f.base)
        return None if d is None else 2 * d
    return None


def scale_points(f):
    """Points in [0, 1] where a multi-scale form has its local features."""
    pts = []
    factors = (1.0 / 3.0, 1.0, math.sqrt(3.0), 3.0)
    if isinstance(f, LinearPlusBumps):
        for _, g in f.bumps:
            pts.extend(g * c for c in factors)
    elif isinstance(f, KernelSum):
        for _, z in f.terms:
            pts.extend(z / math.sqrt(3.0) * c for c in factors)
    elif isinstance(f, Difference):
        pts.extend(scale_points(f.left))
        pts.extend(scale_points(f.right))
    elif isinstance(f, Transfer):
        for p in scale_points(f.base):
            pts.extend([abs(p - f.x0) / f.h, abs(-p - f.x0) / f.h])
    return np.array(sorted(p for p in pts if 0.0 < p <= 1.0))


def scale_spread(f) -> float:
    """Ratio of largest to smallest kernel scale (1 for forms without scales)."""
    if isinstance(f, LinearPlusBumps):
        s = [g for _, g in f.bumps]
    elif isinstance(f, KernelSum):
        s = [z for _, z in f.terms]
    elif isinstance(f, (Difference,)):
        return max(scale_spread(f.left), scale_spread(f.right))
    elif isinstance(f, Transfer):
        return scale_spread(f.base)
    else:
        s = []
    return max(s) / min(s) if s else 1.0


def chebyshev_points(n):
    """Chebyshev extreme points on [-1, 1], ascending, including both endpoints."""
    k = np.arange(n)
    return -np.cos(np.pi * k / (n - 1))


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_min(fun, a, b, rtol=1e-12, max_iter=200):
    """Minimise a scalar function on [a, b]; returns (x, fun(x))."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(max_iter):
        if abs(b - a) <= rtol * max(abs(a), abs(b), 1e-300):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fun(d)
    return (c, fc) if fc < fd else (d, fd)


# ---------------------------------------------------------------------------
# exact expansion and degree bookkeeping

def _F(v):
    return Fraction(float(v))


def exact_expansion(f):
    """Exact (P, Q) as Fraction coefficient lists with f = P/Q."""
    if isinstance(f, RationalFn):
        return [_F(c) for c in f.numer], [_F(c) for c in f.denom]
    if isinstance(f, KernelSum):
        facs = [[_F(z) ** 2, Fraction(0), Fraction(3)] for _, z in f.terms]
        return _sum_of_kernels([(_F(c) * _F(z) ** 2) for c, z in f.terms], facs, None)
    if isinstance(f, LinearPlusBumps):
        facs = [[_F(g) ** 2, Fraction(0), Fraction(1)] for _, g in f.bumps]
        return _sum_of_kernels([(_F(a) * _F(g) ** 2) for a, g in f.bumps], facs, _F(f.slope))
    if isinstance(f, Difference):
        p1, q1 = exact_expansion(f.left)
        p2, q2 = exact_expansion(f.right)
        return sturm.psub(sturm.pmul(p1, q2), sturm.pmul(p2, q1)), sturm.pmul(q1, q2)
    if isinstance(f, Transfer):
        p, q = exact_expansion(f.base)
        x0, h = _F(f.x0), 1 - _F(f.x0)
        pa, qa = sturm.compose_affine(p, x0, h), sturm.compose_affine(q, x0, h)
        pb, qb = sturm.compose_affine(p, x0, -h), sturm.compose_affine(q, x0, -h)
        num = sturm.psub(sturm.pmul(pa, qb), sturm.pmul(pb, qa))
        return num, sturm.pscale(sturm.pmul(qa, qb), 2)
    raise TypeError(f"{type(f).__name__} has no rational expansion")


def _sum_of_kernels(coefs, factors, slope):
    # sum_k coef_k x / factor_k(x) + slope x over the common denominator
    den = [Fraction(1)]
    for fac in factors:
        den = sturm.pmul(den, fac)
    num = [Fraction(0)]
    for k, coef in enumerate(coefs):
        part = [Fraction(0), coef]
        for j, fac in enumerate(factors):
            if j != k:
                part = sturm.pmul(part, fac)
        num = sturm.padd(num, part)
    if slope is not None:
        num = sturm.padd(num, sturm.pmul([Fraction(0), slope], den))
    return num, den


def to_rational(f, range_threshold=DEFAULT_RANGE_THRESHOLD) -> RationalFn:
    """Expand any rational form into a single p/q with float coefficients.

    Warns with :class:`OverflowRisk` when the kernel scales span more than
    ``range_threshold``: the float coefficients then no longer reproduce the
    function accurately near its smallest scales.
    """
    if isinstance(f, RationalFn):
        return f
    if scale_spread(f) > range_threshold:
        warnings.warn(f"kernel scale spread {scale_spread(f):.3g} exceeds "
                      f"{range_threshold:.3g}; expanded coefficients lose accuracy",
                      OverflowRisk, stacklevel=2)
    p, q = exact_expansion(f)
    norm = max(abs(c) for c in q)
    return RationalFn(tuple(float(c / norm) for c in p),
                      tuple(float(c / norm) for c in q),
                      declared_degree(f))


def is_odd_exact(f) -> bool:
    """Exact parity test: P(-x) Q(x) + P(x) Q(-x) vanishes identically."""
    p, q = exact_expansion(f)
    flip = lambda c: [v if i % 2 == 0 else -v for i, v in enumerate(c)]
    return sturm.is_zero(sturm.padd(sturm.pmul(flip(p), q), sturm.pmul(p, flip(q))))


def transfer_to_odd(R, x0) -> Transfer:
    """Odd symmetrisation of R about x0; H'(0) = (1 - x0) R'(x0) and ||H|| <= ||R||."""
    return Transfer(R, x0)


# ---------------------------------------------------------------------------
# monotonicity

@dataclass(frozen=True)
class MonotoneCertificate:
    subject: str
    mode: str
    method: str
    odd: bool
    witness: dict = field(default_factory=dict, hash=False, compare=False)

    ok = True

    def valid_for(self, f) -> bool:
        return self.subject == fingerprint(f)

    def to_dict(self):
        return {"subject": self.subject, "mode": self.mode, "method": self.method,
                "odd": self.odd, "witness": dict(self.witness)}


@dataclass(frozen=True)
class MonotoneFailure:
    subject: str
    mode: str
    method: str
    reason: str
    interval: tuple = (float("nan"), float("nan"))

    ok = False

    def to_dict(self):
        return {"subject": self.subject, "mode": self.mode, "method": self.method,
                "reason": self.reason, "interval": list(self.interval)}


def _derivative_numerator(f):
    p, q = exact_expansion(f)
    return sturm.psub(sturm.pmul(sturm.pderiv(p), q), sturm.pmul(p, sturm.pderiv(q)))


def certify_increasing(f, mode="strict"):
    """Sturm certificate that f' > 0 (strict) or f' >= 0 (weak) on [-1, 1].

    Works on the derivative numerator D = p'q - pq', which has the sign of
    f' because q**2 > 0.  Returns a :class:`MonotoneCertificate` or a
    :class:`MonotoneFailure` carrying an interval that contains a root
    (strict) or a sign change (weak) of D.
    """
    if mode not in ("strict", "weak"):
        raise ValueError(f"mode must be 'strict' or 'weak', got {mode!r}")
    D = _derivative_numerator(f)
    if sturm.is_zero(D):
        raise DegenerateInput("derivative vanishes identically")
    subject = fingerprint(f)
    odd = is_odd_exact(f)
    if sturm.parity(D) == "even" and sturm.degree(D) > 0:
        # even D: work in t = x**2 on [0, 1], halving the degree
        E, lo, hi, var = sturm.even_part_in_square(D), Fraction(0), Fraction(1), "t=x^2"
    else:
        E, lo, hi, var = D, Fraction(-1), Fraction(1), "x"

    def to_x(a, b):
        if var == "x":
            return float(a), float(b)
        return math.sqrt(float(a)), math.sqrt(float(b))

    def fail(reason, interval):
        return MonotoneFailure(subject, mode, "sturm", reason, interval)

    if mode == "strict":
        inner, ma, mb = sturm.roots_in_closed(E, lo, hi)
        if ma:
            return fail("derivative vanishes at endpoint", to_x(lo, lo))
        if mb:
            return fail("derivative vanishes at endpoint", to_x(hi, hi))
        if inner:
            a, b = sturm.isolate_root(E, lo, hi)
            return fail("derivative has a root", to_x(a, b))
        if sturm.sign_at(E, (lo + hi) / 2) <= 0:
            return fail("derivative is negative", to_x(lo, hi))
        witness = {"variable": var, "degree": sturm.degree(E), "roots": 0,
                   "chain_length": len(sturm.sturm_sequence(E))}
        return MonotoneCertificate(subject, mode, "sturm", odd, witness)

    O = sturm.odd_multiplicity_part(E)
    inner = 0
    if sturm.degree(O) >= 1:
        inner, _, _ = sturm.roots_in_closed(O, lo, hi)
    if inner:
        Od, _ = sturm._deflate(O, lo)
        Od, _ = sturm._deflate(Od, hi)
        a, b = sturm.isolate_root(Od, lo, hi)
        return fail("derivative changes sign", to_x(a, b))
    probe = lo + (hi - lo) / 2
    k = 3
    while sturm.sign_at(E, probe) == 0:
        probe = lo + (hi - lo) / k
        k += 1
    if sturm.sign_at(E, probe) < 0:
        return fail("derivative is non-positive", to_x(lo, hi))
    witness = {"variable": var, "degree": sturm.degree(E), "odd_part_degree": sturm.degree(O),
               "sign_changes": 0}
    return MonotoneCertificate(subject, mode, "sturm", odd, witness)


def certify_increasing_grid(f, mode="strict", points=10_000, odd=None):
    """Sampled cross-check: sign of f' on a uniform grid plus the form's feature points."""
    xs = np.linspace(-1.0, 1.0, points)
    sp = scale_points(f)
    xs = np.unique(np.concatenate([xs, sp, -sp, [0.0]]))
    d = f.deriv(xs)
    dmin = float(np.min(d))
    ok = dmin > 0 if mode == "strict" else dmin >= 0
    subject = fingerprint(f)
    if not ok:
        i = int(np.argmin(d))
        return MonotoneFailure(subject, mode, "grid", "sampled derivative not positive",
                               (float(xs[max(i - 1, 0)]), float(xs[min(i + 1, len(xs) - 1)])))
    if odd is None:
        probe = np.linspace(0.0, 1.0, 101)
        odd = bool(np.allclose(f(-probe), -f(probe), rtol=1e-13, atol=1e-300))
    return MonotoneCertificate(subject, mode, "grid", odd,
                               {"grid_min": dmin, "points": int(xs.size)})


# ---------------------------------------------------------------------------
# norm

def sup_norm(f, hint=None, grid=DEFAULT_NORM_GRID, rtol=DEFAULT_NORM_RTOL) -> float:
    """Uniform norm on [-1, 1].

    With a valid monotone certificate the norm is read off the endpoints.
    Otherwise |f| is maximised over Chebyshev points (plus the form's feature
    points) and the best sample is refined by golden-section search.
    """
    if hint is not None and hint.ok and hint.valid_for(f):
        if hint.odd:
            return abs(float(f(np.float64(1.0))))
        return max(abs(float(f(np.float64(-1.0)))), abs(float(f(np.float64(1.0)))))
    sp = scale_points(f)
    xs = np.unique(np.concatenate([chebyshev_points(grid), sp, -sp]))
    vals = np.abs(f(xs))
    i = int(np.argmax(vals))
    best = float(vals[i])
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    if hi > lo:
        _, neg = golden_section_min(lambda t: -abs(float(f(np.float64(t)))), lo, hi, rtol)
        best = max(best, -neg)
    return best
