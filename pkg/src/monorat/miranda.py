"""Root finding on boxes for fields satisfying Poincare-Miranda face signs.

If every component f_k is negative on the lower face ``y_k = u_k`` and
positive on the upper face ``y_k = v_k``, the field has a zero in the box.
The solver makes that constructive: map the box to [-1, 1]^n, normalise

    phi_k(x) = f_k(x) / (|f_k(x)| + 1 - x_k**2),

so that |phi_k| <= 1 and phi_k = +-1 on the faces, and iterate the
self-map ``x -> x - mu * phi(x)``, whose fixed points are exactly the zeros.
The damping mu is halved whenever the residual stalls.  A finite-difference
Newton polish finishes the last digits.

Face checks are sampled, so a PASS is evidence, not a proof.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (DimensionMismatch, NoConvergence, SignConditionViolated,
                     SingularJacobian)

__all__ = ["BoxN", "VectorField", "SolverConfig", "FaceCheck", "IterateResult",
           "PolishResult", "MirandaReport", "check_face_signs", "normalized_field",
           "brouwer_iterate", "newton_polish", "solve"]

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BoxN:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float)).copy()
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float)).copy()
        if lo.shape != hi.shape or lo.ndim != 1 or lo.size < 1:
            raise DimensionMismatch("box bounds must be equal-length 1-D vectors")
        if not np.all(lo < hi):
            raise ValueError("box needs lower < upper in every coordinate")
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self):
        return self.lower.size

    @property
    def center(self):
        return 0.5 * (self.lower + self.upper)

    @property
    def halfwidth(self):
        return 0.5 * (self.upper - self.lower)

    def from_unit(self, x):
        return self.center + self.halfwidth * np.asarray(x)

    def to_unit(self, y):
        return (np.asarray(y) - self.center) / self.halfwidth

    def contains(self, y, slack=0.0):
        y = np.asarray(y)
        return bool(np.all(y >= self.lower - slack) and np.all(y <= self.upper + slack))

    def clip(self, y):
        return np.clip(y, self.lower, self.upper)


@dataclass(frozen=True, eq=False)
class VectorField:
    """A field on R^n evaluated as ``fn(y)`` with y of shape (..., n) -> (..., n)."""

    dim: int
    fn: Callable

    @classmethod
    def from_components(cls, components: Sequence[Callable]):
        comps = list(components)

        def fn(y):
            y = np.asarray(y, dtype=float)
            return np.stack([np.asarray(c(y), dtype=float) * np.ones(y.shape[:-1])
                             for c in comps], axis=-1)

        return cls(len(comps), fn)

    def __call__(self, y):
        return np.asarray(self.fn(np.asarray(y, dtype=float)), dtype=float)


@dataclass(frozen=True)
class SolverConfig:
    mu_init: float = 0.1
    mu_min: float = 1e-12
    max_iter: int = 100_000
    tol: float = 1e-10
    face_samples: int = 33
    max_face_points: int = 100_000
    patience: int = 25
    polish_from: float = 1e-6
    record_path: bool = False

    def __post_init__(self):
        if not (0 < self.mu_min <= self.mu_init):
            raise ValueError("need 0 < mu_min <= mu_init")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.face_samples < 2:
            raise ValueError("face_samples must be at least 2")


@dataclass
class FaceCheck:
    plus_min: np.ndarray
    minus_max: np.ndarray
    verdict: str
    violated: list = field(default_factory=list)
    samples_per_dim: int = 0

    def to_dict(self):
        return {"plus_min": self.plus_min.tolist(), "minus_max": self.minus_max.tolist(),
                "verdict": self.verdict,
                "violated": [{"k": k + 1, "face": side} for k, side in self.violated],
                "samples_per_dim": self.samples_per_dim}


@dataclass
class IterateResult:
    x: np.ndarray
    residual: float
    iterations: int
    mu: float
    path: Optional[list] = None


@dataclass
class PolishResult:
    x: np.ndarray
    residual: float
    steps: int
    converged: bool
    flag: Optional[str] = None


@dataclass
class MirandaReport:
    face_check: FaceCheck
    solution: Optional[np.ndarray]
    residual_inf: float
    iterations: int
    status: str
    polish_steps: int = 0
    mu_final: float = float("nan")
    path: Optional[list] = None

    @property
    def ok(self):
        return self.solution is not None

    def to_dict(self):
        return {"status": self.status, "face_check": self.face_check.to_dict(),
                "solution": None if self.solution is None else self.solution.tolist(),
                "residual_inf": self.residual_inf, "iterations": self.iterations,
                "polish_steps": self.polish_steps, "mu_final": self.mu_final,
                "path": self.path}


def _check_dims(F, box):
    if F.dim != box.dim:
        raise DimensionMismatch(f"field has dimension {F.dim}, box has {box.dim}")


def check_face_signs(F: VectorField, box: BoxN, cfg: SolverConfig = SolverConfig()) -> FaceCheck:
    """Sample every face pair and report the worst sign margins.

    Verdict is PASS when all margins are strict, WEAK when a face value
    touches zero within ``cfg.tol`` (the non-strict Miranda conditions still
    guarantee a zero), FAIL otherwise.
    """
    _check_dims(F, box)
    n = box.dim
    m = cfg.face_samples
    if n > 1:
        while m > 2 and 2 * n * m ** (n - 1) > cfg.max_face_points:
            m -= 1
    plus_min = np.empty(n)
    minus_max = np.empty(n)
    for k in range(n):
        others = [np.linspace(box.lower[i], box.upper[i], m) for i in range(n) if i != k]
        if others:
            lattice = np.array(list(itertools.product(*others)))
        else:
            lattice = np.empty((1, 0))
        for side, val in (("plus", box.upper[k]), ("minus", box.lower[k])):
            pts = np.insert(lattice, k, val, axis=1)
            fk = F(pts)[:, k]
            if side == "plus":
                plus_min[k] = np.min(fk)
            else:
                minus_max[k] = np.max(fk)
    violated = []
    weak = False
    for k in range(n):
        if plus_min[k] <= 0:
            if plus_min[k] >= -cfg.tol:
                weak = True
            else:
                violated.append((k, "plus"))
        if minus_max[k] >= 0:
            if minus_max[k] <= cfg.tol:
                weak = True
            else:
                violated.append((k, "minus"))
    verdict = "FAIL" if violated else ("WEAK" if weak else "PASS")
    return FaceCheck(plus_min, minus_max, verdict, violated, m)


def normalized_field(F: VectorField, box: BoxN, x):
    """phi(x) on the unit cube, with phi_k = 0 where the denominator vanishes."""
    x = np.asarray(x, dtype=float)
    fy = F(box.from_unit(x))
    den = np.abs(fy) + (1.0 - x * x)
    with np.errstate(invalid="ignore", divide="ignore"):
        phi = np.where(den > 0, fy / np.where(den > 0, den, 1.0), 0.0)
    return phi, fy


def brouwer_iterate(F: VectorField, box: BoxN, cfg: SolverConfig = SolverConfig(),
                    x_start=None) -> IterateResult:
    """Damped iteration of x -> x - mu * phi(x) on the unit cube.

    Starts from the box centre unless ``x_start`` (box coordinates) is given.
    Steps that would cross a face are projected back onto it; a projection
    against a face whose field sign contradicts the Miranda condition raises
    :class:`SignConditionViolated`.
    """
    _check_dims(F, box)
    x = np.zeros(box.dim) if x_start is None else box.to_unit(box.clip(x_start))
    mu = cfg.mu_init
    phi, fy = normalized_field(F, box, x)
    res = float(np.max(np.abs(fy)))
    best, best_x, stall = res, x.copy(), 0
    path = [box.from_unit(x).tolist()] if cfg.record_path else None
    it = 0
    while res > cfg.tol:
        if it >= cfg.max_iter:
            raise NoConvergence(f"no convergence in {cfg.max_iter} iterations",
                                box.from_unit(best_x), best, it)
        assert np.all(np.abs(phi) <= 1.0 + 1e-15), "normalised field left [-1, 1]"
        on_hi = (x >= 1.0) & (phi < 0)
        on_lo = (x <= -1.0) & (phi > 0)
        if np.any(on_hi | on_lo):
            k = int(np.flatnonzero(on_hi | on_lo)[0])
            raise SignConditionViolated(
                f"component {k + 1} has the wrong sign on face "
                f"{'upper' if on_hi[k] else 'lower'} at y={box.from_unit(x).tolist()}")
        x = np.clip(x - mu * phi, -1.0, 1.0)
        assert np.all(np.abs(x) <= 1.0), "iterate left the box"
        phi, fy = normalized_field(F, box, x)
        res = float(np.max(np.abs(fy)))
        it += 1
        if path is not None:
            path.append(box.from_unit(x).tolist())
        if res < best:
            best, best_x, stall = res, x.copy(), 0
        else:
            stall += 1
            if stall >= cfg.patience:
                mu *= 0.5
                stall = 0
                if mu < cfg.mu_min:
                    raise NoConvergence(f"damping fell below {cfg.mu_min}",
                                        box.from_unit(best_x), best, it)
    return IterateResult(box.from_unit(x), res, it, mu, path)


def _fd_jacobian(F, y, fy, box):
    n = y.size
    J = np.empty((n, n))
    for i in range(n):
        h = 1e-7 * (1.0 + abs(y[i]))
        yp = y.copy()
        if box is not None and yp[i] + h > box.upper[i]:
            h = -h
        yp[i] += h
        J[:, i] = (F(yp) - fy) / h
    return J


def newton_polish(F: VectorField, x0, tol: float, box: Optional[BoxN] = None,
                  max_steps: int = 50) -> PolishResult:
    """Damped Newton with a forward-difference Jacobian, steps clipped to ``box``."""
    x = np.array(x0, dtype=float)
    fx = F(x)
    res = float(np.max(np.abs(fx)))
    steps = 0
    while res > tol and steps < max_steps:
        J = _fd_jacobian(F, x, fx, box)
        try:
            if not np.all(np.isfinite(J)) or np.linalg.cond(J) > 1e14:
                raise np.linalg.LinAlgError("ill-conditioned")
            dx = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError:
            log.debug("singular Jacobian at %s", x)
            return PolishResult(np.array(x0, dtype=float), float(np.max(np.abs(F(x0)))),
                                steps, False, SingularJacobian.__name__)
        t = 1.0
        for _ in range(40):
            xt = x + t * dx
            if box is not None:
                xt = box.clip(xt)
            ft = F(xt)
            rt = float(np.max(np.abs(ft)))
            if rt < res:
                break
            t *= 0.5
        else:
            return PolishResult(x, res, steps, False, NoConvergence.__name__)
        x, fx, res = xt, ft, rt
        steps += 1
    conv = res <= tol
    return PolishResult(x, res, steps, conv, None if conv else NoConvergence.__name__)


def solve(F: VectorField, box: BoxN, cfg: SolverConfig = SolverConfig(),
          override: bool = False) -> MirandaReport:
    """Face check, damped iteration down to ``cfg.polish_from``, Newton to ``cfg.tol``."""
    fc = check_face_signs(F, box, cfg)
    if fc.verdict == "FAIL" and not override:
        return MirandaReport(fc, None, float("nan"), 0, "face-sign-failure")
    coarse = replace(cfg, tol=max(cfg.tol, cfg.polish_from))
    try:
        it = brouwer_iterate(F, box, coarse)
    except NoConvergence as e:
        return MirandaReport(fc, None, float(e.residual), int(e.iterations), "no-convergence")
    except SignConditionViolated as e:
        log.info("%s", e)
        return MirandaReport(fc, None, float("nan"), 0, "sign-condition-violated")
    pol = newton_polish(F, it.x, cfg.tol, box)
    x, res, iters, mu = pol.x, pol.residual, it.iterations, it.mu
    if not pol.converged:
        try:
            fin = brouwer_iterate(F, box, cfg, x_start=x if pol.residual < it.residual else it.x)
        except (NoConvergence, SignConditionViolated) as e:
            return MirandaReport(fc, None, float(getattr(e, "residual", float("nan")) or np.nan),
                                 iters, "no-convergence", pol.steps, mu, it.path)
        x, res, iters, mu = fin.x, fin.residual, iters + fin.iterations, fin.mu
    if res > cfg.tol or not box.contains(x):
        return MirandaReport(fc, None, res, iters, "no-convergence", pol.steps, mu, it.path)
    return MirandaReport(fc, np.asarray(x), res, iters, "converged", pol.steps, mu, it.path)
