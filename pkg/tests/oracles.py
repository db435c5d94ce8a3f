"""Independent brute-force oracles (no code shared with the solvers under test)."""
import numpy as np


def bisect(fun, lo, hi, iters=200):
    """Scalar root by bisection given fun(lo) <= 0 <= fun(hi)."""
    flo = fun(lo)
    if flo == 0:
        return lo
    if fun(hi) == 0:
        return hi
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if (fun(mid) < 0) == (flo < 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def node_residual(f, y):
    """Node residuals written out term by term, no vectorised shortcuts."""
    n = len(y)
    out = []
    for s in range(n):
        acc = 0.0
        for k in range(n):
            acc += 4.0 * 9.0 ** k * y[k] ** 2 * y[s] / (y[k] ** 2 + 3.0 * y[s] ** 2)
        out.append(acc - f(y[s]))
    return np.array(out)


def grid_scan_then_bisect_2d(f, u, v, m=2000):
    """Exhaustive m x m scan of the box, then nested coordinate bisection.

    Inner: for fixed y2, f_1(., y2) changes sign across [u1, v1].
    Outer: h(y2) = f_2(y1*(y2), y2) changes sign across [u2, v2].
    Returns (scan_point, refined_point).
    """
    y1 = np.linspace(u[0], v[0], m)
    y2 = np.linspace(u[1], v[1], m)
    Y1, Y2 = np.meshgrid(y1, y2, indexing="ij")
    r1 = 4 * Y1 ** 3 / (4 * Y1 ** 2) + 36 * Y2 ** 2 * Y1 / (Y2 ** 2 + 3 * Y1 ** 2) - f(Y1)
    r2 = 4 * Y1 ** 2 * Y2 / (Y1 ** 2 + 3 * Y2 ** 2) + 36 * Y2 ** 3 / (4 * Y2 ** 2) - f(Y2)
    i, j = np.unravel_index(np.argmin(np.maximum(np.abs(r1), np.abs(r2))), r1.shape)
    scan = np.array([y1[i], y2[j]])

    def inner(b):
        return bisect(lambda a: node_residual(f, [a, b])[0], u[0], v[0])

    b = bisect(lambda b: node_residual(f, [inner(b), b])[1], u[1], v[1])
    return scan, np.array([inner(b), b])
