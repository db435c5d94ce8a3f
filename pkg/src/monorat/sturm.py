"""Exact univariate polynomial arithmetic and Sturm root counting.

Polynomials are lists of coefficients in ascending degree order.  Every
float converts exactly to a :class:`~fractions.Fraction`, so a Sturm count
performed here is exact for the binary coefficient data it is given; no
rounding enters after the conversion.

Remainder sequences are computed over the integers with primitive
pseudo-remainders, which keeps coefficient growth in check.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd

__all__ = [
    "trim", "degree", "padd", "psub", "pmul", "pscale", "pderiv", "peval",
    "compose_affine", "is_zero", "parity", "even_part_in_square",
    "to_primitive", "sturm_sequence", "count_roots", "roots_in_closed",
    "squarefree_decomposition", "odd_multiplicity_part", "isolate_root",
    "sign_at",
]


def trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p if p else [0]


def is_zero(p):
    return all(c == 0 for c in p)


def degree(p):
    p = trim(p)
    if is_zero(p):
        return -1
    return len(p) - 1


def padd(a, b):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                 for i in range(n)])


def psub(a, b):
    return padd(a, [-c for c in b])


def pscale(a, s):
    return trim([c * s for c in a])


def pmul(a, b):
    if is_zero(a) or is_zero(b):
        return [0]
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return trim(out)


def pderiv(p):
    if len(p) <= 1:
        return [0]
    return trim([i * p[i] for i in range(1, len(p))])


def peval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def compose_affine(p, a, b):
    """Return p(a + b*y) as a polynomial in y."""
    out = [0]
    lin = [a, b]
    for c in reversed(p):
        out = padd(pmul(out, lin), [c])
    return out


def parity(p):
    """'even', 'odd', or None for mixed (the zero polynomial counts as even)."""
    p = trim(p)
    if all(c == 0 for c in p[1::2]):
        return "even"
    if all(c == 0 for c in p[0::2]):
        return "odd"
    return None


def even_part_in_square(p):
    """For an even p(x) return E with p(x) = E(x**2)."""
    return trim(list(p[0::2]))


def to_primitive(p):
    """Clear denominators and divide out the content; the sign is kept."""
    p = trim([Fraction(c) for c in p])
    if is_zero(p):
        return [0]
    den = reduce(lambda a, b: a * b // gcd(a, b), (c.denominator for c in p), 1)
    ints = [int(c * den) for c in p]
    g = reduce(gcd, (abs(c) for c in ints if c != 0))
    return [c // g for c in ints]


def _prem(a, b):
    """Pseudo-remainder of integer polynomials: lc(b)**(da-db+1) * a mod b."""
    a = list(a)
    db = len(b) - 1
    lcb = b[-1]
    k = len(a) - 1 - db + 1
    while len(a) - 1 >= db and not is_zero(a):
        lca = a[-1]
        shift = len(a) - 1 - db
        a = [c * lcb for c in a]
        for i, bi in enumerate(b):
            a[i + shift] -= lca * bi
        a = trim(a[:-1]) if len(a) > 1 else [0]
        k -= 1
    # multiply by the remaining power so the total factor is lcb**(da-db+1)
    if k > 0:
        a = [c * lcb ** k for c in a]
    return trim(a)


def _signed_prem(a, b):
    """Remainder of a by b up to a positive factor."""
    da, db = len(a) - 1, len(b) - 1
    r = _prem(a, b)
    if b[-1] < 0 and (da - db + 1) % 2 == 1:
        r = [-c for c in r]
    return r


def sturm_sequence(p):
    """Sturm chain of p with every member primitive over the integers."""
    p0 = to_primitive(p)
    if degree(p0) < 1:
        return [p0]
    seq = [p0, to_primitive(pderiv(p0))]
    while degree(seq[-1]) > 0:
        r = _signed_prem(seq[-2], seq[-1])
        if is_zero(r):
            break
        seq.append(to_primitive([-c for c in r]))
    return seq


def sign_at(p, x):
    v = peval(p, Fraction(x))
    return (v > 0) - (v < 0)


def _variations(seq, x):
    signs = [s for s in (sign_at(q, x) for q in seq) if s != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def count_roots(p, a, b, seq=None):
    """Number of distinct real roots of p in (a, b].

    Requires p(a) != 0; use :func:`roots_in_closed` when an endpoint may be a root.
    """
    if seq is None:
        seq = sturm_sequence(p)
    if degree(seq[0]) < 1:
        return 0
    return _variations(seq, Fraction(a)) - _variations(seq, Fraction(b))


def _deflate(p, r):
    """Divide out every factor (x - r) of p; returns (quotient, multiplicity)."""
    p = [Fraction(c) for c in trim(p)]
    r = Fraction(r)
    m = 0
    while degree(p) >= 1 and peval(p, r) == 0:
        # synthetic division
        out = [Fraction(0)] * (len(p) - 1)
        acc = Fraction(0)
        for i in range(len(p) - 1, 0, -1):
            acc = acc * r + p[i]
            out[i - 1] = acc
        p = trim(out)
        m += 1
    return p, m


def roots_in_closed(p, a, b):
    """Return (interior_count, mult_at_a, mult_at_b) for distinct roots of p on [a, b]."""
    a, b = Fraction(a), Fraction(b)
    q, ma = _deflate(p, a)
    q, mb = _deflate(q, b)
    if degree(q) < 1:
        return 0, ma, mb
    seq = sturm_sequence(q)
    return count_roots(q, a, b, seq), ma, mb


def _pdiv_exact(a, b):
    a = [Fraction(c) for c in trim(a)]
    b = [Fraction(c) for c in trim(b)]
    db = len(b) - 1
    if db < 0 or is_zero(b):
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - db, 1)
    while len(a) - 1 >= db and not is_zero(a):
        shift = len(a) - 1 - db
        c = a[-1] / b[-1]
        q[shift] = c
        for i, bi in enumerate(b):
            a[i + shift] -= c * bi
        a = trim(a[:-1]) if len(a) > 1 else [Fraction(0)]
    if not is_zero(a):
        raise ArithmeticError("inexact polynomial division")
    return trim(q)


def _pgcd(a, b):
    a, b = to_primitive(a), to_primitive(b)
    if is_zero(b):
        return a
    if is_zero(a):
        return b
    if degree(a) < degree(b):
        a, b = b, a
    while not is_zero(b) and degree(b) >= 0:
        r = _prem(a, b)
        a, b = b, (to_primitive(r) if not is_zero(r) else [0])
    return a


def squarefree_decomposition(p):
    """Yun's algorithm: list of (multiplicity, factor) with p = c * prod factor**mult."""
    f = [Fraction(c) for c in trim(p)]
    if degree(f) < 1:
        return []
    df = pderiv(f)
    a = _pgcd(f, df)
    b = _pdiv_exact(f, a)
    c = _pdiv_exact(df, a)
    d = psub(c, pderiv(b))
    out = []
    i = 1
    while degree(b) >= 1:
        a = _pgcd(b, d) if not is_zero(d) else to_primitive(b)
        b = _pdiv_exact(b, a)
        c = _pdiv_exact(d, a) if not is_zero(d) else [Fraction(0)]
        d = psub(c, pderiv(b))
        if degree(a) >= 1:
            out.append((i, to_primitive(a)))
        i += 1
    return out


def odd_multiplicity_part(p):
    """Product of the square-free factors that occur with odd multiplicity."""
    out = [1]
    for mult, fac in squarefree_decomposition(p):
        if mult % 2 == 1:
            out = pmul(out, fac)
    return to_primitive(out)


def isolate_root(p, a, b, width=Fraction(1, 2 ** 24)):
    """Shrink (a, b] to a subinterval of the given width still holding a root of p."""
    seq = sturm_sequence(p)
    a, b = Fraction(a), Fraction(b)
    if count_roots(p, a, b, seq) == 0:
        raise ValueError("no root in interval")
    while b - a > width:
        m = (a + b) / 2
        if count_roots(p, a, m, seq) > 0:
            b = m
        else:
            a = m
    return a, b
