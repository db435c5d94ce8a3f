from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from monorat import sturm

X = sp.symbols("x")


def _sympy_count(p, a, b):
    P = sp.Poly(list(reversed(p)), X)
    if P.degree() < 1:
        return 0
    return len({r for r in sp.real_roots(P) if a < r < b})


def _random_polys(seed, count=150):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        d = int(rng.integers(1, 9))
        p = [int(v) for v in rng.integers(-5, 6, d + 1)]
        if p[-1] == 0:
            p[-1] = 1
        if rng.random() < 0.3:
            q = [int(rng.integers(-3, 4)), 1]
            p = sturm.pmul(sturm.pmul(p, q), q)
        yield p


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_interior_root_count_matches_sympy(seed):
    for p in _random_polys(seed):
        inner, _, _ = sturm.roots_in_closed(p, -1, Fraction(1, 2))
        assert inner == _sympy_count(p, -1, sp.Rational(1, 2)), p


def test_odd_multiplicity_part_matches_sympy():
    for p in _random_polys(7):
        P = sp.Poly(list(reversed(p)), X)
        odd = sp.Integer(1)
        for fac, mult in sp.sqf_list(P)[1]:
            if mult % 2:
                odd *= fac.as_expr()
        O = sturm.odd_multiplicity_part(p)
        ratio = sp.cancel(sp.Poly(list(reversed(O)), X).as_expr() / odd)
        assert ratio.is_number, (p, O, odd)


def test_endpoint_multiplicities():
    # (x+1)^2 (x - 1/2) (x - 1)
    p = sturm.pmul(sturm.pmul([1, 1], [1, 1]), sturm.pmul([Fraction(-1, 2), 1], [-1, 1]))
    assert sturm.roots_in_closed(p, -1, 1) == (1, 2, 1)


def test_isolate_root_brackets_sqrt2():
    a, b = sturm.isolate_root([-2, 0, 1], 0, 2)
    assert a * a < 2 < b * b
    assert b - a <= Fraction(1, 2 ** 24)


def test_compose_affine():
    p = [1, 2, 3]  # 1 + 2x + 3x^2 at x = 1 + 2y
    assert sturm.compose_affine(p, 1, 2) == [6, 16, 12]


def test_parity_and_square_substitution():
    assert sturm.parity([1, 0, 2, 0, 5]) == "even"
    assert sturm.parity([0, 1, 0, 2]) == "odd"
    assert sturm.parity([1, 1]) is None
    assert sturm.even_part_in_square([1, 0, 2, 0, 5]) == [1, 2, 5]
