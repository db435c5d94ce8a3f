import math

import numpy as np
import pytest

from monorat.errors import CertificateMissing, InvalidEpsilon, NonPositiveSlope
from monorat.extremal import add_bump, construct, min_slope, plateau_radius, ratio
from monorat.ratcore import (LinearPlusBumps, certify_increasing, declared_degree,
                             derivative_at, exact_expansion, sup_norm)

IDENTITY = LinearPlusBumps(1.0)


def test_plateau_identity():
    assert plateau_radius(IDENTITY, 0.1) == 1.0


def test_plateau_monotone_in_eps():
    R = LinearPlusBumps(1.0, ((7.84, 0.01),))
    radii = [plateau_radius(R, e) for e in (0.01, 0.1, 1.0, 4.0)]
    assert all(a <= b for a, b in zip(radii, radii[1:]))
    # R' = 1 + a (g^2 - x^2) g^2/(g^2 + x^2)^2 and R' > R'(0) - eps holds below the radius
    a = 7.84
    xs = np.linspace(0, radii[1], 1000)
    assert np.all(R.deriv(xs) > 8.84 - 0.1)


def test_min_slope_identity():
    assert min_slope(IDENTITY) == 1.0


@pytest.mark.parametrize("a", [0.5, 2.0, 7.84])
def test_min_slope_matches_dense_scan(a):
    R = LinearPlusBumps(1.0, ((a, 0.1),))
    got = min_slope(R)
    xs = np.linspace(-1, 1, 1_000_001)
    scan = float(np.min(R.deriv(xs)))
    assert abs(got - scan) <= 1e-9
    assert got >= 1 - a / 8 - 1e-12


def test_min_slope_raises_when_not_monotone():
    with pytest.raises(NonPositiveSlope):
        min_slope(LinearPlusBumps(1.0, ((16.0, 0.1),)))


def test_add_bump_first_stage():
    G = add_bump(IDENTITY, 0.01)
    assert float(derivative_at(G, 0.0)) == pytest.approx(8.84, abs=1e-14)
    (amp, gamma), = G.bumps
    assert amp == pytest.approx(7.84)
    # norm grows by at most 4 (R'(0) - 2 eps) gamma, measured without a certificate
    assert sup_norm(G) <= 1.0 + 4 * 0.98 * gamma + 1e-12


def test_add_bump_invalid_epsilon():
    with pytest.raises(InvalidEpsilon):
        add_bump(IDENTITY, 0.6)
    with pytest.raises(InvalidEpsilon):
        add_bump(IDENTITY, 0.0)


def test_construct_n1_is_identity():
    rep = construct(1)
    assert rep.function == IDENTITY and rep.ratio == 1.0 and not rep.stages


def test_construct_n2():
    rep = construct(2)
    assert rep.derivative_at_zero == pytest.approx(8.84, abs=1e-14)
    assert rep.ratio >= 0.8 * 9
    assert rep.certificate.method == "sturm"


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_construct_structure(n):
    rep = construct(n)
    R = rep.function
    assert declared_degree(R) == 2 * n - 1
    P, Q = exact_expansion(R)
    assert max(i for i, c in enumerate(P) if c) <= 2 * n - 1
    assert max(i for i, c in enumerate(Q) if c) <= 2 * n - 1
    assert all(a > b for a, b in zip(R.scales, R.scales[1:]))
    d = 1.0
    for s in rep.stages:
        d = 9 * d - 16 * s.epsilon
    assert rep.derivative_at_zero == pytest.approx(d, rel=1e-15)


@pytest.mark.parametrize("c", [0.5, 2.0, 10.0])
def test_ratio_scale_invariant(c):
    R = construct(3).function
    S = LinearPlusBumps(c * R.slope, tuple((c * a, g) for a, g in R.bumps))
    assert ratio(S, certify_increasing(S)) == pytest.approx(ratio(R, certify_increasing(R)),
                                                            rel=1e-12)


def test_ratio_needs_certificate():
    with pytest.raises(CertificateMissing):
        ratio(IDENTITY, None)


def test_report_rows():
    rep = construct(3)
    rows = rep.stage_rows()
    assert [r[0] for r in rows] == [1, 2]
    d = rep.to_dict()
    assert d["declared_degree"] == 5 and len(d["stages"]) == 2
    assert math.isclose(rep.ratio_fraction, rep.ratio / 81)
