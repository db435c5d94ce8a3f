import math

import numpy as np
import pytest

from monorat.comparison import (TargetFn, build_comparison_L, build_residual_system,
                                f_delta, find_thresholds, odd_extension, sign_pattern_check,
                                slope_fn, solve_interpolation_nodes, transfer_bound_profile,
                                verify_corollary1, verify_theorem1)
from monorat.errors import (CertificateMissing, DegreeError, ParityError, PatternViolation,
                            SlopeTooSmall)
from monorat.miranda import check_face_signs
from monorat.ratcore import (Difference, LinearPlusBumps, RationalFn, certify_increasing,
                             derivative_at, evaluate, sup_norm)

from generators import tilted_kernel_sum
from oracles import bisect


def closed_form_thresholds(delta, n):
    i = np.arange(n)
    return (1 + delta) / (3 * 9.0 ** i) - delta, (1 + delta) / 9.0 ** i - delta


def test_target_validation():
    with pytest.raises(ValueError):
        TargetFn(lambda x: x + 0.1, 1.0)
    with pytest.raises(ValueError):
        TargetFn(lambda x: 2 * x, 2.0)
    with pytest.raises(ValueError):
        TargetFn(lambda x: 4 * x * (1 - x) + x ** 3, 4.0)


def test_slope_fn_near_origin():
    f = f_delta(0.1)
    assert slope_fn(f, 0.0) == pytest.approx(11.0, rel=1e-15)
    x = np.array([1e-12, 1e-9, 1e-8, 1e-4, 0.5, 1.0])
    assert np.allclose(slope_fn(f, x), 1.1 / (x + 0.1), rtol=1e-9)


def test_thresholds_n1_delta_tenth():
    t = find_thresholds(f_delta(0.1), 1)
    assert t.u[0] == pytest.approx(0.26666666666666666, abs=1e-12)
    assert t.v[0] == 1.0


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_thresholds_match_closed_form(n):
    delta = 2 / 9 ** n
    t = find_thresholds(f_delta(delta), n)
    u, v = closed_form_thresholds(delta, n)
    assert np.max(np.abs(t.u - u)) <= 1e-10 and np.max(np.abs(t.v - v)) <= 1e-10
    assert t.ordering_ok() and t.scale_separation_ok()


def test_thresholds_against_bisection_oracle():
    # target without closed-form thresholds
    f = TargetFn(lambda x: np.arctan(20 * x) / np.arctan(20.0), 20 / math.atan(20.0), "atan")
    t = find_thresholds(f, 1)
    for level, x in ((3.0, t.u[0]), (1.0, t.v[0])):
        ref = bisect(lambda s: level - f.f(s) / s, 1e-9, 1.0) if level > 1 else 1.0
        assert x == pytest.approx(ref, abs=1e-10)


def test_slope_too_small():
    with pytest.raises(SlopeTooSmall):
        find_thresholds(f_delta(0.5), 1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_residual_field_face_signs(n):
    f = f_delta(2 / 9 ** n)
    F, box = build_residual_system(f, find_thresholds(f, n))
    assert check_face_signs(F, box).verdict in ("PASS", "WEAK")


@pytest.mark.parametrize("n", [2, 3])
def test_comparison_function_at_nodes(n):
    f = f_delta(2 / 9 ** n)
    nodes = solve_interpolation_nodes(f, n)
    R = odd_extension(f)
    L = build_comparison_L(R, nodes)
    assert np.max(np.abs(evaluate(L, nodes.z))) <= 1e-9
    expect = (9.0 ** n - 1) / 2 - f.f0_slope
    assert float(derivative_at(L, 0.0)) == pytest.approx(expect, rel=1e-12)
    rep = sign_pattern_check(L, nodes)
    assert rep.ok and rep.zero_count >= 4 * n + 1


def test_self_difference_vanishes():
    R = LinearPlusBumps(1.0, ((3.0, 0.2),))
    L = Difference(R, R)
    assert np.all(evaluate(L, np.linspace(-1, 1, 101)) == 0.0)


def test_sign_pattern_rejects_non_comparison():
    f = f_delta(2 / 81)
    nodes = solve_interpolation_nodes(f, 2)
    L = build_comparison_L(LinearPlusBumps(1.0), nodes)
    with pytest.raises(PatternViolation):
        sign_pattern_check(L, nodes)
    assert not sign_pattern_check(L, nodes, raise_on_violation=False).ok


def test_comparison_requires_odd():
    f = f_delta(2 / 81)
    nodes = solve_interpolation_nodes(f, 2)
    with pytest.raises(ParityError):
        build_comparison_L(RationalFn((0.0, 1.0, 0.5), (1.0,)), nodes)


def test_slope_bound_identity():
    R = LinearPlusBumps(1.0)
    rep = verify_theorem1(R, 1, certify_increasing(R))
    assert rep.passed and rep.ratio == 1.0 and rep.upper_bound == 4.5


def test_slope_bound_requires_certificate_and_degree():
    R = LinearPlusBumps(1.0, ((2.0, 0.3),))
    with pytest.raises(CertificateMissing):
        verify_theorem1(R, 2, None)
    with pytest.raises(CertificateMissing):
        verify_theorem1(R, 2, certify_increasing(LinearPlusBumps(1.0)))
    with pytest.raises(DegreeError):
        verify_theorem1(R, 1, certify_increasing(R))


def test_slope_bound_parity():
    R = RationalFn((0.0, 1.0, 0.1), (1.0,))
    with pytest.raises(ParityError):
        verify_theorem1(R, 1, certify_increasing(R))


def test_slope_and_envelope_bounds_random():
    rng = np.random.default_rng(7)
    for _ in range(20):
        m = int(rng.integers(1, 5))
        R, cert = tilted_kernel_sum(rng, m)
        assert verify_theorem1(R, m + 1, cert).passed
        assert verify_corollary1(R, 2 * m + 1, cert).passed


def test_envelope_bound_identity():
    R = LinearPlusBumps(1.0)
    rep = verify_corollary1(R, 1, certify_increasing(R))
    assert rep.passed and rep.ratio == pytest.approx(1.0) and rep.worst_x == 0.0


def test_transfer_profile_consistency():
    R = LinearPlusBumps(1.0, ((7.84, 0.05),))
    cert = certify_increasing(R)
    norm = sup_norm(R, cert)
    prof = transfer_bound_profile(R, 2, [0.01, 0.1, 0.5, 0.9], norm)
    # H'(0) = (1 - x0) R'(x0) by the chain rule, and both sit below 9^n/2 ||R||
    assert np.allclose(prof[:, 0], prof[:, 1], rtol=1e-12)
    assert np.all(prof[:, 0] <= prof[:, 2])
