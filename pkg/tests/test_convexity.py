"""Matrix convexity on the x-ball at a base point and over C_A."""

import numpy as np
import pytest

from ncconvex import (HermTuple, PolynomialNcFunction, Signature,
                      derived_rng, parse_polynomial, random_base_tuple,
                      verify_convexity_witness)
from ncconvex import test_convexity_at_A as convexity_at_A
from ncconvex import test_convexity_at_CA as convexity_at_CA


def _fn(expr, sig):
    return PolynomialNcFunction(parse_polynomial(expr, sig), name=expr)


def _empty_a(n):
    return HermTuple([], kind="a", n=n)


def test_square_passes_at_sizes():
    F = _fn("x1^2", Signature(0, 1))
    for n in (1, 2, 4):
        rep = convexity_at_A(F, _empty_a(n), epsilon=1.0, trials=100,
                                  seed=51)
        assert rep.passed, f"size {n}: {rep.min_defect_eig}"
        assert rep.min_defect_eig >= -1e-12


def test_affine_defect_is_exactly_zero():
    F = _fn("2 + a1 + x1", Signature(1, 1))
    A = random_base_tuple(1, 2, derived_rng(52))
    rep = convexity_at_A(F, A, epsilon=1.0, trials=60, seed=52)
    assert rep.passed
    assert abs(rep.min_defect_eig) < 1e-12


def test_quartic_fails_with_reverifiable_witness():
    F = _fn("x1^4", Signature(0, 1))
    rep = convexity_at_A(F, _empty_a(2), epsilon=2.0, trials=400,
                              seed=53)
    assert not rep.passed
    w = rep.witness
    assert w is not None and w["defect_min_eig"] < -1e-6
    again = verify_convexity_witness(F, w)
    assert again == pytest.approx(w["defect_min_eig"], rel=1e-9)


def test_witness_shrink_keeps_violation_small():
    # the shrunken witness sits just past the -1e-6 hysteresis band,
    # not at the raw sampled magnitude
    F = _fn("x1^4", Signature(0, 1))
    rep = convexity_at_A(F, _empty_a(2), epsilon=2.0, trials=400,
                              seed=53)
    assert -1e-3 < rep.witness["defect_min_eig"] < -1e-6


def test_mixed_ax_convex_when_base_above_minus_one():
    # defect is t(1-t) (X-Y)(a+1)(X-Y), PSD exactly when a >= -1
    F = _fn("a1*x1*a1 + x1*a1*x1 + x1^2", Signature(1, 1))
    A = HermTuple([np.diag([0.5, -0.5])], kind="a")
    rep = convexity_at_A(F, A, epsilon=0.5, trials=100, seed=54)
    assert rep.passed


def test_mixed_ax_fails_below_minus_one():
    F = _fn("a1*x1*a1 + x1*a1*x1 + x1^2", Signature(1, 1))
    A = HermTuple([np.diag([-1.5, 0.0])], kind="a")
    rep = convexity_at_A(F, A, epsilon=0.5, trials=200, seed=54)
    assert not rep.passed
    assert verify_convexity_witness(F, rep.witness) < -1e-6


def test_ca_identity_multiplicity_one_matches_base():
    F = _fn("x1^2", Signature(0, 1))
    A = _empty_a(2)
    base = convexity_at_A(F, A, epsilon=1.0, trials=80, seed=(55, 0),
                               _test_name="convexity_at_CA")
    # m=1 with any unitary is a 2x2 conjugation of the same ball
    merged = convexity_at_CA(F, A, epsilon=1.0, multiplicities=(1,),
                                  trials=80, seed=55)
    assert merged.passed == base.passed
    assert merged.trials == 80
    assert merged.alpha == {"kappa": 2, "m": 1}


def test_ca_levels_accumulate_trials():
    F = _fn("x1^2", Signature(0, 1))
    rep = convexity_at_CA(F, _empty_a(2), epsilon=1.0,
                               multiplicities=(1, 2, 3), trials=50, seed=56)
    assert rep.trials == 150
    assert rep.passed


def test_hermitian_check_flags_nonhermitian_output():
    # x1*x2 is not Hermitian; the tester reports hermitian_ok = False
    F = _fn("x1*x2", Signature(0, 2))
    rep = convexity_at_A(F, _empty_a(2), epsilon=1.0, trials=30,
                              seed=57)
    assert not rep.hermitian_ok
    assert not rep.passed


def test_epsilon_must_be_positive():
    F = _fn("x1^2", Signature(0, 1))
    with pytest.raises(ValueError):
        convexity_at_A(F, _empty_a(2), epsilon=0.0, trials=10, seed=0)


def test_report_determinism():
    F = _fn("x1^4", Signature(0, 1))
    r1 = convexity_at_A(F, _empty_a(2), epsilon=2.0, trials=120, seed=58)
    r2 = convexity_at_A(F, _empty_a(2), epsilon=2.0, trials=120, seed=58)
    assert r1.min_defect_eig == r2.min_defect_eig
    assert r1.to_json_dict() == r2.to_json_dict()
