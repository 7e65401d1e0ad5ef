"""Slice functions, coefficient extraction, degree-two certification."""

import numpy as np
import pytest

from ncconvex import (HermTuple, PolynomialNcFunction, Signature,
                      certify_degree_two, derived_rng,
                      extract_slice_coefficients, get_preset,
                      parse_polynomial, random_base_tuple, sample_x_ball,
                      slice_matrix, slice_phi, slice_scalar, tuple_norm,
                      VERDICT_CONSISTENT, VERDICT_HIGHER_ORDER,
                      VERDICT_HYPOTHESIS_FAILS)
from ncconvex import test_slice_convexity_transfer as slice_transfer
from ncconvex.errors import DomainError, ExtractionError


def _fn(expr, sig):
    return PolynomialNcFunction(parse_polynomial(expr, sig), name=expr)


def _empty_a(n):
    return HermTuple([], kind="a", n=n)


def _x_point(n, seed, sig=Signature(0, 1), eps=1.0):
    return sample_x_ball(sig, n, eps, 1, seed=seed)[0]


def test_slice_at_scalar_one_recovers_value():
    F = _fn("x1^2", Signature(0, 1))
    X = _x_point(3, seed=61)
    got = slice_phi(F, _empty_a(3), X, np.array([[1.0]]))
    np.testing.assert_allclose(got, F(_empty_a(3), X), atol=1e-13)


def test_slice_at_identity_is_block_double():
    F = _fn("x1^2", Signature(0, 1))
    X = _x_point(2, seed=62)
    got = slice_phi(F, _empty_a(2), X, np.eye(2))
    want = np.kron(F(_empty_a(2), X), np.eye(2))
    np.testing.assert_allclose(got, want, atol=1e-13)


def test_scalar_slice_conjugate_symmetry():
    # Hermitian F gives phi(conj z) = conj phi(z)
    F = _fn("a1*x1*a1 + x1^2", Signature(1, 1))
    A = random_base_tuple(1, 3, derived_rng(63))
    X = _x_point(3, seed=63, sig=Signature(1, 1))
    rng = derived_rng(64)
    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    z = 0.3 + 0.4j
    a = slice_scalar(F, A, X, v, z)
    b = slice_scalar(F, A, X, v, z.conjugate())
    assert a == pytest.approx(b.conjugate(), abs=1e-12)


def test_exact_coefficients_of_square():
    F = _fn("x1^2", Signature(0, 1))
    X = _x_point(3, seed=65)
    rng = derived_rng(65)
    v = rng.standard_normal(3)
    sc = extract_slice_coefficients(F, _empty_a(3), X, v, degree_cap=6)
    assert sc.method == "exact"
    vn = v / np.linalg.norm(v)
    want2 = vn @ (X[0] @ X[0]) @ vn
    assert sc[2] == pytest.approx(want2, abs=1e-12)
    for i in (0, 1, 3, 4, 5, 6):
        assert abs(sc[i]) < 1e-14


def test_dft_matches_exact_on_polynomials():
    rng = derived_rng(66)
    for name, sig, p in [(n, s, parse_polynomial(e, s)) for n, s, e in
                         (("sq", Signature(0, 1), "x1^2"),
                          ("mix", Signature(1, 1),
                           "a1*x1*a1 + x1*a1*x1 + x1^2 + x1^3"))]:
        F = PolynomialNcFunction(p, name=name)
        A = random_base_tuple(sig.g_a, 3, derived_rng(66, 1))
        X = _x_point(3, seed=(66, 2), sig=sig)
        v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        ce = extract_slice_coefficients(F, A, X, v, degree_cap=8)
        cd = extract_slice_coefficients(F, A, X, v, degree_cap=8,
                                        force_dft=True)
        assert ce.method == "exact" and cd.method == "dft"
        np.testing.assert_allclose(ce.coeffs, cd.coeffs, atol=1e-10)


def test_extraction_linear_in_function():
    sig = Signature(0, 1)
    F1, F2 = _fn("x1^2", sig), _fn("x1^3", sig)
    F12 = _fn("x1^2 + x1^3", sig)
    X = _x_point(2, seed=67)
    v = np.array([1.0, 2.0])
    A = _empty_a(2)
    c1 = extract_slice_coefficients(F1, A, X, v).coeffs
    c2 = extract_slice_coefficients(F2, A, X, v).coeffs
    c12 = extract_slice_coefficients(F12, A, X, v).coeffs
    np.testing.assert_allclose(c12, c1 + c2, atol=1e-13)


def test_kraus_halfmass_geometric_coefficients():
    # f(zX) at X = [[1]] is z^2/(1 - z/2): c_i = 2^(2-i) for i >= 2
    KH = get_preset("kraus-halfmass").make()
    X = HermTuple([np.array([[1.0]])], kind="x")
    sc = extract_slice_coefficients(KH, _empty_a(1), X, np.array([1.0]),
                                    degree_cap=8, radius=0.25)
    assert sc.method == "dft"
    for i in range(2, 9):
        assert sc[i] == pytest.approx(2.0 ** (2 - i), abs=1e-7)
    assert sc.residual < 1e-6


def test_dft_radius_outside_domain_rejected():
    KH = get_preset("kraus-halfmass").make()
    X = HermTuple([np.array([[1.0]])], kind="x")
    with pytest.raises(DomainError):
        extract_slice_coefficients(KH, _empty_a(1), X, np.array([1.0]),
                                   radius=2.5)


def test_residual_check_refuses_undersampling():
    # degree cap below the true degree must not return silent garbage
    F = _fn("x1^6", Signature(0, 1))
    X = HermTuple([np.array([[1.0]])], kind="x")
    with pytest.raises(ExtractionError):
        extract_slice_coefficients(F, _empty_a(1), X, np.array([1.0]),
                                   degree_cap=3, radius=1.0, force_dft=True)


def test_tensor_norm_bound():
    # |X (x) T| <= |X| |T| keeps slices inside scaled balls
    X = _x_point(3, seed=68)
    T = np.diag([1.1, 0.9])
    lifted = HermTuple([np.kron(x, T) for x in X.entries], kind="x")
    assert tuple_norm(lifted) <= tuple_norm(X) * 1.1 + 1e-12


def test_slice_transfer_for_square():
    F = _fn("x1^2", Signature(0, 1))
    X = _x_point(3, seed=69)
    rng = derived_rng(69)
    v = rng.standard_normal(3)
    rep = slice_transfer(F, _empty_a(3), X, v, delta=0.2,
                                        t_size=3, trials=100, seed=69)
    assert rep.passed
    assert rep.min_eig >= -1e-10


def test_certify_consistent_for_mixed_ax():
    F = get_preset("mixed-ax").make()
    A = random_base_tuple(1, 2, derived_rng(70))
    rep = certify_degree_two(F, A, epsilon=0.5, samples=10, trials=60,
                             seed=70)
    assert rep.verdict == VERDICT_CONSISTENT
    assert rep.max_high_order_coeff == 0.0
    assert rep.skipped == 0


def test_certify_flags_higher_order():
    F = get_preset("kraus-halfmass").make()
    rep = certify_degree_two(F, _empty_a(1), epsilon=0.5, samples=10,
                             trials=60, seed=71)
    assert rep.verdict == VERDICT_HIGHER_ORDER
    assert rep.convexity.passed  # convex, just not entire-with-degree-2
    w = rep.witness
    assert w["i"] >= 3
    assert abs(complex(*w["c_i"])) > 1e-7


def test_certify_hypothesis_fails_for_quartic():
    F = get_preset("quartic").make()
    rep = certify_degree_two(F, _empty_a(2), epsilon=2.0, samples=5,
                             trials=300, seed=72)
    assert rep.verdict == VERDICT_HYPOTHESIS_FAILS
    assert rep.witness is not None
    assert not rep.convexity.passed


def test_certify_report_json():
    F = get_preset("mixed-ax").make()
    A = random_base_tuple(1, 2, derived_rng(73))
    d = certify_degree_two(F, A, epsilon=0.5, samples=4, trials=30,
                           seed=73).to_json_dict()
    assert d["verdict"] == VERDICT_CONSISTENT
    assert set(d) >= {"samples", "skipped", "max_high_order_coeff",
                      "convexity", "epsilon", "degree_cap", "coeff_tol"}
    assert d["convexity"]["pass"] is True
