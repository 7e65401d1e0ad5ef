"""One-variable layer: spectral calculus, Kraus/Pick forms, Loewner."""

import math

import numpy as np
import pytest

from ncconvex import (DiscreteMeasure, ScalarFn, convexity_test_1var,
                      derived_rng, g_transform, hermitian_with_spectrum_in,
                      kraus_eval, kraus_scalar_fn, loewner_matrix,
                      loewner_monotone_test, matrix_apply, pick_eval,
                      scalar_from_polynomial, verify_convexity1_witness,
                      parse_polynomial, Signature)
from ncconvex.errors import DomainError, SingularityError

HALF = DiscreteMeasure.point_mass(0.5)


def _scalar(expr, name=None):
    return scalar_from_polynomial(
        parse_polynomial(expr, Signature(0, 1)), name or expr)


# -- spectral calculus ---------------------------------------------------------


def test_matrix_apply_involution_example():
    # B^2 = I so exp-like functions act on the +-1 eigenspaces
    B = np.array([[0.0, 1.0], [1.0, 0.0]])
    f = ScalarFn(lambda t: t ** 3, name="t^3")
    np.testing.assert_allclose(matrix_apply(f, B), B, atol=1e-14)


def test_matrix_apply_matches_polynomial_arithmetic():
    rng = derived_rng(31)
    B = hermitian_with_spectrum_in(4, -2.0, 2.0, rng)
    f = _scalar("x1^3 - 2*x1 + 1")
    direct = B @ B @ B - 2 * B + np.eye(4)
    np.testing.assert_allclose(matrix_apply(f, B), direct, atol=1e-12)


def test_matrix_apply_unitary_equivariance():
    rng = derived_rng(32)
    B = hermitian_with_spectrum_in(3, 0.1, 0.9, rng)
    f = ScalarFn(math.sqrt, domain=(0.0, math.inf), name="sqrt")
    from ncconvex import haar_unitary
    U = haar_unitary(3, rng)
    lhs = matrix_apply(f, U @ B @ U.conj().T)
    rhs = U @ matrix_apply(f, B) @ U.conj().T
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_matrix_apply_domain_guard():
    f = ScalarFn(math.log, domain=(0.0, math.inf), name="log")
    B = np.diag([1.0, -1.0])
    with pytest.raises(DomainError):
        matrix_apply(f, B)


# -- discrete measures and the Kraus form --------------------------------------


def test_measure_validation():
    with pytest.raises(ValueError):
        DiscreteMeasure(((0.5, -1.0),))
    mu = DiscreteMeasure(((0.5, 0.25), (-0.5, 0.75)))
    assert mu.total_mass == pytest.approx(1.0)
    mu.check_kraus()
    with pytest.raises(ValueError):
        DiscreteMeasure(((2.0, 1.0),)).check_kraus()  # atom outside [-1,1]
    with pytest.raises(ValueError):
        DiscreteMeasure(((0.5, 0.5),)).check_kraus()  # mass not 1


def test_kraus_point_mass_closed_form():
    for t in np.linspace(-0.9, 0.9, 25):
        got = kraus_eval(0.0, 0.0, 2.0, HALF, np.array([[t]]))[0, 0].real
        assert got == pytest.approx(t ** 2 / (1 - 0.5 * t), abs=1e-13)


def test_kraus_matches_spectral_route():
    fn = kraus_scalar_fn(0.3, -0.2, 1.5, HALF)
    rng = derived_rng(33)
    for n in (2, 3, 5):
        B = hermitian_with_spectrum_in(n, -0.9, 0.9, rng)
        np.testing.assert_allclose(kraus_eval(0.3, -0.2, 1.5, HALF, B),
                                   matrix_apply(fn, B), atol=1e-12)


def test_kraus_zero_weight_measure_is_quadratic():
    mu = DiscreteMeasure(((0.3, 0.0), (0.0, 1.0)))
    B = np.diag([0.2, -0.4])
    got = kraus_eval(1.0, 2.0, 2.0, mu, B)
    want = np.eye(2) + 2 * B + B @ B  # f2/2 * B^2 at lambda = 0
    np.testing.assert_allclose(got, want, atol=1e-14)


def test_kraus_spectrum_guard_and_pole():
    with pytest.raises(DomainError):
        kraus_eval(0.0, 0.0, 2.0, HALF, np.array([[1.0]]))
    near_pole = DiscreteMeasure.point_mass(1.0)
    with pytest.raises(SingularityError):
        kraus_eval(0.0, 0.0, 2.0, near_pole,
                   np.array([[1.0 - 1e-12]]) * (1 - 1e-12))


def test_kraus_scalar_derivatives():
    fn = kraus_scalar_fn(0.0, 0.0, 2.0, HALF)
    # f = t^2/(1-t/2): f' and f'' against a symbolic expansion
    for t in (-0.5, 0.0, 0.3, 0.8):
        u = 1 - 0.5 * t
        d1 = (2 * t * u + 0.5 * t ** 2) / u ** 2
        d2 = 2.0 / u ** 3
        assert fn.derivative(t) == pytest.approx(d1, abs=1e-12)
        assert fn.second_derivative(t) == pytest.approx(d2, abs=1e-12)


# -- Pick form -----------------------------------------------------------------


def test_pick_empty_measure_is_affine():
    mu = DiscreteMeasure(())
    assert pick_eval(2.0, 1.0, mu, 0.7) == pytest.approx(2.0 * 0.7 + 1.0)


def test_pick_single_atom_reproduces_mobius():
    # alpha=0, beta adjusted: w/(lambda - z) shape up to constants
    mu = DiscreteMeasure(((0.0, 1.0),))
    for z in (0.3, -0.5, 2.0):
        want = 1.0 / (0.0 - z) - 0.0
        assert pick_eval(0.0, 0.0, mu, z) == pytest.approx(want)


def test_pick_atom_collision():
    mu = DiscreteMeasure(((0.5, 1.0),))
    with pytest.raises(SingularityError):
        pick_eval(0.0, 0.0, mu, 0.5)


def test_pick_increasing_between_atoms():
    mu = DiscreteMeasure(((-1.0, 0.5), (1.0, 0.5)))
    ts = np.linspace(-0.9, 0.9, 50)
    vals = [pick_eval(0.1, 0.0, mu, t) for t in ts]
    assert all(abs(v.imag) < 1e-15 for v in vals)
    reals = [v.real for v in vals]
    assert all(b > a for a, b in zip(reals, reals[1:]))


# -- the g-transform -----------------------------------------------------------


def test_g_transform_of_square_is_identity():
    g = g_transform(_scalar("x1^2", "t^2"))
    for t in np.linspace(-1.5, 1.5, 21):
        assert g(t) == pytest.approx(t, abs=1e-9)
    assert g.derivative(0.0) == pytest.approx(1.0, abs=1e-7)


def test_g_transform_of_halfmass():
    fn = kraus_scalar_fn(0.0, 0.0, 2.0, HALF)
    g = g_transform(fn)
    for t in np.linspace(-0.85, 0.85, 20):
        assert g(t) == pytest.approx(t / (1 - 0.5 * t), abs=1e-9)


def test_g_transform_value_at_zero_is_fprime():
    fn = _scalar("3*x1 + 5*x1^2 + x1^3")
    g = g_transform(fn)
    assert g(0.0) == pytest.approx(3.0, abs=1e-10)
    # slope at zero is f''(0)/2
    assert g.derivative(0.0) == pytest.approx(5.0, abs=1e-6)


def test_g_transform_needs_zero_interior():
    fn = ScalarFn(math.log, domain=(0.0, math.inf), name="log")
    with pytest.raises(DomainError):
        g_transform(fn)


# -- Loewner monotonicity ------------------------------------------------------


def test_loewner_matrix_entries():
    f = _scalar("x1^2")
    L = loewner_matrix(f, [1.0, 3.0])
    # off-diagonal (1+3), diagonal 2t
    np.testing.assert_allclose(L, np.array([[2.0, 4.0], [4.0, 6.0]]),
                               atol=1e-8)


def test_identity_is_operator_monotone():
    rep = loewner_monotone_test(_scalar("x1"), (-1.0, 1.0), trials=100,
                                seed=41)
    assert rep.passed and rep.min_eig >= -1e-10


def test_square_is_not_operator_monotone():
    rep = loewner_monotone_test(_scalar("x1^2"), (-1.0, 1.0), trials=200,
                                seed=41)
    assert not rep.passed
    assert rep.witness is not None
    L = loewner_matrix(_scalar("x1^2"), rep.witness["points"])
    assert np.linalg.eigvalsh(L)[0] < -1e-6


def test_sqrt_is_operator_monotone():
    f = ScalarFn(math.sqrt, d1=lambda t: 0.5 / math.sqrt(t),
                 domain=(0.0, math.inf), name="sqrt")
    rep = loewner_monotone_test(f, (0.01, 4.0), trials=150, seed=42)
    assert rep.passed


# -- one-variable convexity ----------------------------------------------------


def test_square_is_matrix_convex_1var():
    rep = convexity_test_1var(_scalar("x1^2"), (-1.0, 1.0), size=3,
                              trials=150, seed=43)
    assert rep.passed


def test_quartic_fails_and_witness_verifies():
    f = _scalar("x1^4", "t^4")
    rep = convexity_test_1var(f, (-2.0, 2.0), size=2, trials=500, seed=43)
    assert not rep.passed
    assert rep.min_eig < -1e-6
    again = verify_convexity1_witness(f, rep.witness)
    assert again == pytest.approx(min(rep.witness["defect_eigs"]), rel=1e-9)
    assert again < -1e-6


def test_kraus_forms_are_matrix_convex():
    # property: any valid (f2 >= 0, probability mu) representation
    rng = derived_rng(44)
    for trial in range(5):
        atoms = rng.integers(1, 4)
        locs = rng.uniform(-1.0, 1.0, atoms)
        w = rng.uniform(0.1, 1.0, atoms)
        mu = DiscreteMeasure(tuple(zip(locs, w / w.sum())))
        fn = kraus_scalar_fn(float(rng.normal()), float(rng.normal()),
                             float(rng.uniform(0.0, 3.0)), mu)
        rep = convexity_test_1var(fn, (-0.9, 0.9), size=3, trials=100,
                                  seed=(45, trial))
        assert rep.passed, f"trial {trial}: min {rep.min_eig}"


def test_report_json_shape():
    rep = convexity_test_1var(_scalar("x1^2"), (-1.0, 1.0), size=2,
                              trials=20, seed=46)
    d = rep.to_json_dict()
    assert d["test"] == "convexity_1var"
    assert d["pass"] is True
    assert "witness" not in d
