"""Slice functions and the degree-two certificate.

For an nc function F, an a-point A and an x-direction X, the slice

    Phi(xi) = F(A (x) I, X_1 (x) xi, ..., X_g (x) xi)

compresses along a unit vector v to the one-variable object

    phi(z) = v* F(A, zX) v = sum_i (v* F_i(A, X) v) z^i,

whose coefficients c_i isolate the x-homogeneous parts of F.  Two
independent extraction routes are kept deliberately separate: exact
part-wise evaluation when F exposes its homogeneous decomposition, and
inverse-DFT sampling of phi on a circle |z| = r for black boxes.  The
certificate then reads off whether anything above degree two survives.

Numerics of the DFT route: coefficient i is recovered with noise about
eps_machine * max|phi| / r^i, so small radii amplify high-order noise;
the residual check on a rotated node set catches both that and
aliasing, and the extractor refuses (ExtractionError) rather than
returning digits it cannot back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .convexity import ConvexityReport, test_convexity_at_CA
from .errors import DomainError, ExtractionError, NcError
from .evaluate import as_nc_function, eval_poly
from .onevar import TestReport
from .tolerances import (COEFF_ZERO_TOL, EXTRACTION_RESIDUAL_TOL, PSD_TOL,
                         WITNESS_TOL)
from .tuples import (HermTuple, ca_element, derived_rng,
                     hermitian_with_spectrum_in, sample_x_ball, tuple_norm,
                     tuple_to_json)

VERDICT_CONSISTENT = "CONSISTENT_DEGREE_LE_2"
VERDICT_HYPOTHESIS_FAILS = "HYPOTHESIS_FAILS"
VERDICT_HIGHER_ORDER = "HIGHER_ORDER_PRESENT"


def _unit_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        raise ValueError("direction vector must be nonzero")
    return v / nv


def slice_phi(F, A: HermTuple, X: HermTuple, xi: np.ndarray) -> np.ndarray:
    """F at the tensor lift (A (x) I, X (x) xi)."""
    F = as_nc_function(F)
    xi = np.asarray(xi, dtype=complex)
    if xi.ndim != 2 or xi.shape[0] != xi.shape[1]:
        raise ValueError(f"xi must be square, got shape {xi.shape}")
    d = xi.shape[0]
    eye = np.eye(d, dtype=complex)
    a_lift = [np.kron(a, eye) for a in A.entries]
    x_lift = [np.kron(x, xi) for x in X.entries]
    return F(a_lift, x_lift)


def slice_scalar(F, A: HermTuple, X: HermTuple, v, z: complex) -> complex:
    """phi(z) = v* F(A, zX) v; v is normalized on ingest."""
    F = as_nc_function(F)
    v = _unit_vector(v)
    z = complex(z)
    if z.imag != 0.0 and not F.analytic_in_z:
        raise DomainError(
            f"evaluator {F.name} is not declared analytic in z; "
            "complex slices are unavailable")
    if not abs(z) * tuple_norm(X) < F.radius:
        raise DomainError(
            f"|z|*|X| = {abs(z) * tuple_norm(X):.6g} is outside the "
            f"radius {F.radius:.6g}")
    x_scaled = [z * x for x in X.entries]
    M = F(A, x_scaled)
    if M.shape[0] != v.size:
        raise ValueError(
            f"direction vector has length {v.size}, evaluation is {M.shape}")
    return complex(v.conj() @ M @ v)


def slice_matrix(F, A: HermTuple, X: HermTuple, v, T: np.ndarray) -> np.ndarray:
    """phi_v(T) = (v* (x) I) Phi(T) (v (x) I), a dim(T)-square matrix."""
    v = _unit_vector(v)
    T = np.asarray(T, dtype=complex)
    Phi = slice_phi(F, A, X, T)
    d = T.shape[0]
    W = np.kron(v.reshape(-1, 1), np.eye(d, dtype=complex))
    return W.conj().T @ Phi @ W


@dataclass
class SliceCoefficients:
    coeffs: np.ndarray
    method: str  # "exact" or "dft"
    radius: Optional[float]
    residual: Optional[float]
    context: dict = field(default_factory=dict)

    def __getitem__(self, i: int) -> complex:
        return complex(self.coeffs[i])

    def __len__(self) -> int:
        return len(self.coeffs)

    def phi(self, z: complex) -> complex:
        return complex(np.polyval(self.coeffs[::-1], z))

    def high_order(self, tol: float = COEFF_ZERO_TOL) -> list:
        """Indices i > 2 whose coefficient magnitude exceeds tol."""
        return [i for i in range(3, len(self.coeffs))
                if abs(self.coeffs[i]) > tol]

    def to_json_dict(self) -> dict:
        out = {
            "method": self.method,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }
        if self.radius is not None:
            out["radius"] = float(self.radius)
        if self.residual is not None:
            out["residual"] = float(self.residual)
        return out


def extract_slice_coefficients(F, A: HermTuple, X: HermTuple, v,
                               degree_cap: int = 8,
                               radius: Optional[float] = None,
                               force_dft: bool = False) -> SliceCoefficients:
    """Coefficients c_0..c_degree_cap of phi(z) = v* F(A, zX) v.

    Exact route: c_i = v* F_i(A, X) v when F exposes homogeneous parts.
    DFT route: inverse Fourier transform of phi sampled at the
    (degree_cap+1)-th roots of unity scaled by radius, verified on a
    rotated node set; residual above EXTRACTION_RESIDUAL_TOL raises
    ExtractionError instead of returning unbacked digits.
    """
    F = as_nc_function(F)
    if degree_cap < 2:
        raise ValueError("degree_cap must be >= 2")
    v = _unit_vector(v)
    parts = None if force_dft else F.x_parts()
    if parts is not None:
        coeffs = np.zeros(degree_cap + 1, dtype=complex)
        for i in range(min(degree_cap, parts.order) + 1):
            Mi = eval_poly(parts[i], A, X)
            coeffs[i] = complex(v.conj() @ Mi @ v)
        return SliceCoefficients(coeffs=coeffs, method="exact", radius=None,
                                 residual=None,
                                 context={"n": A.n, "degree_cap": degree_cap})

    r = 0.5 if radius is None else float(radius)
    if r <= 0:
        raise ValueError("radius must be positive")
    if not r * tuple_norm(X) < F.radius:
        raise DomainError(
            f"extraction radius {r} puts |z||X| = {r * tuple_norm(X):.6g} "
            f"outside the evaluator radius {F.radius:.6g}")
    d = degree_cap
    nodes = r * np.exp(2j * np.pi * np.arange(d + 1) / (d + 1))
    samples = np.array([slice_scalar(F, A, X, v, z) for z in nodes])
    # c_i r^i = (1/n) sum_j phi_j e^{-2 pi i ij/n}; numpy's fft carries
    # the e^{-} kernel, so fft/n is the inverting transform here
    coeffs = np.fft.fft(samples) / (d + 1) / r ** np.arange(d + 1)
    # residual on a rotated node set; catches both roundoff blowup and
    # aliasing from terms beyond degree_cap
    check = r * np.exp(1j * np.pi * (2 * np.arange(d + 1) + 1) / (d + 1))
    powers = check[:, None] ** np.arange(d + 1)[None, :]
    predicted = powers @ coeffs
    actual = np.array([slice_scalar(F, A, X, v, z) for z in check])
    residual = float(np.max(np.abs(predicted - actual)))
    if residual > EXTRACTION_RESIDUAL_TOL:
        raise ExtractionError(
            f"interpolation residual {residual:.3e} exceeds "
            f"{EXTRACTION_RESIDUAL_TOL}; raise degree_cap or shrink radius")
    return SliceCoefficients(coeffs=coeffs, method="dft", radius=r,
                             residual=residual,
                             context={"n": A.n, "degree_cap": degree_cap})


def test_slice_convexity_transfer(F, A: HermTuple, X: HermTuple, v,
                                  delta: float = 0.2, t_size: int = 3,
                                  trials: int = 200, seed=0) -> TestReport:
    """Matrix convexity of T -> phi_v(T) on spectra in (1-delta, 1+delta).

    This is the transfer step: convexity of F near (A, 0) pushes down
    to the compressed one-variable slice on a matrix interval around
    the identity.
    """
    F = as_nc_function(F)
    v = _unit_vector(v)
    lo, hi = 1.0 - delta, 1.0 + delta
    min_eig = math.inf
    witness = None
    for k in range(trials):
        rng = derived_rng(seed, k)
        d = int(rng.integers(1, t_size + 1))
        T1 = hermitian_with_spectrum_in(d, lo, hi, rng)
        T2 = hermitian_with_spectrum_in(d, lo, hi, rng)
        t = 0.5 if k % 2 == 0 else float(rng.uniform(0.0, 1.0))
        P1 = slice_matrix(F, A, X, v, T1)
        P2 = slice_matrix(F, A, X, v, T2)
        PM = slice_matrix(F, A, X, v, t * T1 + (1.0 - t) * T2)
        D = t * P1 + (1.0 - t) * P2 - PM
        eigs = np.linalg.eigvalsh((D + D.conj().T) / 2)
        if eigs[0] < min_eig:
            min_eig = float(eigs[0])
            if min_eig < -WITNESS_TOL:
                witness = {
                    "T1": [[float(x.real) for x in row] for row in T1],
                    "T2": [[float(x.real) for x in row] for row in T2],
                    "t": t,
                    "defect_eigs": [float(e) for e in eigs],
                }
    return TestReport(test="slice_convexity_transfer",
                      passed=(min_eig >= -PSD_TOL), min_eig=min_eig,
                      trials=trials, witness=witness)


@dataclass
class CertificationReport:
    verdict: str
    samples: int
    skipped: int
    max_high_order_coeff: float
    convexity: ConvexityReport
    epsilon: float
    degree_cap: int
    coeff_tol: float
    witness: Optional[dict] = None

    @property
    def consistent(self) -> bool:
        return self.verdict == VERDICT_CONSISTENT

    def to_json_dict(self) -> dict:
        out = {
            "verdict": self.verdict,
            "samples": int(self.samples),
            "skipped": int(self.skipped),
            "max_high_order_coeff": float(self.max_high_order_coeff),
            "convexity": self.convexity.to_json_dict(),
            "epsilon": float(self.epsilon),
            "degree_cap": int(self.degree_cap),
            "coeff_tol": float(self.coeff_tol),
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def certify_degree_two(F, A: HermTuple, epsilon: float, samples: int = 50,
                       trials: int = 200, seed=0, degree_cap: int = 8,
                       multiplicities: Sequence[int] = (1, 2),
                       coeff_tol: float = COEFF_ZERO_TOL) -> CertificationReport:
    """Certify consistency with "matrix convex and entire implies
    x-degree <= 2" at a base point A.

    Stage 1 tests matrix convexity on the epsilon-ball over C_A levels;
    failure short-circuits to HYPOTHESIS_FAILS with the witness.  Stage
    2 extracts slice coefficients at sampled (alpha, X, v) with X in
    the epsilon/2-ball and flags any |c_i| > coeff_tol for i > 2.
    Extraction errors skip the sample and are counted, never silently
    absorbed into a verdict.
    """
    F = as_nc_function(F)
    convexity = test_convexity_at_CA(F, A, epsilon,
                                     multiplicities=multiplicities,
                                     trials=trials, seed=seed)
    if not convexity.passed:
        return CertificationReport(
            verdict=VERDICT_HYPOTHESIS_FAILS, samples=0, skipped=0,
            max_high_order_coeff=0.0, convexity=convexity, epsilon=epsilon,
            degree_cap=degree_cap, coeff_tol=coeff_tol,
            witness=convexity.witness)

    sig = F.signature
    extraction_radius = epsilon / 4.0
    max_high = 0.0
    skipped = 0
    offender = None
    for k in range(samples):
        rng = derived_rng(seed, 7919, k)
        m = int(multiplicities[k % len(multiplicities)])
        alpha = ca_element(A, m, "random", seed=rng)
        n = alpha.tuple.n
        X = sample_x_ball(sig, n, epsilon / 2.0, 1, rng)[0]
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        try:
            sc = extract_slice_coefficients(F, alpha.tuple, X, v,
                                            degree_cap=degree_cap,
                                            radius=extraction_radius)
        except (ExtractionError, DomainError):
            skipped += 1
            continue
        for i in range(3, degree_cap + 1):
            mag = abs(sc[i])
            if mag > max_high:
                max_high = mag
                if mag > coeff_tol:
                    offender = {
                        "sample": k,
                        "m": m,
                        "i": i,
                        "c_i": [float(sc[i].real), float(sc[i].imag)],
                        "X": tuple_to_json(X),
                        "v": [[float(c.real), float(c.imag)]
                              for c in np.asarray(v, dtype=complex)],
                        "alpha": {"kappa": A.n, "m": m},
                        "method": sc.method,
                    }
    if samples > 0 and skipped == samples:
        raise ExtractionError(
            f"all {samples} extraction samples failed; the verdict would "
            "be vacuous -- shrink the radius or raise degree_cap")
    verdict = VERDICT_HIGHER_ORDER if offender is not None else VERDICT_CONSISTENT
    return CertificationReport(
        verdict=verdict, samples=samples, skipped=skipped,
        max_high_order_coeff=max_high, convexity=convexity, epsilon=epsilon,
        degree_cap=degree_cap, coeff_tol=coeff_tol, witness=offender)
