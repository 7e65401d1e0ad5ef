"""One-variable matrix function calculus and its testers.

matrix_apply is plain spectral calculus.  kraus_eval evaluates the
integral representation

    f(B) = f0 I + f1 B + (1/2) f2 sum_k w_k B^2 (I - lambda_k B)^{-1}

for a finite measure, through linear solves rather than the spectral
route, so the two paths can serve as independent oracles for each
other.  pick_eval is the Nevanlinna-Pick sum.  g_transform implements
g(t) = (f(t) - f(0))/t with the removable singularity handled by a
Taylor patch: the raw quotient loses digits to cancellation for small
t, so inside |t| <= 1e-3 the transform evaluates a degree-3 Taylor
polynomial built from derivatives of f at 0 instead.

Monotonicity testing is the classical Loewner criterion: divided
difference matrices with f' on the diagonal must be PSD.  All verdicts
compare min eigenvalues against -PSD_TOL, with the stricter
-WITNESS_TOL band required before a counterexample is reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, ShapeError, SingularityError
from .tolerances import KRAUS_POLE_TOL, PSD_TOL, WITNESS_TOL
from .tuples import (derived_rng, hermitian_with_spectrum_in, matrix_from_json,
                     matrix_to_json)

_FD_STEP = 1e-6
_TAYLOR_ZONE = 1e-3


def _richardson(step_fn: Callable[[float], float], h: float) -> float:
    return (4.0 * step_fn(h / 2) - step_fn(h)) / 3.0


class ScalarFn:
    """Real function on an open interval with optional analytic
    derivatives; missing derivatives fall back to central finite
    differences with Richardson refinement."""

    __slots__ = ("fn", "d1", "d2", "domain", "name")

    def __init__(self, fn: Callable[[float], float],
                 d1: Optional[Callable[[float], float]] = None,
                 d2: Optional[Callable[[float], float]] = None,
                 domain: tuple = (-math.inf, math.inf),
                 name: str = "f"):
        self.fn = fn
        self.d1 = d1
        self.d2 = d2
        self.domain = (float(domain[0]), float(domain[1]))
        self.name = name

    def __call__(self, t: float) -> float:
        return float(self.fn(float(t)))

    def derivative(self, t: float) -> float:
        if self.d1 is not None:
            return float(self.d1(float(t)))
        f = self.fn
        return _richardson(
            lambda h: (f(t + h) - f(t - h)) / (2.0 * h), _FD_STEP)

    def second_derivative(self, t: float) -> float:
        if self.d2 is not None:
            return float(self.d2(float(t)))
        if self.d1 is not None:
            d1 = self.d1
            return _richardson(
                lambda h: (d1(t + h) - d1(t - h)) / (2.0 * h), _FD_STEP)
        f = self.fn
        return _richardson(
            lambda h: (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h), 1e-4)

    def __repr__(self) -> str:
        return f"ScalarFn({self.name}, domain={self.domain})"


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite list of (atom, weight >= 0) pairs."""

    atoms: tuple

    def __post_init__(self):
        object.__setattr__(self, "atoms",
                           tuple((float(l), float(w)) for l, w in self.atoms))
        for l, w in self.atoms:
            if w < 0:
                raise ValueError(f"negative weight {w} at atom {l}")

    @classmethod
    def point_mass(cls, location: float) -> "DiscreteMeasure":
        return cls(((location, 1.0),))

    @property
    def total_mass(self) -> float:
        return sum(w for _, w in self.atoms)

    def check_kraus(self, tol: float = 1e-12) -> None:
        """Kraus use requires atoms in [-1, 1] and a probability measure."""
        for l, _ in self.atoms:
            if not -1.0 <= l <= 1.0:
                raise ValueError(f"atom {l} outside [-1, 1]")
        if abs(self.total_mass - 1.0) > tol:
            raise ValueError(
                f"weights sum to {self.total_mass!r}, want 1 within {tol}")

    def to_json_dict(self) -> dict:
        return {"atoms": [[l, w] for l, w in self.atoms]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "DiscreteMeasure":
        return cls(tuple((p[0], p[1]) for p in data["atoms"]))


def _ingest_hermitian(B) -> np.ndarray:
    B = np.asarray(B, dtype=complex)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ShapeError(f"matrix argument has shape {B.shape}")
    dev = float(np.max(np.abs(B - B.conj().T)))
    if dev > 1e-10:
        raise ValueError(f"matrix argument is not Hermitian (deviation {dev:.3e})")
    return (B + B.conj().T) / 2


def matrix_apply(f: ScalarFn, B) -> np.ndarray:
    """Spectral calculus: f(B) = V diag(f(lambda)) V*."""
    B = _ingest_hermitian(B)
    lam, V = np.linalg.eigh(B)
    lo, hi = f.domain
    for l in lam:
        if not lo < l < hi:
            raise DomainError(
                f"eigenvalue {l!r} outside the domain ({lo}, {hi}) of {f.name}")
    fvals = np.array([f(l) for l in lam], dtype=float)
    return (V * fvals) @ V.conj().T


def kraus_eval(f0: float, f1: float, f2: float, mu: DiscreteMeasure,
               B) -> np.ndarray:
    """Resolvent-route evaluation of the integral representation."""
    B = _ingest_hermitian(B)
    mu.check_kraus()
    lam = np.linalg.eigvalsh(B)
    if lam.size and (lam[0] <= -1.0 or lam[-1] >= 1.0):
        raise DomainError(
            f"spectrum [{lam[0]:.6g}, {lam[-1]:.6g}] not inside (-1, 1)")
    gaps = [abs(1.0 - l * t) for l, _ in mu.atoms for t in lam]
    if gaps and min(gaps) <= KRAUS_POLE_TOL:
        raise SingularityError(
            f"resolvent pole too close: min |1 - lambda*t| = {min(gaps):.3e}")
    n = B.shape[0]
    eye = np.eye(n, dtype=complex)
    B2 = B @ B
    acc = f0 * eye + f1 * B
    for l, w in mu.atoms:
        if w == 0.0:
            continue
        acc += 0.5 * f2 * w * np.linalg.solve(eye - l * B, B2)
    return acc


def kraus_scalar_fn(f0: float, f1: float, f2: float, mu: DiscreteMeasure,
                    domain: tuple = (-1.0, 1.0),
                    name: Optional[str] = None) -> ScalarFn:
    """The same representation as a scalar function with analytic
    derivatives: d/dt [t^2/(1-lt)] = t(2-lt)/(1-lt)^2 and
    d^2/dt^2 [t^2/(1-lt)] = 2/(1-lt)^3."""
    mu.check_kraus()
    atoms = mu.atoms

    def f(t: float) -> float:
        s = sum(w * t * t / (1.0 - l * t) for l, w in atoms)
        return f0 + f1 * t + 0.5 * f2 * s

    def d1(t: float) -> float:
        s = sum(w * t * (2.0 - l * t) / (1.0 - l * t) ** 2 for l, w in atoms)
        return f1 + 0.5 * f2 * s

    def d2(t: float) -> float:
        return f2 * sum(w / (1.0 - l * t) ** 3 for l, w in atoms)

    return ScalarFn(f, d1=d1, d2=d2, domain=domain,
                    name=name or "kraus-representation")


def pick_eval(alpha: float, beta: float, mu: DiscreteMeasure,
              z: complex) -> complex:
    """alpha z + beta + sum_k w_k (1/(lambda_k - z) - lambda_k/(lambda_k^2+1))."""
    z = complex(z)
    acc = alpha * z + beta
    for l, w in mu.atoms:
        if abs(l - z) <= 1e-12:
            raise SingularityError(f"evaluation point {z} collides with atom {l}")
        acc += w * (1.0 / (l - z) - l / (l * l + 1.0))
    return acc


def g_transform(f: ScalarFn) -> ScalarFn:
    """g(t) = (f(t) - f(0))/t with g(0) = f'(0).

    Inside |t| <= 1e-3 the quotient is replaced by the degree-3 Taylor
    polynomial of g at 0 (coefficients f'(0), f''(0)/2, f'''(0)/6,
    f''''(0)/24; the last two by Richardson-refined differencing of
    f''), killing the subtractive cancellation of the raw quotient.
    The derivative uses (t f'(t) - f(t) + f(0))/t^2 outside the zone
    and the differentiated Taylor polynomial inside.
    """
    lo, hi = f.domain
    if not lo < 0.0 < hi:
        raise DomainError(f"g-transform needs 0 inside the domain ({lo}, {hi})")
    f_at_0 = f(0.0)
    c1 = f.derivative(0.0)
    c2 = f.second_derivative(0.0) / 2.0
    h = min(1e-2, 0.4 * min(-lo, hi))
    d2 = f.second_derivative
    d2_at_0 = d2(0.0)
    # plain O(h^2) differences leak ~2e-8 into dg inside the zone; the
    # extrapolation keeps the patched derivative within ~1e-12
    c3 = _richardson(lambda s: (d2(s) - d2(-s)) / (2.0 * s), h) / 6.0
    c4 = _richardson(lambda s: (d2(s) - 2.0 * d2_at_0 + d2(-s)) / (s * s), h) / 24.0

    def g(t: float) -> float:
        if abs(t) <= _TAYLOR_ZONE:
            return c1 + t * (c2 + t * (c3 + t * c4))
        return (f(t) - f_at_0) / t

    def dg(t: float) -> float:
        if abs(t) <= _TAYLOR_ZONE:
            return c2 + t * (2.0 * c3 + t * 3.0 * c4)
        return (t * f.derivative(t) - (f(t) - f_at_0)) / (t * t)

    return ScalarFn(g, d1=dg, domain=f.domain, name=f"g[{f.name}]")


# -- reports and testers -----------------------------------------------------


@dataclass
class TestReport:
    test: str
    passed: bool
    min_eig: float
    trials: int
    witness: Optional[dict] = None

    def to_json_dict(self) -> dict:
        out = {
            "test": self.test,
            "pass": bool(self.passed),
            "min_eig": float(self.min_eig),
            "trials": int(self.trials),
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def loewner_matrix(f: ScalarFn, points) -> np.ndarray:
    """Divided-difference matrix; diagonal = f'."""
    pts = np.asarray(points, dtype=float)
    k = pts.size
    L = np.empty((k, k), dtype=float)
    for i in range(k):
        L[i, i] = f.derivative(pts[i])
        for j in range(i + 1, k):
            v = (f(pts[i]) - f(pts[j])) / (pts[i] - pts[j])
            L[i, j] = v
            L[j, i] = v
    return L


def _distinct_points(rng, lo: float, hi: float, k: int) -> np.ndarray:
    # regenerate until pairwise gaps are large enough that the divided
    # differences keep ~5 digits
    min_gap = 1e-5 * (hi - lo)
    for _ in range(100):
        pts = np.sort(rng.uniform(lo, hi, size=k))
        if k < 2 or np.min(np.diff(pts)) > min_gap:
            return pts
    raise RuntimeError("could not draw well-separated points")


def loewner_monotone_test(f: ScalarFn, interval: Optional[tuple] = None,
                          points_per_trial: int = 5, trials: int = 200,
                          seed=0) -> TestReport:
    """Sampling falsifier for operator monotonicity on an interval.

    Fail is conclusive (the witness points re-verify standalone); pass
    is evidence, not proof.
    """
    lo, hi = interval if interval is not None else f.domain
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError(f"need a finite interval, got ({lo}, {hi})")
    if points_per_trial < 2:
        raise ValueError("points_per_trial must be >= 2")
    min_eig = math.inf
    witness = None
    for k in range(trials):
        rng = derived_rng(seed, k)
        pts = _distinct_points(rng, lo, hi, points_per_trial)
        eigs = np.linalg.eigvalsh(loewner_matrix(f, pts))
        if eigs[0] < min_eig:
            min_eig = float(eigs[0])
            if min_eig < -WITNESS_TOL:
                witness = {
                    "points": [float(t) for t in pts],
                    "loewner_eigs": [float(e) for e in eigs],
                }
    return TestReport(test="loewner_monotone", passed=(min_eig >= -PSD_TOL),
                      min_eig=min_eig, trials=trials, witness=witness)


def convexity_test_1var(f: ScalarFn, interval: Optional[tuple] = None,
                        size: int = 2, trials: int = 300, seed=0) -> TestReport:
    """Midpoint-plus-random matrix convexity falsifier for one variable.

    Defect D = t f(A) + (1-t) f(B) - f(tA + (1-t)B) must stay PSD; the
    worst sampled violation below -WITNESS_TOL ships as the witness.
    """
    lo, hi = interval if interval is not None else f.domain
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError(f"need a finite interval, got ({lo}, {hi})")
    min_eig = math.inf
    witness = None
    for k in range(trials):
        rng = derived_rng(seed, k)
        # every other trial pins t at the midpoint
        t = 0.5 if k % 2 == 0 else float(rng.uniform(0.0, 1.0))
        for _ in range(5):
            A = hermitian_with_spectrum_in(size, lo, hi, rng)
            B = hermitian_with_spectrum_in(size, lo, hi, rng)
            try:
                D = (t * matrix_apply(f, A) + (1.0 - t) * matrix_apply(f, B)
                     - matrix_apply(f, t * A + (1.0 - t) * B))
            except DomainError:
                continue  # float dust pushed a mixed eigenvalue out; resample
            break
        else:
            raise DomainError("could not sample spectra inside the interval")
        eigs = np.linalg.eigvalsh((D + D.conj().T) / 2)
        if eigs[0] < min_eig:
            min_eig = float(eigs[0])
            if min_eig < -WITNESS_TOL:
                witness = {
                    "A": matrix_to_json(A),
                    "B": matrix_to_json(B),
                    "t": t,
                    "defect_eigs": [float(e) for e in eigs],
                }
    return TestReport(test="convexity_1var", passed=(min_eig >= -PSD_TOL),
                      min_eig=min_eig, trials=trials, witness=witness)


def verify_convexity1_witness(f: ScalarFn, witness: dict) -> float:
    """Recompute the defect min eigenvalue of a stored witness."""
    A = matrix_from_json(witness["A"])
    B = matrix_from_json(witness["B"])
    t = float(witness["t"])
    D = (t * matrix_apply(f, A) + (1.0 - t) * matrix_apply(f, B)
         - matrix_apply(f, t * A + (1.0 - t) * B))
    return float(np.linalg.eigvalsh((D + D.conj().T) / 2)[0])
