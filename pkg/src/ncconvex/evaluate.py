"""Evaluate nc polynomials and truncated x-power series on matrix tuples.

Words evaluate by left-to-right matrix products with the empty word as
the identity; a per-call cache of word prefixes keeps repeated monomials
cheap without any cross-call state.  Matrix polynomials assemble their
evaluated entries into one block matrix.

The NcFunction wrappers give testers a uniform evaluator contract:
F(A, X) -> square complex matrix, plus optional exact x-homogeneous
parts when the function is an explicit polynomial or series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import (MatrixNcPolynomial, NcPolynomial, NcPowerSeries,
                      Signature)
from .errors import DomainError, ShapeError, SignatureError
from .tuples import (HermTuple, haar_unitary, random_hermitian, tuple_norm,
                     as_rng, tuple_to_json)


def _as_matrices(T) -> list:
    if T is None:
        return []
    if isinstance(T, HermTuple):
        return list(T.entries)
    return [np.asarray(m, dtype=complex) for m in T]


def _resolve_point(sig: Signature, A, X, n: Optional[int] = None):
    """Validate arities and sizes; returns (a_mats, x_mats, size)."""
    a_mats = _as_matrices(A)
    x_mats = _as_matrices(X)
    if len(a_mats) != sig.g_a:
        raise SignatureError(
            f"A-part has {len(a_mats)} entries, signature wants {sig.g_a}")
    if len(x_mats) != sig.g_x:
        raise SignatureError(
            f"X-part has {len(x_mats)} entries, signature wants {sig.g_x}")
    size = None
    for m in a_mats + x_mats:
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"point entry has shape {m.shape}, want square")
        if size is None:
            size = m.shape[0]
        elif m.shape[0] != size:
            raise ShapeError("mixed matrix sizes across the evaluation point")
    for T in (A, X):
        if isinstance(T, HermTuple):
            if size is None:
                size = T.n
            elif T.n != size:
                raise ShapeError(
                    f"tuple declares size {T.n} but point entries are {size}")
    if size is None:
        size = 1 if n is None else int(n)
    return a_mats, x_mats, size


def _word_evaluator(a_mats, x_mats, size):
    lookup = {}
    for i, m in enumerate(a_mats):
        lookup[("a", i + 1)] = m
    for i, m in enumerate(x_mats):
        lookup[("x", i + 1)] = m
    cache = {(): np.eye(size, dtype=complex)}

    def word_val(word):
        hit = cache.get(word)
        if hit is not None:
            return hit
        v = word_val(word[:-1]) @ lookup[word[-1]]
        cache[word] = v
        return v

    return word_val


def eval_poly(p, A=None, X=None, n: Optional[int] = None) -> np.ndarray:
    """p(A, X) = sum_w p_w (A,X)^w.

    A and X may be HermTuples or plain sequences of square matrices (the
    latter admit non-Hermitian entries, used by the complex-z slices).
    For matrix polynomials the result is the (rows*n) x (cols*n) block
    assembly.
    """
    if isinstance(p, NcPolynomial):
        p = MatrixNcPolynomial.from_scalar(p)
    a_mats, x_mats, size = _resolve_point(p.signature, A, X, n)
    word_val = _word_evaluator(a_mats, x_mats, size)

    def entry_val(q: NcPolynomial) -> np.ndarray:
        acc = np.zeros((size, size), dtype=complex)
        for w, c in q.items():
            acc += c * word_val(w)
        return acc

    if p.is_scalar():
        return entry_val(p.entries[0][0])
    return np.block([[entry_val(q) for q in row] for row in p.entries])


def _x_part_norm(x_mats, size) -> float:
    if not x_mats:
        return 0.0
    s = np.zeros((size, size), dtype=complex)
    for m in x_mats:
        s += m @ m.conj().T
    top = float(np.linalg.eigvalsh(s)[-1])
    return float(np.sqrt(max(top, 0.0)))


def eval_series(F: NcPowerSeries, A=None, X=None, up_to: Optional[int] = None,
                n: Optional[int] = None, with_increment: bool = False):
    """Partial sum of the x-homogeneous parts at (A, X).

    Enforces tuple_norm(X) < radius.  With with_increment=True also
    returns the spectral norm of the last added part, a cheap
    convergence proxy.
    """
    a_mats, x_mats, size = _resolve_point(F.signature, A, X, n)
    nx = _x_part_norm(x_mats, size)
    if not nx < F.radius:
        raise DomainError(
            f"tuple norm {nx:.6g} is outside the series radius {F.radius:.6g}")
    if up_to is None:
        up_to = F.order
    if up_to > F.order:
        raise ValueError(f"up_to={up_to} exceeds truncation order {F.order}")
    total = None
    increment = 0.0
    for i in range(up_to + 1):
        term = eval_poly(F[i], A, X, n=size)
        total = term if total is None else total + term
        increment = float(np.linalg.norm(term, 2))
    if with_increment:
        return total, increment
    return total


def hermitian_deviation(M: np.ndarray) -> float:
    return float(np.max(np.abs(M - M.conj().T)))


# -- evaluator wrappers ------------------------------------------------------


class NcFunction:
    """Uniform evaluator contract for the testers.

    __call__(A, X) takes the a-part and x-part (HermTuple or plain
    matrix sequences sharing one size n) and returns a square matrix
    whose side is a multiple of n.  x_parts() returns the exact
    homogeneous decomposition when one is known, else None; the slice
    extractor falls back to Fourier sampling in that case, which
    requires the evaluator to be analytic in a complex scale z on the
    extraction disk (analytic_in_z flag).
    """

    signature: Signature
    radius: float = math.inf
    analytic_in_z: bool = True
    name: str = "nc-function"

    def __call__(self, A, X) -> np.ndarray:
        raise NotImplementedError

    def x_parts(self) -> Optional[NcPowerSeries]:
        return None

    def empty_a(self, n: int) -> HermTuple:
        return HermTuple([], kind="a", n=n)


class PolynomialNcFunction(NcFunction):
    def __init__(self, p, name: Optional[str] = None):
        if isinstance(p, NcPolynomial):
            p = MatrixNcPolynomial.from_scalar(p)
        self.poly = p
        self.signature = p.signature
        self.radius = math.inf
        self.name = name or "polynomial"
        self._parts: Optional[NcPowerSeries] = None

    def __call__(self, A, X) -> np.ndarray:
        return eval_poly(self.poly, A, X)

    def x_parts(self) -> NcPowerSeries:
        if self._parts is None:
            self._parts = NcPowerSeries.from_polynomial(self.poly)
        return self._parts

    def __repr__(self):
        return f"PolynomialNcFunction({self.name})"


class SeriesNcFunction(NcFunction):
    def __init__(self, series: NcPowerSeries, name: Optional[str] = None):
        self.series = series
        self.signature = series.signature
        self.radius = series.radius
        self.name = name or "series"

    def __call__(self, A, X) -> np.ndarray:
        return eval_series(self.series, A, X)

    def x_parts(self) -> NcPowerSeries:
        return self.series

    def __repr__(self):
        return f"SeriesNcFunction({self.name}, radius={self.radius})"


class CallableNcFunction(NcFunction):
    """Black-box evaluator; declare analytic_in_z only if fn extends to
    complex-scaled x-arguments on the extraction disk."""

    def __init__(self, fn, signature: Signature, radius: float = math.inf,
                 analytic_in_z: bool = False, name: str = "callable"):
        self.fn = fn
        self.signature = Signature(*signature)
        self.radius = radius
        self.analytic_in_z = analytic_in_z
        self.name = name

    def __call__(self, A, X) -> np.ndarray:
        return self.fn(A, X)

    def __repr__(self):
        return f"CallableNcFunction({self.name})"


def as_nc_function(F) -> NcFunction:
    if isinstance(F, NcFunction):
        return F
    if isinstance(F, (NcPolynomial, MatrixNcPolynomial)):
        return PolynomialNcFunction(F)
    if isinstance(F, NcPowerSeries):
        return SeriesNcFunction(F)
    raise TypeError(f"cannot wrap {type(F).__name__} as an nc function")


# -- nc-function axioms -------------------------------------------------------


@dataclass
class AxiomsReport:
    passed: bool
    samples: int
    max_direct_sum_dev: float
    max_unitary_dev: float
    tol: float
    counterexample: Optional[dict] = None

    def to_json_dict(self) -> dict:
        out = {
            "test": "nc_function_axioms",
            "pass": bool(self.passed),
            "samples": int(self.samples),
            "max_direct_sum_dev": float(self.max_direct_sum_dev),
            "max_unitary_dev": float(self.max_unitary_dev),
            "tol": float(self.tol),
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


def _bounded_tuple(g: int, n: int, kind: str, rng) -> HermTuple:
    # tuple norm drawn in (0.1, 0.9): keeps degree-81 corpus words away
    # from overflow and keeps float deviations commensurate with 1e-8
    T = HermTuple([random_hermitian(n, rng) for _ in range(g)], kind=kind, n=n)
    norm = tuple_norm(T)
    if norm > 0:
        T = T.scale(float(rng.uniform(0.1, 0.9)) / norm)
    return T


def _random_point(sig: Signature, n: int, rng) -> tuple:
    A = _bounded_tuple(sig.g_a, n, "a", rng)
    X = _bounded_tuple(sig.g_x, n, "x", rng)
    return A, X


def _block_diag(M1: np.ndarray, M2: np.ndarray) -> np.ndarray:
    n1, n2 = M1.shape[0], M2.shape[0]
    out = np.zeros((n1 + n2, n1 + n2), dtype=complex)
    out[:n1, :n1] = M1
    out[n1:, n1:] = M2
    return out


def check_nc_function_axioms(F, sizes=(1, 2, 3, 4), samples: int = 100,
                             seed=0, tol: float = 1e-8) -> AxiomsReport:
    """Sampled check that F respects direct sums and unitary conjugation.

    Only meaningful for graded evaluators (output side equals input
    size).  Failures are report content, not exceptions; the first
    offending sample is kept as a self-contained counterexample.
    """
    F = as_nc_function(F)
    sig = F.signature
    rng = as_rng(seed)
    max_ds = 0.0
    max_u = 0.0
    counterexample = None
    for _ in range(samples):
        n1 = int(rng.choice(sizes))
        n2 = int(rng.choice(sizes))
        A1, X1 = _random_point(sig, n1, rng)
        A2, X2 = _random_point(sig, n2, rng)
        v1 = F(A1, X1)
        v2 = F(A2, X2)
        joint = F(A1.direct_sum(A2), X1.direct_sum(X2))
        dev_ds = float(np.max(np.abs(joint - _block_diag(v1, v2))))
        U = haar_unitary(n1, rng)
        dev_u = float(np.max(np.abs(F(A1.conjugate(U), X1.conjugate(U))
                                    - U.conj().T @ v1 @ U)))
        max_ds = max(max_ds, dev_ds)
        max_u = max(max_u, dev_u)
        if counterexample is None and (dev_ds > tol or dev_u > tol):
            counterexample = {
                "axiom": "direct_sum" if dev_ds > tol else "unitary",
                "deviation": max(dev_ds, dev_u),
                "A1": tuple_to_json(A1), "X1": tuple_to_json(X1),
                "A2": tuple_to_json(A2), "X2": tuple_to_json(X2),
                "n1": n1, "n2": n2,
            }
    return AxiomsReport(passed=(max_ds <= tol and max_u <= tol),
                        samples=samples, max_direct_sum_dev=max_ds,
                        max_unitary_dev=max_u, tol=tol,
                        counterexample=counterexample)
