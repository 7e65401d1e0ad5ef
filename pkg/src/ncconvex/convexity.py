"""Matrix-convexity testing for nc functions in the x-variables.

The tester is a sampling falsifier with a one-sided guarantee: a fail
is conclusive and ships a witness that re-verifies standalone, a pass
is evidence over the sampled ball, not a proof.  Witnesses are shrunk
by halving the spread X - Y around the fixed mixing point while the
violation persists, so reported counterexamples stay small.

test_convexity_at_CA repeats the base-point test at amplifications
U*(I_m (x) A)U with the SAME epsilon at every multiplicity; the
uniformity of epsilon across levels is the substance of the definition
being tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, NcError
from .evaluate import as_nc_function, hermitian_deviation
from .tolerances import EVAL_HERMITIAN_TOL, PSD_TOL, WITNESS_TOL
from .tuples import (HermTuple, ca_element, derived_rng, sample_x_ball,
                     tuple_from_json, tuple_to_json)

_LEVEL_SALT = 999983


@dataclass
class ConvexityReport:
    test: str
    passed: bool
    trials: int
    min_defect_eig: float
    hermitian_ok: bool
    epsilon: float
    alpha: Optional[dict] = None  # {"kappa", "m"}: worst level on merges
    witness: Optional[dict] = None
    trial_min_eigs: list = field(default_factory=list, repr=False)

    def to_json_dict(self) -> dict:
        out = {
            "test": self.test,
            "pass": bool(self.passed),
            "min_eig": float(self.min_defect_eig),
            "trials": int(self.trials),
            "hermitian_ok": bool(self.hermitian_ok),
            "epsilon": float(self.epsilon),
            "alpha": self.alpha or {},
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _defect_min_eig(F, A: HermTuple, X: HermTuple, Y: HermTuple,
                    t: float) -> tuple:
    FX = F(A, X)
    FY = F(A, Y)
    FM = F(A, X.scale(t) + Y.scale(1.0 - t))
    herm_dev = max(hermitian_deviation(FX), hermitian_deviation(FY))
    D = t * FX + (1.0 - t) * FY - FM
    eigs = np.linalg.eigvalsh((D + D.conj().T) / 2)
    return float(eigs[0]), eigs, herm_dev


def _shrink_witness(F, A, X, Y, t, start_eig):
    """Halve the spread around the mixing point while the defect still
    violates -WITNESS_TOL."""
    P = X.scale(t) + Y.scale(1.0 - t)
    D = X - Y
    s = 1.0
    best = (X, Y, start_eig)
    for _ in range(40):
        s_next = s / 2.0
        Xs = P + D.scale(s_next * (1.0 - t))
        Ys = P - D.scale(s_next * t)
        eig, _, _ = _defect_min_eig(F, A, Xs, Ys, t)
        if eig < -WITNESS_TOL:
            best = (Xs, Ys, eig)
            s = s_next
        else:
            break
    return best


def _witness_dict(A, X, Y, t, eig, alpha_desc) -> dict:
    return {
        "alpha": alpha_desc,
        "A": tuple_to_json(A),
        "X": tuple_to_json(X),
        "Y": tuple_to_json(Y),
        "t": float(t),
        "defect_min_eig": float(eig),
        "n": int(A.n),
    }


def test_convexity_at_A(F, A: HermTuple, epsilon: float, trials: int = 200,
                        seed=0, _alpha_desc: Optional[dict] = None,
                        _test_name: str = "convexity_at_A") -> ConvexityReport:
    """Sample X, Y in the epsilon-ball at the size of A and check the
    defect t F(A,X) + (1-t) F(A,Y) - F(A, tX+(1-t)Y) >= 0; also checks
    that F evaluates Hermitian on every sample."""
    F = as_nc_function(F)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    sig = F.signature
    if A.arity != sig.g_a:
        raise ValueError(
            f"A-tuple arity {A.arity} does not match signature g_a={sig.g_a}")
    n = A.n
    base_key = (seed,) if isinstance(seed, int) else tuple(seed)
    alpha_desc = _alpha_desc or {"kappa": n, "m": 1}
    min_eig = math.inf
    hermitian_ok = True
    witness = None
    trial_eigs = []
    for k in range(trials):
        rng = derived_rng(*base_key, k)
        t = 0.5 if k % 2 == 0 else float(rng.uniform(0.0, 1.0))
        X, Y = sample_x_ball(sig, n, epsilon, 2, rng)
        try:
            eig, _, herm_dev = _defect_min_eig(F, A, X, Y, t)
        except NcError as exc:
            raise DomainError(
                f"evaluation failed on trial {k} (t={t:.4f}, size {n}, "
                f"|X|={X.norm():.4f}, |Y|={Y.norm():.4f}): {exc}") from exc
        trial_eigs.append(eig)
        if herm_dev > EVAL_HERMITIAN_TOL:
            hermitian_ok = False
        if eig < min_eig:
            min_eig = eig
            if eig < -WITNESS_TOL:
                Xs, Ys, eig_s = _shrink_witness(F, A, X, Y, t, eig)
                witness = _witness_dict(A, Xs, Ys, t, eig_s, alpha_desc)
    return ConvexityReport(test=_test_name,
                           passed=(min_eig >= -PSD_TOL and hermitian_ok),
                           trials=trials, min_defect_eig=min_eig,
                           hermitian_ok=hermitian_ok, epsilon=epsilon,
                           alpha=alpha_desc, witness=witness,
                           trial_min_eigs=trial_eigs)


def test_convexity_at_CA(F, A: HermTuple, epsilon: float,
                         multiplicities: Sequence[int] = (1, 2),
                         trials: int = 200, seed=0) -> ConvexityReport:
    """Run the base-point test at U*(I_m (x) A)U for each multiplicity
    with a fresh Haar-like U, same epsilon throughout; merge by min."""
    F = as_nc_function(F)
    reports = []
    for li, m in enumerate(multiplicities):
        alpha = ca_element(A, int(m), "random",
                           seed=derived_rng(seed, li, _LEVEL_SALT))
        rep = test_convexity_at_A(
            F, alpha.tuple, epsilon, trials=trials, seed=(seed, li),
            _alpha_desc={"kappa": A.n, "m": int(m)},
            _test_name="convexity_at_CA")
        reports.append(rep)
    worst = min(reports, key=lambda r: r.min_defect_eig)
    all_eigs = [e for r in reports for e in r.trial_min_eigs]
    return ConvexityReport(
        test="convexity_at_CA",
        passed=all(r.passed for r in reports),
        trials=sum(r.trials for r in reports),
        min_defect_eig=worst.min_defect_eig,
        hermitian_ok=all(r.hermitian_ok for r in reports),
        epsilon=epsilon,
        alpha=worst.alpha,
        witness=worst.witness,
        trial_min_eigs=all_eigs)


def verify_convexity_witness(F, witness: dict) -> float:
    """Recompute the defect min eigenvalue of a stored witness; the
    witness is self-contained (realized A-tuple included)."""
    F = as_nc_function(F)
    n = int(witness["n"])
    A = tuple_from_json(witness["A"], kind="a", n=n)
    X = tuple_from_json(witness["X"], kind="x", n=n)
    Y = tuple_from_json(witness["Y"], kind="x", n=n)
    t = float(witness["t"])
    eig, _, _ = _defect_min_eig(F, A, X, Y, t)
    return eig
