"""Command-line front end.

Every subcommand prints one JSON document (schema "ncconvex/1") to
stdout and exits 0 on pass/consistent, 1 on a falsified property (a
self-contained witness file is written so the run can be re-checked
independently), 2 on usage or domain errors.  Identical command lines
with identical seeds produce byte-identical JSON; no timestamps.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import numpy as np

from .algebra import NcPowerSeries, Signature
from .convexity import test_convexity_at_CA, verify_convexity_witness
from .errors import NcError
from .evaluate import (NcFunction, PolynomialNcFunction, SeriesNcFunction,
                       check_nc_function_axioms, eval_poly, eval_series)
from .onevar import (DiscreteMeasure, ScalarFn, convexity_test_1var,
                     g_transform, kraus_eval, loewner_matrix,
                     loewner_monotone_test, matrix_apply,
                     verify_convexity1_witness)
from .parsing import infer_signature, parse_polynomial
from .presets import (KrausLiftFunction, get_preset, random_base_tuple,
                      scalar_from_polynomial)
from .slices import VERDICT_CONSISTENT, certify_degree_two
from .tolerances import WITNESS_TOL
from .tuples import (HermTuple, derived_rng, hermitian_with_spectrum_in,
                     identity_tuple, matrix_to_json, tuple_from_json,
                     tuple_to_json, zero_tuple)

SCHEMA = "ncconvex/1"
_A_SALT = 1299709


def _dump(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)


def _emit(args, payload: dict, code: int) -> int:
    payload = dict(payload)
    payload["schema"] = SCHEMA
    text = _dump(payload)
    print(text)
    if getattr(args, "json_out", None):
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return code


def _write_witness(args, payload: dict) -> str:
    path = getattr(args, "witness_out", None) or "witness.json"
    payload = dict(payload)
    payload["schema"] = SCHEMA
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_dump(payload) + "\n")
    return path


def _write_csv(path: str, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


def _parse_signature(text: str) -> Signature:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"bad --signature {text!r}, want 'g_a,g_x'")
    return Signature(int(parts[0]), int(parts[1]))


def _parse_interval(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"bad --interval {text!r}, want 'lo,hi'")
    lo, hi = float(parts[0]), float(parts[1])
    if not lo < hi:
        raise ValueError(f"empty interval ({lo}, {hi})")
    return lo, hi


def _parse_ints(text: str) -> tuple:
    return tuple(int(p) for p in text.split(",") if p.strip())


def _parse_measure(text: str) -> DiscreteMeasure:
    """'0.5:1' or '-0.3:0.25,0.7:0.75' -> atoms."""
    atoms = []
    for piece in text.split(","):
        loc, _, wt = piece.partition(":")
        atoms.append((float(loc), float(wt) if wt else 1.0))
    return DiscreteMeasure(tuple(atoms))


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _tuple_from_arg(value: str, kind: str, g: int,
                    n: Optional[int] = None) -> HermTuple:
    """'identity3' / 'zero2' magic values, else a tuple JSON file."""
    for magic, maker in (("identity", identity_tuple), ("zero", zero_tuple)):
        if value.startswith(magic) and value[len(magic):].isdigit():
            return maker(g, int(value[len(magic):]), kind=kind)
    data = _load_json(value)
    T = tuple_from_json(data, kind=kind, n=n)
    if T.arity != g:
        raise ValueError(f"{kind}-tuple has arity {T.arity}, signature wants {g}")
    return T


# -- function sources ---------------------------------------------------------


def _nc_function(args) -> tuple:
    """Returns (NcFunction, descriptor dict, preset | None)."""
    preset = None
    if getattr(args, "preset", None):
        preset = get_preset(args.preset)
        return preset.make(), {"preset": preset.name}, preset
    if getattr(args, "series_file", None):
        series = NcPowerSeries.from_json_dict(_load_json(args.series_file))
        return (SeriesNcFunction(series, name=args.series_file),
                {"series": series.to_json_dict()}, None)
    if getattr(args, "expr", None):
        sig = (_parse_signature(args.signature) if args.signature
               else infer_signature(args.expr))
        p = parse_polynomial(args.expr, sig)
        desc = {"expr": args.expr, "signature": f"{sig.g_a},{sig.g_x}"}
        return PolynomialNcFunction(p, name=args.expr), desc, None
    raise ValueError("provide a function: --expr, --series-file or --preset")


def _nc_function_from_descriptor(desc: dict) -> NcFunction:
    if "preset" in desc:
        return get_preset(desc["preset"]).make()
    if "series" in desc:
        return SeriesNcFunction(NcPowerSeries.from_json_dict(desc["series"]))
    sig = _parse_signature(desc["signature"])
    return PolynomialNcFunction(parse_polynomial(desc["expr"], sig),
                                name=desc["expr"])


def _scalar_function(args) -> tuple:
    """Returns (ScalarFn, descriptor, default interval)."""
    if getattr(args, "preset", None):
        preset = get_preset(args.preset)
        if preset.make_scalar is None:
            raise ValueError(f"preset {preset.name!r} has no one-variable view")
        fn = preset.make_scalar()
        desc = {"preset": preset.name}
        interval = preset.interval
    elif getattr(args, "expr", None):
        sig = (_parse_signature(args.signature)
               if getattr(args, "signature", None)
               else infer_signature(args.expr))
        fn = scalar_from_polynomial(parse_polynomial(args.expr, sig),
                                    name=args.expr)
        desc = {"expr": args.expr, "signature": f"{sig.g_a},{sig.g_x}"}
        interval = (-1.0, 1.0)
    else:
        raise ValueError("provide a function: --expr or --preset")
    if getattr(args, "g_transform", False):
        fn = g_transform(fn)
        desc = dict(desc, g_transform=True)
    if getattr(args, "interval", None):
        interval = _parse_interval(args.interval)
    return fn, desc, interval


def _scalar_from_descriptor(desc: dict) -> ScalarFn:
    if "preset" in desc:
        fn = get_preset(desc["preset"]).make_scalar()
    else:
        sig = _parse_signature(desc["signature"])
        fn = scalar_from_polynomial(parse_polynomial(desc["expr"], sig),
                                    name=desc["expr"])
    if desc.get("g_transform"):
        fn = g_transform(fn)
    return fn


def _a_tuple(args, sig: Signature) -> HermTuple:
    size = getattr(args, "size", None) or 2
    if getattr(args, "a_tuple", None):
        return _tuple_from_arg(args.a_tuple, "a", sig.g_a, n=size)
    return random_base_tuple(sig.g_a, size, derived_rng(args.seed, _A_SALT))


def _repass(report_pass: bool, min_eig: float, tol: Optional[float],
            hermitian_ok: bool = True) -> bool:
    if tol is None:
        return report_pass
    return min_eig >= -tol and hermitian_ok


# -- subcommands --------------------------------------------------------------


def _cmd_eval(args) -> int:
    F, desc, _ = _nc_function(args)
    sig = F.signature
    n = None
    X = A = None
    if args.x_tuple:
        X = _tuple_from_arg(args.x_tuple, "x", sig.g_x)
        n = X.n
    if args.a_tuple:
        A = _tuple_from_arg(args.a_tuple, "a", sig.g_a, n=n)
        n = A.n
    if X is None and sig.g_x == 0 and n is not None:
        X = HermTuple([], kind="x", n=n)
    if A is None and sig.g_a == 0 and n is not None:
        A = HermTuple([], kind="a", n=n)
    if X is None or A is None:
        raise ValueError("eval needs tuples covering every declared variable")
    if X.n != A.n:
        raise ValueError(f"tuple sizes differ: a={A.n}, x={X.n}")
    M = F(A, X)
    return _emit(args, {"command": "eval", "function": desc,
                        "result": matrix_to_json(M)}, 0)


def _cmd_convexity(args) -> int:
    if args.verify_witness:
        data = _load_json(args.verify_witness)
        F = _nc_function_from_descriptor(data["function"])
        eig = verify_convexity_witness(F, data["witness"])
        violates = eig < -WITNESS_TOL
        return _emit(args, {"command": "convexity-verify",
                            "min_eig": eig, "violates": violates},
                     0 if violates else 1)
    F, desc, preset = _nc_function(args)
    epsilon = args.epsilon if args.epsilon is not None else (
        preset.epsilon if preset else 1.0)
    A = _a_tuple(args, F.signature)
    report = test_convexity_at_CA(F, A, epsilon,
                                  multiplicities=_parse_ints(args.multiplicities),
                                  trials=args.trials, seed=args.seed)
    passed = _repass(report.passed, report.min_defect_eig, args.tol,
                     report.hermitian_ok)
    if args.csv_out:
        _write_csv(args.csv_out, "trial,defect_min_eig",
                   list(enumerate(report.trial_min_eigs)))
    payload = {"command": "convexity", "function": desc, "seed": args.seed,
               **report.to_json_dict(), "pass": passed}
    if passed:
        return _emit(args, payload, 0)
    if report.witness is not None:
        path = _write_witness(args, {"kind": "convexity", "function": desc,
                                     "witness": report.witness})
        payload["witness_file"] = path
    return _emit(args, payload, 1)


def _cmd_monotone(args) -> int:
    if args.verify_witness:
        data = _load_json(args.verify_witness)
        fn = _scalar_from_descriptor(data["function"])
        eigs = np.linalg.eigvalsh(loewner_matrix(fn, data["witness"]["points"]))
        violates = bool(eigs[0] < -WITNESS_TOL)
        return _emit(args, {"command": "monotone-verify",
                            "min_eig": float(eigs[0]), "violates": violates},
                     0 if violates else 1)
    fn, desc, interval = _scalar_function(args)
    report = loewner_monotone_test(fn, interval, points_per_trial=args.points,
                                   trials=args.trials, seed=args.seed)
    passed = _repass(report.passed, report.min_eig, args.tol)
    payload = {"command": "monotone", "function": desc, "seed": args.seed,
               "interval": list(interval), **report.to_json_dict(),
               "pass": passed}
    if passed:
        return _emit(args, payload, 0)
    if report.witness is not None:
        path = _write_witness(args, {"kind": "monotone", "function": desc,
                                     "witness": report.witness})
        payload["witness_file"] = path
    return _emit(args, payload, 1)


def _cmd_convexity1(args) -> int:
    if args.verify_witness:
        data = _load_json(args.verify_witness)
        fn = _scalar_from_descriptor(data["function"])
        eig = verify_convexity1_witness(fn, data["witness"])
        violates = eig < -WITNESS_TOL
        return _emit(args, {"command": "convexity1-verify",
                            "min_eig": eig, "violates": violates},
                     0 if violates else 1)
    fn, desc, interval = _scalar_function(args)
    report = convexity_test_1var(fn, interval, size=args.size,
                                 trials=args.trials, seed=args.seed)
    passed = _repass(report.passed, report.min_eig, args.tol)
    payload = {"command": "convexity1", "function": desc, "seed": args.seed,
               "interval": list(interval), "size": args.size,
               **report.to_json_dict(), "pass": passed}
    if passed:
        return _emit(args, payload, 0)
    if report.witness is not None:
        path = _write_witness(args, {"kind": "convexity1", "function": desc,
                                     "witness": report.witness})
        payload["witness_file"] = path
    return _emit(args, payload, 1)


def _cmd_kraus(args) -> int:
    if args.preset:
        preset = get_preset(args.preset)
        if not isinstance(preset.make(), KrausLiftFunction):
            raise ValueError(f"preset {preset.name!r} is not a Kraus lift")
        lift: KrausLiftFunction = preset.make()
        f0, f1, f2, mu = lift.f0, lift.f1, lift.f2, lift.mu
        desc = {"preset": preset.name}
    else:
        mu = _parse_measure(args.mu)
        f0, f1, f2 = args.f0, args.f1, args.f2
        desc = {"f0": f0, "f1": f1, "f2": f2, "mu": mu.to_json_dict()}
    interval = _parse_interval(args.interval)
    lo, hi = interval
    fn = KrausLiftFunction(f0, f1, f2, mu).scalar_fn(domain=(lo - 0.05, hi + 0.05))

    # scalar sweep exercises the resolvent route on 1x1 matrices
    ts = np.linspace(lo, hi, args.sweep_points)
    values = [float(kraus_eval(f0, f1, f2, mu, np.array([[t]]))[0, 0].real)
              for t in ts]

    # cross-check the resolvent route against spectral calculus
    rng = derived_rng(args.seed, 4241)
    cross_dev = 0.0
    for k in range(args.matrix_checks):
        size = 2 + k % 4
        B = hermitian_with_spectrum_in(size, lo, hi, rng)
        dev = float(np.max(np.abs(kraus_eval(f0, f1, f2, mu, B)
                                  - matrix_apply(fn, B))))
        cross_dev = max(cross_dev, dev)

    report = convexity_test_1var(fn, interval, size=args.size,
                                 trials=args.trials, seed=args.seed)
    passed = _repass(report.passed, report.min_eig, args.tol) and cross_dev < 1e-9
    payload = {
        "command": "kraus", "function": desc, "seed": args.seed,
        "interval": list(interval),
        "sweep": {"points": [float(t) for t in ts], "values": values},
        "cross_check_max_dev": cross_dev,
        "convexity": report.to_json_dict(),
        "pass": passed,
    }
    if args.csv_out:
        _write_csv(args.csv_out, "t,f", list(zip(payload["sweep"]["points"],
                                                 values)))
    if passed:
        return _emit(args, payload, 0)
    if report.witness is not None:
        path = _write_witness(args, {"kind": "convexity1", "function": desc,
                                     "witness": report.witness})
        payload["witness_file"] = path
    return _emit(args, payload, 1)


def _cmd_certify(args) -> int:
    F, desc, preset = _nc_function(args)
    epsilon = args.epsilon if args.epsilon is not None else (
        preset.epsilon if preset else 0.5)
    A = _a_tuple(args, F.signature)
    report = certify_degree_two(
        F, A, epsilon, samples=args.samples, trials=args.trials,
        seed=args.seed, degree_cap=args.degree_cap,
        multiplicities=_parse_ints(args.multiplicities),
        coeff_tol=args.tol if args.tol is not None else 1e-7)
    payload = {"command": "certify", "function": desc, "seed": args.seed,
               **report.to_json_dict()}
    if report.verdict == VERDICT_CONSISTENT:
        return _emit(args, payload, 0)
    if report.witness is not None:
        path = _write_witness(args, {"kind": report.verdict.lower(),
                                     "function": desc,
                                     "witness": report.witness})
        payload["witness_file"] = path
    return _emit(args, payload, 1)


def _cmd_axioms(args) -> int:
    F, desc, _ = _nc_function(args)
    report = check_nc_function_axioms(
        F, sizes=_parse_ints(args.sizes), samples=args.samples,
        seed=args.seed, tol=args.tol if args.tol is not None else 1e-8)
    payload = {"command": "axioms", "function": desc, "seed": args.seed,
               **report.to_json_dict()}
    return _emit(args, payload, 0 if report.passed else 1)


# -- parser ------------------------------------------------------------------


def _add_fn_flags(p, scalar: bool = False) -> None:
    p.add_argument("--expr", help="polynomial expression, e.g. 'x1^2'")
    p.add_argument("--signature", metavar="GA,GX",
                   help="arities 'g_a,g_x'; inferred from --expr if omitted")
    p.add_argument("--preset", help="named function (square, quartic, "
                                    "kraus-halfmass, mixed-ax)")
    if not scalar:
        p.add_argument("--series-file", help="truncated power series JSON")


def _add_common(p) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json-out", metavar="FILE", help="also write JSON here")
    p.add_argument("--tol", type=float, default=None,
                   help="override the pass threshold")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ncconvex",
        description="nc polynomial evaluation, matrix convexity and "
                    "monotonicity testing, degree-2 certification")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a function at a tuple")
    _add_fn_flags(p)
    p.add_argument("--a-tuple", help="tuple JSON file, or identityN/zeroN")
    p.add_argument("--x-tuple", help="tuple JSON file, or identityN/zeroN")
    _add_common(p)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("convexity", help="matrix convexity over C_A levels")
    _add_fn_flags(p)
    p.add_argument("--a-tuple", help="base tuple JSON (default: random)")
    p.add_argument("--size", type=int, default=2, help="base size kappa")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--multiplicities", default="1,2")
    p.add_argument("--witness-out", metavar="FILE")
    p.add_argument("--csv-out", metavar="FILE",
                   help="defect min-eigenvalue per trial")
    p.add_argument("--verify-witness", metavar="FILE",
                   help="re-check a stored witness instead of testing")
    _add_common(p)
    p.set_defaults(fn=_cmd_convexity)

    p = sub.add_parser("monotone", help="Loewner operator-monotonicity test")
    _add_fn_flags(p, scalar=True)
    p.add_argument("--interval", metavar="LO,HI")
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--g-transform", action="store_true",
                   help="test g(t) = (f(t)-f(0))/t instead of f")
    p.add_argument("--witness-out", metavar="FILE")
    p.add_argument("--verify-witness", metavar="FILE")
    _add_common(p)
    p.set_defaults(fn=_cmd_monotone)

    p = sub.add_parser("convexity1", help="one-variable matrix convexity")
    _add_fn_flags(p, scalar=True)
    p.add_argument("--interval", metavar="LO,HI")
    p.add_argument("--size", type=int, default=2)
    p.add_argument("--trials", type=int, default=300)
    p.add_argument("--g-transform", action="store_true")
    p.add_argument("--witness-out", metavar="FILE")
    p.add_argument("--verify-witness", metavar="FILE")
    _add_common(p)
    p.set_defaults(fn=_cmd_convexity1)

    p = sub.add_parser("kraus", help="representation sweep + convexity check")
    p.add_argument("--preset", help="kraus-halfmass")
    p.add_argument("--f0", type=float, default=0.0)
    p.add_argument("--f1", type=float, default=0.0)
    p.add_argument("--f2", type=float, default=2.0)
    p.add_argument("--mu", default="0.5:1",
                   help="atoms 'loc:weight,loc:weight'")
    p.add_argument("--interval", default="-0.9,0.9")
    p.add_argument("--sweep-points", type=int, default=100)
    p.add_argument("--matrix-checks", type=int, default=10)
    p.add_argument("--size", type=int, default=2)
    p.add_argument("--trials", type=int, default=300)
    p.add_argument("--witness-out", metavar="FILE")
    p.add_argument("--csv-out", metavar="FILE", help="sweep t,f columns")
    _add_common(p)
    p.set_defaults(fn=_cmd_kraus)

    p = sub.add_parser("certify", help="x-degree <= 2 certificate")
    _add_fn_flags(p)
    p.add_argument("--a-tuple", help="base tuple JSON (default: random)")
    p.add_argument("--size", type=int, default=2, help="base size kappa")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--trials", type=int, default=200,
                   help="convexity subtest trials")
    p.add_argument("--samples", type=int, default=50,
                   help="slice extraction samples")
    p.add_argument("--degree-cap", type=int, default=8)
    p.add_argument("--multiplicities", default="1,2")
    p.add_argument("--witness-out", metavar="FILE")
    _add_common(p)
    p.set_defaults(fn=_cmd_certify)

    p = sub.add_parser("axioms", help="direct-sum / unitary axiom check")
    _add_fn_flags(p)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--sizes", default="1,2,3,4")
    _add_common(p)
    p.set_defaults(fn=_cmd_axioms)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (NcError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
