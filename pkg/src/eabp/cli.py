"""Command-line interface: ``eabp <command> --input FILE ...``.

Every command writes one JSON document to stdout.  Exit codes: 0 success,
1 verification failure, 2 input error (payload carries "error").
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from . import serialize as ser
from .algebra import (
    InheritanceTensor,
    evolve,
    multiply,
    plenary_power,
    validate_tensor,
)
from .derivations import derivation_basis, leibniz_residual
from .dynamics import classify_limit, linear_forms, trajectory, verify_xy_recurrence
from .oracle import MAX_DIM, SearchConfig, brute_force_solutions
from .properties import check_dibaric, find_characters, property_suite
from .special import (
    InternalInconsistency,
    StochasticMatrixPair,
    absolute_nilpotents,
    classify_membership,
    idempotents,
)

ORACLE_DIST = 1e-6


@dataclass
class CommandResult:
    exit_code: int
    payload: Any


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ser.InputError("usage", message)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--input", default=argparse.SUPPRESS, help="tensor or (A, B) pair JSON file")
    p.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    p.add_argument("--format", choices=["json", "text"], default=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    # set_defaults mutates the shared Action objects, so the top level gets its own copy
    ap = _Parser(prog="eabp", description="Evolution algebras of bisexual populations.", parents=[_common()])
    ap.set_defaults(input=None, tol=None, format="json", seed=0)
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def cmd(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    cmd("validate", "check stochasticity of the inheritance tensor")
    p = cmd("mul", "product of two elements")
    p.add_argument("--z", required=True, help="element JSON or file")
    p.add_argument("--w", required=True, help="element JSON or file")
    p = cmd("evolve", "V(z) = z^2")
    p.add_argument("--z", required=True)
    p = cmd("power", "plenary power z^[t]")
    p.add_argument("--z", required=True)
    p.add_argument("--t", type=int, required=True)
    p = cmd("trajectory", "iterate V from z")
    p.add_argument("--z", required=True)
    p.add_argument("--steps", type=int, required=True)
    p = cmd("classify", "level set bounding the limit points of z")
    p.add_argument("--z", required=True)
    p = cmd("recurrence", "check X_t = Y_t = (X0 Y0)^(2^(t-1))")
    p.add_argument("--z", required=True)
    p.add_argument("--steps", type=int, required=True)
    p = cmd("derivations", "basis of the derivation algebra")
    p.add_argument("--rank-tol", type=float, default=1e-10)
    p = cmd("properties", "sampled property suite")
    p.add_argument("--trials", type=int, default=100)
    cmd("characters", "solve for characters")
    p = cmd("dibaric-check", "sampled dibaric homomorphism residual")
    p.add_argument("--pairs", type=int, default=1000)
    p = cmd("special", "idempotents and nilpotents of the (A, B) algebra")
    p.add_argument("what", choices=["idempotents", "nilpotents", "classify"])
    p.add_argument("--z", help="element for 'classify'")
    p = cmd("verify", "cross-check the analytic solution sets")
    p.add_argument("--oracle", action="store_true", help="also run the grid Newton search")
    p.add_argument("--grid", type=int, default=9)
    return ap


# --------------------------------------------------------------------------


def _document(args):
    if not args.input:
        raise ser.InputError("missing_input", "--input is required for this command")
    return ser.load_json(args.input)


def _tensor(args) -> InheritanceTensor:
    T = ser.tensor_from_json(_document(args))
    report = validate_tensor(T)
    if not report.ok:
        raise ser.InputError("not_stochastic", "inheritance coefficients are not stochastic", violations=report.violations)
    return T


def _pair(args) -> StochasticMatrixPair:
    P = ser.pair_from_json(_document(args))
    bad = P.violations()
    if bad:
        raise ser.InputError("not_stochastic", "A and B must be stochastic", violations=bad)
    return P


def _element(arg: Optional[str], n: int, nu: int, name: str = "--z"):
    if arg is None:
        raise ser.InputError("missing_element", f"{name} is required")
    return ser.element_from_json(ser.load_json(arg), n, nu)


def _tol(args, default: float) -> float:
    return default if args.tol is None else args.tol


def _validate(args):
    T = ser.tensor_from_json(_document(args))
    report = validate_tensor(T, _tol(args, 1e-9))
    if not report.ok:
        raise ser.InputError("not_stochastic", "inheritance coefficients are not stochastic", violations=report.violations)
    return 0, {"ok": True}


def _mul(args):
    T = _tensor(args)
    z, w = _element(args.z, T.n, T.nu), _element(args.w, T.n, T.nu, "--w")
    return 0, {"product": multiply(T, z, w)}


def _evolve(args):
    T = _tensor(args)
    return 0, {"image": evolve(T, _element(args.z, T.n, T.nu))}


def _power(args):
    T = _tensor(args)
    if args.t < 0:
        raise ser.InputError("bad_argument", "--t must be >= 0")
    return 0, {"t": args.t, "power": plenary_power(T, _element(args.z, T.n, T.nu), args.t)}


def _trajectory(args):
    T = _tensor(args)
    if args.steps < 0:
        raise ser.InputError("bad_argument", "--steps must be >= 0")
    return 0, trajectory(T, _element(args.z, T.n, T.nu), args.steps)


def _classify(args):
    T = _tensor(args)
    z = _element(args.z, T.n, T.nu)
    X, Y = linear_forms(z)
    return 0, {"X": X, "Y": Y, "classification": classify_limit(z, _tol(args, 1e-9))}


def _recurrence(args):
    T = _tensor(args)
    if args.steps < 1:
        raise ser.InputError("bad_argument", "--steps must be >= 1")
    tol = _tol(args, 1e-9)
    try:
        err = verify_xy_recurrence(T, _element(args.z, T.n, T.nu), args.steps, tol)
    except AssertionError as e:
        return 1, {"ok": False, "message": str(e)}
    return (0 if err <= tol else 1), {"ok": err <= tol, "max_relative_error": err, "steps": args.steps}


def _derivations(args):
    T = _tensor(args)
    basis = derivation_basis(T, args.rank_tol)
    residuals = [leibniz_residual(T, D) for D in basis]
    worst = max(residuals, default=0.0)
    ok = worst <= _tol(args, 1e-9)
    return (0 if ok else 1), {"dimension": len(basis), "basis": basis, "leibniz_residuals": residuals}


def _properties(args):
    T = _tensor(args)
    return 0, {"reports": property_suite(T, args.trials, args.seed, _tol(args, 1e-9))}


def _characters(args):
    return 0, find_characters(_tensor(args))


def _dibaric(args):
    T = _tensor(args)
    report = check_dibaric(T, args.pairs, args.seed, _tol(args, 1e-12))
    return (0 if report.verdict == "holds" else 1), report


def _special(args):
    P = _pair(args)
    tol = _tol(args, 1e-9)
    if args.what == "classify":
        z = _element(args.z, P.n, P.nu)
        return 0, {"label": classify_membership(P, z, tol)}
    fn = idempotents if args.what == "idempotents" else absolute_nilpotents
    try:
        return 0, fn(P, tol, seed=args.seed)
    except InternalInconsistency as e:
        return 1, {"ok": False, "message": str(e)}


def _verify(args):
    P = _pair(args)
    tol = _tol(args, 1e-9)
    try:
        sets = {"idempotent": idempotents(P, tol, seed=args.seed), "nilpotent": absolute_nilpotents(P, tol, seed=args.seed)}
    except InternalInconsistency as e:
        return 1, {"ok": False, "message": str(e)}
    out: dict = {"ok": True, "sound": True, "complete": {k: S.complete for k, S in sets.items()}}
    if args.oracle:
        if P.n + P.nu > MAX_DIM:
            raise ser.InputError("too_large", f"oracle search needs n + nu <= {MAX_DIM}")
        cfg = SearchConfig(grid_points_per_axis=args.grid, seed=args.seed)
        missing = []
        counts = {}
        for eq, S in sets.items():
            roots = brute_force_solutions(P, eq, cfg)
            counts[eq] = len(roots)
            for z in roots:
                d = S.distance(z)
                if d > ORACLE_DIST:
                    missing.append({"equation": eq, "element": z, "distance": d})
        out.update(oracle_roots=counts, missing=missing, ok=not missing)
    return (0 if out["ok"] else 1), out


HANDLERS = {
    "validate": _validate,
    "mul": _mul,
    "evolve": _evolve,
    "power": _power,
    "trajectory": _trajectory,
    "classify": _classify,
    "recurrence": _recurrence,
    "derivations": _derivations,
    "properties": _properties,
    "characters": _characters,
    "dibaric-check": _dibaric,
    "special": _special,
    "verify": _verify,
}


def _text(payload: Any) -> str:
    data = ser.to_jsonable(payload)
    if not isinstance(data, dict):
        return ser.dumps(data)
    return "\n".join(f"{k}: {ser.dumps(data[k], indent=0)}" for k in sorted(data))


def run(argv: Optional[list[str]] = None) -> tuple[CommandResult, str]:
    """Execute a command; returns the result and the output format."""
    fmt = "json"
    try:
        args = build_parser().parse_args(argv)
        fmt = args.format
        code, payload = HANDLERS[args.command](args)
    except ser.InputError as e:
        return CommandResult(2, e.to_json()), fmt
    except (ValueError, np.linalg.LinAlgError) as e:
        return CommandResult(2, {"error": {"code": "bad_input", "message": str(e)}}), fmt
    return CommandResult(code, payload), fmt


def main(argv: Optional[list[str]] = None) -> int:
    result, fmt = run(argv)
    text = _text(result.payload) if fmt == "text" and result.exit_code != 2 else ser.dumps(result.payload)
    sys.stdout.write(text + "\n")
    if result.exit_code == 2:
        print(f"eabp: {result.payload['error']['message']}", file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
