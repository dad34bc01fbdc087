"""Command-line driver: ``oddtangle {compute,permute,apply,expand,verify}``.

Exit codes: 0 ok, 1 failed verification, 2 parse/config error, 3 even or
unsupported qubit count, 4 qubit position out of range, 5 symbolic size cap.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import invariants as inv
from . import symbolic
from . import verify
from .state import (
    LocalOperatorChain,
    StateParseError,
    apply_local_operators,
    apply_qubit_permutation,
    parse_state,
    permutation_from_cycles,
    to_json,
    to_ket,
)

EXIT_FAIL, EXIT_PARSE, EXIT_PARITY, EXIT_RANGE, EXIT_CAP = 1, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def read_source(source: str) -> tuple[str, bool]:
    """Return ``(text, is_json)`` for ``ket:...`` inline input or a file path."""
    if source.startswith("ket:"):
        return source[4:], False
    path = Path(source)
    if not path.is_file():
        raise CliError(f"no such state file: {source}", EXIT_PARSE)
    text = path.read_text()
    return text, text.lstrip().startswith("{")


def load_state(source: str, n: int | None = None):
    text, is_json = read_source(source)
    try:
        return parse_state(text, n), is_json
    except (StateParseError, ValueError) as exc:
        raise CliError(f"cannot parse state: {exc}", EXIT_PARSE) from None


def _parse_entry(z) -> complex:
    if isinstance(z, (list, tuple)):
        return complex(float(z[0]), float(z[1]))
    if isinstance(z, str):
        return complex(z.replace(" ", "").replace("i", "j"))
    return complex(z)


def load_ops(source: str) -> LocalOperatorChain:
    """Operators as JSON: a list of 2x2 matrices (entries numbers, ``[re, im]`` or ``"a+bi"``)."""
    text = source if source.lstrip().startswith(("[", "{")) else None
    if text is None:
        path = Path(source)
        if not path.is_file():
            raise CliError(f"no such operator file: {source}", EXIT_PARSE)
        text = path.read_text()
    try:
        doc = json.loads(text)
        if isinstance(doc, dict):
            doc = doc["ops"]
        return LocalOperatorChain(tuple(np.array([[_parse_entry(z) for z in row] for row in A])
                                        for A in doc))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise CliError(f"cannot parse operators: {exc}", EXIT_PARSE) from None


def _emit_state(state, as_json: bool) -> str:
    return to_json(state) if as_json else to_ket(state)


def cmd_compute(args) -> int:
    state, _ = load_state(args.input, args.n)
    if state.n % 2 == 0 or state.n < 3:
        raise CliError(f"invariants need an odd qubit count >= 3, got n={state.n}", EXIT_PARITY)
    if args.measure == "tau":
        value = inv.tau(state)
    elif args.measure == "R":
        value = inv.big_r(state)
    else:
        if args.i is None:
            raise CliError("--measure tau-i needs --i", EXIT_PARSE)
        if not 1 <= args.i <= state.n:
            raise CliError(f"--i {args.i} out of range 1..{state.n}", EXIT_RANGE)
        value = inv.tau_i(state, args.i)
    doc = {"measure": args.measure, **value.as_dict()}
    if args.measure == "tau-i":
        doc["i"] = args.i
    if args.format == "json":
        print(json.dumps(doc))
    elif args.format == "csv":
        print(",".join(doc))
        print(",".join(str(v) for v in doc.values()))
    else:
        label = f"tau^({args.i})" if args.measure == "tau-i" else args.measure
        print(f"{label}: normalized={value.normalized!r} raw={value.raw!r} norm={value.norm!r}")
    return 0


def cmd_permute(args) -> int:
    state, is_json = load_state(args.input, args.n)
    try:
        perm = permutation_from_cycles(args.cycles, state.n)
    except ValueError as exc:
        raise CliError(f"bad cycles: {exc}", EXIT_PARSE) from None
    print(_emit_state(apply_qubit_permutation(state, perm), is_json or args.format == "json"))
    return 0


def cmd_apply(args) -> int:
    state, is_json = load_state(args.input, args.n)
    chain = load_ops(args.ops)
    if chain.n != state.n:
        raise CliError(f"{chain.n} operators for a {state.n}-qubit state", EXIT_PARSE)
    print(_emit_state(apply_local_operators(state, chain), is_json or args.format == "json"))
    return 0


def cmd_expand(args) -> int:
    n = args.n
    if n % 2 == 0:
        raise CliError(f"odd-n tangle needs odd n, got {n}", EXIT_PARITY)
    if not 3 <= n <= symbolic.MAX_SYMBOLIC_QUBITS:
        raise CliError(f"symbolic expansion supports 3 <= n <= {symbolic.MAX_SYMBOLIC_QUBITS}", EXIT_CAP)
    poly = symbolic.expand_tau_core(n)
    if args.permutation:
        try:
            perm = permutation_from_cycles(args.permutation, n)
        except ValueError as exc:
            raise CliError(f"bad permutation: {exc}", EXIT_PARSE) from None
        poly = symbolic.permute_polynomial(poly, perm)
    body = poly.to_json()
    if args.output:
        Path(args.output).write_text(body + "\n")
        print(f"wrote {args.output} ({len(poly)} monomials)")
    elif args.format == "text":
        print(poly.pretty())
        print(f"monomials: {len(poly)}")
    else:
        print(body)
    if args.check_forms:
        if n != 3:
            raise CliError("--check-forms needs --n 3", EXIT_PARITY)
        forms = symbolic.three_qubit_forms()
        same = all(symbolic.poly_equal(f, forms[0]) for f in forms)
        core = symbolic.poly_equal(forms[0], symbolic.expand_tau_core(3))
        print(f"three-qubit forms: {'identical' if same else 'DIFFERENT'}; "
              f"{'equal' if core else 'not equal'} to the expanded tangle core")
        if not (same and core):
            return EXIT_FAIL
    return 0


def cmd_verify(args) -> int:
    try:
        cfg = verify.VerificationConfig(
            master_seed=args.seed,
            trials=args.trials,
            n_values=tuple(int(x) for x in args.n_values.split(",")),
            tol_abs=args.tol_abs,
            tol_rel=args.tol_rel,
            monotone_tol=args.monotone_tol,
            tol_bounds=args.tol_bounds,
            perm_samples=args.perm_samples,
            suite=tuple(args.suite.split(",")),
        )
    except ValueError as exc:
        raise CliError(f"bad verification config: {exc}", EXIT_PARSE) from None
    report = verify.run_campaign(cfg)
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n")
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    if args.format == "json":
        print(report.to_json())
    elif args.format == "csv":
        print(report.to_csv(), end="")
    else:
        for line in report.summary_lines():
            print(line)
        print(f"{'all checks passed' if report.passed else 'SOME CHECKS FAILED'} "
              f"({report.wall_time:.2f}s)")
    return 0 if report.passed else EXIT_FAIL


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--format", choices=("text", "json", "csv"), default=d("text"))
    parser.add_argument("--seed", type=int, default=d(0), help="master seed for stochastic output")
    parser.add_argument("--tol-abs", type=float, default=d(1e-10))
    parser.add_argument("--tol-rel", type=float, default=d(1e-8))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oddtangle", description=__doc__.splitlines()[0])
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def state_cmd(name, help_):
        p = sub.add_parser(name, help=help_, parents=[common])
        p.add_argument("input", help="state file (JSON or ket text) or inline 'ket:...'")
        p.add_argument("--n", type=int, help="qubit count when the kets do not fix it")
        return p

    p = state_cmd("compute", "evaluate tau, tau^(i) or R")
    p.add_argument("--measure", choices=("tau", "tau-i", "R"), default="tau")
    p.add_argument("--i", type=int)
    p.set_defaults(func=cmd_compute)

    p = state_cmd("permute", "permute qubits, e.g. --cycles '(1 5)'")
    p.add_argument("--cycles", required=True)
    p.set_defaults(func=cmd_permute)

    p = state_cmd("apply", "apply a chain of local 2x2 operators (no renormalization)")
    p.add_argument("--ops", required=True, help="JSON list of 2x2 matrices, inline or a file")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("expand", help="exact polynomial of the tangle core", parents=[common])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--permutation", help="cycle string applied to the symbols")
    p.add_argument("--output", "-o")
    p.add_argument("--check-forms", action="store_true")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("verify", help="run a seeded verification campaign", parents=[common])
    p.add_argument("--suite", default="all", help="'all', 'anchors' or a comma list of checks")
    p.add_argument("--n", dest="n_values", default="3,5")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--monotone-tol", type=float, default=1e-9)
    p.add_argument("--tol-bounds", type=float, default=1e-12)
    p.add_argument("--perm-samples", type=int, default=500)
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--csv", help="write the CSV summary here")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
