"""Command-line front end.

Exit status: 0 on success, 1 when a computation hits a mathematical
precondition (not a projector, signature mismatch, ...), 2 on I/O, syntax or
usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from .algebra import EXACT, NUMERIC, AlgebraSignature, Element, evaluate, mul, star
from .coefficients import ThetaMatrix, parse_theta
from .errors import ParseError, ThetaPlaneError
from .k0 import k0_class
from .matrices import (
    AlgMatrix,
    JetContext,
    evaluate_matrix,
    format_matrix,
    mat_adjoint,
    mat_mul,
    parse_matrix,
    projector_violation,
)
from .projectors import make_test_projector, top_gram_check, trivialize
from .syntax import format_definitions, format_element, format_index, parse_definitions, parse_element

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad flag combination detected after argparse succeeded."""


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # the same flags are accepted before and after the subcommand
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--theta", metavar="FILE", default=d(None), help="theta config file")
    parser.add_argument("--mode", choices=(EXACT, NUMERIC), default=d(EXACT))
    parser.add_argument("--degree", "-D", type=int, default=d(4), metavar="D", help="jet degree (default 4)")
    parser.add_argument("--tol", type=float, default=d(1e-9), help="numeric tolerance (default 1e-9)")
    parser.add_argument("--seed", type=int, default=d(0), help="random seed for gen-test (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thetaplane",
        description="Arithmetic, projector trivialization and K0 classes on theta-deformed planes.",
    )
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def element_flags(p):
        p.add_argument("-n", type=int, help="number of complex generators (default: from theta, else 1)")
        p.add_argument("-m", type=int, help="plane dimension m (2n or 2n+1; default 2n)")

    p = sub.add_parser("mul", parents=[common], help="multiply two matrices or two expressions")
    p.add_argument("files", nargs="*", metavar="FILE", help="two matrix files")
    p.add_argument("-e", "--expr", action="append", default=[], help="expression (give twice)")
    element_flags(p)

    p = sub.add_parser("star", parents=[common], help="adjoint of a matrix or star of an expression")
    p.add_argument("file", nargs="?", metavar="FILE")
    p.add_argument("-e", "--expr")
    element_flags(p)

    p = sub.add_parser("normalize", parents=[common], help="print the normal form")
    p.add_argument("file", nargs="?", metavar="FILE", help="file of 'name = expr' lines")
    p.add_argument("-e", "--expr")
    element_flags(p)

    p = sub.add_parser("eval", parents=[common], help="evaluate phases at the --theta angles")
    p.add_argument("file", nargs="?", metavar="FILE", help="exact matrix file")
    p.add_argument("-e", "--expr")
    element_flags(p)

    p = sub.add_parser("projcheck", parents=[common], help="test P^2 = P = P^* modulo the jet degree")
    p.add_argument("file", metavar="P.mat")

    p = sub.add_parser("trivialize", parents=[common], help="unitary U with U P U^* = diag(I_r, 0)")
    p.add_argument("file", metavar="P.mat")
    p.add_argument("-o", "--output", default="U.mat", help="where to write U (default U.mat, '-' for stdout)")

    p = sub.add_parser("k0", parents=[common], help="K0 class (rank) of a projector")
    p.add_argument("file", metavar="P.mat")

    p = sub.add_parser("gen-test", parents=[common], help="write a seeded test projector")
    p.add_argument("-n", type=int, default=2)
    p.add_argument("-m", type=int)
    p.add_argument("-N", type=int, default=2, help="matrix size")
    p.add_argument("-r", "--rank", type=int, default=1)
    p.add_argument("-o", "--output", default="-", help="output file (default stdout)")
    p.add_argument("--unitary", metavar="FILE", help="also write the conjugating unitary here")

    p = sub.add_parser("gram", parents=[common], help="coefficient of z^M zb^M in row k of P P^*")
    p.add_argument("file", metavar="P.mat")
    p.add_argument("-k", type=int, required=True, help="row index (1-based)")
    p.add_argument("-M", required=True, help="comma-separated exponents m1,...,mn")
    p.add_argument("-t", type=int, default=0, help="x-exponent (odd m only)")
    return parser


# ---------------------------------------------------------------------------


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write(path: str, text: str, out) -> None:
    if path == "-":
        out.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _theta(args) -> Optional[ThetaMatrix]:
    return parse_theta(_read(args.theta)) if args.theta else None


def _signature(args, mode: Optional[str] = None) -> AlgebraSignature:
    mode = mode or args.mode
    theta = _theta(args)
    n = args.n
    if theta is not None:
        if n is not None and n != theta.n:
            raise UsageError(f"-n {n} does not match the theta config (n={theta.n})")
        n = theta.n
    n = 1 if n is None else n
    if mode == NUMERIC and theta is None:
        raise UsageError("numeric mode needs --theta")
    return AlgebraSignature(n, args.m, mode, theta if mode == NUMERIC else None)


def _matrix(args, path: str) -> AlgMatrix:
    return parse_matrix(_read(path), _theta(args))


def _ctx(args) -> JetContext:
    return JetContext(args.degree, args.tol)


def _exactly_one(args) -> None:
    if (args.file is None) == (args.expr is None):
        raise UsageError("give either a file or -e EXPR")


def cmd_mul(args, out) -> None:
    if args.files and args.expr:
        raise UsageError("give two matrix files or two -e expressions, not both")
    if args.expr:
        if len(args.expr) != 2:
            raise UsageError("mul needs exactly two -e expressions")
        sig = _signature(args)
        a, b = (parse_element(e, sig) for e in args.expr)
        out.write(format_element(mul(a, b)) + "\n")
        return
    if len(args.files) != 2:
        raise UsageError("mul needs exactly two matrix files")
    A, B = (_matrix(args, f) for f in args.files)
    out.write(format_matrix(mat_mul(A, B)))


def cmd_star(args, out) -> None:
    _exactly_one(args)
    if args.expr is not None:
        out.write(format_element(star(parse_element(args.expr, _signature(args)))) + "\n")
    else:
        out.write(format_matrix(mat_adjoint(_matrix(args, args.file))))


def cmd_normalize(args, out) -> None:
    _exactly_one(args)
    sig = _signature(args)
    if args.expr is not None:
        out.write(format_element(parse_element(args.expr, sig)) + "\n")
    else:
        out.write(format_definitions(parse_definitions(_read(args.file), sig)))


def cmd_eval(args, out) -> None:
    _exactly_one(args)
    theta = _theta(args)
    if theta is None:
        raise UsageError("eval needs --theta")
    if args.expr is not None:
        out.write(format_element(evaluate(parse_element(args.expr, _signature(args, EXACT)), theta)) + "\n")
    else:
        out.write(format_matrix(evaluate_matrix(parse_matrix(_read(args.file), theta), theta)))


def cmd_projcheck(args, out) -> None:
    P = _matrix(args, args.file)
    bad = projector_violation(P, _ctx(args))
    if bad is None:
        out.write("yes\n")
        return
    which, k, l, idx, c = bad
    if P.sig.exact:
        text = str(c)
    else:
        text = format_element(Element.scalar(P.sig, c))
    out.write(f"no\n{which} [{k + 1},{l + 1}] {format_index(idx)} {text}\n")


def cmd_trivialize(args, out) -> None:
    P = _matrix(args, args.file)
    res = trivialize(P, _ctx(args))
    _write(args.output, format_matrix(res.U), out)
    out.write(res.report() + "\n")


def cmd_k0(args, out) -> None:
    out.write(f"{k0_class(_matrix(args, args.file), _ctx(args))}\n")


def cmd_gen_test(args, out) -> None:
    P, V = make_test_projector(args.seed, args.n, args.N, args.rank, args.degree, args.m)
    _write(args.output, format_matrix(P), out)
    if args.unitary:
        _write(args.unitary, format_matrix(V), out)


def cmd_gram(args, out) -> None:
    P = _matrix(args, args.file)
    try:
        M = tuple(int(x) for x in args.M.split(","))
    except ValueError:
        raise UsageError(f"-M expects comma-separated integers, got {args.M!r}") from None
    if any(x < 0 for x in M):
        raise UsageError("-M entries must be nonnegative")
    if not 1 <= args.k <= P.N:
        raise UsageError(f"-k must lie in 1..{P.N}")
    out.write(f"{top_gram_check(P, args.k - 1, M, args.t)}\n")


COMMANDS = {
    "mul": cmd_mul,
    "star": cmd_star,
    "normalize": cmd_normalize,
    "eval": cmd_eval,
    "projcheck": cmd_projcheck,
    "trivialize": cmd_trivialize,
    "k0": cmd_k0,
    "gen-test": cmd_gen_test,
    "gram": cmd_gram,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        if args.degree < 0 or args.tol < 0:
            raise UsageError("--degree and --tol must be nonnegative")
        COMMANDS[args.command](args, out)
    except (UsageError, ParseError, OSError) as exc:
        err.write(f"thetaplane {args.command}: {exc}\n")
        return EXIT_USAGE
    except ThetaPlaneError as exc:
        err.write(f"thetaplane {args.command}: {type(exc).__name__}: {exc}\n")
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
