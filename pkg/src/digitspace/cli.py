"""Command-line front end.

Every numeric value on standard output is an exact rational ``p/q``; the
lines are ``key: value`` so they are easy to grep.  Summaries go to
standard error.  Exit codes: 0 success, 2 bad input, 3 productivity.
"""
from __future__ import annotations

import argparse
import sys

from .coding import CauchyOracle, cauchy_to_tree, dense_base_point, tree_to_cauchy
from .errors import CoherenceError, DigitSpaceError, ProductivityError
from .functree import apply, parse_funtree
from .hyper import (HyperSpace, compact_approx, flat_union_approx, hausdorff_distance,
                    michael_transform, michael_union)
from .numeric import fmt, parse_box, parse_rational
from .sexpr import parse_tree
from .space import resolve_space
from .tree import prefix

EXIT_OK, EXIT_INPUT, EXIT_PRODUCTIVITY = 0, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _point(text: str) -> tuple:
    return tuple(parse_rational(t) for t in text.split(","))


def _fmt_point(p) -> str:
    return ",".join(fmt(c) for c in p)


def _emit(key, value):
    print(f"{key}: {value}")


def _note(msg):
    print(msg, file=sys.stderr)


def _depth(n: int, what="depth") -> int:
    if n < 0:
        raise InputError(f"{what} must be non-negative")
    return n


# -- subcommands ------------------------------------------------------------

def cmd_expand(args) -> int:
    space = resolve_space(args.space)
    n = _depth(args.digits, "digit count")
    x = _point(args.value)
    if len(x) != space.dim:
        raise InputError(f"value has {len(x)} coordinates, space has dimension {space.dim}")
    if not space.full_box.contains_point(x):
        raise InputError(f"value {_fmt_point(x)} is outside the space {space.full_box}")
    T = cauchy_to_tree(space, CauchyOracle.exact(x))
    bound = space.factor ** n * space.bound
    if n == 0:
        approx = space.base_point
        _emit("digits", "")
    else:
        S = prefix(T, n - 1)
        approx = dense_base_point(space, S)
        if space.max_arity == 1:
            _emit("digits", " ".join(str(level[0]) for level in S.levels()))
        else:
            _emit("tree", S)
    _emit("approx", _fmt_point(approx))
    _emit("bound", fmt(bound))
    _note(f"expanded {_fmt_point(x)} to {n} levels; error at most {fmt(bound)}")
    return EXIT_OK


def cmd_convert(args) -> int:
    space = resolve_space(args.space)
    if args.from_cauchy:
        if (args.value is None) == (args.cauchy is None):
            raise InputError("--from-cauchy needs exactly one of --value and --cauchy")
        m = _depth(args.depth)
        if args.value is not None:
            x = _point(args.value)
            if len(x) != space.dim or space.full_box.dist_point(x) > 0:
                raise InputError(f"value {_fmt_point(x)} is outside the space")
            oracle = CauchyOracle.exact(x)
        else:
            oracle = CauchyOracle.from_table(_cauchy_table(_read(args.cauchy)))
        T = cauchy_to_tree(space, oracle)
        _emit("tree", prefix(T, m))
        _note(f"height-{m} prefix of the digit tree")
        return EXIT_OK
    if args.tree is None:
        raise InputError("convert needs --tree FILE or --from-cauchy")
    n = _depth(args.precision, "precision")
    T = parse_tree(_read(args.tree), space.alphabet)
    u = tree_to_cauchy(space, T)(n)
    _emit("approx", _fmt_point(u))
    _note(f"value within 2^-{n} of the printed point")
    return EXIT_OK


def _cauchy_table(text: str) -> dict:
    table = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"line {lineno}: expected 'n point'")
        table[int(parts[0])] = _point(parts[1])
    if not table:
        raise InputError("empty Cauchy file")
    return table


def cmd_eval(args) -> int:
    space = resolve_space(args.space)
    alphabet = HyperSpace(space).alphabet if args.hyper else space.alphabet
    n = _depth(args.depth)
    inputs = [parse_tree(_read(p), alphabet) for p in args.args]
    f = parse_funtree(_read(args.fun), alphabet, arity=len(inputs))
    out = apply(f, inputs, fuel=args.fuel)
    _emit("tree", prefix(out, n))
    _note(f"height-{n} prefix of the output")
    return EXIT_OK


def cmd_hyper(args) -> int:
    H = HyperSpace(resolve_space(args.space))
    n = _depth(args.depth)
    T = parse_tree(_read(args.tree), H.alphabet)
    approx = compact_approx(H, T, n)
    for b in approx:
        _emit("box", b)
    if args.hausdorff is not None:
        ref = [parse_box(s) for s in args.hausdorff.split(";") if s.strip()]
        if not ref:
            raise InputError("empty reference set")
        _emit("distance", fmt(hausdorff_distance(list(approx), ref)))
    _note(f"{len(approx)} boxes of width at most {fmt(approx.width)}")
    return EXIT_OK


def cmd_michael(args) -> int:
    H = HyperSpace(resolve_space(args.space))
    n = _depth(args.depth)
    T = parse_tree(_read(args.tree))
    out = michael_union(H, T) if args.rewrite else michael_transform(H, T)
    flat = prefix(out, n)
    _emit("tree", flat)
    dist = hausdorff_distance(list(compact_approx(H, out, n)), list(flat_union_approx(H, T, n)))
    _emit("distance", fmt(dist))
    _note(f"union tree to depth {n}; distance to the direct union {fmt(dist)}")
    return EXIT_OK


# -- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="digitspace", description="Exact computation with digit trees.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--space", default="sd", help="built-in name (sd) or space file")

    sp = sub.add_parser("expand", help="digits of a rational point")
    common(sp)
    sp.add_argument("--value", required=True, help="p/q, or comma-separated coordinates")
    sp.add_argument("--digits", type=int, required=True)
    sp.set_defaults(func=cmd_expand)

    sp = sub.add_parser("convert", help="tree to dyadic approximation, or back")
    common(sp)
    sp.add_argument("--tree", help="tree file")
    sp.add_argument("--precision", type=int, default=8)
    sp.add_argument("--from-cauchy", action="store_true", help="build a tree from Cauchy data")
    sp.add_argument("--value", help="exact rational point (with --from-cauchy)")
    sp.add_argument("--cauchy", help="file of 'n point' lines (with --from-cauchy)")
    sp.add_argument("--depth", type=int, default=8, help="height of the printed prefix")
    sp.set_defaults(func=cmd_convert)

    sp = sub.add_parser("eval", help="run a function tree")
    common(sp)
    sp.add_argument("--fun", required=True, help="function-tree file")
    sp.add_argument("--args", nargs="+", required=True, help="input tree files")
    sp.add_argument("--depth", type=int, default=8)
    sp.add_argument("--hyper", action="store_true", help="inputs are trees over the hyperspace")
    sp.add_argument("--fuel", type=int, default=None, help="max consecutive reads")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("hyper", help="box approximation of a compact set")
    common(sp)
    sp.add_argument("--tree", required=True)
    sp.add_argument("--depth", type=int, default=4)
    sp.add_argument("--hausdorff", metavar="REF", help="';'-separated boxes or points")
    sp.set_defaults(func=cmd_hyper)

    sp = sub.add_parser("michael", help="union of a compact family of compact sets")
    common(sp)
    sp.add_argument("--tree", required=True)
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--rewrite", action="store_true",
                    help="accept nested hyper labels and rewrite them to lifted form")
    sp.set_defaults(func=cmd_michael)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ProductivityError, RecursionError) as exc:
        _note(f"error: {exc or 'recursion limit reached'}")
        return EXIT_PRODUCTIVITY
    except (InputError, ValueError, CoherenceError, DigitSpaceError) as exc:
        _note(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
