"""S-expression reader and the digit-tree file format.

Tree files contain either a single node expression or a letrec block::

    (1 (0 (-1)))                         ; finite tree, leaves written (d)
    (letrec ((ones (1 ones))) ones)      ; constant stream of 1s
    (letrec ((m (-1 m))) (1 m))          ; 1, -1, -1, ...

Inside a node, a bare atom is a reference to a letrec name.  Comments start
with ``;`` and run to the end of the line.
"""
from __future__ import annotations

from .errors import ArityError, ParseError
from .labels import format_label, read_label
from .tree import FinTree, LazyTree


class Sym(str):
    """An atom that came from the source text (label or keyword)."""


def read_sexpr(text: str):
    """Parse text into nested lists; atoms become parsed labels."""
    pos = 0
    n = len(text)

    def skip(p):
        while p < n:
            if text[p].isspace():
                p += 1
            elif text[p] == ";":
                while p < n and text[p] != "\n":
                    p += 1
            else:
                break
        return p

    def item(p):
        p = skip(p)
        if p >= n:
            raise ParseError("unexpected end of input")
        if text[p] == "(":
            out = []
            p += 1
            while True:
                p = skip(p)
                if p >= n:
                    raise ParseError("missing ')'")
                if text[p] == ")":
                    return out, p + 1
                x, p = item(p)
                out.append(x)
        if text[p] == ")":
            raise ParseError("unexpected ')'")
        if text.startswith("->", p) and (p + 2 >= n or text[p + 2].isspace() or text[p + 2] in "()"):
            return Sym("->"), p + 2
        lab, p = read_label(text, p)
        return (Sym(lab) if isinstance(lab, str) else lab), p

    pos = skip(pos)
    if pos >= n:
        raise ParseError("empty input")
    value, pos = item(pos)
    if skip(pos) != n:
        raise ParseError("trailing input after the expression")
    return value


def split_letrec(sx):
    """Return (bindings, body) with bindings as a list of raw lists."""
    if isinstance(sx, list) and sx and sx[0] == "letrec":
        if len(sx) != 3 or not isinstance(sx[1], list):
            raise ParseError("letrec needs a binding list and a body")
        return sx[1], sx[2]
    return [], sx


def parse_tree(text: str, alphabet: dict | None = None) -> LazyTree:
    """Parse a tree file; with ``alphabet`` (label -> arity) arities are checked."""
    bindings, body = split_letrec(read_sexpr(text))
    env = {}
    for b in bindings:
        if not (isinstance(b, list) and len(b) == 2 and isinstance(b[0], str)):
            raise ParseError("tree binding must be (name expr)")
        if b[0] in env:
            raise ParseError(f"duplicate binding {b[0]}")
        env[b[0]] = b[1]
    memo = {}

    def check(label, k):
        if alphabet is None:
            return
        if label not in alphabet:
            raise ParseError(f"unknown digit {format_label(label)}")
        if k and k != alphabet[label]:
            raise ArityError(f"digit {format_label(label)} has arity {alphabet[label]}, got {k} children")

    def build(sx, seen=()):
        if isinstance(sx, str) and not isinstance(sx, list):
            if sx not in env:
                raise ParseError(f"unbound name {sx!r} (write leaves as ({sx}))")
            if sx in memo:
                return memo[sx]
            if sx in seen:
                raise ParseError(f"name {sx!r} is defined only in terms of itself")
            target = env[sx]
            if isinstance(target, list):
                t = LazyTree(None, None)
                memo[sx] = t
                _fill(t, target)
                return t
            memo[sx] = build(target, seen + (sx,))
            return memo[sx]
        if not isinstance(sx, list):
            raise ParseError(f"bad tree expression {sx!r}")
        t = LazyTree(None, None)
        _fill(t, sx)
        return t

    def _fill(t, sx):
        if not sx:
            raise ParseError("empty node ()")
        label, kids = sx[0], sx[1:]
        if isinstance(label, list):
            raise ParseError("node label must be a digit id")
        label = _plain(label)
        check(label, len(kids))
        for k in kids:
            validate(k)
        t.root = label
        t._kids = None
        if kids:
            t._thunk = lambda: [build(k) for k in kids]
        else:
            t._thunk = _leaf

    def validate(sx):
        if isinstance(sx, list):
            if not sx or isinstance(sx[0], list):
                raise ParseError("malformed node")
            check(_plain(sx[0]), len(sx) - 1)
            for k in sx[1:]:
                validate(k)
        elif sx not in env:
            raise ParseError(f"unbound name {sx!r} (write leaves as ({sx}))")

    for name, sx in env.items():
        validate(sx) if isinstance(sx, list) else (sx in env or validate(sx))
    validate(body)
    return build(body)


def _leaf():
    from .tree import _exhausted
    return _exhausted()


def _plain(label):
    return str(label) if isinstance(label, Sym) else label


def parse_fintree(text: str) -> FinTree:
    sx = read_sexpr(text)

    def build(x):
        if not isinstance(x, list) or not x:
            raise ParseError("finite trees are written (d child ...)")
        return FinTree(_plain(x[0]), [build(k) for k in x[1:]])

    return build(sx)


def format_tree(S: FinTree) -> str:
    return str(S)
