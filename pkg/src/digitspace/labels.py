"""Digit labels: plain ids, product tuples ``<a,b>``, hyper sets ``[a,b]`` and
lifted digits ``K(a)``.

Plain ids are strings.  The compound labels are tiny frozen wrappers so that
they hash and compare structurally.
"""
from __future__ import annotations

from .errors import ParseError

SPECIAL = set("()[]<>,")


class Prod(tuple):
    """Product digit label <d1,...,dn>."""

    def __new__(cls, parts):
        return super().__new__(cls, tuple(parts))

    def __repr__(self):
        return f"Prod({tuple(self)!r})"

    def __str__(self):
        return "<" + ",".join(format_label(p) for p in self) + ">"

    def __eq__(self, o):
        return type(o) is Prod and tuple.__eq__(self, o)

    def __ne__(self, o):
        return not self == o

    def __hash__(self):
        return hash(("Prod", tuple(self)))


class Hyper(tuple):
    """Hyper digit label [d1,...,dr]; order is whatever the creator chose
    (the hyper module always uses the canonical one)."""

    def __new__(cls, parts):
        parts = tuple(parts)
        if not parts:
            raise ParseError("empty hyper digit")
        if len(set(parts)) != len(parts):
            raise ParseError("hyper digit with repeated components")
        return super().__new__(cls, parts)

    def __repr__(self):
        return f"Hyper({tuple(self)!r})"

    def __str__(self):
        return "[" + ",".join(format_label(p) for p in self) + "]"

    def __eq__(self, o):
        return type(o) is Hyper and tuple.__eq__(self, o)

    def __ne__(self, o):
        return not self == o

    def __hash__(self):
        return hash(("Hyper", tuple(self)))


class Lifted:
    """Lifted digit K(d), the map sending a compact set K to d[K]."""

    __slots__ = ("inner",)

    def __init__(self, inner):
        object.__setattr__(self, "inner", inner)

    def __setattr__(self, name, value):
        raise AttributeError("immutable")

    def __eq__(self, o):
        return type(o) is Lifted and o.inner == self.inner

    def __hash__(self):
        return hash(("K", self.inner))

    def __repr__(self):
        return f"Lifted({self.inner!r})"

    def __str__(self):
        return f"K({format_label(self.inner)})"


def format_label(label) -> str:
    return str(label)


def valid_atom(s: str) -> bool:
    return bool(s) and not any(c in SPECIAL or c.isspace() for c in s)


def read_label(text: str, pos: int):
    """Read one label starting at ``pos``; returns (label, new_pos).

    ``K(`` with no space in between starts a lifted digit.
    """
    n = len(text)
    if pos >= n:
        raise ParseError("unexpected end of input while reading a label")
    c = text[pos]
    if c == "<" or c == "[":
        close = ">" if c == "<" else "]"
        parts = []
        pos += 1
        while True:
            part, pos = read_label(text, pos)
            parts.append(part)
            if pos >= n:
                raise ParseError(f"unterminated {c}")
            if text[pos] == ",":
                pos += 1
            elif text[pos] == close:
                pos += 1
                break
            else:
                raise ParseError(f"unexpected {text[pos]!r} in label")
        return (Prod(parts) if c == "<" else Hyper(parts)), pos
    if text.startswith("K(", pos):
        inner, pos = read_label(text, pos + 2)
        if pos >= n or text[pos] != ")":
            raise ParseError("unterminated K(")
        return Lifted(inner), pos + 1
    start = pos
    while pos < n and not (text[pos] in SPECIAL or text[pos].isspace()):
        pos += 1
    if pos == start:
        raise ParseError(f"expected a label at {text[start:start + 10]!r}")
    return text[start:pos], pos


def parse_label(s: str):
    s = s.strip()
    label, pos = read_label(s, 0)
    if pos != len(s):
        raise ParseError(f"trailing characters in label {s!r}")
    return label
