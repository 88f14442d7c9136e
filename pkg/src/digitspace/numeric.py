"""Exact numbers, intervals and boxes.

Everything is stored as ``fractions.Fraction``.  ``Dyadic`` is the canonical
mantissa/exponent form used for basic elements and for printing.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ArityError, DomainError, ParseError


def exact(x) -> Fraction:
    """Coerce ints, Fractions, Dyadics and rational strings to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Dyadic):
        return x.to_fraction()
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or a string")
    return Fraction(x)


_DYADIC_RE = re.compile(r"^\s*([+-]?\d+)\s*\*\s*2\s*\^\s*([+-]?\d+)\s*$")


def parse_rational(s: str) -> Fraction:
    """Parse ``p/q``, an integer, a finite decimal or ``m*2^e``."""
    m = _DYADIC_RE.match(s)
    if m:
        return Dyadic(int(m.group(1)), int(m.group(2))).to_fraction()
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not an exact rational: {s!r}") from exc


def fmt(x) -> str:
    """Print an exact rational as ``p/q`` (or ``p`` for integers)."""
    x = exact(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def is_dyadic(x) -> bool:
    d = exact(x).denominator
    return d & (d - 1) == 0


def ceil_log2(x: Fraction) -> int:
    """Least k with 2**k >= x, for x > 0."""
    x = exact(x)
    if x <= 0:
        raise DomainError("ceil_log2 needs a positive argument")
    k = x.numerator.bit_length() - x.denominator.bit_length() - 1
    while Fraction(2) ** k < x:
        k += 1
    while Fraction(2) ** (k - 1) >= x:
        k -= 1
    return k


class Dyadic:
    """mantissa * 2**exponent in canonical form (odd mantissa, or 0 * 2**0)."""

    __slots__ = ("mantissa", "exponent")

    def __init__(self, mantissa: int, exponent: int = 0):
        mantissa, exponent = int(mantissa), int(exponent)
        if mantissa == 0:
            exponent = 0
        else:
            tz = (mantissa & -mantissa).bit_length() - 1
            mantissa >>= tz
            exponent += tz
        object.__setattr__(self, "mantissa", mantissa)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    @classmethod
    def from_fraction(cls, x) -> "Dyadic":
        x = exact(x)
        den = x.denominator
        if den & (den - 1):
            raise DomainError(f"{fmt(x)} is not dyadic")
        return cls(x.numerator, -(den.bit_length() - 1))

    @classmethod
    def round(cls, x, bits: int) -> "Dyadic":
        """Nearest multiple of 2**-bits (ties toward +inf)."""
        x = exact(x)
        scaled = x * (1 << bits) if bits >= 0 else x / (1 << -bits)
        m = (scaled + Fraction(1, 2)).__floor__()
        return cls(m, -bits)

    def to_fraction(self) -> Fraction:
        if self.exponent >= 0:
            return Fraction(self.mantissa << self.exponent)
        return Fraction(self.mantissa, 1 << -self.exponent)

    def _other(self, o):
        if isinstance(o, Dyadic):
            return o
        if isinstance(o, int):
            return Dyadic(o)
        return None

    def __add__(self, o):
        o2 = self._other(o)
        if o2 is None:
            return self.to_fraction() + exact(o)
        e = min(self.exponent, o2.exponent)
        return Dyadic((self.mantissa << (self.exponent - e)) + (o2.mantissa << (o2.exponent - e)), e)

    __radd__ = __add__

    def __neg__(self):
        return Dyadic(-self.mantissa, self.exponent)

    def __sub__(self, o):
        return self + (-o if isinstance(o, (Dyadic, int)) else -exact(o))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o2 = self._other(o)
        if o2 is None:
            return self.to_fraction() * exact(o)
        return Dyadic(self.mantissa * o2.mantissa, self.exponent + o2.exponent)

    __rmul__ = __mul__

    def shift(self, k: int) -> "Dyadic":
        """Multiply by 2**k."""
        return Dyadic(self.mantissa, self.exponent + k)

    def __eq__(self, o):
        try:
            return self.to_fraction() == exact(o)
        except (TypeError, ParseError):
            return NotImplemented

    def __lt__(self, o):
        return self.to_fraction() < exact(o)

    def __le__(self, o):
        return self.to_fraction() <= exact(o)

    def __gt__(self, o):
        return self.to_fraction() > exact(o)

    def __ge__(self, o):
        return self.to_fraction() >= exact(o)

    def __hash__(self):
        return hash(self.to_fraction())

    def __repr__(self):
        return f"Dyadic({self.mantissa}, {self.exponent})"

    def __str__(self):
        if self.exponent == 0:
            return str(self.mantissa)
        return f"{self.mantissa}*2^{self.exponent}"


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = exact(self.lo), exact(self.hi)
        if lo > hi:
            raise DomainError(f"empty interval [{fmt(lo)}, {fmt(hi)}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x) -> "Interval":
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, o: "Interval") -> bool:
        return self.lo <= o.lo and o.hi <= self.hi

    def meets(self, o: "Interval") -> bool:
        return self.lo <= o.hi and o.lo <= self.hi

    def dist(self, x) -> Fraction:
        if x < self.lo:
            return self.lo - x
        if x > self.hi:
            return x - self.hi
        return Fraction(0)

    def clip(self, x) -> Fraction:
        return min(max(exact(x), self.lo), self.hi)

    def __str__(self):
        return f"[{fmt(self.lo)},{fmt(self.hi)}]"


class Box(tuple):
    """A nonempty tuple of intervals; a product of closed intervals."""

    def __new__(cls, dims: Iterable[Interval]):
        dims = tuple(d if isinstance(d, Interval) else Interval(*d) for d in dims)
        if not dims:
            raise DomainError("a box needs at least one coordinate")
        return super().__new__(cls, dims)

    @classmethod
    def point(cls, p: Sequence) -> "Box":
        return cls(Interval.point(x) for x in p)

    @property
    def dim(self) -> int:
        return len(self)

    @property
    def width(self) -> Fraction:
        return max(iv.width for iv in self)

    @property
    def mid(self) -> tuple:
        return tuple(iv.mid for iv in self)

    @property
    def lo(self) -> tuple:
        return tuple(iv.lo for iv in self)

    def contains_point(self, p) -> bool:
        self._check(len(p))
        return all(iv.contains(x) for iv, x in zip(self, p))

    def contains_box(self, o: "Box") -> bool:
        self._check(len(o))
        return all(a.contains_interval(b) for a, b in zip(self, o))

    def meets(self, o: "Box") -> bool:
        self._check(len(o))
        return all(a.meets(b) for a, b in zip(self, o))

    def intersect(self, o: "Box") -> "Box | None":
        self._check(len(o))
        out = []
        for a, b in zip(self, o):
            lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
            if lo > hi:
                return None
            out.append(Interval(lo, hi))
        return Box(out)

    def hull(self, o: "Box") -> "Box":
        self._check(len(o))
        return Box(Interval(min(a.lo, b.lo), max(a.hi, b.hi)) for a, b in zip(self, o))

    def dist_point(self, p) -> Fraction:
        """Max-metric distance from p to the box."""
        self._check(len(p))
        return max(iv.dist(x) for iv, x in zip(self, p))

    def clip(self, p) -> tuple:
        self._check(len(p))
        return tuple(iv.clip(x) for iv, x in zip(self, p))

    def ball(self, center, radius) -> "Box | None":
        """Closed max-metric ball around center intersected with this box."""
        radius = exact(radius)
        return self.intersect(Box(Interval(exact(c) - radius, exact(c) + radius) for c in center))

    def expand(self, r) -> "Box":
        r = exact(r)
        return Box(Interval(iv.lo - r, iv.hi + r) for iv in self)

    def concat(self, *others: "Box") -> "Box":
        dims = list(self)
        for o in others:
            dims.extend(o)
        return Box(dims)

    def blocks(self, size: int) -> list:
        if len(self) % size:
            raise ArityError(f"cannot split {len(self)} coordinates into blocks of {size}")
        return [Box(self[i:i + size]) for i in range(0, len(self), size)]

    def _check(self, n: int):
        if n != len(self):
            raise ArityError(f"dimension mismatch: {len(self)} vs {n}")

    def __str__(self):
        return "x".join(str(iv) for iv in self)

    def __repr__(self):
        return f"Box({str(self)})"


def point_dist(p, q) -> Fraction:
    """Max-metric distance between two points."""
    if len(p) != len(q):
        raise ArityError("dimension mismatch")
    return max(abs(exact(a) - exact(b)) for a, b in zip(p, q))


def box_covered(target: Box, boxes: Sequence[Box]) -> bool:
    """Exact test: is the closed box ``target`` inside the union of ``boxes``?

    Coordinate compression: per axis the breakpoints inside the target split
    it into points and open gaps; the union is constant on each cell, so one
    representative per cell decides.
    """
    relevant = [b for b in boxes if b.meets(target)]
    if not relevant:
        return False
    axes = []
    for k, iv in enumerate(target):
        cuts = {iv.lo, iv.hi}
        for b in relevant:
            for c in (b[k].lo, b[k].hi):
                if iv.lo < c < iv.hi:
                    cuts.add(c)
        cuts = sorted(cuts)
        reps = list(cuts)
        reps.extend((a + b) / 2 for a, b in zip(cuts, cuts[1:]))
        axes.append(reps)

    def rec(k, cand):
        if not cand:
            return False
        if k == len(axes):
            return True
        for x in axes[k]:
            if not rec(k + 1, [b for b in cand if b[k].contains(x)]):
                return False
        return True

    return rec(0, relevant)


def parse_box(s: str) -> Box:
    """Parse ``[a,b]x[c,d]`` or a bare point ``a`` / ``(a,b)``."""
    s = s.strip()
    if not s:
        raise ParseError("empty box")
    if s.startswith("["):
        dims = []
        for part in s.split("x"):
            part = part.strip()
            if not (part.startswith("[") and part.endswith("]")):
                raise ParseError(f"bad interval {part!r}")
            bits = part[1:-1].split(",")
            if len(bits) != 2:
                raise ParseError(f"bad interval {part!r}")
            try:
                dims.append(Interval(parse_rational(bits[0]), parse_rational(bits[1])))
            except DomainError as exc:
                raise ParseError(str(exc)) from exc
        return Box(dims)
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    return Box.point([parse_rational(b) for b in s.split(",")])
