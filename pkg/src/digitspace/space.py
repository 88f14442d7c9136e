"""Digit spaces with exact affine digits.

A digit of arity ``a`` on a space of dimension ``dim`` is an affine map
``x -> A x + b`` from ``a*dim`` coordinates to ``dim`` coordinates.  Each
input coordinate may feed at most one output coordinate; with that
restriction the image of a box is again a box and right inverses can be
computed coordinatewise.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import ArityError, DomainError, ParseError, WellCoveringError
from .labels import format_label, parse_label, valid_atom
from .numeric import Box, Interval, box_covered, exact, fmt, parse_rational, point_dist


class Digit:
    """An affine contracting map of fixed arity."""

    def __init__(self, id, arity: int, matrix, offset):
        self.id = id
        self.arity = int(arity)
        if self.arity < 1:
            raise ArityError("digit arity must be positive")
        self.matrix = tuple(tuple(exact(a) for a in row) for row in matrix)
        self.offset = tuple(exact(b) for b in offset)
        self.dim = len(self.offset)
        if len(self.matrix) != self.dim or self.dim == 0:
            raise ArityError(f"digit {id}: matrix needs {self.dim} rows")
        ncols = self.arity * self.dim
        if any(len(row) != ncols for row in self.matrix):
            raise ArityError(f"digit {id}: matrix rows need {ncols} entries")
        # column j feeds at most one output coordinate
        self.support = []
        owner = {}
        for i, row in enumerate(self.matrix):
            cols = tuple(j for j, a in enumerate(row) if a != 0)
            for j in cols:
                if j in owner:
                    raise DomainError(
                        f"digit {id}: input coordinate {j} feeds two outputs; "
                        "only separable affine digits are supported")
                owner[j] = i
            self.support.append(cols)
        self.support = tuple(self.support)
        self.contraction = max(sum(abs(a) for a in row) for row in self.matrix)

    def apply_point(self, x: Sequence) -> tuple:
        if len(x) != self.arity * self.dim:
            raise ArityError(f"digit {self.id} expects {self.arity * self.dim} coordinates, got {len(x)}")
        return tuple(
            sum((row[j] * x[j] for j in cols), Fraction(0)) + b
            for row, cols, b in zip(self.matrix, self.support, self.offset))

    def apply_box(self, box: Box) -> Box:
        if len(box) != self.arity * self.dim:
            raise ArityError(f"digit {self.id} expects {self.arity * self.dim} coordinates, got {len(box)}")
        out = []
        for row, cols, b in zip(self.matrix, self.support, self.offset):
            lo = hi = b
            for j in cols:
                a = row[j]
                if a > 0:
                    lo += a * box[j].lo
                    hi += a * box[j].hi
                else:
                    lo += a * box[j].hi
                    hi += a * box[j].lo
            out.append(Interval(lo, hi))
        return Box(out)

    def padded(self, s: int) -> "Digit":
        """The same map with ``s - arity`` ignored trailing arguments."""
        if s < self.arity:
            raise DomainError(f"cannot pad arity {self.arity} down to {s}")
        extra = (s - self.arity) * self.dim
        return Digit(self.id, s, [row + (Fraction(0),) * extra for row in self.matrix], self.offset)

    def __repr__(self):
        return f"Digit({format_label(self.id)}, arity={self.arity})"


class DigitSpace:
    """A finite digit alphabet acting on the box ``full_box``.

    ``bound`` (M), ``factor`` (q) and ``base_point`` (z) default to the
    diameter, the largest digit contraction and the box midpoint.  If
    ``epsilon`` is omitted the largest power of two that passes the exact
    well-covering check is used.
    """

    def __init__(self, digits, full_box, bound=None, factor=None, epsilon=None,
                 base_point=None, validate=True, name=None):
        self.digits = tuple(digits)
        if not self.digits:
            raise DomainError("a digit space needs at least one digit")
        self.full_box = full_box if isinstance(full_box, Box) else Box(full_box)
        self.dim = len(self.full_box)
        self.name = name
        self._by_id = {}
        for d in self.digits:
            if d.dim != self.dim:
                raise ArityError(f"digit {d.id} acts on dimension {d.dim}, space has {self.dim}")
            if d.id in self._by_id:
                raise DomainError(f"duplicate digit id {d.id}")
            self._by_id[d.id] = d
        contraction = max(d.contraction for d in self.digits)
        self.factor = contraction if factor is None else exact(factor)
        if self.factor < contraction:
            raise DomainError(f"declared factor {fmt(self.factor)} below digit contraction {fmt(contraction)}")
        if not 0 < self.factor < 1:
            raise DomainError("digits must be contracting (0 < q < 1)")
        self.bound = self.full_box.width if bound is None else exact(bound)
        if self.full_box.width > self.bound:
            raise DomainError("diameter of the space exceeds the bound M")
        self.base_point = self.full_box.mid if base_point is None else tuple(exact(c) for c in base_point)
        if not self.full_box.contains_point(self.base_point):
            raise DomainError("base point outside the space")
        self._ranges = {d.id: d.apply_box(self.full_box_power(d.arity)) for d in self.digits}
        if epsilon is None:
            epsilon = self._find_epsilon()
        self.epsilon = exact(epsilon)
        if self.epsilon <= 0:
            raise DomainError("well-covering number must be positive")
        if validate:
            self.validate()

    # -- basic accessors ----------------------------------------------------

    @property
    def alphabet(self) -> dict:
        """Digit id -> arity, in declaration order."""
        return {d.id: d.arity for d in self.digits}

    @property
    def max_arity(self) -> int:
        return max(d.arity for d in self.digits)

    def digit(self, d) -> Digit:
        if isinstance(d, Digit):
            return d
        try:
            return self._by_id[d]
        except (KeyError, TypeError):
            raise ArityError(f"unknown digit {format_label(d)}") from None

    def range(self, d) -> Box:
        return self._ranges[self.digit(d).id]

    def full_box_power(self, k: int) -> Box:
        return Box(tuple(self.full_box) * k)

    def index(self, d) -> int:
        return self.digits.index(self.digit(d))

    # -- checks -------------------------------------------------------------

    def good_region(self, d, eps) -> Box | None:
        """Points x whose closed eps-ball (clipped to the space) fits in range(d)."""
        r = self.range(d)
        out = []
        for X, R in zip(self.full_box, r):
            lo = X.lo if R.lo <= X.lo else R.lo + eps
            hi = X.hi if R.hi >= X.hi else R.hi - eps
            if lo > hi:
                return None
            out.append(Interval(lo, hi))
        return Box(out)

    def is_well_covering(self, eps) -> bool:
        eps = exact(eps)
        regions = [g for g in (self.good_region(d, eps) for d in self.digits) if g is not None]
        return box_covered(self.full_box, regions)

    def _find_epsilon(self):
        eps = self.bound
        for _ in range(64):
            if self.is_well_covering(eps):
                return eps
            eps /= 2
        raise WellCoveringError("no well-covering number found; pass epsilon explicitly")

    def validate(self):
        for d in self.digits:
            if not self.full_box.contains_box(self._ranges[d.id]):
                raise DomainError(f"range of digit {format_label(d.id)} leaves the space")
        if not box_covered(self.full_box, list(self._ranges.values())):
            raise DomainError("digit ranges do not cover the space")
        if not self.is_well_covering(self.epsilon):
            raise WellCoveringError(f"{fmt(self.epsilon)} is not a well-covering number")

    # -- right inverses -----------------------------------------------------

    def inverse_lipschitz(self, d) -> Fraction:
        """Lipschitz constant (max metric) of the right inverse used below."""
        d = self.digit(d)
        widths = [iv.width for iv in self.full_box_power(d.arity)]
        best = Fraction(0)
        for row, cols in zip(d.matrix, d.support):
            span = sum((abs(row[j]) * widths[j] for j in cols), Fraction(0))
            if span:
                best = max(best, max(widths[j] for j in cols) / span)
        return best

    def right_inverse_point(self, d, y) -> tuple:
        d = self.digit(d)
        y = tuple(exact(c) for c in y)
        if not self.range(d).contains_point(y):
            raise DomainError(f"point outside range of digit {format_label(d.id)}")
        dom = self.full_box_power(d.arity)
        base = self.base_point * d.arity
        x = list(base)
        for row, cols, b, yi in zip(d.matrix, d.support, d.offset, y):
            if not cols:
                continue
            lo = b + sum(row[j] * (dom[j].lo if row[j] > 0 else dom[j].hi) for j in cols)
            span = sum(abs(row[j]) * dom[j].width for j in cols)
            t = (yi - lo) / span if span else Fraction(0)
            for j in cols:
                x[j] = dom[j].lo + t * dom[j].width if row[j] > 0 else dom[j].hi - t * dom[j].width
        return tuple(x)

    def __repr__(self):
        ids = ", ".join(format_label(d.id) for d in self.digits)
        return f"DigitSpace(dim={self.dim}, digits=[{ids}])"


# -- functional API ---------------------------------------------------------

def apply_digit_box(space: DigitSpace, d, args: Box) -> Box:
    d = space.digit(d)
    if len(args) != d.arity * space.dim:
        raise ArityError(f"digit {format_label(d.id)} expects {d.arity * space.dim} coordinates")
    return d.apply_box(args)


def covers_ball(space: DigitSpace, d, center, radius) -> bool:
    radius = exact(radius)
    if radius <= 0:
        raise DomainError("ball radius must be positive")
    ball = space.full_box.ball(center, radius)
    if ball is None:
        return True
    return space.range(d).contains_box(ball)


def pick_digit(space: DigitSpace, center) -> Digit:
    center = tuple(exact(c) for c in center)
    for d in space.digits:
        if covers_ball(space, d, center, space.epsilon):
            return d
    raise WellCoveringError(f"no digit range contains the {fmt(space.epsilon)}-ball around "
                            + ",".join(fmt(c) for c in center))


def contraction_depth(space: DigitSpace, n: int) -> int:
    """Least i with q**i * M < 2**-n."""
    target = Fraction(1, 2 ** n)
    i, val = 0, space.bound
    while val >= target:
        i += 1
        val *= space.factor
    return i


def right_inverse_point(space: DigitSpace, d, y) -> tuple:
    return space.right_inverse_point(d, y)


def builtin_signed_digit() -> DigitSpace:
    """The interval [-1,1] with av_d(x) = (x+d)/2 for d in -1, 0, 1."""
    half = Fraction(1, 2)
    digits = [Digit(str(d), 1, [[half]], [Fraction(d, 2)]) for d in (-1, 0, 1)]
    return DigitSpace(digits, Box([Interval(-1, 1)]), bound=2, factor=half,
                      epsilon=Fraction(1, 4), base_point=(Fraction(0),), name="sd")


BUILTIN = {"sd": builtin_signed_digit}


# -- text format ------------------------------------------------------------

def dump_space(space: DigitSpace) -> str:
    lines = [f"dim {space.dim}",
             "box " + " ".join(f"{fmt(iv.lo)} {fmt(iv.hi)}" for iv in space.full_box),
             f"bound {fmt(space.bound)}",
             f"factor {fmt(space.factor)}",
             f"epsilon {fmt(space.epsilon)}",
             "base " + " ".join(fmt(c) for c in space.base_point)]
    for d in space.digits:
        rows = " ; ".join(" ".join(fmt(a) for a in row) for row in d.matrix)
        lines.append(f"digit {format_label(d.id)} {d.arity} matrix {rows} offset "
                     + " ".join(fmt(b) for b in d.offset))
    return "\n".join(lines) + "\n"


def load_space(text: str) -> DigitSpace:
    fields = {}
    digits = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        try:
            if key == "digit":
                digits.append(_parse_digit_line(rest))
            elif key in ("dim", "box", "bound", "factor", "epsilon", "base"):
                if key in fields:
                    raise ParseError(f"duplicate {key}")
                fields[key] = rest.split()
            else:
                raise ParseError(f"unknown key {key!r}")
        except (ParseError, ValueError, IndexError) as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    for key in ("dim", "box"):
        if key not in fields:
            raise ParseError(f"space file lacks {key!r}")
    if not digits:
        raise ParseError("space file declares no digits")
    dim = int(fields["dim"][0])
    nums = [parse_rational(t) for t in fields["box"]]
    if len(nums) != 2 * dim:
        raise ParseError("box needs lo/hi for every coordinate")
    box = Box(Interval(nums[2 * k], nums[2 * k + 1]) for k in range(dim))

    def one(key):
        return parse_rational(fields[key][0]) if key in fields else None
    base = tuple(parse_rational(t) for t in fields["base"]) if "base" in fields else None
    return DigitSpace(digits, box, bound=one("bound"), factor=one("factor"),
                      epsilon=one("epsilon"), base_point=base)


def _parse_digit_line(rest: str) -> Digit:
    head, sep, tail = rest.partition(" matrix ")
    if not sep:
        raise ParseError("digit line needs 'matrix'")
    id_txt, arity_txt = head.split()
    if not valid_atom(id_txt):
        raise ParseError(f"bad digit id {id_txt!r}")
    mat_txt, sep, off_txt = tail.partition(" offset ")
    if not sep:
        raise ParseError("digit line needs 'offset'")
    rows = [[parse_rational(t) for t in r.split()] for r in mat_txt.split(";")]
    offset = [parse_rational(t) for t in off_txt.split()]
    return Digit(parse_label(id_txt), int(arity_txt), rows, offset)


def resolve_space(name_or_path: str) -> DigitSpace:
    """Built-in name or path to a space file."""
    if name_or_path in BUILTIN:
        return BUILTIN[name_or_path]()
    try:
        with open(name_or_path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read space {name_or_path!r}: {exc}") from exc
    return load_space(text)


__all__ = ["Digit", "DigitSpace", "apply_digit_box", "covers_ball", "pick_digit",
           "contraction_depth", "right_inverse_point", "builtin_signed_digit",
           "dump_space", "load_space", "resolve_space", "point_dist"]
