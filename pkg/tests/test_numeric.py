import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from digitspace.errors import ArityError, DomainError, ParseError
from digitspace.numeric import (Box, Dyadic, Interval, box_covered, ceil_log2, exact, fmt,
                                is_dyadic, parse_box, parse_rational, point_dist)


def test_dyadic_canonical_form():
    d = Dyadic(12, -4)
    assert (d.mantissa, d.exponent) == (3, -2)
    z = Dyadic(0, 7)
    assert (z.mantissa, z.exponent) == (0, 0)
    assert Dyadic(-8).exponent == 3


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(-40, 40))
def test_dyadic_mantissa_odd_or_zero(m, e):
    d = Dyadic(m, e)
    assert d.mantissa == 0 and d.exponent == 0 or d.mantissa % 2 == 1
    assert d.to_fraction() == F(m) * F(2) ** e


@given(st.integers(-2 ** 20, 2 ** 20), st.integers(0, 20))
def test_dyadic_fraction_roundtrip(m, k):
    x = F(m, 2 ** k)
    assert Dyadic.from_fraction(x).to_fraction() == x


def test_non_dyadic_rejected():
    with pytest.raises(DomainError):
        Dyadic.from_fraction(F(1, 3))


@given(st.fractions(min_value=-4, max_value=4), st.integers(0, 16))
def test_round_is_nearest(x, bits):
    r = Dyadic.round(x, bits).to_fraction()
    assert abs(r - x) <= F(1, 2 ** (bits + 1))
    assert (r * 2 ** bits).denominator == 1


def test_round_ties_up():
    assert Dyadic.round(F(1, 4), 1).to_fraction() == F(1, 2)
    assert Dyadic.round(F(-1, 4), 1).to_fraction() == 0


@given(st.integers(-999, 999), st.integers(-8, 8), st.integers(-999, 999), st.integers(-8, 8))
def test_dyadic_arithmetic_matches_fractions(a, e, b, f):
    x, y = Dyadic(a, e), Dyadic(b, f)
    assert (x + y).to_fraction() == x.to_fraction() + y.to_fraction()
    assert (x - y).to_fraction() == x.to_fraction() - y.to_fraction()
    assert (x * y).to_fraction() == x.to_fraction() * y.to_fraction()
    assert x.shift(3).to_fraction() == x.to_fraction() * 8


def test_dyadic_str():
    assert str(Dyadic(3, -2)) == "3*2^-2"
    assert str(Dyadic(5)) == "5"
    assert parse_rational("3*2^-2") == F(3, 4)


@pytest.mark.parametrize("text,value", [("1/3", F(1, 3)), ("-2", F(-2)), ("0.25", F(1, 4)),
                                        ("-5*2^-3", F(-5, 8)), (" 7/14 ", F(1, 2))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["abc", "1/0", "", "1.2.3"])
def test_parse_rational_rejects(text):
    with pytest.raises(ParseError):
        parse_rational(text)


def test_exact_refuses_floats():
    with pytest.raises(TypeError):
        exact(0.5)


def test_fmt_and_is_dyadic():
    assert fmt(F(6, 4)) == "3/2"
    assert fmt(4) == "4"
    assert is_dyadic(F(3, 8)) and not is_dyadic(F(1, 6))


@given(st.fractions(min_value=F(1, 10 ** 6), max_value=10 ** 6))
def test_ceil_log2(x):
    k = ceil_log2(x)
    assert F(2) ** k >= x > F(2) ** (k - 1)


def test_interval_rejects_empty():
    with pytest.raises(DomainError):
        Interval(F(1), F(0))


def test_interval_ops():
    iv = Interval(F(-1), F(1, 2))
    assert iv.width == F(3, 2) and iv.mid == F(-1, 4)
    assert iv.dist(F(1)) == F(1, 2) and iv.dist(0) == 0
    assert iv.clip(F(3)) == F(1, 2)
    assert iv.meets(Interval(F(1, 2), F(2))) and not iv.meets(Interval(F(3, 4), F(2)))


def test_box_basics():
    b = parse_box("[0,1]x[-1/2,1/2]")
    assert b.dim == 2 and b.width == 1
    assert b.contains_point((F(1), F(0)))
    assert b.dist_point((F(2), F(0))) == 1
    assert b.intersect(parse_box("[2,3]x[0,1]")) is None
    assert b.hull(parse_box("(2,2)")) == parse_box("[0,2]x[-1/2,2]")
    assert parse_box("[0,1]x[0,1]").blocks(1) == [parse_box("[0,1]"), parse_box("[0,1]")]
    with pytest.raises(ArityError):
        b.contains_point((F(0),))


def test_box_ball_is_clipped():
    full = parse_box("[-1,1]")
    assert full.ball((F(1),), F(1, 4)) == parse_box("[3/4,1]")


@pytest.mark.parametrize("text", ["", "[1]", "[2,1]", "[0,1]x", "[a,b]"])
def test_parse_box_rejects(text):
    with pytest.raises(ParseError):
        parse_box(text)


def test_point_dist_max_metric():
    assert point_dist((F(0), F(0)), (F(1, 2), F(-3, 4))) == F(3, 4)


# box_covered against a dense grid oracle (exact in 1-D for grid-aligned boxes)

def _grid_covered(target, boxes, mesh):
    axes = []
    for iv in target:
        n = int((iv.hi - iv.lo) / mesh)
        axes.append([iv.lo + mesh * k / 2 for k in range(2 * n + 1)])
    return all(any(b.contains_point(p) for b in boxes) for p in itertools.product(*axes))


grid_boxes = st.lists(
    st.tuples(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8), st.integers(0, 8)),
    min_size=1, max_size=6)


@given(grid_boxes, st.tuples(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8), st.integers(0, 8)))
def test_box_covered_matches_grid(raw, t):
    def mk(a, b, c, d):
        return Box([Interval(F(min(a, b), 8), F(max(a, b), 8)), Interval(F(min(c, d), 8), F(max(c, d), 8))])

    boxes = [mk(*r) for r in raw]
    target = mk(*t)
    # all breakpoints lie on the 1/8 grid, so half-mesh sampling decides exactly
    assert box_covered(target, boxes) == _grid_covered(target, boxes, F(1, 8))


def test_box_covered_gap_between_closed_boxes():
    a, b = parse_box("[0,1/2]"), parse_box("[1/2,1]")
    assert box_covered(parse_box("[0,1]"), [a, b])
    assert not box_covered(parse_box("[0,1]"), [a, parse_box("[5/8,1]")])
