import itertools
from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from digitspace.coding import CauchyOracle, cauchy_to_tree, finite_map_enclosure, val_approx
from digitspace.errors import ArityError, DomainError
from digitspace.labels import Prod
from digitspace.numeric import box_covered, parse_box
from digitspace.product import cons_tree, pad_arity, pr_tree, product_space
from digitspace.space import covers_ball, pick_digit, resolve_space
from digitspace.tree import LazyTree, bisim_to_depth, prefix, random_tree

DATA = Path(__file__).parent / "data"
MEAN = resolve_space(str(DATA / "mean.space"))


def test_sd_squared_constants(sd2):
    assert len(sd2.digits) == 9
    assert set(sd2.alphabet.values()) == {1}
    assert (sd2.bound, sd2.factor, sd2.epsilon) == (2, F(1, 2), F(1, 4))
    assert sd2.base_point == (0, 0)
    assert list(sd2.alphabet)[:3] == [Prod(("-1", "-1")), Prod(("-1", "0")), Prod(("-1", "1"))]


def test_ranges_are_products(sd, sd2):
    for a, b in itertools.product(sd.alphabet, repeat=2):
        assert sd2.range(Prod((a, b))) == sd.range(a).concat(sd.range(b))


def test_single_factor_is_relabeling(sd):
    P = product_space([sd])
    assert [P.range(Prod((d,))) for d in sd.alphabet] == [sd.range(d) for d in sd.alphabet]
    assert P.epsilon == sd.epsilon


def test_empty_product():
    with pytest.raises(DomainError):
        product_space([])


def test_pr_examples(sd2):
    T = LazyTree.constant(Prod(("1", "-1")))
    assert bisim_to_depth(pr_tree(sd2, 1, T), LazyTree.constant("1"), 16)
    assert bisim_to_depth(pr_tree(sd2, 2, T), LazyTree.constant("-1"), 16)
    with pytest.raises(DomainError):
        pr_tree(sd2, 3, T)
    with pytest.raises(ArityError):
        pr_tree(sd2, 1, LazyTree.constant("1")).root


def test_cons_examples(sd2):
    T = cons_tree(sd2, [LazyTree.constant("0"), LazyTree.constant("1")])
    assert bisim_to_depth(T, LazyTree.constant(Prod(("0", "1"))), 16)
    with pytest.raises(ArityError):
        cons_tree(sd2, [LazyTree.constant("0")])
    with pytest.raises(ArityError):
        cons_tree(sd2, [LazyTree.constant("0"), LazyTree.constant("x")])


@given(st.integers(0, 10 ** 6))
def test_cons_pr_roundtrip(sd2, seed):
    T = random_tree(sd2.alphabet, seed)
    back = cons_tree(sd2, [pr_tree(sd2, 1, T), pr_tree(sd2, 2, T)])
    assert bisim_to_depth(back, T, 12)


@given(st.integers(0, 10 ** 6), st.integers(0, 8))
def test_range_product(sd, sd2, seed, n):
    T = random_tree(sd2.alphabet, seed)
    whole = finite_map_enclosure(sd2, prefix(T, n))
    parts = [finite_map_enclosure(sd, prefix(pr_tree(sd2, i, T), n)) for i in (1, 2)]
    assert whole == parts[0].concat(parts[1])


@given(st.integers(0, 10 ** 6))
def test_val_of_projection(sd, sd2, seed):
    T = random_tree(sd2.alphabet, seed)
    box = val_approx(sd2, T, 12)
    for i in (1, 2):
        assert val_approx(sd, pr_tree(sd2, i, T), 12) == sd2.box_block(i - 1, box)


def test_pad_arity_examples(sd):
    one = sd.digit("1")
    p = pad_arity(one, 2)
    assert p.arity == 2
    assert p.apply_box(parse_box("[0,1]x[-1,-1]")) == p.apply_box(parse_box("[0,1]x[1,1]"))
    assert p.apply_box(parse_box("[0,1]x[0,0]")) == one.apply_box(parse_box("[0,1]"))
    assert pad_arity(one, 1).apply_box(parse_box("[-1,1]")) == one.apply_box(parse_box("[-1,1]"))
    with pytest.raises(DomainError):
        pad_arity(MEAN.digit("m"), 1)


def test_mixed_arity_product(sd):
    P = product_space([MEAN, sd])
    assert P.common_arity == 2 and set(P.alphabet.values()) == {2}
    assert len(P.digits) == 9
    pad_sd = {d: 2 for d in sd.alphabet}
    for seed in range(20):
        A, B = random_tree(MEAN.alphabet, seed), random_tree(pad_sd, seed + 100)
        # MEAN has unary digits too; pad them by reading a padded tree
        A = _pad(A, 2)
        T = cons_tree(P, [A, B])
        assert bisim_to_depth(pr_tree(P, 1, T), A, 6)
        assert bisim_to_depth(pr_tree(P, 2, T), B, 6)
        whole = finite_map_enclosure(P, prefix(T, 4))
        left = finite_map_enclosure(P.padded_factors[0], prefix(A, 4))
        right = finite_map_enclosure(P.padded_factors[1], prefix(B, 4))
        assert whole == left.concat(right)


def _pad(T, s):
    filler = LazyTree.constant("1", s)
    kids = lambda: list(T.children) + [filler] * (s - len(T.children))
    return LazyTree(T.root, lambda: [_pad(c, s) for c in kids()])


def test_product_space_invariants(sd2):
    # covering, contraction and the pick guarantee on a grid of mesh eps/4
    assert box_covered(sd2.full_box, [sd2.range(d) for d in sd2.digits])
    for d in sd2.digits:
        assert sd2.full_box.contains_box(sd2.range(d)) and d.contraction <= sd2.factor
    mesh = sd2.epsilon / 4
    grid = [F(-1) + mesh * k for k in range(int(2 / mesh) + 1)]
    for x, y in itertools.product(grid, repeat=2):
        assert covers_ball(sd2, pick_digit(sd2, (x, y)), (x, y), sd2.epsilon)


def test_product_conversion(sd2):
    for p in [(F(1, 3), F(-5, 7)), (F(1), F(-1)), (F(0), F(3, 8))]:
        T = cauchy_to_tree(sd2, CauchyOracle.exact(p))
        assert val_approx(sd2, T, 10).contains_point(p)
