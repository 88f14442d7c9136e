import random
from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from conftest import sd_value, sd_words
from digitspace.coding import val_approx
from digitspace.errors import ArityError, ParseError, ProductivityError, UnsupportedError
from digitspace.functree import (FunTree, _constant_tree, apply, compose, diag_tree, eta_tree,
                                 id_tree, lift_K, pair_tree, parse_funtree, permute, prefix_write, proj_tree,
                                 relabel_tree, sd_neg_tree, show_funtree, union_fun)
from digitspace.hyper import compact_approx, hausdorff_distance
from digitspace.labels import Hyper, Prod
from digitspace.numeric import Box, Interval
from digitspace.product import cons_tree
from digitspace.space import resolve_space
from digitspace.tree import LazyTree, bisim_to_depth, prefix, random_tree

DATA = Path(__file__).parent / "data"
SD = {"-1": 1, "0": 1, "1": 1}
MEAN = resolve_space(str(DATA / "mean.space"))
NEG = sd_neg_tree()
ID = id_tree(SD)


def digits(T, n):
    return [lv[0] for lv in prefix(T, n).levels()]


def stream(word):
    return LazyTree.stream(word, LazyTree.constant("0"))


def neg_box(b):
    return Box([Interval(-b[0].hi, -b[0].lo)])


# -- interpreter ----------------------------------------------------------------

def test_identity_examples():
    for d in SD:
        assert digits(apply(ID, [LazyTree.constant(d)]), 6) == [d] * 7


def test_neg_examples():
    assert digits(apply(NEG, [LazyTree.constant("1")]), 5) == ["-1"] * 6
    assert digits(apply(NEG, [LazyTree.constant("0")]), 5) == ["0"] * 6
    assert digits(apply(NEG, [stream(["1", "-1"])]), 3) == ["-1", "1", "0", "0"]


@given(st.integers(0, 10 ** 6), st.integers(0, 12))
def test_neg_value(sd, seed, n):
    T = random_tree(SD, seed)
    assert val_approx(sd, apply(NEG, [T]), n) == neg_box(val_approx(sd, T, n))


def test_write_then_identity(sd):
    # Write(1, [id]) is x -> (x + 1)/2
    f = prefix_write("1", ID)
    for word in (["0"], ["1", "1"], ["-1", "0", "1"]):
        v = sd_value(word)
        assert val_approx(sd, apply(f, [stream(word)]), 12).contains_point(((v + 1) / 2,))


def test_compose_examples(sd):
    # Write(1, [Write(1, id)]) o neg: x -> (-x + 3)/4; neg o neg = id
    f = compose(prefix_write("1", prefix_write("1", ID)), [NEG])
    for word in (["1"], ["0", "-1"], ["1", "1", "1"]):
        v = sd_value(word)
        assert val_approx(sd, apply(f, [stream(word)]), 12).contains_point(((-v + 3) / 4,))
    nn = compose(NEG, [NEG])
    for seed in range(10):
        T = random_tree(SD, seed)
        assert bisim_to_depth(apply(nn, [T]), T, 12)


def test_compose_write_outer(sd):
    # outer writes before reading: (x + 1)/2 then identity on the rest
    f = compose(prefix_write("1", ID), [prefix_write("-1", ID)])
    v = F(1, 2)
    assert val_approx(sd, apply(f, [stream(["1"])]), 10).contains_point(((((v - 1) / 2) + 1) / 2,))


def test_fuel_exhaustion():
    spin = parse_funtree((DATA / "spin.fun").read_text(), SD)
    with pytest.raises(ProductivityError):
        apply(spin, [LazyTree.constant("1")], fuel=10)
    with pytest.raises(ProductivityError):
        apply(spin, [LazyTree.constant("1")]).root


def test_fuel_from_environment(monkeypatch):
    monkeypatch.setenv("DIGITSPACE_FUEL", "3")
    slow = compose(NEG, [compose(NEG, [compose(NEG, [NEG])])])
    f = parse_funtree("(letrec ((s (R 1 (_ -> (R 1 (_ -> (R 1 (_ -> (R 1 (_ -> (W 0 s))))))))))) s)", SD)
    with pytest.raises(ProductivityError):
        apply(f, [LazyTree.constant("1")]).root
    assert apply(slow, [LazyTree.constant("1")]).root == "1"


def test_arity_errors():
    with pytest.raises(ArityError):
        apply(NEG, [LazyTree.constant("1"), LazyTree.constant("1")])
    with pytest.raises(ArityError):
        compose(NEG, [NEG, NEG])
    with pytest.raises(ArityError):
        apply(NEG, [LazyTree.constant("7")]).root
    with pytest.raises(ArityError):
        FunTree.write("1", [ID, ID], arity=1).children
    with pytest.raises(ArityError):
        FunTree.read(2, {}, 1)
    with pytest.raises(ArityError):
        proj_tree(SD, 2, 3)


# -- laws -------------------------------------------------------------------------

def _random_unary(rng, depth=3):
    """Random unary function tree plus its exact value semantics."""
    if depth == 0 or rng.random() < 0.3:
        return rng.choice([(ID, lambda x: x), (NEG, lambda x: -x)])
    op = rng.randrange(3)
    f, sf = _random_unary(rng, depth - 1)
    if op == 0:
        d = rng.choice(["-1", "0", "1"])
        return prefix_write(d, f), (lambda x, sf=sf, d=int(d): (sf(x) + d) / 2)
    g, sg = _random_unary(rng, depth - 1)
    if op == 1:
        return compose(f, [g]), (lambda x, sf=sf, sg=sg: sf(sg(x)))
    return compose(g, [f]), (lambda x, sf=sf, sg=sg: sg(sf(x)))


@given(st.integers(0, 10 ** 6), sd_words(1, 16))
def test_enclosure_soundness(sd, seed, word):
    f, sem = _random_unary(random.Random(seed))
    x = sd_value(word)
    out = apply(f, [stream(word)])
    for n in (0, 4, 16):
        assert val_approx(sd, out, n).contains_point((sem(x),))


@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_associativity(seed, tseed):
    rng = random.Random(seed)
    f, g, h = (_random_unary(rng)[0] for _ in range(3))
    T = random_tree(SD, tseed)
    left = compose(compose(f, [g]), [h])
    right = compose(f, [compose(g, [h])])
    assert bisim_to_depth(apply(left, [T]), apply(right, [T]), 10)


@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_identity_laws(seed, tseed):
    f = _random_unary(random.Random(seed))[0]
    T = random_tree(SD, tseed)
    ref = apply(f, [T])
    assert bisim_to_depth(apply(compose(f, [ID]), [T]), ref, 10)
    assert bisim_to_depth(apply(compose(ID, [f]), [T]), ref, 10)


@given(st.integers(0, 10 ** 6))
def test_compose_multiary(seed):
    A, B = random_tree(SD, seed), random_tree(SD, seed + 1)
    f = compose(proj_tree(SD, 2, 1), [NEG, ID])
    assert f.arity == 2
    assert bisim_to_depth(apply(f, [A, B]), apply(NEG, [A]), 10)
    g = compose(proj_tree(SD, 2, 2), [NEG, NEG])
    assert bisim_to_depth(apply(g, [A, B]), apply(NEG, [B]), 10)


# -- constructors -----------------------------------------------------------------

@pytest.mark.parametrize("n,i", [(1, 1), (2, 1), (2, 2), (3, 2), (4, 4)])
def test_projection_binary_alphabet(n, i):
    ins = [random_tree(MEAN.alphabet, 40 + k) for k in range(n)]
    assert bisim_to_depth(apply(proj_tree(MEAN.alphabet, n, i), ins), ins[i - 1], 5)


def test_relabel_binary_alphabet():
    swap = {"m": "m", "1": "-1", "-1": "1"}
    f = relabel_tree(MEAN.alphabet, swap)
    T = random_tree(MEAN.alphabet, 3)
    back = apply(f, [apply(f, [T])])
    assert bisim_to_depth(back, T, 5)


@given(st.integers(0, 10 ** 6))
def test_diag(sd2, seed):
    T = random_tree(SD, seed)
    assert bisim_to_depth(apply(diag_tree(SD, 2), [T]), cons_tree(sd2, [T, T]), 10)


def test_diag_pads_mixed_arity():
    T = random_tree(MEAN.alphabet, 5)
    out = apply(diag_tree(MEAN.alphabet, 2), [T])
    assert out.root == Prod((T.root, T.root))
    # every node has the padded arity 2, with <d,d> labels throughout
    stack = [prefix(out, 3)]
    while stack:
        S = stack.pop()
        a, b = S.label
        assert a == b
        assert S.is_leaf or len(S.children) == 2
        stack.extend(S.children)


@given(st.integers(0, 10 ** 6))
def test_pair_matches_cons(sd2, seed):
    A, B = random_tree(SD, seed), random_tree(SD, seed + 7)
    out = apply(pair_tree(NEG, ID), [A, B])
    assert bisim_to_depth(out, cons_tree(sd2, [apply(NEG, [A]), B]), 10)


def test_pair_with_write_first(sd2):
    f = prefix_write("1", NEG)
    A, B = random_tree(SD, 1), random_tree(SD, 2)
    out = apply(pair_tree(f, NEG), [A, B])
    assert bisim_to_depth(out, cons_tree(sd2, [apply(f, [A]), apply(NEG, [B])]), 10)


@given(st.integers(0, 10 ** 6), st.integers(0, 8))
def test_eta_singleton(sd, hsd, seed, n):
    T = random_tree(SD, seed)
    A = compact_approx(hsd, apply(eta_tree(SD), [T]), n)
    assert list(A) == [val_approx(sd, T, n)]


def test_eta_unsupported():
    with pytest.raises(UnsupportedError):
        eta_tree(MEAN.alphabet)


@given(st.integers(0, 10 ** 6), st.integers(0, 8))
def test_union_of_singletons(sd, hsd, seed, n):
    A, B = random_tree(SD, seed), random_tree(SD, seed + 3)
    eta = eta_tree(SD)
    out = apply(union_fun(hsd, eta, eta), [A, B])
    assert set(compact_approx(hsd, out, n)) == {val_approx(sd, A, n), val_approx(sd, B, n)}


@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6), st.integers(0, 5))
def test_union_fun_compact_inputs(hsd, s1, s2, n):
    # identity on compacts, united
    kid = id_tree(hsd.alphabet)
    A, B = random_tree(hsd.alphabet, s1), random_tree(hsd.alphabet, s2)
    out = apply(union_fun(hsd, kid, kid), [A, B])
    assert compact_approx(hsd, out, n) == compact_approx(hsd, A, n).union(compact_approx(hsd, B, n))


@given(st.integers(0, 10 ** 6), st.integers(0, 5))
def test_lift_neg(hsd, seed, n):
    K = random_tree(hsd.alphabet, seed)
    out = apply(lift_K(NEG, hsd), [K])
    assert set(compact_approx(hsd, out, n)) == {neg_box(b) for b in compact_approx(hsd, K, n)}


def test_lift_singletons(hsd):
    out = apply(lift_K(prefix_write("1", NEG), hsd), [LazyTree.constant(Hyper(("-1", "1")), 2)])
    assert out.root == Hyper(("1",))
    for n in range(6):
        A = compact_approx(hsd, out, n)
        assert hausdorff_distance(A, [Box([Interval(F(0), F(1))])]) <= F(2, 2 ** n)


def test_lift_unsupported(hsd):
    with pytest.raises(UnsupportedError):
        lift_K(proj_tree(SD, 2, 1), hsd)
    # writes a binary digit: x -> m(x, 0)
    two = FunTree.read(0, lambda: {d: FunTree.write("1", [ID, _constant_tree("0", 1)]) for d in SD}, 1)
    with pytest.raises(UnsupportedError):
        apply(lift_K(two, hsd), [LazyTree.constant(Hyper(("0",)), 1)]).root


def test_permute_swaps_inputs():
    A, B = random_tree(SD, 1), random_tree(SD, 2)
    p = proj_tree(SD, 2, 1)
    assert bisim_to_depth(apply(permute(p, [1, 0]), [A, B]), B, 8)


# -- text format ------------------------------------------------------------------

def test_parse_neg_and_id():
    neg = parse_funtree((DATA / "neg.fun").read_text(), SD)
    idf = parse_funtree((DATA / "id.fun").read_text(), SD)
    for seed in range(10):
        T = random_tree(SD, seed)
        assert bisim_to_depth(apply(neg, [T]), apply(NEG, [T]), 12)
        assert bisim_to_depth(apply(idf, [T]), T, 12)


def test_parse_routed_swap(sd2):
    text = "(letrec ((sw 2 (R 1 (_ -> (R 2 (_ -> (W <0,0> (@ (2 1) sw)))))))) sw)"
    f = parse_funtree(text, SD)
    assert f.arity == 2
    out = apply(f, [LazyTree.constant("1"), LazyTree.constant("-1")])
    assert digits(out, 4) == [Prod(("0", "0"))] * 5


def test_parse_binary_write():
    # reads a binary m node and writes it back with both subtrees swapped
    text = "(letrec ((s (R 1 (m -> (W m (@ (2) s) (@ (1) s))) (_ -> (W _ s))))) s)"
    f = parse_funtree(text, MEAN.alphabet)
    T = random_tree(MEAN.alphabet, 9)
    assert bisim_to_depth(apply(f, [apply(f, [T])]), T, 5)


@pytest.mark.parametrize("text", [
    "(R 1 (7 -> x))", "(W _)", "(letrec ((a a)) a)", "(R 1 (1 x))", "(Q 1)",
    "(letrec ((a (W 0 (@ (1) a) a))) a)", "(letrec ((a (W m a a))) a)",
])
def test_parse_errors(text):
    with pytest.raises((ParseError, ArityError)):
        f = parse_funtree(text, dict(SD, m=2))
        apply(f, [LazyTree.constant("0")]).children


def test_show_funtree():
    assert show_funtree(NEG, 1).startswith("(R 1 (-1 -> (W 1 ...))")
