"""The hyperspace of nonempty compact sets.

A hyper digit [d1,...,dr] (pairwise distinct unary base digits) maps
(K1,...,Kr) to d1[K1] u ... u dr[Kr].  Trees over hyper digits code compact
sets; their finite approximations are finite families of boxes whose union
is close to the set in the Hausdorff metric.

Sets of compact sets (the second hyperspace) are handled only up to the
union they determine.  A node of such a tree carries a label
[h1,...,hn] whose components are hyper digits (or lifted digits K(d),
which stand for [d]); it has one subtree per (component, digit) pair, in
order, and that subtree codes the corresponding projection.  The union of
the coded family depends on nothing else.
"""
from __future__ import annotations

import bisect
import itertools
from fractions import Fraction

from .coding import finite_map_enclosure
from .errors import ArityError, DomainError, FormError, UnsupportedError
from .labels import Hyper, Lifted, format_label
from .numeric import Box, box_covered, exact
from .space import DigitSpace, covers_ball, pick_digit
from .tree import DEFAULT_BUDGET, FinTree, LazyTree


class HyperSpace:
    """K(X) over a base space whose digits are all unary."""

    def __init__(self, base: DigitSpace):
        bad = [d.id for d in base.digits if d.arity != 1]
        if bad:
            raise UnsupportedError("hyperspaces need unary base digits; "
                                   f"{format_label(bad[0])} has arity {base.digit(bad[0]).arity}")
        self.base = base
        self._order = {d.id: i for i, d in enumerate(base.digits)}
        ids = [d.id for d in base.digits]
        self.hyper_digits = tuple(Hyper(c) for r in range(1, len(ids) + 1)
                                  for c in itertools.combinations(ids, r))
        self.alphabet = {h: len(h) for h in self.hyper_digits}
        self.factor = base.factor
        self.bound = base.bound
        self.epsilon = base.epsilon

    @property
    def full_box(self) -> Box:
        return self.base.full_box

    def canonical(self, ids) -> Hyper:
        ids = list(ids)
        for d in ids:
            if d not in self._order:
                raise FormError(f"unknown base digit {format_label(d)}")
        if len(set(ids)) != len(ids):
            raise FormError("hyper digit with repeated components")
        if not ids:
            raise FormError("empty hyper digit")
        return Hyper(sorted(ids, key=self._order.__getitem__))

    def components(self, label) -> tuple:
        if not isinstance(label, Hyper):
            raise FormError(f"{format_label(label)} is not a hyper digit")
        for d in label:
            if d not in self._order:
                raise FormError(f"unknown base digit {format_label(d)} in {format_label(label)}")
        return tuple(label)

    def order_key(self, d) -> int:
        return self._order[d]

    def normalize(self, T: LazyTree) -> LazyTree:
        """Same tree with every label in canonical order (children permuted)."""
        comps = self.components(T.root)
        perm = sorted(range(len(comps)), key=lambda k: self._order[comps[k]])

        def kids():
            ks = T.children
            if len(ks) != len(comps):
                raise ArityError(f"hyper node {format_label(T.root)} needs {len(comps)} children")
            return [self.normalize(ks[k]) for k in perm]

        return LazyTree(Hyper(comps[k] for k in perm), kids)


def hyper_space(base: DigitSpace) -> HyperSpace:
    return HyperSpace(base)


# -- finite approximations --------------------------------------------------

def _box_key(b: Box):
    return tuple((iv.lo, iv.hi) for iv in b)


class CompactApprox:
    """A nonempty finite family of boxes (duplicates removed, overlaps kept)."""

    __slots__ = ("boxes", "depth")

    def __init__(self, boxes, depth: int | None = None):
        uniq = {}
        for b in boxes:
            b = b if isinstance(b, Box) else Box(b)
            uniq.setdefault(b, None)
        if not uniq:
            raise DomainError("a compact approximation needs at least one box")
        self.boxes = tuple(sorted(uniq, key=_box_key))
        self.depth = depth

    @classmethod
    def points(cls, pts, depth=None) -> "CompactApprox":
        return cls([Box.point(p if isinstance(p, (tuple, list)) else (p,)) for p in pts], depth)

    def __len__(self):
        return len(self.boxes)

    def __iter__(self):
        return iter(self.boxes)

    def __eq__(self, o):
        return isinstance(o, CompactApprox) and self.boxes == o.boxes

    def __hash__(self):
        return hash(self.boxes)

    @property
    def width(self) -> Fraction:
        return max(b.width for b in self.boxes)

    def union(self, o: "CompactApprox") -> "CompactApprox":
        return CompactApprox(self.boxes + o.boxes, self.depth)

    def __str__(self):
        return "\n".join(str(b) for b in self.boxes)


def _as_boxes(A) -> list:
    if isinstance(A, CompactApprox):
        return list(A.boxes)
    if isinstance(A, Box):
        return [A]
    return [b if isinstance(b, Box) else Box(b) for b in A]


def _directed_1d(A: list, B: list) -> Fraction:
    """sup over x in union A of dist(x, union B), one dimension."""
    ivs = sorted((b[0].lo, b[0].hi) for b in B)
    merged = []
    for lo, hi in ivs:
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    los = [m[0] for m in merged]

    def dist(x):
        i = bisect.bisect_right(los, x) - 1
        best = None
        if i >= 0:
            best = max(Fraction(0), x - merged[i][1])
            if merged[i][0] <= x <= merged[i][1]:
                return Fraction(0)
        if i + 1 < len(merged):
            dr = merged[i + 1][0] - x
            best = dr if best is None else min(best, dr)
        return best

    worst = Fraction(0)
    for a in A:
        lo, hi = a[0].lo, a[0].hi
        cands = [lo, hi]
        j = max(0, bisect.bisect_right(los, lo) - 1)
        while j + 1 < len(merged) and merged[j][1] < hi:
            g1, g2 = merged[j][1], merged[j + 1][0]
            if g2 > lo:
                cands.append(min(max((g1 + g2) / 2, lo), hi))
            j += 1
        for x in cands:
            worst = max(worst, dist(x))
    return worst


def _directed_general(A: list, B: list) -> Fraction:
    """Least r such that every box of A lies in the union of the closed
    r-neighbourhoods of the boxes of B.  The answer is one of finitely many
    critical radii, and coverage is monotone in r."""
    dim = len(A[0])
    cands = {Fraction(0)}
    for k in range(dim):
        ea = {x for a in A for x in (a[k].lo, a[k].hi)}
        eb = {x for b in B for x in (b[k].lo, b[k].hi)}
        cands.update(abs(x - y) for x in ea for y in eb)
        cands.update(abs(x - y) / 2 for x in eb for y in eb)
    cands = sorted(cands)

    def ok(r):
        grown = [b.expand(r) for b in B]
        return all(box_covered(a, grown) for a in A)

    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(cands[mid]):
            hi = mid
        else:
            lo = mid + 1
    return cands[lo]


def directed_hausdorff(A, B, general: bool = False) -> Fraction:
    A, B = _as_boxes(A), _as_boxes(B)
    if not A or not B:
        raise DomainError("Hausdorff distance needs nonempty families")
    if len(A[0]) != len(B[0]):
        raise ArityError("dimension mismatch")
    if len(A[0]) == 1 and not general:
        return _directed_1d(A, B)
    return _directed_general(A, B)


def hausdorff_distance(A, B, general: bool = False) -> Fraction:
    """Exact Hausdorff distance (max metric) between the unions of two box
    families."""
    return max(directed_hausdorff(A, B, general), directed_hausdorff(B, A, general))


def apply_hyper_digit(H: HyperSpace, label, parts) -> CompactApprox:
    """[d1,...,dr](K1,...,Kr) on box families."""
    comps = H.components(label)
    if len(parts) != len(comps):
        raise ArityError(f"{format_label(label)} needs {len(comps)} arguments")
    out = []
    for d, K in zip(comps, parts):
        dig = H.base.digit(d)
        out.extend(dig.apply_box(b) for b in _as_boxes(K))
    return CompactApprox(out)


def compact_approx(H: HyperSpace, T: LazyTree, n: int, budget: int = DEFAULT_BUDGET) -> CompactApprox:
    """Boxes of f_{T^(n)}(X, ..., X) computed in the hyperspace."""
    base = H.base
    full = base.full_box
    memo = {}
    keep = []
    steps = [0]

    def rec(t, k):
        key = (id(t), k)
        if key in memo:
            return memo[key]
        steps[0] += 1
        if steps[0] > budget:
            from .errors import ProductivityError
            raise ProductivityError(f"budget of {budget} steps exhausted")
        comps = H.components(t.root)
        if k == 0:
            out = {base.digit(d).apply_box(full) for d in comps}
        else:
            kids = t.children
            if len(kids) != len(comps):
                raise ArityError(f"hyper node {format_label(t.root)} needs {len(comps)} children")
            out = set()
            for d, c in zip(comps, kids):
                dig = base.digit(d)
                out.update(dig.apply_box(b) for b in rec(c, k - 1))
        keep.append(t)
        memo[key] = out
        return out

    return CompactApprox(rec(T, n), n)


def derived_trees(H: HyperSpace, T: LazyTree, n: int) -> list:
    """Height-n prefixes of all derived trees of T."""
    comps = H.components(T.root)
    if n == 0:
        return [FinTree(d) for d in comps]
    kids = T.children
    if len(kids) != len(comps):
        raise ArityError(f"hyper node {format_label(T.root)} needs {len(comps)} children")
    out = []
    for d, c in zip(comps, kids):
        out.extend(FinTree(d, (S,)) for S in derived_trees(H, c, n - 1))
    return out


def derived_union(H: HyperSpace, T: LazyTree, n: int) -> CompactApprox:
    """Enclosures of the derived-tree prefixes, one box each."""
    return CompactApprox([finite_map_enclosure(H.base, S) for S in derived_trees(H, T, n)], n)


# -- balls in the hyperspace -----------------------------------------------

def _ball(H, u, theta):
    return H.full_box.ball(u, theta)


def hyper_ball_contained(H: HyperSpace, label, U, theta) -> bool:
    """Exact test of {K : rho_H(K, U) <= theta} within range(label).

    range([d1..dr]) consists of the compact K inside R1 u ... u Rr that meet
    every Rk.  Hence the ball is contained iff every point ball B(u, theta)
    lies in the union of the ranges, and every Rk contains a whole point
    ball B(u, theta).
    """
    theta = exact(theta)
    if theta <= 0:
        raise DomainError("ball radius must be positive")
    U = [tuple(exact(c) for c in (u if isinstance(u, (tuple, list)) else (u,))) for u in U]
    if not U:
        raise DomainError("need a nonempty finite set")
    ranges = [H.base.range(d) for d in H.components(label)]
    balls = [_ball(H, u, theta) for u in U]
    union_ok = all(b is None or box_covered(b, ranges) for b in balls)
    each_ok = all(any(b is None or R.contains_box(b) for b in balls) for R in ranges)
    return union_ok and each_ok


def epsball_clauses(H: HyperSpace, label, U, theta) -> bool:
    """The two clauses: (1) every u has a digit whose range holds its
    theta-ball, (2) every digit's range holds the theta-ball of some u."""
    theta = exact(theta)
    U = [tuple(exact(c) for c in (u if isinstance(u, (tuple, list)) else (u,))) for u in U]
    comps = H.components(label)
    c1 = all(any(covers_ball(H.base, d, u, theta) for d in comps) for u in U)
    c2 = all(any(covers_ball(H.base, d, u, theta) for u in U) for d in comps)
    return c1 and c2


def pick_hyper_digit(H: HyperSpace, U) -> Hyper:
    """A hyper digit whose range holds the epsilon-ball around the finite set U."""
    U = [tuple(exact(c) for c in (u if isinstance(u, (tuple, list)) else (u,))) for u in U]
    return H.canonical(dict.fromkeys(pick_digit(H.base, u).id for u in U))


# -- unions -----------------------------------------------------------------

def _merge(order, la, ka, lb, kb, width, combine):
    """Merge two set-labels; children of shared components are combined."""
    own_a, own_b = {}, {}
    pos = 0
    for c in la:
        own_a[c] = ka[pos:pos + width(c)]
        pos += width(c)
    pos = 0
    for c in lb:
        own_b[c] = kb[pos:pos + width(c)]
        pos += width(c)
    comps = sorted(set(la) | set(lb), key=order)
    kids = []
    for c in comps:
        if c in own_a and c in own_b:
            kids.extend(combine(x, y) for x, y in zip(own_a[c], own_b[c]))
        else:
            kids.extend(own_a.get(c) or own_b[c])
    return Hyper(comps), kids


def union_merge_node(H: HyperSpace, a, b):
    """Merge (label, children) pairs of two hyper nodes: the node of the union."""
    (la, ka), (lb, kb) = a, b
    H.components(la)
    H.components(lb)
    return _merge(H.order_key, la, list(ka), lb, list(kb), lambda c: 1,
                  lambda x, y: union_trees(H, x, y))


def union_trees(H: HyperSpace, A: LazyTree, B: LazyTree) -> LazyTree:
    """Tree of val(A) u val(B)."""
    if A is B:
        return A
    box = {}

    def force():
        if "v" not in box:
            box["v"] = union_merge_node(H, (A.root, A.children), (B.root, B.children))
        return box["v"]

    label = H.canonical(dict.fromkeys(list(A.root) + list(B.root)))
    return LazyTree(label, lambda: force()[1])


# -- second hyperspace ------------------------------------------------------

def _comp_ids(H, c) -> tuple:
    if isinstance(c, Lifted):
        if c.inner not in H._order:
            raise FormError(f"unknown base digit in {format_label(c)}")
        return (c.inner,)
    if isinstance(c, Hyper):
        return H.components(c)
    raise FormError(f"{format_label(c)} is neither a hyper digit nor a lifted digit")


def _k2_components(H, label):
    if not isinstance(label, Hyper):
        raise FormError(f"{format_label(label)} is not a set of hyper digits")
    comps = list(label)
    for c in comps:
        if isinstance(c, Hyper) and H.canonical(_comp_ids(H, c)) != c:
            raise FormError(f"component {format_label(c)} must list its digits in base order")
    seen = set()
    for c in comps:
        key = _comp_ids(H, c)
        if key in seen:
            raise FormError(f"repeated component in {format_label(label)}")
        seen.add(key)
    keys = [_k2_key(H)(c) for c in comps]
    if keys != sorted(keys):
        raise FormError(f"components of {format_label(label)} must be in base order")
    return comps


def _k2_key(H):
    return lambda c: tuple(H.order_key(d) for d in _comp_ids(H, c))


def k2_arity(H: HyperSpace, label) -> int:
    return sum(len(_comp_ids(H, c)) for c in _k2_components(H, label))


def _k2_norm(H, c):
    ids = _comp_ids(H, c)
    return Hyper(ids)


def k2_union(H: HyperSpace, A: LazyTree, B: LazyTree) -> LazyTree:
    """A tree whose flattened union is the union of those of A and B."""
    if A is B:
        return A
    la = [_k2_norm(H, c) for c in _k2_components(H, A.root)]
    lb = [_k2_norm(H, c) for c in _k2_components(H, B.root)]
    comps = sorted(set(la) | set(lb), key=_k2_key(H))
    box = {}

    def force():
        if "v" not in box:
            box["v"] = _merge(_k2_key(H), la, list(A.children), lb, list(B.children),
                              len, lambda x, y: k2_union(H, x, y))
        return box["v"]

    return LazyTree(Hyper(comps), lambda: force()[1])


def michael_rewrite(H: HyperSpace, label, children):
    """Rewrite a second-hyperspace node into lifted form.

    Returns ([K(e1),...,K(em)], [M1,...,Mm]) where e1..em are the distinct
    base digits occurring in ``label`` (canonical order) and M_i unites the
    subtrees belonging to the occurrences of e_i.
    """
    comps = _k2_components(H, label)
    children = list(children)
    need = sum(len(_comp_ids(H, c)) for c in comps)
    if len(children) != need:
        raise FormError(f"{format_label(label)} needs {need} subtrees, got {len(children)}")
    groups = {}
    pos = 0
    for c in comps:
        for d in _comp_ids(H, c):
            groups.setdefault(d, []).append(children[pos])
            pos += 1
    es = sorted(groups, key=H.order_key)
    merged = []
    for e in es:
        acc = groups[e][0]
        for t in groups[e][1:]:
            acc = k2_union(H, acc, t)
        merged.append(acc)
    return Hyper(Lifted(e) for e in es), merged


def lift_form(H: HyperSpace, T: LazyTree) -> LazyTree:
    """Rewrite every node of a second-hyperspace tree into lifted form."""
    box = {}

    def force():
        if "v" not in box:
            box["v"] = michael_rewrite(H, T.root, T.children)
        return box["v"]

    comps = _k2_components(H, T.root)
    es = sorted({d for c in comps for d in _comp_ids(H, c)}, key=H.order_key)
    return LazyTree(Hyper(Lifted(e) for e in es), lambda: [lift_form(H, m) for m in force()[1]])


def _lifted_ids(H, label) -> list:
    if not isinstance(label, Hyper):
        raise FormError(f"{format_label(label)} is not a list of lifted digits")
    ids = []
    for c in label:
        if isinstance(c, Lifted):
            ids.append(c.inner)
        elif isinstance(c, Hyper) and len(c) == 1:
            ids.append(c[0])
        else:
            raise FormError(f"component {format_label(c)} of {format_label(label)} is not lifted")
        if ids[-1] not in H._order:
            raise FormError(f"unknown base digit {format_label(ids[-1])}")
    return ids


def michael_transform(H: HyperSpace, T: LazyTree) -> LazyTree:
    """Relabel [K(d1),...,K(ds)] to [d1,...,ds]; codes the union of the family."""
    ids = _lifted_ids(H, T.root)
    label = H.canonical(ids)
    perm = sorted(range(len(ids)), key=lambda k: H.order_key(ids[k]))

    def kids():
        ks = T.children
        if len(ks) != len(ids):
            raise ArityError(f"node {format_label(T.root)} needs {len(ids)} children")
        return [michael_transform(H, ks[k]) for k in perm]

    return LazyTree(label, kids)


def michael_union(H: HyperSpace, T: LazyTree) -> LazyTree:
    """Tree of the union of the family coded by a second-hyperspace tree."""
    return michael_transform(H, lift_form(H, T))


def flat_union_approx(H: HyperSpace, T: LazyTree, n: int) -> CompactApprox:
    """Depth-n boxes of the union coded by a second-hyperspace tree,
    computed directly from its (component, digit) subtrees."""
    base = H.base
    full = base.full_box
    memo = {}
    keep = []

    def rec(t, k):
        key = (id(t), k)
        if key in memo:
            return memo[key]
        comps = _k2_components(H, t.root)
        digits = [d for c in comps for d in _comp_ids(H, c)]
        if k == 0:
            out = {base.digit(d).apply_box(full) for d in digits}
        else:
            kids = t.children
            if len(kids) != len(digits):
                raise ArityError(f"node {format_label(t.root)} needs {len(digits)} subtrees")
            out = set()
            for d, c in zip(digits, kids):
                dig = base.digit(d)
                out.update(dig.apply_box(b) for b in rec(c, k - 1))
        keep.append(t)
        memo[key] = out
        return out

    return CompactApprox(rec(T, n), n)


def member_union_approx(H: HyperSpace, T: LazyTree, n: int) -> CompactApprox:
    """For a tree in lifted form: the union of the depth-n boxes of all
    members, enumerated through the lifted-digit streams threading T."""
    out = []

    def walk(t, k, prefix):
        ids = _lifted_ids(H, t.root)
        if k == 0:
            for d in ids:
                out.append(FinTree.chain(prefix + [d]))
            return
        kids = t.children
        for d, c in zip(ids, kids):
            walk(c, k - 1, prefix + [d])

    walk(T, n, [])
    return CompactApprox([finite_map_enclosure(H.base, S) for S in out], n)
