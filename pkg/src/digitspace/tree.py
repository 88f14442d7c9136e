"""Finite and lazy infinite labelled trees.

Trees only store labels.  What a label means (and its arity) is decided by
the digit space supplied at the use site.
"""
from __future__ import annotations

import random
import threading
from fractions import Fraction
from typing import Callable, Sequence

from .errors import ArityError, CoherenceError, ProductivityError
from .labels import format_label

DEFAULT_BUDGET = 10 ** 6

_force_lock = threading.Lock()


class FinTree:
    """A tree of height n: all leaves at depth n."""

    __slots__ = ("label", "children", "height", "_hash")

    def __init__(self, label, children: Sequence["FinTree"] = ()):
        children = tuple(children)
        heights = {c.height for c in children}
        if len(heights) > 1:
            raise ArityError("leaves of a finite tree must all be at the same depth")
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "height", heights.pop() + 1 if heights else 0)
        object.__setattr__(self, "_hash", hash((label, children)))

    def __setattr__(self, name, value):
        raise AttributeError("FinTree is immutable")

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def __eq__(self, o):
        if self is o:
            return True
        if not isinstance(o, FinTree) or self._hash != o._hash:
            return False
        return self.label == o.label and self.children == o.children

    def __hash__(self):
        return self._hash

    def __str__(self):
        if not self.children:
            return f"({format_label(self.label)})"
        return "(" + format_label(self.label) + " " + " ".join(str(c) for c in self.children) + ")"

    def __repr__(self):
        return f"FinTree{self}"

    @classmethod
    def chain(cls, labels: Sequence) -> "FinTree":
        """Unary tree with the given labels from the root down."""
        labels = list(labels)
        node = cls(labels[-1])
        for lab in reversed(labels[:-1]):
            node = cls(lab, (node,))
        return node

    def map_arity(self, alphabet: dict) -> int:
        """Arity of the composite map f_S: the leaves' arities summed."""
        if not self.children:
            if self.label not in alphabet:
                raise ArityError(f"digit {format_label(self.label)} is not in the alphabet")
            return alphabet[self.label]
        return sum(c.map_arity(alphabet) for c in self.children)

    def levels(self) -> list:
        """Labels level by level (breadth first)."""
        out, layer = [], [self]
        while layer:
            out.append([t.label for t in layer])
            layer = [c for t in layer for c in t.children]
        return out


def _exhausted():
    raise ProductivityError("finite tree has no subtrees below its leaves")


class LazyTree:
    """An infinite tree: a root label and a memoized producer of subtrees.

    ``children`` may be a sequence or a zero-argument callable returning one.
    Forcing is idempotent; concurrent forcing may compute twice but every
    caller sees the first stored result.
    """

    __slots__ = ("root", "_thunk", "_kids", "__weakref__")

    def __init__(self, root, children=None):
        self.root = root
        if callable(children):
            self._thunk, self._kids = children, None
        else:
            self._thunk, self._kids = None, tuple(children or ())

    @property
    def children(self) -> tuple:
        kids = self._kids
        if kids is not None:
            return kids
        thunk = self._thunk
        if thunk is None:
            return self._kids
        value = tuple(thunk())
        with _force_lock:
            if self._kids is None:
                self._kids = value
                self._thunk = None
            return self._kids

    @property
    def forced(self) -> bool:
        return self._kids is not None

    def child(self, i: int) -> "LazyTree":
        return self.children[i]

    def __repr__(self):
        return f"LazyTree({format_label(self.root)}, ...)"

    # constructors

    @classmethod
    def constant(cls, label, arity: int = 1) -> "LazyTree":
        t = cls(label, None)
        t._kids = (t,) * arity
        return t

    @classmethod
    def from_fintree(cls, S: FinTree) -> "LazyTree":
        """A lazy view of S; forcing below S's leaves is a productivity error."""
        if not S.children:
            return cls(S.label, _exhausted)
        return cls(S.label, lambda: [cls.from_fintree(c) for c in S.children])

    @classmethod
    def stream(cls, labels: Sequence, tail: "LazyTree | None" = None) -> "LazyTree":
        """Unary tree with the given finite prefix followed by ``tail``."""
        labels = list(labels)
        if not labels:
            if tail is None:
                raise ArityError("empty stream without tail")
            return tail
        if tail is None:
            tail = cls.constant(labels[-1])
        node = tail
        for lab in reversed(labels):
            node = cls(lab, (node,))
        return node

    @classmethod
    def unfold(cls, seed, step: Callable) -> "LazyTree":
        """Corecursion: ``step(seed) -> (label, child_seeds)``."""
        label, seeds = step(seed)
        return cls(label, lambda: [cls.unfold(s, step) for s in seeds])


def random_tree(alphabet: dict, seed: int, weights=None) -> LazyTree:
    """A deterministic pseudo-random infinite tree over ``alphabet``
    (label -> arity).  Each node's label depends only on (seed, path)."""
    labels = list(alphabet)

    def step(path):
        rng = random.Random(hash((seed,) + path))
        lab = rng.choices(labels, weights=weights)[0] if weights else rng.choice(labels)
        return lab, [path + (k,) for k in range(alphabet[lab])]

    return LazyTree.unfold((), step)


def prefix(T: LazyTree, n: int, budget: int = DEFAULT_BUDGET) -> FinTree:
    """The height-n initial segment of T."""
    if n < 0:
        raise ArityError("prefix depth must be non-negative")
    steps = [0]

    def rec(t, k):
        steps[0] += 1
        if steps[0] > budget:
            raise ProductivityError(f"prefix budget of {budget} forcing steps exhausted")
        if k == 0:
            return FinTree(t.root)
        return FinTree(t.root, [rec(c, k - 1) for c in t.children])

    return rec(T, n)


def is_immediate_prefix(S: FinTree, T: FinTree) -> bool:
    if T.height != S.height + 1:
        raise ArityError("immediate prefix needs heights n and n+1")

    def rec(s, t):
        if s.label != t.label:
            return False
        if not s.children:
            return True
        if len(s.children) != len(t.children):
            return False
        return all(rec(a, b) for a, b in zip(s.children, t.children))

    return rec(S, T)


def first_difference(T: LazyTree, U: LazyTree, max_depth: int) -> int | None:
    """Least level m <= max_depth where T and U differ, else None."""
    layer = [(T, U)]
    for m in range(max_depth + 1):
        nxt = []
        for a, b in layer:
            if a is b:
                continue
            if a.root != b.root:
                return m
            if m < max_depth:
                ka, kb = a.children, b.children
                if len(ka) != len(kb):
                    return m + 1
                nxt.extend(zip(ka, kb))
        layer = nxt
        if not layer:
            return None
    return None


def tree_distance(T: LazyTree, U: LazyTree, max_depth: int) -> Fraction:
    m = first_difference(T, U, max_depth)
    return Fraction(0) if m is None else Fraction(1, 2 ** m)


def bisim_to_depth(T: LazyTree, U: LazyTree, n: int) -> bool:
    return first_difference(T, U, n) is None


class PrefixChain:
    """n -> FinTree of height n, memoized."""

    def __init__(self, producer: Callable[[int], FinTree]):
        self._producer = producer
        self._memo = {}
        self._checked = set()

    def __call__(self, n: int) -> FinTree:
        if n not in self._memo:
            S = self._producer(n)
            if S.height != n:
                raise CoherenceError(f"chain element {n} has height {S.height}")
            self._memo[n] = S
        return self._memo[n]

    def check_step(self, n: int):
        if n not in self._checked:
            if not is_immediate_prefix(self(n), self(n + 1)):
                raise CoherenceError(f"chain element {n} is not an immediate prefix of element {n + 1}")
            self._checked.add(n)


def from_prefix_chain(c) -> LazyTree:
    """The infinite tree whose height-n prefix is c(n)."""
    if not isinstance(c, PrefixChain):
        c = PrefixChain(c)

    def at(S, path):
        for k in path:
            S = S.children[k]
        return S

    def node(path):
        k = len(path)
        label = at(c(k), path).label

        def kids():
            c.check_step(k)
            sub = at(c(k + 1), path)
            return [node(path + (i,)) for i in range(len(sub.children))]

        return LazyTree(label, kids)

    return node(())


def chain_of(T: LazyTree) -> PrefixChain:
    return PrefixChain(lambda n: prefix(T, n))
