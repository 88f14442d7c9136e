"""Finite products of digit spaces.

Factor digits are padded to the common arity s (the maximum arity over all
factors); a product digit <d1,...,dn> acts on each factor block of its
arguments separately, ignoring the padded arguments of short digits.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

from .errors import ArityError, DomainError
from .labels import Prod, format_label
from .numeric import Box
from .space import Digit, DigitSpace
from .tree import LazyTree


def pad_arity(d: Digit, s: int) -> Digit:
    return d.padded(s)


def _product_digit(factors, parts, s) -> Digit:
    dims = [f.dim for f in factors]
    total = sum(dims)
    offsets = [sum(dims[:i]) for i in range(len(dims))]
    rows, offset = [], []
    for fi, (space, d) in enumerate(zip(factors, parts)):
        dp = d.padded(s)
        for r in range(space.dim):
            row = [Fraction(0)] * (s * total)
            for arg in range(s):
                for c in range(space.dim):
                    row[arg * total + offsets[fi] + c] = dp.matrix[r][arg * space.dim + c]
            rows.append(row)
            offset.append(dp.offset[r])
    return Digit(Prod(p.id for p in parts), s, rows, offset)


class ProductSpace(DigitSpace):
    """The product of ``factors`` with digits <d1,...,dn> in lexicographic order."""

    def __init__(self, factors, validate=True):
        factors = tuple(factors)
        if not factors:
            raise DomainError("a product needs at least one factor")
        self.factors = factors
        self.common_arity = max(f.max_arity for f in factors)
        s = self.common_arity
        digits = [_product_digit(factors, parts, s)
                  for parts in itertools.product(*(f.digits for f in factors))]
        box = Box([iv for f in factors for iv in f.full_box])
        super().__init__(digits, box,
                         bound=max(f.bound for f in factors),
                         factor=max(f.factor for f in factors),
                         epsilon=min(f.epsilon for f in factors),
                         base_point=tuple(c for f in factors for c in f.base_point),
                         validate=validate)
        self.padded_factors = tuple(
            DigitSpace([d.padded(s) for d in f.digits], f.full_box, bound=f.bound,
                       factor=f.factor, epsilon=f.epsilon, base_point=f.base_point,
                       validate=False)
            for f in factors)

    def block(self, i: int, point) -> tuple:
        """Coordinates of factor i (0-based) inside a product point."""
        lo = sum(f.dim for f in self.factors[:i])
        return tuple(point[lo:lo + self.factors[i].dim])

    def box_block(self, i: int, box: Box) -> Box:
        lo = sum(f.dim for f in self.factors[:i])
        return Box(box[lo:lo + self.factors[i].dim])


def product_space(factors, validate=True) -> ProductSpace:
    return ProductSpace(factors, validate=validate)


def pr_tree(P: ProductSpace, i: int, T: LazyTree) -> LazyTree:
    """Component i (1-based) of a product tree."""
    if not 1 <= i <= len(P.factors):
        raise DomainError(f"component index {i} out of range")
    s = P.common_arity

    def go(t):
        lab = t.root
        if not isinstance(lab, Prod) or len(lab) != len(P.factors):
            raise ArityError(f"label {format_label(lab)} is not a product digit of this space")

        def kids():
            ks = t.children
            if len(ks) != s:
                raise ArityError(f"product node needs {s} children, has {len(ks)}")
            return [go(k) for k in ks]

        return LazyTree(lab[i - 1], kids)

    return go(T)


def cons_tree(P: ProductSpace, parts) -> LazyTree:
    """Tuple of factor trees (over the padded factor alphabets)."""
    parts = list(parts)
    if len(parts) != len(P.factors):
        raise ArityError(f"need {len(P.factors)} factor trees, got {len(parts)}")
    s = P.common_arity
    alphabets = [f.alphabet for f in P.factors]

    def go(ts):
        for t, alpha in zip(ts, alphabets):
            if t.root not in alpha:
                raise ArityError(f"digit {format_label(t.root)} is not in its factor space")

        def kids():
            cs = [t.children for t in ts]
            for c in cs:
                if len(c) != s:
                    raise ArityError(f"factor node needs {s} children (padded arity), has {len(c)}")
            return [go([c[k] for c in cs]) for k in range(s)]

        return LazyTree(Prod(t.root for t in ts), kids)

    return go(parts)
