"""From trees to enclosures and back.

val(T) is never computed as a number: it is the intersection of the nested
boxes ``val_approx(space, T, n)``.  The converters between trees and Cauchy
oracles follow the usual digit-extraction scheme: read an approximation,
pick a digit whose range safely contains it, and continue with the right
inverse image.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .errors import ArityError, DigitSpaceError, DomainError, InconsistentOracleError
from .labels import format_label
from .numeric import Box, Dyadic, ceil_log2, exact, fmt, point_dist
from .space import DigitSpace, contraction_depth, pick_digit
from .tree import DEFAULT_BUDGET, FinTree, LazyTree, prefix


# -- f_S on boxes and points ------------------------------------------------

def _seed_blocks(space: DigitSpace, S: FinTree, seed):
    dim = space.dim
    arity = S.map_arity(space.alphabet)
    if seed is None:
        return [space.full_box] * arity
    if not isinstance(seed, Box):
        seed = Box(seed)
    if len(seed) == dim:
        return [seed] * arity
    if len(seed) != arity * dim:
        raise ArityError(f"seed has {len(seed)} coordinates, f_S needs {arity * dim}")
    return seed.blocks(dim)


def finite_map_enclosure(space: DigitSpace, S: FinTree, seed=None) -> Box:
    """Exact box image f_S[seed].

    ``seed`` is a box with one block per argument of f_S, or a single block
    used for every argument (None means the whole space).
    """
    alphabet = space.alphabet
    blocks = iter(_seed_blocks(space, S, seed))

    def rec(t):
        if t.label not in alphabet:
            raise ArityError(f"digit {format_label(t.label)} is not in the space")
        d = space.digit(t.label)
        if not t.children:
            args = [next(blocks) for _ in range(d.arity)]
        else:
            if len(t.children) != d.arity:
                raise ArityError(f"digit {format_label(t.label)} has arity {d.arity}")
            args = [rec(c) for c in t.children]
        return d.apply_box(args[0].concat(*args[1:]))

    return rec(S)


def finite_map_point(space: DigitSpace, S: FinTree, points) -> tuple:
    """f_S applied to a list of points (one per argument)."""
    pts = iter(points)

    def rec(t):
        d = space.digit(t.label)
        if not t.children:
            args = [next(pts) for _ in range(d.arity)]
        else:
            if len(t.children) != d.arity:
                raise ArityError(f"digit {format_label(t.label)} has arity {d.arity}")
            args = [rec(c) for c in t.children]
        return d.apply_point(tuple(x for a in args for x in a))

    return rec(S)


def dense_base_point(space: DigitSpace, S: FinTree) -> tuple:
    """f_S(z, ..., z)."""
    z = space.base_point
    return finite_map_point(space, S, [z] * S.map_arity(space.alphabet))


def val_approx(space: DigitSpace, T: LazyTree, n: int, budget: int = DEFAULT_BUDGET) -> Box:
    return finite_map_enclosure(space, prefix(T, n, budget))


# -- Cauchy oracles ---------------------------------------------------------

class CauchyOracle:
    """n -> basic point u with rho(x, u) < 2**-n.  Answers are memoized."""

    def __init__(self, query: Callable[[int], tuple], dim: int | None = None):
        self._query = query
        self._memo = {}
        self.dim = dim

    def __call__(self, n: int) -> tuple:
        if n < 0:
            raise DomainError("precision must be non-negative")
        got = self._memo.get(n)
        if got is None:
            u = self._query(n)
            if not isinstance(u, tuple):
                u = tuple(u) if isinstance(u, (list, Box)) else (u,)
            got = tuple(exact(c) for c in u)
            if self.dim is not None and len(got) != self.dim:
                raise ArityError(f"oracle returned {len(got)} coordinates, expected {self.dim}")
            self._memo[n] = got
        return got

    def check_consistency(self, ns) -> bool:
        ns = list(ns)
        for a in ns:
            for b in ns:
                if point_dist(self(a), self(b)) >= Fraction(1, 2 ** a) + Fraction(1, 2 ** b):
                    return False
        return True

    @classmethod
    def exact(cls, point) -> "CauchyOracle":
        """Oracle for a rational point: dyadic roundings at 2**-(n+1)."""
        if not isinstance(point, (tuple, list)):
            point = (point,)
        point = tuple(exact(c) for c in point)

        def q(n):
            return tuple(Dyadic.round(c, n + 1).to_fraction() for c in point)

        return cls(q, len(point))

    @classmethod
    def from_table(cls, table: dict) -> "CauchyOracle":
        """Finite Cauchy data {n: point}; a query at n uses the first entry m >= n."""
        keys = sorted(table)

        def q(n):
            for m in keys:
                if m >= n:
                    return table[m]
            raise DomainError(f"no approximation with precision 2^-{n} supplied")

        return cls(q)


def tree_to_cauchy(space: DigitSpace, T: LazyTree, budget: int = DEFAULT_BUDGET) -> CauchyOracle:
    """Answer at n: f_S(z) for S the prefix of depth j(n+1)."""

    def q(n):
        return dense_base_point(space, prefix(T, contraction_depth(space, n + 1), budget))

    return CauchyOracle(q, space.dim)


def _first_precision(space: DigitSpace) -> int:
    """Least k with 2**-k <= eps/2."""
    k = 0
    while Fraction(1, 2 ** k) > space.epsilon / 2:
        k += 1
    return k


def cauchy_to_tree(space: DigitSpace, o) -> LazyTree:
    """Digit tree of the limit of the oracle ``o``."""
    if not isinstance(o, CauchyOracle):
        o = CauchyOracle(o, space.dim)
    k0 = _first_precision(space)
    full = space.full_box

    def node(oracle):
        u = oracle(k0)
        if len(u) != space.dim:
            raise ArityError("oracle dimension does not match the space")
        if full.dist_point(u) >= Fraction(1, 2 ** k0):
            raise InconsistentOracleError("oracle answer is too far from the space")
        d = pick_digit(space, u)
        rng = space.range(d)
        lip = space.inverse_lipschitz(d)
        shift = max(0, ceil_log2(lip)) if lip > 0 else 0

        def preimage(n):
            k = n + shift
            v = oracle(k)
            if rng.dist_point(v) >= Fraction(1, 2 ** k):
                raise InconsistentOracleError(
                    f"oracle answer at precision {k} contradicts committed digit {format_label(d.id)}")
            return space.right_inverse_point(d, rng.clip(v))

        pre = CauchyOracle(preimage, space.dim * d.arity)

        def component(i):
            lo, hi = i * space.dim, (i + 1) * space.dim
            return CauchyOracle(lambda n: pre(n)[lo:hi], space.dim)

        return LazyTree(d.id, lambda: [node(component(i)) for i in range(d.arity)])

    return node(o)


# -- basic elements to finite trees -----------------------------------------

def _dense_preimage(space: DigitSpace, e, v, theta):
    """A basic point v' with rho(v, e(v')) <= theta: the exact right inverse,
    moved to the coarsest dyadic grid that stays within theta."""
    x = space.right_inverse_point(e, v)
    qe = space.digit(e).contraction
    bits = 0
    while Fraction(1, 2 ** (bits + 1)) * qe > theta:
        bits += 1
    dom = space.full_box_power(space.digit(e).arity)
    rounded = dom.clip(tuple(Dyadic.round(c, bits).to_fraction() for c in x))
    return rounded


def h_procedure(space: DigitSpace, k: int, v, theta: Fraction, log=None) -> FinTree:
    """H(k, v): a height-k tree S with rho(v, f_S(z)) <= (1 + k/j) q^k M."""
    e = pick_digit(space, v)
    if k == 0:
        return FinTree(e.id)
    th = space.factor ** k * space.bound * theta
    vp = _dense_preimage(space, e.id, v, th)
    if log is not None:
        log.append((k, point_dist(v, e.apply_point(vp)), th))
    blocks = [vp[i * space.dim:(i + 1) * space.dim] for i in range(e.arity)]
    return FinTree(e.id, [h_procedure(space, k - 1, b, theta, log) for b in blocks])


def basic_to_tree(space: DigitSpace, u, n: int, log=None) -> FinTree:
    """Finite tree S with rho(u, f_S(z)) < 2**-n."""
    u = tuple(exact(c) for c in (u if isinstance(u, (tuple, list)) else (u,)))
    if not space.full_box.contains_point(u):
        raise DomainError("basic element outside the space")
    k = contraction_depth(space, n)
    theta = Fraction(1, contraction_depth(space, n + 1))
    S = h_procedure(space, k, u, theta, log)
    err = point_dist(u, dense_base_point(space, S))
    if not err < Fraction(1, 2 ** n):
        raise DigitSpaceError(f"H bound violated: error {fmt(err)} at n={n}")
    return S


def convert_error_bound(space: DigitSpace, n: int) -> Fraction:
    """q**n * M."""
    return space.factor ** n * space.bound
