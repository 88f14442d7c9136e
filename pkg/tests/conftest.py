from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from digitspace.hyper import HyperSpace
from digitspace.product import product_space
from digitspace.space import builtin_signed_digit

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def sd():
    return builtin_signed_digit()


@pytest.fixture(scope="session")
def sd2(sd):
    return product_space([sd, sd])


@pytest.fixture(scope="session")
def hsd(sd):
    return HyperSpace(sd)


def dyadics(lo=-1, hi=1, bits=12):
    """Dyadic rationals with denominator 2**bits in [lo, hi]."""
    scale = 2 ** bits
    return st.integers(lo * scale, hi * scale).map(lambda m: Fraction(m, scale))


def sd_words(min_size=1, max_size=24):
    return st.lists(st.sampled_from(["-1", "0", "1"]), min_size=min_size, max_size=max_size)


def sd_value(word):
    """sum a_i 2^-(i+1): the exact value of a finite signed-digit word."""
    return sum(Fraction(int(a), 2 ** (i + 1)) for i, a in enumerate(word))


def random_k2_tree(H, seed, max_comps=2, lifted=False):
    """Random second-hyperspace tree in the projected form: a label lists
    distinct components (canonical order), one subtree per (component, digit)."""
    import random

    from digitspace.labels import Hyper, Lifted
    from digitspace.tree import LazyTree

    base_ids = list(H.base.alphabet)
    pool = [Lifted(d) for d in base_ids] if lifted else list(H.hyper_digits)
    key = (lambda c: H.order_key(c.inner)) if lifted else \
        (lambda c: tuple(H.order_key(d) for d in c))

    def step(path):
        rng = random.Random(hash((seed,) + path))
        k = rng.randint(1, min(max_comps, len(pool)))
        comps = sorted(rng.sample(pool, k), key=key)
        width = sum(1 if lifted else len(c) for c in comps)
        return Hyper(comps), [path + (i,) for i in range(width)]

    return LazyTree.unfold((), step)
