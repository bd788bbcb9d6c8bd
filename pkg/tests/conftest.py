"""Shared fixtures and desk-scale oracles.

The oracles here deliberately avoid the production code paths they check:
chain sums are expanded from the full enumerated chain set, multinomials are
recomputed with big-integer factorials, and conjugacies are verified by
direct truncated composition.
"""

import math
import random

import pytest

from charp.combinat import enumerate_chains
from charp.field import LaurentElement
from charp.recurrence import DynamicalSeries, Phi_chain

INF = math.inf


def quadratic(p=5, **kw):
    """f = lambda*z + z^2, the standard worked example."""
    return DynamicalSeries.from_spec(p, {1: 1}, **kw)


def make_map(p, coeffs, **kw):
    return DynamicalSeries.from_spec(p, coeffs, **kw)


def random_maps(seed, count, p_choices=(3, 5), max_support=3, max_exp=6, index_pool=6):
    """Deterministic corpus of random polynomial maps with monomial
    coefficients (the regime the whole desk-scale suite works in)."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        p = rng.choice(p_choices)
        size = rng.randint(1, max_support)
        support = sorted(rng.sample(range(1, index_pool + 1), size))
        coeffs = {
            i: LaurentElement.from_terms(p, {rng.randint(0, max_exp): rng.randrange(1, p)})
            for i in support
        }
        out.append(DynamicalSeries.from_spec(p, coeffs))
    return out


def phi_by_enumeration(f, k, r, s, budget=12):
    """Chain-sum oracle: expand the full chain set and add the products."""
    total = LaurentElement.zero(f.p)
    for chain in enumerate_chains(k, r, s, f.p, budget):
        total = total + Phi_chain(f, chain)
    return total


def multinomial_by_factorials(top, parts):
    """Big-integer oracle for the mod-p multinomial."""
    n = math.factorial(top)
    for x in parts:
        n //= math.factorial(x)
    return n


@pytest.fixture
def quad():
    return quadratic()
