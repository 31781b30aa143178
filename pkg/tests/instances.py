"""Random rational toric instances shared by the test modules."""

from fractions import Fraction

import numpy as np

from convexgreen import CompactFactorSpec, ConvexBody, ProductCompact, ProductStructure
from convexgreen.product import TheoremInstance


def rational_points(rng, count, dim, denominators=(1, 2, 3, 4)):
    rows = []
    for _ in range(count):
        row = []
        for _ in range(dim):
            den = int(rng.choice(denominators))
            row.append(float(Fraction(int(rng.integers(0, 2 * den + 1)), den)))
        rows.append(row)
    return np.array(rows)


def random_body(rng, dim, with_origin=True, max_gens=4):
    k = int(rng.integers(1, max_gens + 1))
    G = rational_points(rng, k, dim)
    if with_origin:
        G = np.vstack([np.zeros(dim), G])
    return ConvexBody(G)


def random_structure(rng, max_ell=3, max_nj=2, max_n=4):
    while True:
        ell = int(rng.integers(1, max_ell + 1))
        dims = [int(rng.integers(1, max_nj + 1)) for _ in range(ell)]
        if sum(dims) <= max_n:
            break
    T = random_body(rng, ell, with_origin=bool(rng.integers(0, 2)))
    factors = tuple(random_body(rng, d) for d in dims)
    return ProductStructure(T, factors)


def unit_polydiscs(ps):
    return tuple(ProductCompact((CompactFactorSpec.polydisc([1.0] * s.dim),)) for s in ps.factors)


def random_toric_instance(rng, **kw):
    ps = random_structure(rng, **kw)
    return TheoremInstance(ps, unit_polydiscs(ps))
