import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from convexgreen import (
    ApproxConfig,
    CompactFactorSpec,
    ConvexBody,
    ProductCompact,
    ProductStructure,
    QuadratureError,
    ResourceError,
    approx_v,
    build_basis,
    contains,
    convergence_sweep,
    cube,
    enumerate_lattice,
    interval,
    point,
    simplex,
)
from convexgreen.siciak import exact_toric, gram_schmidt, graded_indices, sampling_margin, torus_sup

DISC = ProductCompact((CompactFactorSpec.disc(0, 1),))
BIDISC = ProductCompact((CompactFactorSpec.polydisc([1, 1]),))
SEG = ProductCompact((CompactFactorSpec.interval(-1, 1),))
INTRO = ConvexBody(np.array([[0, 0], [1, 0], [1, 1], [0, 0.5]]))


def disc_oracle(m, r=2.0):
    """(1/2m) log sum_{k<=m} r^{2k}, the Bergman sum for monomials on the circle."""
    return math.log(sum(r ** (2 * k) for k in range(m + 1))) / (2 * m)


def test_lattice_examples():
    lat = enumerate_lattice(simplex(2), 2)
    assert sorted(map(tuple, lat.points)) == sorted([(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)])
    lat = enumerate_lattice(INTRO, 2)
    pts = set(map(tuple, lat.points))
    assert len(pts) == 7 and (2, 2) in pts and (1, 2) not in pts
    assert enumerate_lattice(point([0.0, 0.0]), 5).points.tolist() == [[0, 0]]


def test_lattice_is_lexicographic():
    pts = enumerate_lattice(cube(2), 3).points.tolist()
    assert pts == sorted(pts)


def test_lattice_budget():
    with pytest.raises(ResourceError):
        enumerate_lattice(cube(3), 200, budget=10**5)
    with pytest.raises(ResourceError):
        enumerate_lattice(cube(5), 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_lattice_invariants(m, seed):
    rng = np.random.default_rng(seed)
    G = np.vstack([np.zeros(2), rng.integers(0, 4, size=(3, 2)) / 2.0])
    body = ConvexBody(G)
    lat = enumerate_lattice(body, m)
    assert len(lat) <= lat.count_bound
    assert lat.points.max() <= math.ceil(m * lat.sigma)
    for a in lat.points:
        assert contains(body.scaled(m), a.astype(float))


def test_graded_order():
    idx, grading = graded_indices(INTRO, 4)
    assert np.all(np.diff(grading) >= -1e-12)
    assert idx[0].tolist() == [0, 0]


def test_disc_basis_is_monomials():
    ps = ProductStructure(simplex(1), (interval(0, 1),))
    b = build_basis(ApproxConfig(m=6), ps, [DISC])
    assert np.allclose(np.abs(b.factors[0].coeffs), np.eye(7), atol=1e-12)
    assert b.factors[0].gram_error() <= 1e-10


def test_bidisc_basis_is_monomials():
    ps = ProductStructure(simplex(1), (INTRO,))
    b = build_basis(ApproxConfig(m=4), ps, [BIDISC])
    f = b.factors[0]
    assert np.allclose(np.abs(f.coeffs), np.eye(len(f.coeffs)), atol=1e-12)
    assert f.is_graded() and f.triangular_ok()


def test_interval_basis_is_chebyshev():
    from numpy.polynomial import chebyshev as C

    ps = ProductStructure(simplex(1), (interval(0, 1),))
    b = build_basis(ApproxConfig(m=8), ps, [SEG])
    coeffs = b.factors[0].coeffs.real
    for k in range(9):
        e = np.zeros(k + 1)
        e[k] = 1.0
        mono = C.cheb2poly(e) * (1.0 if k == 0 else math.sqrt(2))
        assert np.allclose(coeffs[k, : k + 1], mono, atol=1e-6)
    assert b.factors[0].gram_error() <= 1e-8


def test_gram_schmidt_detects_dependence():
    V = np.ones((5, 2), dtype=complex)
    with pytest.raises(QuadratureError):
        gram_schmidt(V, np.full(5, 0.2))


def test_too_few_nodes_reports_requirement():
    ps = ProductStructure(simplex(1), (interval(0, 1),))
    with pytest.raises(QuadratureError) as info:
        build_basis(ApproxConfig(m=6, node_counts=(3,)), ps, [DISC])
    assert info.value.required_nodes == [13]


@pytest.mark.parametrize("m", [4, 8, 16, 32])
def test_disc_matches_geometric_sum(m):
    ps = ProductStructure(simplex(1), (interval(0, 1),))
    v = approx_v(ApproxConfig(m=m), ps, [DISC], np.array([2.0 + 0j]))
    assert v == pytest.approx(disc_oracle(m), abs=1e-12)


def test_bidisc_intro_value():
    ps = ProductStructure(simplex(1), (INTRO,))
    v = approx_v(ApproxConfig(m=12), ps, [BIDISC], np.exp(np.array([-1.0, 1.0]) + 0j))
    assert abs(v - 0.5) <= 0.08


def test_torus_points_near_zero():
    ps = ProductStructure(simplex(1), (simplex(2),))
    m = 6
    b = build_basis(ApproxConfig(m=m), ps, [BIDISC])
    rng = np.random.default_rng(2)
    z = np.exp(1j * rng.uniform(0, 2 * np.pi, size=(20, 2)))
    v = approx_v(ApproxConfig(m=m), ps, [BIDISC], z, basis=b)
    assert np.all(v <= math.log(len(b.lattice)) / (2 * m) + 1e-9)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_upper_bound_and_phase_invariance(seed):
    rng = np.random.default_rng(seed)
    ps = ProductStructure(cube(1) if seed % 2 else simplex(2), (INTRO,) if seed % 2 else (interval(0, 1), interval(0, 1)))
    compacts = [BIDISC] if seed % 2 else [DISC, DISC]
    m = 5
    b = build_basis(ApproxConfig(m=m), ps, compacts)
    xi = rng.uniform(-2, 2, size=(10, 2))
    z = np.exp(xi + 0j)
    v = approx_v(ApproxConfig(m=m), ps, compacts, z, basis=b)
    exact = exact_toric(ps, compacts)(xi)
    assert np.all(v <= exact + math.log(len(b.lattice)) / (2 * m) + 1e-9)
    rotated = z * np.exp(1j * rng.uniform(0, 2 * np.pi, size=z.shape))
    assert np.allclose(approx_v(ApproxConfig(m=m), ps, compacts, rotated, basis=b), v, atol=1e-12)


def test_weight_shift():
    ps = ProductStructure(simplex(1), (interval(0, 1),))
    z = np.array([3.0 + 0j])
    a = approx_v(ApproxConfig(m=4), ps, [DISC], z)
    b = approx_v(ApproxConfig(m=4, q=-1.0), ps, [DISC], z)
    assert b == pytest.approx(a - 1.0)


def test_sweep_disc_table():
    ps = ProductStructure(simplex(1), (interval(0, 1),))
    table = convergence_sweep([4, 8, 16, 32], ps, [DISC], np.array([[math.log(2)]]))
    errs = [e for _, e, _ in table.rows]
    oracle = [disc_oracle(m) - math.log(2) for m in (4, 8, 16, 32)]
    assert errs == pytest.approx(oracle, abs=1e-12)
    # published rounded values; the first is 9e-4 above the exact sum
    assert errs == pytest.approx([0.0367, 0.0180, 0.0089, 0.0044], abs=1e-3)
    assert table.monotone
    assert table.to_csv().startswith("m,max_error,argmax\n")


def test_sweep_bidisc_monotone():
    ps = ProductStructure(simplex(1), (simplex(2),))
    xi = np.array([[1.0, 0.5], [0.2, 1.5], [2.0, 2.0]])
    table = convergence_sweep([2, 4, 8], ps, [BIDISC], xi)
    errs = [e for _, e, _ in table.rows]
    assert errs[0] > errs[1] > errs[2] and table.monotone


def test_sweep_trivial_class():
    ps = ProductStructure(simplex(1), (point([0.0]),))
    table = convergence_sweep([1], ps, [DISC], np.array([[1.0]]))
    assert table.rows[0][1] == 0.0


def test_torus_sup_and_margin():
    exps = np.array([[0, 0], [1, 0], [0, 1]])
    sup = torus_sup(np.array([1.0, 1.0, 1.0]), exps, np.ones(2), (64, 64))
    assert sup == pytest.approx(3.0)
    assert 1.0 < sampling_margin(exps, (64, 64)) < 1.1
