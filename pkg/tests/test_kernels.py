"""The numba and numpy variants of each kernel must agree."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from convexgreen import _kernels as K

pytestmark = pytest.mark.skipif(K.simplex_numba is None, reason="numba unavailable")


def hull_contains_2d(G, p, tol=1e-9):
    """Independent oracle: a point is in the planar hull iff no edge direction separates it."""
    from itertools import combinations

    # p in hull iff p is in some triangle (or segment / point) of generators
    if any(np.allclose(g, p, atol=tol) for g in G):
        return True
    for a, b in combinations(G, 2):
        d = b - a
        t = np.dot(p - a, d) / max(np.dot(d, d), 1e-300)
        if 0 <= t <= 1 and np.linalg.norm(a + t * d - p) <= tol:
            return True
    for a, b, c in combinations(G, 3):
        M = np.column_stack([b - a, c - a])
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        u, v = np.linalg.solve(M, p - a)
        if u >= -tol and v >= -tol and u + v <= 1 + tol:
            return True
    return False


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_membership_backends_agree_with_oracle(seed):
    rng = np.random.default_rng(seed)
    G = rng.integers(0, 5, size=(int(rng.integers(1, 6)), 2)).astype(float)
    P = rng.uniform(-0.5, 4.5, size=(20, 2))
    a = K.membership_batch_numpy(G, P, 1e-8, 5000)
    b = K.membership_batch_numba(G, P, 1e-8, 5000)
    assert np.array_equal(a, b)
    for p, verdict in zip(P, a):
        assert verdict == hull_contains_2d(G, p)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_simplex_backends_agree(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 7))
    G = rng.uniform(0, 3, size=(k, 2))
    beta = rng.uniform(0, 2, size=2)
    A, c = G.T.copy(), np.ones(k)
    r1 = K.simplex_numpy(A, beta, c, 1e-8, 5000)
    r2 = K.simplex_numba(A, beta, c, 1e-8, 5000)
    assert r1[0] == r2[0]
    if r1[0] == K.LP_OPTIMAL:
        assert r1[2] == pytest.approx(r2[2], abs=1e-9)


def test_simplex_reports_unbounded_and_infeasible():
    A = np.array([[1.0, -1.0]])
    st_, _, _, _ = K.simplex_numpy(A, np.array([0.0]), np.array([-1.0, 0.0]), 1e-8, 100)
    assert st_ == K.LP_UNBOUNDED
    st_, _, _, _ = K.simplex_numpy(np.array([[1.0, 1.0]]), np.array([-1.0]), np.zeros(2), 1e-8, 100)
    assert st_ == K.LP_INFEASIBLE


def test_grid_diff_backends_agree():
    rng = np.random.default_rng(3)
    axes = np.vstack([np.linspace(-3, 3, 17)] * 3)
    counts = np.array([17, 17, 17], dtype=np.int64)
    s1, o1 = rng.uniform(0, 2, (5, 3)), rng.normal(size=5)
    s2, o2 = rng.uniform(0, 2, (4, 3)), rng.normal(size=4)
    a = K.grid_diff_numpy(axes, counts, s1, o1, s2, o2, 0, 17**3)
    b = K.grid_diff_numba(axes, counts, s1, o1, s2, o2, 0, 17**3)
    assert a[0] == pytest.approx(b[0], abs=1e-12) and a[1] == b[1]
    X = K.grid_points(axes, counts, np.arange(17**3))
    brute = np.abs((X @ s1.T + o1).max(1) - (X @ s2.T + o2).max(1))
    assert brute.max() == pytest.approx(a[0], abs=1e-12)
    assert int(np.argmax(brute)) == a[1]


def test_backend_flag():
    assert K.BACKEND in ("numba", "numpy")
    assert (K.simplex is K.simplex_numba) == K.USE_NUMBA


def test_numpy_fallback_selected_by_env():
    import os
    import subprocess
    import sys

    code = (
        "import numpy as np;"
        "from convexgreen import _kernels, corollary_suite, contains, simplex;"
        "assert _kernels.BACKEND == 'numpy';"
        "assert _kernels.simplex is _kernels.simplex_numpy;"
        "assert corollary_suite('siciak', {'count': 11}).passed;"
        "assert not contains(simplex(2).scaled(2), [1.0, 2.0])"
    )
    env = dict(os.environ, CONVEXGREEN_NUMBA="0")
    subprocess.run([sys.executable, "-c", code], env=env, check=True, timeout=300)
