"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is chosen once, at import time.  Set ``CONVEXGREEN_NUMBA=0`` to
force the numpy fallback (useful for debugging and for the benchmark in
``benchmarks/bench_kernels.py``).  Both variants of every kernel are always
importable under explicit ``*_numba`` / ``*_numpy`` names so they can be
compared side by side.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and os.environ.get("CONVEXGREEN_NUMBA", "1") != "0"
BACKEND = "numba" if USE_NUMBA else "numpy"

# simplex status codes
LP_OPTIMAL = 0
LP_INFEASIBLE = 1
LP_UNBOUNDED = 2
LP_ITERATION_LIMIT = 3

_PIVOT_EPS = 1e-12
_COST_EPS = 1e-11


def _njit(fn):
    if numba is None:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


# ---------------------------------------------------------------------------
# dense two-phase simplex
# ---------------------------------------------------------------------------

def _simplex(A, b, c, feas_tol, max_iter):
    """Solve ``min c.x  s.t.  A x = b, x >= 0`` by a dense two-phase simplex.

    Bland's rule throughout, so degenerate vertices cannot cycle.  Returns
    ``(status, x, objective, infeasibility)`` where ``infeasibility`` is the
    optimal phase-one value (sum of the artificial variables).
    """
    m, k = A.shape
    ncol = k + m + 1
    last = ncol - 1
    T = np.zeros((m + 1, ncol))
    basis = np.empty(m, dtype=np.int64)
    for i in range(m):
        sgn = 1.0 if b[i] >= 0.0 else -1.0
        for j in range(k):
            T[i, j] = sgn * A[i, j]
        T[i, k + i] = 1.0
        T[i, last] = sgn * b[i]
        basis[i] = k + i
    for j in range(k):
        T[m, j] = -np.sum(T[:m, j])
    T[m, last] = -np.sum(T[:m, last])

    x = np.zeros(k)
    infeas = np.inf
    for phase in range(2):
        if phase == 1:
            if infeas > feas_tol:
                return LP_INFEASIBLE, x, np.nan, infeas
            # drive zero-level artificials out of the basis where possible
            for i in range(m):
                if basis[i] >= k:
                    jbest = -1
                    vbest = 1e-9
                    for j in range(k):
                        if abs(T[i, j]) > vbest:
                            vbest = abs(T[i, j])
                            jbest = j
                    if jbest >= 0:
                        T[i, :] /= T[i, jbest]
                        col = T[:, jbest].copy()
                        col[i] = 0.0
                        T -= np.outer(col, T[i, :])
                        basis[i] = jbest
            T[m, :] = 0.0
            for j in range(k):
                T[m, j] = c[j]
            for i in range(m):
                if basis[i] < k and c[basis[i]] != 0.0:
                    T[m, :] -= c[basis[i]] * T[i, :]

        it = 0
        while True:
            enter = -1
            for j in range(k):
                if T[m, j] < -_COST_EPS:
                    enter = j
                    break
            if enter < 0:
                break
            if it >= max_iter:
                return LP_ITERATION_LIMIT, x, np.nan, infeas
            leave = -1
            best = np.inf
            for i in range(m):
                a = T[i, enter]
                if a > _PIVOT_EPS:
                    ratio = T[i, last] / a
                    if ratio < best - 1e-15:
                        best = ratio
                        leave = i
                    elif abs(ratio - best) <= 1e-15 and basis[i] < basis[leave]:
                        leave = i
            if leave < 0:
                return LP_UNBOUNDED, x, np.nan, infeas
            T[leave, :] /= T[leave, enter]
            col = T[:, enter].copy()
            col[leave] = 0.0
            T -= np.outer(col, T[leave, :])
            basis[leave] = enter
            it += 1
        if phase == 0:
            infeas = max(-T[m, last], 0.0)

    for i in range(m):
        if basis[i] < k:
            x[basis[i]] = T[i, last]
    return LP_OPTIMAL, x, -T[m, last], infeas


def _membership_batch(G, P, tol, max_iter):
    """For every row p of P decide whether p lies in the hull of the rows of G."""
    npts = P.shape[0]
    ngen, dim = G.shape
    A = np.ones((dim + 1, ngen))
    A[:dim, :] = G.T
    c = np.zeros(ngen)
    out = np.zeros(npts, dtype=np.bool_)
    b = np.ones(dim + 1)
    for r in range(npts):
        b[:dim] = P[r]
        status, _, _, _ = simplex_numpy(A, b, c, tol, max_iter)
        out[r] = status == LP_OPTIMAL
    return out


# ---------------------------------------------------------------------------
# max-affine comparison over tensor log-grids
# ---------------------------------------------------------------------------

def _grid_diff_loop(axes, counts, s1, o1, s2, o2, start, stop):
    """Max |f1 - f2| over flat grid indices [start, stop) in row-major order."""
    n = counts.shape[0]
    xi = np.empty(n)
    best = -1.0
    arg = start
    for flat in range(start, stop):
        r = flat
        for d in range(n - 1, -1, -1):
            xi[d] = axes[d, r % counts[d]]
            r //= counts[d]
        v1 = -np.inf
        for p in range(s1.shape[0]):
            acc = o1[p]
            for d in range(n):
                acc += s1[p, d] * xi[d]
            if acc > v1:
                v1 = acc
        v2 = -np.inf
        for p in range(s2.shape[0]):
            acc = o2[p]
            for d in range(n):
                acc += s2[p, d] * xi[d]
            if acc > v2:
                v2 = acc
        diff = abs(v1 - v2)
        if diff > best:
            best = diff
            arg = flat
    return best, arg


def grid_points(axes, counts, flat):
    """Log-grid coordinates of the given row-major flat indices."""
    idx = np.unravel_index(np.asarray(flat), tuple(int(c) for c in counts))
    return np.stack([axes[d][i] for d, i in enumerate(idx)], axis=-1)


def grid_diff_numpy(axes, counts, s1, o1, s2, o2, start, stop, chunk=1 << 16):
    best = -1.0
    arg = start
    for lo in range(start, stop, chunk):
        flat = np.arange(lo, min(stop, lo + chunk))
        X = grid_points(axes, counts, flat)
        v1 = (X @ s1.T + o1).max(axis=1)
        v2 = (X @ s2.T + o2).max(axis=1)
        diff = np.abs(v1 - v2)
        k = int(np.argmax(diff))
        if diff[k] > best:
            best = float(diff[k])
            arg = int(flat[k])
    return best, arg


simplex_numpy = _simplex
membership_batch_numpy = _membership_batch

if numba is not None:
    simplex_numba = _njit(_simplex)
    _simplex_nb_ref = simplex_numba

    def _membership_src(G, P, tol, max_iter):
        npts = P.shape[0]
        ngen, dim = G.shape
        A = np.ones((dim + 1, ngen))
        A[:dim, :] = G.T
        c = np.zeros(ngen)
        out = np.zeros(npts, dtype=np.bool_)
        b = np.ones(dim + 1)
        for r in range(npts):
            b[:dim] = P[r]
            status, _, _, _ = _simplex_nb_ref(A, b, c, tol, max_iter)
            out[r] = status == LP_OPTIMAL
        return out

    membership_batch_numba = _njit(_membership_src)
    grid_diff_numba = _njit(_grid_diff_loop)
else:  # pragma: no cover
    simplex_numba = None
    membership_batch_numba = None
    grid_diff_numba = None


if USE_NUMBA:
    simplex = simplex_numba
    membership_batch = membership_batch_numba
    grid_diff = grid_diff_numba
else:
    simplex = simplex_numpy
    membership_batch = membership_batch_numpy
    grid_diff = grid_diff_numpy
