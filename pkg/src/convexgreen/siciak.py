"""Polynomial approximation of extremal functions with convex-body growth.

Polynomials in P^S_m have exponents in the lattice class ``mS ∩ N^n``.  An
orthonormal basis for them is built factor by factor: monomials of each
factor are ordered by their gauge (smallest t with alpha in tS_j), then
Gram-Schmidt orthonormalised against a quadrature measure on the compact
factor, and the product basis is indexed by the lattice class.  The Bergman
sum ``(1/2m) log sum |p_alpha(z)|^2`` then approximates V^S_K(z).
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import _kernels
from .bodies import (
    TAU_MEM,
    TAU_NUM,
    _solve,
    build_product_body,
    canonicalize,
    contains_many,
    gauge,
    support,
)
from .closed_forms import v_polydisc_body
from .errors import InvalidArgumentError, QuadratureError, ResourceError, UnsupportedConfigurationError

TAU_GRAM = 1e-8
MAX_LATTICE_DIM = 4
DEFAULT_BOX_BUDGET = 2_000_000


@dataclass(frozen=True, eq=False)
class LatticeClass:
    body: object
    m: int
    points: np.ndarray
    sigma: float

    def __len__(self):
        return len(self.points)

    @property
    def count_bound(self):
        """(m sigma_S + 1)^n, the a-priori bound on the number of exponents."""
        return (self.m * self.sigma + 1.0) ** self.body.dim


def _box(upper):
    axes = [np.arange(u + 1) for u in upper]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(upper))


def enumerate_lattice(body, m, budget=DEFAULT_BOX_BUDGET, max_dim=MAX_LATTICE_DIM):
    """All alpha in (m*body) ∩ N^n, in lexicographic order."""
    if int(m) != m or m < 1:
        raise InvalidArgumentError("degree m must be a positive integer")
    m = int(m)
    n = body.dim
    if n > max_dim:
        raise ResourceError(f"lattice enumeration limited to n <= {max_dim} (got {n})")
    sigma = float(support(body, np.ones(n)))
    top = int(math.ceil(m * sigma - 1e-9))
    box_size = (top + 1) ** n
    if box_size > budget:
        raise ResourceError(f"integer box of {box_size} points exceeds budget {budget}")
    box = _box([top] * n)
    inside = contains_many(body.scaled(m), box.astype(float))
    return LatticeClass(body, m, box[inside], sigma)


def graded_indices(body, radius):
    """Exponents beta with gauge_body(beta) <= radius, sorted by (gauge, lex).

    Returns ``(indices, grading)``.  This is a finite initial segment of the
    ordering kappa used for the Gram-Schmidt process.
    """
    n = body.dim
    sigma = float(support(body, np.ones(n)))
    top = int(math.floor(radius * sigma + 1e-9))
    box = _box([top] * n)
    inside = contains_many(body.scaled(radius), box.astype(float)) if radius > 0 else ~box.any(axis=1)
    box = box[inside]
    grading = np.array([gauge(body, b) for b in box.astype(float)])
    order = np.lexsort(tuple(box[:, d] for d in range(n - 1, -1, -1)) + (np.round(grading, 9),))
    return box[order], grading[order]


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def _nodes_1d(spec, degree, count=None):
    """Nodes and weights for one coordinate of a compact factor."""
    N = count or 2 * degree + 1
    if spec.kind == "interval":
        k = np.arange(1, N + 1)
        x = np.cos((2 * k - 1) * np.pi / (2 * N))
        pts = 0.5 * (spec.a + spec.b) + 0.5 * (spec.b - spec.a) * x
        return pts.astype(complex), np.full(N, 1.0 / N)
    theta = 2 * np.pi * np.arange(N) / N
    return np.exp(1j * theta), np.full(N, 1.0 / N)


def factor_quadrature(compact, degrees, counts=None):
    """Tensor-product nodes (shape (N, dim)) and weights on the compact.

    Discs and polydiscs get the uniform measure on their distinguished
    boundary torus; intervals get Chebyshev (arcsine) nodes.
    """
    coords, weights = [], []
    d = 0
    for spec in compact.factors:
        if spec.kind == "polydisc":
            for r in spec.radii:
                pts, w = _nodes_1d(spec, degrees[d], counts and counts[d])
                coords.append(r * pts)
                weights.append(w)
                d += 1
        elif spec.kind == "disc":
            pts, w = _nodes_1d(spec, degrees[d], counts and counts[d])
            coords.append(spec.center + spec.radius * pts)
            weights.append(w)
            d += 1
        else:
            pts, w = _nodes_1d(spec, degrees[d], counts and counts[d])
            coords.append(pts)
            weights.append(w)
            d += 1
    grids = np.meshgrid(*coords, indexing="ij")
    nodes = np.stack([g.reshape(-1) for g in grids], axis=-1)
    wgrids = np.meshgrid(*weights, indexing="ij")
    w = np.prod(np.stack([g.reshape(-1) for g in wgrids], axis=-1), axis=1)
    return nodes, w


def _monomials(nodes, exps):
    out = np.ones((len(nodes), len(exps)), dtype=complex)
    for d in range(exps.shape[1]):
        out *= nodes[:, [d]] ** exps[:, d][None, :]
    return out


def gram_schmidt(V, w, floor=1e-12):
    """Weighted classical Gram-Schmidt with one re-orthogonalisation pass.

    Columns of ``V`` are processed in order; returns the lower-triangular
    coefficient matrix ``C`` with orthonormal columns ``V @ C.T``.
    """
    nn, k = V.shape
    Q = np.zeros((nn, k), dtype=complex)
    C = np.zeros((k, k), dtype=complex)
    for j in range(k):
        v = V[:, j].copy()
        c = np.zeros(k, dtype=complex)
        c[j] = 1.0
        base = math.sqrt(float(np.sum(w * np.abs(v) ** 2)))
        for _ in range(2):
            h = Q[:, :j].conj().T @ (w * v)
            v = v - Q[:, :j] @ h
            c[:j] -= h @ C[:j, :j]
        nrm = math.sqrt(float(np.sum(w * np.abs(v) ** 2)))
        if base == 0.0 or nrm < floor * base:
            raise QuadratureError(f"monomial {j} is numerically dependent on its predecessors")
        Q[:, j] = v / nrm
        C[j] = c / nrm
    return C


# ---------------------------------------------------------------------------
# basis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ApproxConfig:
    m: int
    node_counts: tuple = None
    reg_floor: float = 1e-12
    q: float = 0.0
    verify_decomposition: bool = True


@dataclass(eq=False)
class FactorBasis:
    indices: np.ndarray
    grading: np.ndarray
    coeffs: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray

    def gram(self):
        P = _monomials(self.nodes, self.indices) @ self.coeffs.T
        return P.conj().T @ (self.weights[:, None] * P)

    def gram_error(self):
        G = self.gram()
        return float(np.max(np.abs(G - np.eye(len(G)))))

    def is_graded(self):
        return bool(np.all(np.diff(self.grading) >= -TAU_NUM))

    def triangular_ok(self, tol=1e-12):
        """Each p_beta only uses monomials of grading <= grading(beta)."""
        big = np.abs(self.coeffs) > tol
        for k in range(len(self.grading)):
            used = np.flatnonzero(big[k])
            if used.size and np.any(self.grading[used] > self.grading[k] + TAU_NUM):
                return False
        return True


@dataclass(eq=False)
class GradedBasis:
    m: int
    lattice: LatticeClass
    factors: list
    lookup: np.ndarray
    blocks: list = field(default_factory=list)

    @property
    def sigma(self):
        return self.lattice.sigma


def _decomposes(ps, alpha, m):
    """LP: exists x in T with alpha_j in m x_j S_j for every block j."""
    tg = ps.t_body.generators
    nT = len(tg)
    cols = nT + sum(len(s) + 1 for s in ps.factors)
    rows = 1 + sum(s.dim + 1 for s in ps.factors)
    A = np.zeros((rows, cols))
    b = np.zeros(rows)
    A[0, :nT] = 1.0
    b[0] = 1.0
    r, c = 1, nT
    for j, (s, blk) in enumerate(zip(ps.factors, ps.blocks)):
        k = len(s)
        A[r : r + s.dim, c : c + k] = m * s.generators.T
        b[r : r + s.dim] = alpha[blk]
        r += s.dim
        A[r, c : c + k] = 1.0
        A[r, c + k] = 1.0
        A[r, :nT] = -tg[:, j]
        r += 1
        c += k + 1
    status, _, _ = _solve(A, b, np.zeros(cols), TAU_MEM)
    return status == _kernels.LP_OPTIMAL


def build_basis(cfg, ps, compacts):
    """Orthonormal product basis {p_alpha : alpha in mS ∩ N^n}."""
    if len(compacts) != ps.ell:
        raise InvalidArgumentError("one compact per factor is required")
    for s, k in zip(ps.factors, compacts):
        if k.total_dim != s.dim:
            raise InvalidArgumentError("compact and growth body dimensions differ")
    S = canonicalize(build_product_body(ps))
    lattice = enumerate_lattice(S, cfg.m)
    if cfg.verify_decomposition:
        for alpha in lattice.points.astype(float):
            if not _decomposes(ps, alpha, cfg.m):
                raise AssertionError(f"lattice point {alpha} has no block decomposition")

    factors, lookup = [], np.zeros((len(lattice), ps.ell), dtype=np.int64)
    count_offset = 0
    for j, (s, blk, k) in enumerate(zip(ps.factors, ps.blocks, compacts)):
        proj = lattice.points[:, blk]
        radius = max((gauge(s, a) for a in np.unique(proj, axis=0).astype(float)), default=0.0)
        idx, grading = graded_indices(s, radius)
        pos = {tuple(b): i for i, b in enumerate(idx)}
        try:
            lookup[:, j] = [pos[tuple(a)] for a in proj]
        except KeyError as exc:
            raise AssertionError(f"projection {exc} missing from factor index set") from None
        degrees = idx.max(axis=0) if len(idx) else np.zeros(s.dim, dtype=int)
        counts = None
        if cfg.node_counts is not None:
            counts = cfg.node_counts[count_offset : count_offset + s.dim]
        count_offset += s.dim
        nodes, w = factor_quadrature(k, [int(d) for d in degrees], counts)
        V = _monomials(nodes, idx)
        try:
            C = gram_schmidt(V, w, cfg.reg_floor)
        except QuadratureError as exc:
            need = [2 * int(d) + 1 for d in degrees]
            raise QuadratureError(f"{exc}; at least {need} nodes per coordinate needed", need) from None
        factors.append(FactorBasis(idx, grading, C, nodes, w))
    return GradedBasis(cfg.m, lattice, factors, lookup, list(ps.blocks))


def _log_factor_values(fb, zb):
    """log|p_beta(z)| for every point (rows) and basis element (columns)."""
    with np.errstate(divide="ignore"):
        L = np.log(np.abs(zb))
    neg = np.isneginf(L)
    E = fb.indices.astype(float)
    logmag = np.where(neg, 0.0, L) @ E.T
    killed = (neg.astype(float) @ (E > 0).T.astype(float)) > 0
    logmag = np.where(killed, -np.inf, logmag)
    top = logmag.max(axis=1, keepdims=True)
    phase = np.angle(zb) @ E.T
    scaled = np.where(killed, 0.0, np.exp(logmag - top)) * np.exp(1j * phase)
    vals = scaled @ fb.coeffs.T
    with np.errstate(divide="ignore"):
        return np.log(np.abs(vals)) + top


def bergman_log(basis, z):
    """(1/2m) log sum_alpha |p_alpha(z)|^2 at the rows of ``z``."""
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    total = np.zeros((len(z), len(basis.lattice)))
    for j, (fb, blk) in enumerate(zip(basis.factors, basis.blocks)):
        total += _log_factor_values(fb, z[:, blk])[:, basis.lookup[:, j]]
    top = total.max(axis=1, keepdims=True)
    lse = top[:, 0] + 0.5 * np.log(np.sum(np.exp(2.0 * (total - top)), axis=1))
    return lse / basis.m


def approx_v(cfg, ps, compacts, z, basis=None):
    """Bergman-sum approximation of V^S_{K,q}(z) for constant weight ``cfg.q``."""
    if basis is None:
        basis = build_basis(cfg, ps, compacts)
    z = np.asarray(z, dtype=complex)
    out = bergman_log(basis, z) + cfg.q
    return float(out[0]) if z.ndim == 1 else out


def exact_toric(ps, compacts):
    """V^S_K as a max-affine function of Log z when every factor is a centred polydisc."""
    if not all(k.is_toric for k in compacts):
        raise UnsupportedConfigurationError("exact reference needs centred polydisc factors")
    radii = [r for k in compacts for r in k.polydisc_radii()]
    return v_polydisc_body(canonicalize(build_product_body(ps)), radii)


# ---------------------------------------------------------------------------
# Bernstein-Walsh and convergence
# ---------------------------------------------------------------------------

@dataclass
class BernsteinWalshReport:
    trials: int
    points: int
    violations: int
    max_ratio: float
    sampling_margin: float
    slack: float
    grid: tuple

    @property
    def passed(self):
        return self.violations == 0

    def to_dict(self):
        return {
            "trials": self.trials,
            "points": self.points,
            "violations": self.violations,
            "max_ratio": self.max_ratio,
            "sampling_margin": self.sampling_margin,
            "slack": self.slack,
            "grid": list(self.grid),
            "pass": self.passed,
        }


def torus_sup(coeffs, exps, radii, grid):
    """Sampled sup of |sum c_alpha z^alpha| on the torus {|z_i| = r_i} via FFT."""
    arr = np.zeros(grid, dtype=complex)
    scale = np.exp(exps @ np.log(radii))
    np.add.at(arr, tuple(exps.T), coeffs * scale)
    vals = np.fft.ifftn(arr) * np.prod(grid)
    return float(np.abs(vals).max())


def sampling_margin(exps, grid):
    """Factor bounding true sup / sampled sup for the grid.

    Shifting each frequency range to be centred costs nothing in modulus, so
    a coordinate of degree D behaves like a trigonometric polynomial of
    degree D/2; Bernstein's inequality on a grid of spacing 2 pi/N then gives
    sup <= sampled / (1 - sum_i (pi/(2 N_i)) D_i).
    """
    D = exps.max(axis=0)
    loss = float(np.sum(np.pi * D / (2.0 * np.asarray(grid))))
    if loss >= 1.0:
        raise InvalidArgumentError("torus grid too coarse for a sampling margin")
    return 1.0 / (1.0 - loss)


def bernstein_walsh_check(ps, compacts, m, trials, points=100, rng=None, slack=1e-6, grid=None):
    """Test |f(z)| <= ||f||_K exp(m V(z)) for random f in P^S_m (toric instances).

    ``||f||_K`` is the FFT-sampled torus maximum inflated by
    :func:`sampling_margin`; V is the exact toric extremal function, and the
    exponent is evaluated in the product form phi_T(V_1, ..., V_l) as well.
    """
    rng = np.random.default_rng(rng)
    ref = exact_toric(ps, compacts)
    radii = np.array([r for k in compacts for r in k.polydisc_radii()])
    S = canonicalize(build_product_body(ps))
    lat = enumerate_lattice(S, m)
    exps = lat.points
    n = S.dim
    if grid is None:
        D = np.maximum(exps.max(axis=0), 1)
        grid = tuple(int(max(16, 2 ** math.ceil(math.log2(np.pi * d * n / (2 * 0.05))))) for d in D)
    margin = sampling_margin(exps, grid)

    # external points: at least one coordinate outside its disc
    xi = rng.uniform(-1.0, 2.0, size=(4 * points, n)) + np.log(radii)
    xi = xi[np.any(xi > np.log(radii) + 1e-3, axis=1)][:points]
    z = np.exp(xi + 1j * rng.uniform(0, 2 * np.pi, size=xi.shape))
    v_exact = ref(xi)
    v_prod = np.max(
        np.stack(
            [
                sum(t[j] * v_polydisc_body(s, radii[blk])(xi[:, blk]) for j, (s, blk) in enumerate(zip(ps.factors, ps.blocks)))
                for t in ps.t_body.generators
            ]
        ),
        axis=0,
    )
    if np.max(np.abs(v_exact - v_prod)) > 1e-9:
        raise AssertionError("product form of the exponent disagrees with V^S_K")

    monos = np.prod(z[:, None, :] ** exps[None, :, :], axis=2)
    violations = 0
    worst = 0.0
    for _ in range(trials):
        c = rng.standard_normal(len(exps)) + 1j * rng.standard_normal(len(exps))
        sup = torus_sup(c, exps, radii, grid) * margin
        fz = np.abs(monos @ c)
        bound = sup * np.exp(m * v_exact)
        ratio = fz / bound
        worst = max(worst, float(ratio.max()))
        violations += int(np.sum(ratio > 1.0 + slack))
    return BernsteinWalshReport(trials, len(z), violations, worst, margin, slack, tuple(grid))


@dataclass
class SweepTable:
    rows: list
    fitted_c: float
    monotone: bool

    def to_csv(self):
        lines = ["m,max_error,argmax"]
        for m, err, arg in self.rows:
            lines.append(f"{m},{err:.17g},\"{' '.join(f'{v:.17g}' for v in arg)}\"")
        return "\n".join(lines) + "\n"

    def to_dict(self):
        return {
            "rows": [{"m": m, "max_error": e, "argmax": list(a)} for m, e, a in self.rows],
            "fitted_c": self.fitted_c,
            "monotone": self.monotone,
        }


def convergence_sweep(ms, ps, compacts, xi_points, node_counts=None):
    """Max error of the Bergman approximation against the exact toric reference.

    ``xi_points`` are log-modulus points (phase zero).  The table is
    ``(m, max_error, argmax)``; ``monotone`` checks err(m) <= err(m/2) + tau
    whenever both degrees are present, and ``fitted_c`` is the smallest C
    with err(m) <= C log(m)/m over the rows with m >= 2.
    """
    xi_points = np.atleast_2d(np.asarray(xi_points, dtype=float))
    ref = exact_toric(ps, compacts)(xi_points)
    z = np.exp(xi_points.astype(complex))
    rows = []
    for m in ms:
        approx = approx_v(ApproxConfig(m=int(m), node_counts=node_counts, verify_decomposition=False), ps, compacts, z)
        err = np.abs(approx - ref)
        k = int(np.argmax(err))
        rows.append((int(m), float(err[k]), xi_points[k].tolist()))
    by_m = {m: e for m, e, _ in rows}
    monotone = all(by_m[m] <= by_m[m // 2] + TAU_NUM for m in by_m if m % 2 == 0 and m // 2 in by_m)
    ratios = [e * m / math.log(m) for m, e, _ in rows if m >= 2]
    fitted = max(ratios) if ratios else 0.0
    return SweepTable(rows, fitted, monotone)
