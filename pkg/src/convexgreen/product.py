"""Both sides of the product formula V^S_K(z) = phi_T(V^{S_1}_{K_1}(z_1), ...).

The left side is exact (a :class:`MaxAffine` in Log z) for toric instances
and otherwise comes from the Bergman approximation in :mod:`.siciak`.  The
right side is assembled from per-factor closed forms.  Grids live in
log-modulus space; interval factors additionally sample phases.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math
import os

import numpy as np

from . import _kernels
from .bodies import (
    TAU_NUM,
    ConvexBody,
    ProductStructure,
    build_product_body,
    canonicalize,
    interval,
    lower_hull,
    same_body,
    simplex,
    support,
)
from .closed_forms import CompactFactorSpec, ProductCompact, v_block, v_polydisc_body
from .errors import InvalidArgumentError, UnsupportedConfigurationError
from .log_support import compose_support, constant, same_function
from .siciak import ApproxConfig, bergman_log, build_basis

WORKERS_ENV = "CONVEXGREEN_WORKERS"
GRID_POINT_CAP = 50_000_000
TABLE_POINT_CAP = 1_000_000


@dataclass(frozen=True, eq=False)
class TheoremInstance:
    ps: ProductStructure
    compacts: tuple
    weights: tuple = None

    def __post_init__(self):
        compacts = tuple(self.compacts)
        object.__setattr__(self, "compacts", compacts)
        if len(compacts) != self.ps.ell:
            raise InvalidArgumentError(f"{self.ps.ell} factors but {len(compacts)} compacts")
        for j, (s, k) in enumerate(zip(self.ps.factors, compacts)):
            if k.total_dim != s.dim:
                raise InvalidArgumentError(f"compact {j + 1} has dim {k.total_dim}, S_{j + 1} has dim {s.dim}")
        if self.weights is not None:
            w = tuple(float(q) for q in self.weights)
            if len(w) != self.ps.ell or not all(math.isfinite(q) for q in w):
                raise InvalidArgumentError("one finite constant weight per factor is required")
            object.__setattr__(self, "weights", w)

    @property
    def q(self):
        return np.zeros(self.ps.ell) if self.weights is None else np.array(self.weights)

    @property
    def inert_blocks(self):
        """Factors whose T-coordinate vanishes identically."""
        G = self.ps.t_body.generators
        return [j for j in range(self.ps.ell) if np.all(np.abs(G[:, j]) <= TAU_NUM)]

    @property
    def is_toric(self):
        inert = set(self.inert_blocks)
        return all(k.is_toric for j, k in enumerate(self.compacts) if j not in inert)

    def to_dict(self):
        out = {"ps": self.ps.to_dict(), "compacts": [k.to_dict() for k in self.compacts]}
        if self.weights is not None:
            out["weights"] = list(self.weights)
        return out

    @classmethod
    def from_dict(cls, data):
        try:
            ps = ProductStructure.from_dict(data["ps"])
            compacts = [ProductCompact.from_dict(k) for k in data["compacts"]]
        except (KeyError, TypeError):
            raise InvalidArgumentError("instance needs 'ps' and 'compacts'") from None
        return cls(ps, tuple(compacts), data.get("weights"))


@dataclass(frozen=True)
class GridSpec:
    lo: tuple
    hi: tuple
    counts: tuple
    phases: int = 8

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        counts = tuple(int(c) for c in self.counts)
        if not (len(lo) == len(hi) == len(counts)):
            raise InvalidArgumentError("lo, hi and counts need equal lengths")
        if any(c < 1 for c in counts) or self.phases < 1:
            raise InvalidArgumentError("grid counts must be >= 1")
        if not all(math.isfinite(v) for v in lo + hi):
            raise InvalidArgumentError("grid ranges must be finite")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def cube(cls, n, lo=-3.0, hi=3.0, count=41, phases=8):
        return cls((lo,) * n, (hi,) * n, (count,) * n, phases)

    @property
    def dim(self):
        return len(self.counts)

    @property
    def size(self):
        return int(np.prod(self.counts))

    def axes(self):
        """Padded (dim, max_count) array of axis coordinates."""
        A = np.zeros((self.dim, max(self.counts)))
        for d, (a, b, c) in enumerate(zip(self.lo, self.hi, self.counts)):
            A[d, :c] = np.linspace(a, b, c) if c > 1 else a
        return A

    def points(self, flat=None):
        if flat is None:
            if self.size > TABLE_POINT_CAP:
                raise InvalidArgumentError(f"grid of {self.size} points is too large to materialise")
            flat = np.arange(self.size)
        return _kernels.grid_points(self.axes(), np.array(self.counts), flat)

    def to_dict(self):
        return {"lo": list(self.lo), "hi": list(self.hi), "counts": list(self.counts), "phases": self.phases}

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(tuple(data["lo"]), tuple(data["hi"]), tuple(data["counts"]), int(data.get("phases", 8)))
        except (KeyError, TypeError):
            raise InvalidArgumentError("grid needs 'lo', 'hi' and 'counts'") from None


# ---------------------------------------------------------------------------
# the two sides
# ---------------------------------------------------------------------------

def factor_values(inst, z):
    """Per-factor V^{S_j}_{K_j}(z_j) + q_j, shape (k, l); inert factors give 0."""
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    if z.shape[1] != inst.ps.dim:
        raise InvalidArgumentError(f"points of dim {z.shape[1]} for an instance of dim {inst.ps.dim}")
    inert = set(inst.inert_blocks)
    cols = []
    for j, (s, k, blk) in enumerate(zip(inst.ps.factors, inst.compacts, inst.ps.blocks)):
        if j in inert:
            cols.append(np.zeros(len(z)))
        else:
            cols.append(v_block(s, k, z[:, blk]) + inst.q[j])
    return np.stack(cols, axis=-1)


def rhs_eval(inst, z):
    """phi_T(V_1(z_1) + q_1, ..., V_l(z_l) + q_l)."""
    z = np.asarray(z, dtype=complex)
    vals = support(inst.ps.t_body, factor_values(inst, z))
    return float(vals[0]) if z.ndim == 1 else vals


def _active_radii(inst):
    inert = set(inst.inert_blocks)
    radii = []
    for j, (s, k) in enumerate(zip(inst.ps.factors, inst.compacts)):
        radii.extend([1.0] * s.dim if j in inert else k.polydisc_radii())
    return np.array(radii)


def lhs_exact(inst):
    """V^S_{K,q} as a max-affine function of Log z for toric instances.

    V^S_{K,q} = V^S_K + phi_T(q) for constant weights.
    """
    if not inst.is_toric:
        raise UnsupportedConfigurationError("exact left side needs centred polydisc factors; use the approximation")
    body = canonicalize(build_product_body(inst.ps))
    f = v_polydisc_body(body, _active_radii(inst))
    if inst.weights is not None:
        f = f.shift(support(inst.ps.t_body, inst.q))
    return f


def rhs_exact(inst):
    """The right side composed as a max-affine function (toric instances)."""
    inert = set(inst.inert_blocks)
    parts = []
    for j, (s, k) in enumerate(zip(inst.ps.factors, inst.compacts)):
        if j in inert:
            parts.append(constant(s.dim))
        elif not k.is_toric:
            raise UnsupportedConfigurationError("exact right side needs centred polydisc factors")
        else:
            parts.append(v_polydisc_body(s, k.polydisc_radii()).shift(inst.q[j]))
    return compose_support(inst.ps.t_body, parts)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass
class TheoremReport:
    path: str
    max_error: float
    argmax: list
    passed: bool
    tol: float
    grid: dict
    canonical_equal: bool = None
    inert_blocks: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    rows: np.ndarray = None

    def to_dict(self):
        out = {
            "path": self.path,
            "max_error": self.max_error,
            "argmax": list(self.argmax),
            "pass": self.passed,
            "tol": self.tol,
            "grid": self.grid,
            "canonical_equal": self.canonical_equal,
            "inert_blocks": list(self.inert_blocks),
        }
        if self.extras:
            out["extras"] = self.extras
        return out

    def to_csv(self):
        if self.rows is None:
            raise InvalidArgumentError("report carries no per-point table")
        n = self.rows.shape[1] - 3
        lines = [",".join([f"xi{d + 1}" for d in range(n)] + ["lhs", "rhs", "diff"])]
        lines += [",".join(f"{v:.17g}" for v in r) for r in self.rows]
        return "\n".join(lines) + "\n"


def _workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def grid_max_diff(f, g, grid, workers=None):
    """max over the grid of |f - g| for two max-affine functions, with its flat index."""
    if f.dim != grid.dim or g.dim != grid.dim:
        raise InvalidArgumentError("grid and function dimensions differ")
    if grid.size > GRID_POINT_CAP:
        raise InvalidArgumentError(f"grid of {grid.size} points exceeds cap {GRID_POINT_CAP}")
    axes, counts = grid.axes(), np.array(grid.counts, dtype=np.int64)
    args = (axes, counts, np.ascontiguousarray(f.slopes), np.ascontiguousarray(f.offsets),
            np.ascontiguousarray(g.slopes), np.ascontiguousarray(g.offsets))
    workers = workers or _workers()
    total = grid.size
    if workers == 1 or total < 100_000:
        best, arg = _kernels.grid_diff(*args, 0, total)
    else:
        cuts = np.linspace(0, total, workers + 1).astype(np.int64)
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda ab: _kernels.grid_diff(*args, int(ab[0]), int(ab[1])), zip(cuts[:-1], cuts[1:])))
        best, arg = max(parts, key=lambda p: (p[0], -p[1]))
    return float(best), int(arg)


def _exact_table(f, g, grid):
    X = grid.points()
    lhs, rhs = f(X), g(X)
    return np.column_stack([X, lhs, rhs, lhs - rhs])


def verify_theorem(inst, grid, tol=None, lhs_body=None, cfg=None, table=False):
    """Compare both sides of the product formula over ``grid``.

    Toric instances take the exact path: canonical piece sets are compared
    and the pointwise error is streamed over the full log-grid.  Other
    instances use the Bergman approximation of degree ``cfg.m`` with inert
    blocks dropped.  ``lhs_body`` replaces the product body on the left,
    which is how a wrong identification of S is exhibited.
    """
    if grid.dim != inst.ps.dim:
        raise InvalidArgumentError(f"grid dim {grid.dim} but instance dim {inst.ps.dim}")
    inert = inst.inert_blocks
    if inst.is_toric:
        tol = TAU_NUM if tol is None else tol
        lhs = lhs_exact(inst)
        if lhs_body is not None:
            lhs = v_polydisc_body(lhs_body, _active_radii(inst))
            if inst.weights is not None:
                lhs = lhs.shift(support(inst.ps.t_body, inst.q))
        rhs = rhs_exact(inst)
        canon = same_function(lhs, rhs)
        err, flat = grid_max_diff(lhs, rhs, grid)
        arg = grid.points(np.array([flat]))[0]
        rows = _exact_table(lhs, rhs, grid) if table else None
        return TheoremReport("exact", err, arg.tolist(), bool(err <= tol and canon), tol, grid.to_dict(),
                             canon, inert, {"lhs_pieces": len(lhs.canonical()), "rhs_pieces": len(rhs)}, rows)

    if lhs_body is not None:
        raise UnsupportedConfigurationError("a left-side body override needs a toric instance")
    cfg = cfg or ApproxConfig(m=8)
    active = [j for j in range(inst.ps.ell) if j not in inert]
    X = grid.points()
    rng_phase = 2 * np.pi * np.arange(grid.phases) / grid.phases
    needs_phase = np.zeros(inst.ps.dim, dtype=bool)
    for k, blk in zip(inst.compacts, inst.ps.blocks):
        if not k.is_toric:
            needs_phase[blk] = True
    Z = []
    for th in rng_phase:
        Z.append(np.exp(X + 1j * np.where(needs_phase, th + 0.1, 0.0)))
    Z = np.vstack(Z)
    Xall = np.vstack([X] * grid.phases)
    rhs = rhs_eval(inst, Z)
    if active:
        sub_t = ConvexBody(inst.ps.t_body.generators[:, active])
        sub_ps = ProductStructure(sub_t, tuple(inst.ps.factors[j] for j in active))
        sub_k = [inst.compacts[j] for j in active]
        cols = np.concatenate([np.arange(inst.ps.dim)[inst.ps.blocks[j]] for j in active])
        basis = build_basis(cfg, sub_ps, sub_k)
        lhs = bergman_log(basis, Z[:, cols]) + support(inst.ps.t_body, inst.q)
        lattice_size = len(basis.lattice)
    else:
        lhs = np.full(len(Z), support(inst.ps.t_body, inst.q))
        lattice_size = 1
    if tol is None:
        tol = math.log(max(lattice_size, 2)) / (2 * cfg.m) + 0.1
    diff = np.abs(lhs - rhs)
    k = int(np.argmax(diff))
    rows = np.column_stack([Xall, lhs, rhs, lhs - rhs]) if table else None
    return TheoremReport("approx", float(diff[k]), Xall[k].tolist(), bool(diff[k] <= tol), tol, grid.to_dict(),
                         None, inert, {"m": cfg.m, "lattice_size": lattice_size}, rows)


# ---------------------------------------------------------------------------
# corollaries
# ---------------------------------------------------------------------------

def quarter_ball(p, vertices):
    """Inscribed polytope of {x >= 0 : ||x||_p <= 1} in the plane.

    ``vertices`` points on the quarter arc plus the origin; the support of
    the polygon under-estimates the q-norm of xi^+ (1/p + 1/q = 1).
    """
    if vertices < 2:
        raise InvalidArgumentError("need at least two arc vertices")
    th = np.linspace(0.0, np.pi / 2, vertices)
    c, s = np.cos(th), np.sin(th)
    r = (np.abs(c) ** p + np.abs(s) ** p) ** (-1.0 / p)
    arc = np.column_stack([r * c, r * s])
    arc[0] = (1.0, 0.0)
    arc[-1] = (0.0, 1.0)
    return ConvexBody(np.vstack([[0.0, 0.0], arc]), label=f"quarter {p}-ball")


def _unit_discs(n):
    return tuple(ProductCompact((CompactFactorSpec.disc(0j, 1.0),)) for _ in range(n))


def corollary_suite(name, params=None):
    """Instantiate one corollary of the product formula and verify it.

    ``siciak``: T = simplex, S_j = [0, 1], V = max_j V_{K_j}.
    ``sum``: T = {(1, ..., 1)}, V = sum_j V_{K_j}.
    ``lowerhull``: T = S, S_j = [0, 1]; the left side uses the lower hull of S.
    ``pnorm``: T = inscribed quarter p-ball, checks V^q = sum V_j^q.
    """
    params = dict(params or {})
    n = int(params.get("n", 2))
    grid = GridSpec.cube(n, params.get("lo", -3.0), params.get("hi", 3.0), int(params.get("count", 41)))
    factors = tuple(interval(0.0, 1.0) for _ in range(n))
    if name == "siciak":
        inst = TheoremInstance(ProductStructure(simplex(n), factors), _unit_discs(n))
        rep = verify_theorem(inst, grid)
        X = grid.points(np.arange(0, grid.size, max(1, grid.size // 1000)))
        direct = np.max(np.maximum(X, 0.0), axis=1)
        rep.extras["closed_form_error"] = float(np.max(np.abs(lhs_exact(inst)(X) - direct)))
    elif name == "sum":
        inst = TheoremInstance(ProductStructure(ConvexBody(np.ones((1, n))), factors), _unit_discs(n))
        rep = verify_theorem(inst, grid)
        X = grid.points(np.arange(0, grid.size, max(1, grid.size // 1000)))
        direct = np.sum(np.maximum(X, 0.0), axis=1)
        rep.extras["closed_form_error"] = float(np.max(np.abs(lhs_exact(inst)(X) - direct)))
    elif name == "lowerhull":
        if "body" in params:
            S = params["body"] if isinstance(params["body"], ConvexBody) else ConvexBody.from_dict(params["body"])
        else:
            a = float(params.get("a", 0.5))
            S = ConvexBody(np.array([[0, 0], [1, 0], [1, 1], [0, a]], dtype=float))
        if S.dim != n:
            grid = GridSpec.cube(S.dim, grid.lo[0], grid.hi[0], grid.counts[0])
            factors = tuple(interval(0.0, 1.0) for _ in range(S.dim))
        inst = TheoremInstance(ProductStructure(S, factors), _unit_discs(S.dim))
        hull = lower_hull(S)
        rep = verify_theorem(inst, grid, lhs_body=hull)
        rep.extras["product_body_is_lower_hull"] = same_body(canonicalize(build_product_body(inst.ps)), hull)
        rep.passed = rep.passed and rep.extras["product_body_is_lower_hull"]
    elif name == "pnorm":
        p = float(params.get("p", 2.0))
        verts = int(params.get("vertices", 64))
        q = p / (p - 1.0)
        T = quarter_ball(p, verts)
        inst = TheoremInstance(ProductStructure(T, factors[:2]), _unit_discs(2))
        rep = verify_theorem(inst, GridSpec.cube(2, grid.lo[0], grid.hi[0], grid.counts[0]))
        side = int(params.get("points_side", 10))
        lo, hi = float(params.get("plo", 0.1)), float(params.get("phi", 3.0))
        pg = GridSpec((lo, lo), (hi, hi), (side, side))
        X = pg.points()
        lhs = lhs_exact(inst)(X)
        target = np.sum(np.maximum(X, 0.0) ** q, axis=1)
        ident = np.abs(lhs**q - target)
        ptol = float(params.get("identity_tol", 5e-3))
        rep.extras.update({
            "identity_max_error": float(ident.max()),
            "identity_points": int(len(X)),
            "identity_tol": ptol,
            "one_sided": bool(np.all(lhs <= target ** (1.0 / q) + TAU_NUM)),
        })
        rep.passed = rep.passed and float(ident.max()) <= ptol
    else:
        raise InvalidArgumentError(f"unknown corollary {name!r}")
    rep.extras["corollary"] = name
    return rep
