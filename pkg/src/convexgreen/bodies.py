"""Generator-represented compact convex bodies in the nonnegative orthant.

A :class:`ConvexBody` is the convex hull of a finite list of generators.  All
queries go through the support function (a max over generators) or through
small dense LPs; no facet enumeration is ever performed.
"""

from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from . import _kernels
from .errors import (
    DegenerateBodyError,
    InvalidArgumentError,
    SolverError,
)

TAU_NUM = 1e-9
TAU_MEM = 1e-8
LP_MAX_ITER = 5000
MAX_LOWER_HULL_DIM = 8

_CANON_DIRECTIONS = 64


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """Convex hull of ``generators`` (shape ``(k, dim)``) inside R^dim_+."""

    generators: np.ndarray
    label: str = ""
    dim: int = field(init=False)

    def __post_init__(self):
        g = np.array(self.generators, dtype=float, copy=True)
        if g.ndim == 1:
            g = g.reshape(1, -1)
        if g.ndim != 2 or g.shape[0] == 0 or g.shape[1] == 0:
            raise InvalidArgumentError("a body needs a nonempty 2-D generator array")
        if not np.all(np.isfinite(g)):
            raise InvalidArgumentError("generator coordinates must be finite")
        if np.any(g < -TAU_NUM):
            raise InvalidArgumentError("generators must lie in the nonnegative orthant")
        g[g < 0] = 0.0
        g.setflags(write=False)
        object.__setattr__(self, "generators", g)
        object.__setattr__(self, "dim", g.shape[1])

    def __repr__(self):
        name = f" {self.label!r}" if self.label else ""
        return f"<ConvexBody{name} dim={self.dim} generators={len(self.generators)}>"

    def __len__(self):
        return len(self.generators)

    def scaled(self, t):
        """The body ``t * self`` for ``t >= 0``."""
        if t < 0:
            raise InvalidArgumentError("scale factor must be nonnegative")
        return ConvexBody(t * self.generators, label=f"{t:g}*{self.label}" if self.label else "")

    def to_dict(self):
        return {
            "dim": int(self.dim),
            "generators": [[float(v) for v in row] for row in self.generators],
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            gens = data["generators"]
        except (KeyError, TypeError):
            raise InvalidArgumentError("body JSON needs a 'generators' list") from None
        body = cls(np.asarray(gens, dtype=float), label=data.get("label", "") or "")
        if "dim" in data and int(data["dim"]) != body.dim:
            raise InvalidArgumentError(
                f"declared dim {data['dim']} does not match generators of length {body.dim}"
            )
        return body


def simplex(n, label=None):
    """The standard simplex ch{0, e_1, ..., e_n}."""
    return ConvexBody(np.vstack([np.zeros(n), np.eye(n)]), label=label or f"Sigma_{n}")


def simplex_x(x, label=None):
    """ch{0, x_1 e_1, ..., x_n e_n}."""
    x = np.asarray(x, dtype=float)
    return ConvexBody(np.vstack([np.zeros(len(x)), np.diag(x)]), label=label or "Sigma_x")


def cube(n, side=1.0, label=None):
    """The box [0, side]^n."""
    gens = np.array(list(itertools.product([0.0, side], repeat=n)))
    return ConvexBody(gens, label=label or f"[0,{side:g}]^{n}")


def interval(a, b, label=None):
    """The one-dimensional body [a, b] with 0 <= a <= b."""
    if not 0 <= a <= b:
        raise InvalidArgumentError("interval needs 0 <= a <= b")
    return ConvexBody(np.array([[a], [b]]), label=label or f"[{a:g},{b:g}]")


def point(p, label=None):
    return ConvexBody(np.asarray(p, dtype=float).reshape(1, -1), label=label or "point")


def support(body, xi):
    """Supporting function: max over generators of <g, xi>.

    ``xi`` may be a single direction of length ``dim`` or a stack of shape
    ``(k, dim)``; the result is a float or an array of length ``k``.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1:] != (body.dim,) or xi.ndim > 2:
        raise InvalidArgumentError(
            f"direction of shape {xi.shape} does not match body dimension {body.dim}"
        )
    vals = (xi @ body.generators.T).max(axis=-1)
    if xi.ndim == 1:
        return float(vals)
    return vals


# ---------------------------------------------------------------------------
# LP-backed queries
# ---------------------------------------------------------------------------

def _solve(A, b, c, tol=TAU_MEM):
    status, x, obj, infeas = _kernels.simplex(
        np.ascontiguousarray(A, dtype=float),
        np.ascontiguousarray(b, dtype=float),
        np.ascontiguousarray(c, dtype=float),
        tol,
        LP_MAX_ITER,
    )
    if status == _kernels.LP_ITERATION_LIMIT:
        raise SolverError("simplex iteration limit reached")
    return status, x, obj


def _separating_directions(dim):
    rng = np.random.default_rng(12345)
    dirs = rng.standard_normal((_CANON_DIRECTIONS, dim))
    return np.vstack([np.eye(dim), -np.eye(dim), dirs])


def contains_many(body, points, tol=TAU_MEM):
    """Vectorised membership: boolean array, one entry per row of ``points``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.shape[1] != body.dim:
        raise InvalidArgumentError(
            f"points of dimension {P.shape[1]} tested against body of dimension {body.dim}"
        )
    G = body.generators
    out = np.zeros(len(P), dtype=bool)
    if len(P) == 0:
        return out
    # cheap rejection by support separation before any LP
    D = _separating_directions(body.dim)
    phi = (D @ G.T).max(axis=1)
    slack = (P @ D.T) - phi
    scale = 1.0 + np.abs(D).sum(axis=1)
    maybe = np.all(slack <= tol * scale, axis=1)
    idx = np.flatnonzero(maybe)
    if len(idx):
        if len(G) == 1:
            out[idx] = np.abs(P[idx] - G[0]).sum(axis=1) <= tol
        else:
            out[idx] = _kernels.membership_batch(
                np.ascontiguousarray(G), np.ascontiguousarray(P[idx]), tol, LP_MAX_ITER
            )
    return out


def contains(body, p, tol=TAU_MEM):
    """True iff ``p`` lies in the hull of the generators (within ``tol``)."""
    p = np.asarray(p, dtype=float)
    if p.shape != (body.dim,):
        raise InvalidArgumentError(
            f"point of shape {p.shape} tested against body of dimension {body.dim}"
        )
    return bool(contains_many(body, p.reshape(1, -1), tol)[0])


def gauge(body, beta):
    """Minkowski gauge ``inf{t >= 0 : beta in t*body}`` (needs 0 in body).

    Solved as ``min sum(mu)`` subject to ``G^T mu = beta, mu >= 0``, which is
    equivalent when the origin belongs to the body.  Returns ``inf`` when
    ``beta`` is outside the cone spanned by the body.
    """
    beta = np.asarray(beta, dtype=float)
    G = body.generators
    if not np.any(beta):
        return 0.0
    status, _, obj = _solve(G.T, beta, np.ones(len(G)))
    if status == _kernels.LP_INFEASIBLE:
        return math.inf
    return max(float(obj), 0.0)


def axis_extents(body):
    """Per-axis ``max{t : t e_j in body}``; zero when only the origin is hit."""
    G = body.generators
    k, n = G.shape
    out = np.zeros(n)
    for j in range(n):
        A = np.zeros((n + 1, k + 1))
        A[:n, :k] = G.T
        A[j, k] = -1.0
        A[n, :k] = 1.0
        b = np.zeros(n + 1)
        b[n] = 1.0
        c = np.zeros(k + 1)
        c[k] = -1.0
        status, x, _ = _solve(A, b, c)
        if status != _kernels.LP_OPTIMAL:
            raise InvalidArgumentError("axis extents need a body containing the origin")
        out[j] = x[k]
    return out


# ---------------------------------------------------------------------------
# canonical form, lower hull, products
# ---------------------------------------------------------------------------

def _dedupe(G, tol):
    keep = []
    for i, g in enumerate(G):
        if not any(np.max(np.abs(g - G[j])) <= tol for j in keep):
            keep.append(i)
    return G[keep]


def canonicalize(body, tol=TAU_MEM):
    """Drop duplicate and non-extreme generators; the hull is unchanged."""
    G = _dedupe(body.generators, tol)
    k = len(G)
    if k <= 1:
        return ConvexBody(G, label=body.label)
    # a strict unique maximiser of some direction is certainly extreme
    D = _separating_directions(body.dim)
    scores = D @ G.T
    order = np.argsort(-scores, axis=1)
    top = scores[np.arange(len(D)), order[:, 0]]
    second = scores[np.arange(len(D)), order[:, 1]]
    extreme = np.zeros(k, dtype=bool)
    extreme[order[top - second > 10 * tol, 0]] = True

    keep = list(range(k))
    for i in range(k):
        if extreme[i]:
            continue
        others = [j for j in keep if j != i]
        if contains_many(ConvexBody(G[others]), G[i : i + 1], tol)[0]:
            keep = others
    return ConvexBody(G[keep], label=body.label)


def same_body(a, b, tol=TAU_MEM):
    """Hull equality via mutual generator membership."""
    if a.dim != b.dim:
        return False
    return bool(contains_many(a, b.generators, tol).all() and contains_many(b, a.generators, tol).all())


def lower_hull(body):
    """Smallest lower set containing the body: support(xi) = support(body, xi^+)."""
    n = body.dim
    if n > MAX_LOWER_HULL_DIM:
        raise InvalidArgumentError(f"lower hull limited to dimension <= {MAX_LOWER_HULL_DIM}")
    masks = np.array(list(itertools.product([0.0, 1.0], repeat=n)))
    pts = (body.generators[:, None, :] * masks[None, :, :]).reshape(-1, n)
    label = f"lower({body.label})" if body.label else "lower hull"
    return canonicalize(ConvexBody(pts, label=label))


@dataclass(frozen=True, eq=False)
class ProductStructure:
    """The data (T, [S_1..S_l]) of the weighted product construction."""

    t_body: ConvexBody
    factors: tuple

    def __post_init__(self):
        factors = tuple(self.factors)
        object.__setattr__(self, "factors", factors)
        if len(factors) == 0:
            raise InvalidArgumentError("a product structure needs at least one factor")
        if self.t_body.dim != len(factors):
            raise InvalidArgumentError(
                f"T has dimension {self.t_body.dim} but {len(factors)} factors were given"
            )
        for j, s in enumerate(factors):
            if not contains(s, np.zeros(s.dim)):
                raise InvalidArgumentError(f"factor S_{j + 1} must contain the origin")

    @property
    def ell(self):
        return len(self.factors)

    @property
    def factor_dims(self):
        return [s.dim for s in self.factors]

    @property
    def dim(self):
        return sum(self.factor_dims)

    @property
    def blocks(self):
        """Coordinate slices of each factor inside R^n."""
        out, start = [], 0
        for d in self.factor_dims:
            out.append(slice(start, start + d))
            start += d
        return out

    def to_dict(self):
        return {
            "t_body": self.t_body.to_dict(),
            "factors": [s.to_dict() for s in self.factors],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            t = ConvexBody.from_dict(data["t_body"])
            factors = [ConvexBody.from_dict(f) for f in data["factors"]]
        except (KeyError, TypeError):
            raise InvalidArgumentError("product structure needs 't_body' and 'factors'") from None
        return cls(t, tuple(factors))


def build_product_body(ps):
    """Generators {(t_1 v_1, ..., t_l v_l)} of the union over x in T of x_1 S_1 x ... x x_l S_l.

    The raw generator list is returned; pass it through :func:`canonicalize`
    for an irredundant description.
    """
    rows = []
    factor_gens = [s.generators for s in ps.factors]
    for t in ps.t_body.generators:
        for combo in itertools.product(*factor_gens):
            rows.append(np.concatenate([t[j] * v for j, v in enumerate(combo)]))
    return ConvexBody(np.array(rows), label="product")


def product_support(ps, xi):
    """phi_T(phi_{S_1}(xi_1), ..., phi_{S_l}(xi_l)), evaluated factor by factor."""
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    inner = np.stack([support(s, xi[:, blk]) for s, blk in zip(ps.factors, ps.blocks)], axis=-1)
    return support(ps.t_body, np.atleast_2d(inner))


# ---------------------------------------------------------------------------
# simplex detection and diameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimplexReport:
    is_simplex: bool
    axis_extents: np.ndarray
    witness: np.ndarray = None
    ratio_sum: float = 1.0


def simplex_report(body, tol=TAU_MEM):
    """Decide whether the body equals Sigma_x for its own axis extents x."""
    x = axis_extents(body)
    if np.any(x <= tol):
        raise DegenerateBodyError(
            f"axis extents {x.tolist()} include a zero; the body contains no neighbourhood of 0"
        )
    ratios = body.generators @ (1.0 / x)
    i = int(np.argmax(ratios))
    if ratios[i] <= 1.0 + tol:
        return SimplexReport(True, x, None, float(ratios[i]))
    return SimplexReport(False, x, body.generators[i].copy(), float(ratios[i]))


def diameter_and_witness(body, tol=TAU_NUM):
    """Largest generator distance and the unit direction of the first maximizing pair.

    For a single-point body the direction is ``None``.
    """
    G = body.generators
    if len(G) < 2:
        return 0.0, None
    diff = G[None, :, :] - G[:, None, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    dmax = float(dist.max())
    if dmax <= tol:
        return 0.0, None
    iu, ju = np.triu_indices(len(G), k=1)
    first = int(np.flatnonzero(dist[iu, ju] >= dmax - tol)[0])
    i, j = iu[first], ju[first]
    eta = (G[j] - G[i]) / dist[i, j]
    width = support(body, eta) + support(body, -eta)
    assert width >= dmax - tol, "width along the diameter direction below the diameter"
    return dmax, eta


# ---------------------------------------------------------------------------
# convexity of the raw union
# ---------------------------------------------------------------------------

def _random_hull_points(rng, G, count):
    w = rng.dirichlet(np.ones(len(G)), size=count)
    return w @ G


def probe_union_convexity(ps, trials, rng=None, body=None):
    """Midpoint probes of the raw union over x in T of x_1 S_1 x ... x x_l S_l.

    Pairs of union points are drawn at random and their midpoints must land
    in the hull of :func:`build_product_body`.  Returns ``True`` iff every
    probe passes.
    """
    if trials < 1:
        raise InvalidArgumentError("trials must be >= 1")
    rng = np.random.default_rng(rng)
    if body is None:
        body = canonicalize(build_product_body(ps))

    def draw():
        x = _random_hull_points(rng, ps.t_body.generators, trials)
        parts = [
            x[:, [j]] * _random_hull_points(rng, s.generators, trials)
            for j, s in enumerate(ps.factors)
        ]
        return np.hstack(parts)

    mid = 0.5 * (draw() + draw())
    return bool(contains_many(body, mid).all())
