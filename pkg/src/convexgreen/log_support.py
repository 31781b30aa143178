"""Logarithmic supporting functions as exact max-affine functions of Log z.

A :class:`MaxAffine` ``f(xi) = max_k <slope_k, xi> + offset_k`` with
nonnegative slopes is increasing in every coordinate, which is what makes the
limsup extension across the coordinate hyperplanes ``{z_i = 0}`` computable
exactly: as ``xi_i -> -inf`` every piece with a positive ``i``-th slope drops
out, and the remaining pieces do not depend on ``xi_i`` at all.
"""

from dataclasses import dataclass
import warnings

import numpy as np

from . import _kernels
from .bodies import (
    TAU_MEM,
    TAU_NUM,
    ConvexBody,
    _solve,
    canonicalize,
    contains,
    contains_many,
)
from .errors import InvalidArgumentError, ResourceError

DEFAULT_PIECE_CAP = 10**6


def log_modulus(z):
    """Log z = (log|z_1|, ..., log|z_n|) with -inf where z_i = 0."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(z))


@dataclass(frozen=True, eq=False)
class MaxAffine:
    """``xi -> max_k <slopes[k], xi> + offsets[k]`` with slopes in R^n_+."""

    slopes: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        s = np.array(self.slopes, dtype=float, copy=True)
        if s.ndim == 1:
            s = s.reshape(1, -1)
        o = np.array(self.offsets, dtype=float, copy=True).reshape(-1)
        if s.ndim != 2 or s.shape[0] == 0:
            raise InvalidArgumentError("a max-affine function needs at least one piece")
        if o.shape[0] != s.shape[0]:
            raise InvalidArgumentError("one offset per slope is required")
        if np.any(s < -TAU_NUM):
            raise InvalidArgumentError("slopes must be nonnegative")
        s[s < 0] = 0.0
        s.setflags(write=False)
        o.setflags(write=False)
        object.__setattr__(self, "slopes", s)
        object.__setattr__(self, "offsets", o)

    @property
    def dim(self):
        return self.slopes.shape[1]

    def __len__(self):
        return len(self.offsets)

    def __repr__(self):
        return f"<MaxAffine dim={self.dim} pieces={len(self)}>"

    def __call__(self, xi):
        return eval_extended(self, xi)

    def shift(self, c):
        return MaxAffine(self.slopes, self.offsets + c)

    def canonical(self, tol=TAU_NUM):
        return canonical_form(self, tol)

    def to_dict(self):
        return {
            "dim": int(self.dim),
            "pieces": [
                {"slope": [float(v) for v in s], "offset": float(o)}
                for s, o in zip(self.slopes, self.offsets)
            ],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            pieces = data["pieces"]
            slopes = [p["slope"] for p in pieces]
            offsets = [p["offset"] for p in pieces]
        except (KeyError, TypeError):
            raise InvalidArgumentError("max-affine JSON needs 'pieces' with slope/offset") from None
        f = cls(np.asarray(slopes, dtype=float), np.asarray(offsets, dtype=float))
        if "dim" in data and int(data["dim"]) != f.dim:
            raise InvalidArgumentError("declared dim does not match slope length")
        return f


def constant(dim, value=0.0):
    return MaxAffine(np.zeros((1, dim)), [value])


def eval_extended(f, xi):
    """Evaluate ``f`` at log-points that may carry ``-inf`` coordinates.

    Only pieces whose slope vanishes on every ``-inf`` coordinate survive the
    limsup; with none left the value is ``-inf``.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1:] != (f.dim,) or xi.ndim > 2:
        raise InvalidArgumentError(f"log-point of shape {xi.shape} for a function of dim {f.dim}")
    X = np.atleast_2d(xi)
    if np.any(np.isnan(X)) or np.any(X == np.inf):
        raise InvalidArgumentError("log-points must be finite or -inf")
    neg = np.isneginf(X)
    vals = np.where(neg, 0.0, X) @ f.slopes.T + f.offsets
    if neg.any():
        killed = (neg.astype(float) @ (f.slopes > 0).T.astype(float)) > 0
        vals = np.where(killed, -np.inf, vals)
    out = vals.max(axis=1)
    return float(out[0]) if xi.ndim == 1 else out


def h_of_body(body):
    """H_S as a max-affine function: one zero-offset piece per extreme generator."""
    if not contains(body, np.zeros(body.dim)):
        warnings.warn(
            "body does not contain the origin; H_S is only a Lelong-class majorant "
            "for origin-containing bodies",
            stacklevel=2,
        )
    canon = canonicalize(body)
    return MaxAffine(canon.generators, np.zeros(len(canon)))


def _dedupe_pieces(f, tol):
    order = np.lexsort(np.column_stack([-f.offsets, f.slopes]).T[::-1])
    S, O = f.slopes[order], f.offsets[order]
    keep_s, keep_o = [], []
    for s, o in zip(S, O):
        for i, ks in enumerate(keep_s):
            if np.max(np.abs(ks - s)) <= tol:
                keep_o[i] = max(keep_o[i], o)
                break
        else:
            keep_s.append(s)
            keep_o.append(o)
    return np.array(keep_s), np.array(keep_o)


def _dominated(S, O, k, others, tol):
    """Is piece k below the max of ``others`` everywhere?

    Equivalent to (s_k, o_k) lying in ch{(s_i, o_i)} - R_+ (0, 1).
    """
    n = S.shape[1]
    m = len(others)
    A = np.zeros((n + 2, m + 1))
    A[:n, :m] = S[others].T
    A[n, :m] = 1.0
    A[n + 1, :m] = O[others]
    A[n + 1, m] = -1.0
    b = np.concatenate([S[k], [1.0, O[k]]])
    status, _, _ = _solve(A, b, np.zeros(m + 1), tol)
    return status == _kernels.LP_OPTIMAL


def canonical_form(f, tol=TAU_NUM):
    """Irredundant pieces of ``f`` sorted lexicographically by (slope, offset)."""
    S, O = _dedupe_pieces(f, tol)
    k = len(O)
    if k > 1:
        rng = np.random.default_rng(7)
        probes = rng.standard_normal((64 + 8 * f.dim, f.dim)) * 10.0
        vals = probes @ S.T + O
        srt = np.sort(vals, axis=1)
        strict = srt[:, -1] - srt[:, -2] > 1e3 * tol
        certain = np.zeros(k, dtype=bool)
        certain[np.argmax(vals, axis=1)[strict]] = True
        keep = list(range(k))
        for i in range(k):
            if certain[i]:
                continue
            others = [j for j in keep if j != i]
            if _dominated(S, O, i, others, TAU_MEM):
                keep = others
        S, O = S[keep], O[keep]
    order = np.lexsort(np.column_stack([S, O]).T[::-1])
    return MaxAffine(S[order], O[order])


def same_function(f, g, tol=TAU_NUM):
    """Exact equality test: identical canonical piece sets within ``tol``."""
    if f.dim != g.dim:
        return False
    cf, cg = canonical_form(f, tol), canonical_form(g, tol)
    if len(cf) != len(cg):
        return False
    return bool(
        np.max(np.abs(cf.slopes - cg.slopes)) <= tol and np.max(np.abs(cf.offsets - cg.offsets)) <= tol
    )


@dataclass(frozen=True, eq=False)
class LelongCertificate:
    """Claim: ``subject <= H_body + c_u`` everywhere."""

    c_u: float
    body: ConvexBody
    subject: MaxAffine


def check_lelong(cert, tol=TAU_NUM):
    """Piecewise check of the Lelong bound: slopes in the body, offsets <= c_u."""
    if cert.subject.dim != cert.body.dim:
        raise InvalidArgumentError("subject and body dimensions differ")
    if np.any(cert.subject.offsets > cert.c_u + tol):
        return False
    return bool(contains_many(cert.body, cert.subject.slopes).all())


def check_lelong_plus(cert, tol=TAU_NUM):
    """Two-sided bound ``H_body - c_u <= subject <= H_body + c_u``.

    The lower bound needs every extreme generator g of the body to be matched
    by a subject piece with slope g and offset >= -c_u.
    """
    if not check_lelong(cert, tol):
        return False
    canon = canonicalize(cert.body)
    S, O = cert.subject.slopes, cert.subject.offsets
    for g in canon.generators:
        match = np.max(np.abs(S - g), axis=1) <= TAU_MEM
        if not match.any() or O[match].max() < -cert.c_u - tol:
            return False
    return True


def compose_support(t_body, parts, cap=DEFAULT_PIECE_CAP):
    """The max-affine function ``xi -> phi_T(parts_1(xi_1), ..., parts_l(xi_l))``.

    Expanded into pieces ``(t_1 s_1 (+) ... (+) t_l s_l, sum_j t_j o_j)`` over
    every generator t of T and every choice of one piece per part; this is
    exact because t >= 0 lets the outer max distribute over the inner ones.
    """
    parts = list(parts)
    if t_body.dim != len(parts):
        raise InvalidArgumentError(f"T has dimension {t_body.dim} but {len(parts)} parts were given")
    count = len(t_body)
    for p in parts:
        count *= len(p)
    if count > cap:
        raise ResourceError(f"composition would create {count} pieces (cap {cap})")
    grids = np.indices([len(p) for p in parts]).reshape(len(parts), -1)
    slopes, offsets = [], []
    for t in t_body.generators:
        blocks = [t[j] * p.slopes[grids[j]] for j, p in enumerate(parts)]
        slopes.append(np.hstack(blocks))
        offsets.append(sum(t[j] * p.offsets[grids[j]] for j, p in enumerate(parts)))
    return MaxAffine(np.vstack(slopes), np.concatenate(offsets))
