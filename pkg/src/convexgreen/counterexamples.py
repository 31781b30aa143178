"""Constructive witnesses for the three negative results.

* a convex body S whose extremal function is *not* phi_S of the
  coordinate extremal functions (S is not a lower set);
* failure of the product formula once nonzero constant weights enter;
* non-convex sublevel sets {H_S <= t} for every non-simplex S and large t.
"""

from dataclasses import dataclass
import math

import numpy as np

from .bodies import (
    TAU_MEM,
    TAU_NUM,
    ConvexBody,
    axis_extents,
    contains,
    diameter_and_witness,
    interval,
    simplex_report,
    support,
)
from .closed_forms import CompactFactorSpec, ProductCompact
from .errors import InvalidArgumentError, NotApplicableError, NoWitnessError
from .log_support import compose_support, h_of_body, log_modulus
from .product import GridSpec, TheoremInstance, lhs_exact, rhs_eval


def intro_body(a):
    return ConvexBody(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, a]]), label=f"intro(a={a:g})")


def intro_counterexample(a, R):
    """H_S(1/R, R) = a log R, but phi_S(V(1/R), V(R)) = log R.

    Here S = ch{(0,0), (1,0), (1,1), (0,a)} and K is the closed unit bidisc,
    so V^S_K = H_S while each coordinate has V = log+|.|.
    """
    a, R = float(a), float(R)
    if not 0.0 < a < 1.0:
        raise InvalidArgumentError("need 0 < a < 1; for a >= 1 the body is a lower set and no gap appears")
    if not R >= 1.0:
        raise InvalidArgumentError("need R >= 1")
    S = intro_body(a)
    z = np.array([1.0 / R, R], dtype=complex)
    lhs = float(h_of_body(S)(log_modulus(z)))
    coord = np.maximum(log_modulus(z), 0.0)
    rhs = float(support(S, coord))
    # the same right side, built as a max-affine function of Log z
    logplus = h_of_body(interval(0.0, 1.0))
    rhs_composed = float(compose_support(S, [logplus, logplus])(log_modulus(z)))
    gap = rhs - lhs
    expected = (1.0 - a) * math.log(R)
    ok = (
        abs(lhs - a * math.log(R)) <= 1e-12
        and abs(rhs - math.log(R)) <= 1e-12
        and abs(gap - expected) <= 1e-12
        and abs(rhs_composed - rhs) <= 1e-12
    )
    return {
        "construction": "intro",
        "inputs": {"a": a, "R": R},
        "lhs": lhs,
        "rhs": rhs,
        "gap": gap,
        "expected_gap": expected,
        "pass": bool(ok),
    }


# ---------------------------------------------------------------------------
# weighted case
# ---------------------------------------------------------------------------

@dataclass
class WeightedWitness:
    eta: np.ndarray
    weights: np.ndarray
    eval_points: list
    gap: float
    lhs: float
    rhs: float
    rule: str
    shift_check: float
    passed: bool = True

    def to_dict(self):
        return {
            "construction": "weighted",
            "inputs": {"eta_rule": self.rule},
            "eta": self.eta.tolist(),
            "weights": self.weights.tolist(),
            "eval_points": [[[float(v.real), float(v.imag)] for v in zj] for zj in self.eval_points],
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "shift_check": self.shift_check,
            "pass": self.passed,
        }


def _width(T, eta):
    return support(T, eta) + support(T, -eta)


def choose_eta(T, tol=TAU_MEM):
    """A direction eta in R^l_+ with phi_T(eta) + phi_T(-eta) > 0.

    Starts from the diameter direction w and tries |w|, w+, (-w)+, then
    scans normalised generator differences.
    """
    d, w = diameter_and_witness(T)
    if w is None:
        raise NoWitnessError("T is a single point; the weighted construction needs more than one point")
    candidates = [("abs", np.abs(w)), ("positive part", np.maximum(w, 0.0)), ("negative part", np.maximum(-w, 0.0))]
    G = T.generators
    for i in range(len(G)):
        for j in range(len(G)):
            diff = np.abs(G[j] - G[i])
            if np.linalg.norm(diff) > tol:
                candidates.append((f"generator difference {i},{j}", diff / np.linalg.norm(diff)))
    for rule, eta in candidates:
        if np.linalg.norm(eta) > tol and _width(T, eta) > tol:
            return eta, rule
    raise NoWitnessError("no direction in R^l_+ separates T")  # pragma: no cover


def _unit_polydiscs(ps):
    return tuple(ProductCompact((CompactFactorSpec.polydisc([1.0] * s.dim),)) for s in ps.factors)


def weighted_counterexample(ps, compacts=None, grid_count=9):
    """Witness for V^S_{K,q}(z) > phi_T(V^{S_1}_{K_1,q_1}(z_1), ...).

    With q_j = -eta_j and z_j on the diagonal ray where H_{S_j}(z_j) = eta_j
    the right side is phi_T(0) = 0, while the left side is
    phi_T(eta) + phi_T(-eta) > 0.
    """
    if compacts is None:
        compacts = _unit_polydiscs(ps)
    for k in compacts:
        if not k.is_toric or any(abs(r - 1.0) > 0 for r in k.polydisc_radii()):
            raise InvalidArgumentError("weighted construction needs unit polydisc factors")
    sig = np.array([support(s, np.ones(s.dim)) for s in ps.factors])
    if np.any(sig <= TAU_NUM):
        raise InvalidArgumentError("every S_j must have sigma_{S_j} > 0")
    eta, rule = choose_eta(ps.t_body)
    q = -eta
    inst = TheoremInstance(ps, compacts, tuple(q))
    plain = TheoremInstance(ps, compacts)

    # V^S_{K,q} = V^S_K + phi_T(q) on a grid, with phi_T(q) computed directly
    grid = GridSpec.cube(ps.dim, -2.0, 2.0, grid_count)
    X = grid.points()
    shift_check = float(np.max(np.abs(lhs_exact(inst)(X) - (lhs_exact(plain)(X) + support(ps.t_body, q)))))

    points = [np.full(s.dim, math.exp(e / sg), dtype=complex) for s, e, sg in zip(ps.factors, eta, sig)]
    levels = [float(h_of_body(s)(log_modulus(zj))) for s, zj in zip(ps.factors, points)]
    if max(abs(lv - e) for lv, e in zip(levels, eta)) > 1e-9:
        raise AssertionError("evaluation points miss their level sets")
    z = np.concatenate(points)
    lhs = float(lhs_exact(inst)(log_modulus(z)))
    rhs = float(rhs_eval(inst, z))
    gap = lhs - rhs
    expected = _width(ps.t_body, eta)
    ok = gap > 0 and abs(gap - expected) <= 1e-9 and shift_check <= 1e-9
    return WeightedWitness(eta, q, points, gap, lhs, rhs, rule, shift_check, bool(ok))


def nonmaximality_note(ps, weights=None):
    """The weighted gap as evidence that phi_T(V_1 + q_1, ...) is not maximal.

    No Monge-Ampere computation is attempted.  With explicit constant
    weights q <= 0 the gap along eta = -q is tried first; a zero gap there is
    inconclusive and the constructed witness is used instead.
    """
    inconclusive = None
    if weights is not None:
        q = np.asarray(weights, dtype=float)
        if q.shape != (ps.ell,):
            raise InvalidArgumentError("one weight per factor is required")
        eta = np.maximum(-q, 0.0)
        g = _width(ps.t_body, eta)
        inconclusive = bool(g <= TAU_MEM)
        if not inconclusive:
            return {
                "construction": "nonmaximality",
                "inputs": {"weights": q.tolist()},
                "gap": float(g),
                "inconclusive": False,
                "implication": _IMPLICATION,
                "pass": True,
            }
    w = weighted_counterexample(ps)
    return {
        "construction": "nonmaximality",
        "inputs": {"weights": None if weights is None else list(map(float, weights))},
        "gap": w.gap,
        "eta": w.eta.tolist(),
        "inconclusive": inconclusive,
        "implication": _IMPLICATION,
        "pass": w.passed,
    }


_IMPLICATION = (
    "The weighted right side lies strictly below V^S_{K,q} at the witness point while both "
    "agree with the weight on K; a maximal function of the Lelong class with those boundary "
    "values would equal V^S_{K,q}, so the composed function is not maximal off K."
)


# ---------------------------------------------------------------------------
# sublevel sets
# ---------------------------------------------------------------------------

@dataclass
class SublevelWitness:
    branch: int
    t: float
    t0: float
    points: np.ndarray
    midpoint: np.ndarray
    values: np.ndarray
    midpoint_value: float
    kept_coordinates: list
    generator: np.ndarray
    expected_excess: float = None
    extents: np.ndarray = None

    @property
    def passed(self):
        return bool(np.all(self.values <= self.t + 1e-9) and self.midpoint_value > self.t)

    def to_dict(self):
        cplx = lambda arr: [[float(v.real), float(v.imag)] for v in arr]
        return {
            "construction": "sublevel",
            "inputs": {"t": self.t},
            "branch": self.branch,
            "t0": self.t0,
            "points": [cplx(p) for p in self.points],
            "midpoint": cplx(self.midpoint),
            "values": self.values.tolist(),
            "midpoint_value": self.midpoint_value,
            "expected_excess": self.expected_excess,
            "kept_coordinates": list(self.kept_coordinates),
            "generator": self.generator.tolist(),
            "lhs": self.midpoint_value,
            "rhs": self.t,
            "gap": self.midpoint_value - self.t,
            "pass": self.passed,
        }


def sublevel_t0(x, s):
    """(s_1 + ... + s_n) log n / (s_1/x_1 + ... + s_n/x_n - 1)."""
    x, s = np.asarray(x, float), np.asarray(s, float)
    n = len(x)
    return float(s.sum() * math.log(n) / (np.sum(s / x) - 1.0))


def sublevel_nonconvexity(body, t=None):
    """Three-point (or two-point) witness that {H_S <= t} is not convex."""
    if not contains(body, np.zeros(body.dim)):
        raise InvalidArgumentError("the body must contain the origin")
    G = body.generators
    alive = [i for i in range(body.dim) if np.any(np.abs(G[:, i]) > TAU_NUM)]
    if not alive:
        raise InvalidArgumentError("the body is {0}; H_S vanishes identically")
    reduced = ConvexBody(G[:, alive])
    H = h_of_body(reduced)
    x = axis_extents(reduced)
    n = reduced.dim

    if np.all(x > TAU_MEM):
        rep = simplex_report(reduced)
        if rep.is_simplex:
            raise NotApplicableError("is_simplex: sublevel sets of H_S are convex for a simplex")
        s = rep.witness
        t0 = sublevel_t0(x, s)
        t = 1.1 * t0 if t is None else float(t)
        pts = np.diag(np.exp(t / x)).astype(complex)
        mid = pts.mean(axis=0)
        vals = np.array([H(log_modulus(p)) for p in pts])
        mval = float(H(log_modulus(mid)))
        excess = float((np.sum(s / x) - 1.0) * t - s.sum() * math.log(n))
        return SublevelWitness(1, t, t0, pts, mid, vals, mval, alive, s, excess, x)

    # some axis meets the body only at 0: H_S(zeta, 0, ..., 0) vanishes
    k = int(np.flatnonzero(x <= TAU_MEM)[0])
    t = 1.0 if t is None else float(t)
    if t <= 0:
        raise InvalidArgumentError("level t must be positive")
    gen = G[:, alive][int(np.argmax(G[:, alive][:, k]))]
    tau = math.exp((t + gen.sum() * math.log(2.0)) / gen[k] + 1.0)
    p1 = np.zeros(n, dtype=complex)
    p1[k] = tau
    p2 = np.ones(n, dtype=complex)
    p2[k] = 0.0
    pts = np.vstack([p1, p2])
    mid = pts.mean(axis=0)
    vals = np.array([H(log_modulus(p)) for p in pts])
    mval = float(H(log_modulus(mid)))
    return SublevelWitness(2, t, None, pts, mid, vals, mval, alive, gen, None, x)
