"""Command-line front end.

Every subcommand reads an optional JSON document (``--input``, ``-`` for
stdin), runs one verifier and writes a JSON report (or CSV where a table
makes sense).  Exit status: 0 when the check passes, 1 when it runs but
fails, 2 for usage errors, malformed input and unsupported configurations.
Floats are written with 17 significant digits and keys in a fixed order,
so the same input and seed give byte-identical output.
"""

import argparse
import json
import math
import sys

import numpy as np

from .bodies import (
    ConvexBody,
    ProductStructure,
    build_product_body,
    canonicalize,
    lower_hull,
    probe_union_convexity,
    support,
)
from .counterexamples import intro_counterexample, sublevel_nonconvexity, weighted_counterexample
from .errors import ConvexGreenError, NotApplicableError, NoWitnessError
from .log_support import h_of_body
from .product import GridSpec, TheoremInstance, corollary_suite, lhs_exact, verify_theorem
from .siciak import ApproxConfig, approx_v, bernstein_walsh_check, convergence_sweep

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------

def _fmt_float(v):
    if math.isnan(v):
        return '"NaN"'
    if math.isinf(v):
        return '"Infinity"' if v > 0 else '"-Infinity"'
    return format(v, ".17g")


def dumps(obj, indent=2, _level=0):
    """JSON text with '%.17g' floats; dict keys keep their insertion order."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _table_csv(header, rows):
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(_fmt_float(float(v)).strip('"') for v in r))
    return "\n".join(lines) + "\n"


def _read_input(path):
    if path is None:
        return {}
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError("the input document must be a JSON object")
    return data


def _need(data, key):
    if key not in data:
        raise UsageError(f"input is missing '{key}'")
    return data[key]


def _complex_points(raw, dim=None):
    """[[ [re, im], ... ], ...] or [[x, ...], ...] (real) into a complex array."""
    arr = np.asarray(raw, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        z = arr[..., 0] + 1j * arr[..., 1]
    elif arr.ndim == 2:
        z = arr.astype(complex)
    else:
        raise UsageError("points must be a list of points, each a list of numbers or [re, im] pairs")
    if dim is not None and z.shape[1] != dim:
        raise UsageError(f"points have dimension {z.shape[1]}, expected {dim}")
    return z


def _log_points(raw, dim):
    """Log-points where null stands for -inf."""
    rows = [[-math.inf if v is None else float(v) for v in r] for r in raw]
    X = np.asarray(rows, dtype=float)
    if X.ndim != 2 or X.shape[1] != dim:
        raise UsageError(f"log-points must have dimension {dim}")
    return X


def _instance(data):
    inst = TheoremInstance.from_dict(_need(data, "instance"))
    return inst


def _body(data, key="body"):
    return ConvexBody.from_dict(_need(data, key))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_support(args, data):
    """phi_S(xi) = max over generators <g, xi> for a body S and directions xi."""
    body = _body(data)
    xi = np.atleast_2d(np.asarray(_need(data, "xi"), dtype=float))
    if xi.shape[1] != body.dim:
        raise UsageError(f"direction of dimension {xi.shape[1]} for a body of dimension {body.dim}")
    vals = support(body, xi)
    if args.format == "csv":
        return _table_csv([f"xi{d + 1}" for d in range(body.dim)] + ["support"], np.column_stack([xi, vals])), True
    return {"dim": body.dim, "xi": xi, "values": vals}, True


def cmd_hs(args, data):
    """H_S = phi_S o Log as a max-affine function, with the limsup rule across {z_i = 0}."""
    body = _body(data)
    f = h_of_body(body)
    out = {"maxaffine": f.to_dict()}
    if "xi" in data:
        out["values"] = f(_log_points(data["xi"], body.dim))
    if "z" in data:
        z = _complex_points(data["z"], body.dim)
        with np.errstate(divide="ignore"):
            out["values_z"] = f(np.log(np.abs(z)))
    return out, True


def cmd_build_product(args, data):
    """The product body S = union over x in T of x_1 S_1 x ... x x_l S_l, with its support identity."""
    ps = ProductStructure.from_dict(_need(data, "ps"))
    raw = build_product_body(ps)
    body = canonicalize(raw)
    rng = np.random.default_rng(args.seed)
    xi = rng.standard_normal((256, ps.dim))
    inner = np.stack([support(s, xi[:, blk]) for s, blk in zip(ps.factors, ps.blocks)], axis=-1)
    err = float(np.max(np.abs(support(body, xi) - support(ps.t_body, inner))))
    convex = probe_union_convexity(ps, 256, rng, body)
    tol = args.tol if args.tol is not None else 1e-9
    return {
        "body": body.to_dict(),
        "raw_generators": len(raw),
        "support_identity_error": err,
        "union_convex_probe": convex,
        "pass": bool(err <= tol and convex),
    }, bool(err <= tol and convex)


def cmd_lower_hull(args, data):
    """Lower hull of S: the smallest lower set containing S, with support phi_S(xi^+)."""
    body = _body(data)
    hull = lower_hull(body)
    rng = np.random.default_rng(args.seed)
    xi = rng.standard_normal((256, body.dim))
    err = float(np.max(np.abs(support(hull, xi) - support(body, np.maximum(xi, 0.0)))))
    tol = args.tol if args.tol is not None else 1e-9
    return {"body": hull.to_dict(), "identity_error": err, "pass": bool(err <= tol)}, bool(err <= tol)


def cmd_verify_theorem(args, data):
    """Product formula V^S_K(z) = phi_T(V^{S_1}_{K_1}(z_1), ..., V^{S_l}_{K_l}(z_l)) over a log-grid."""
    inst = _instance(data)
    grid = GridSpec.from_dict(data["grid"]) if "grid" in data else GridSpec.cube(inst.ps.dim, count=21)
    lhs_body = ConvexBody.from_dict(data["lhs_body"]) if "lhs_body" in data else None
    m = args.m if args.m is not None else int(data.get("m", 8))
    rep = verify_theorem(inst, grid, tol=args.tol, lhs_body=lhs_body, cfg=ApproxConfig(m=m),
                         table=args.format == "csv")
    if args.format == "csv":
        return rep.to_csv(), rep.passed
    return rep.to_dict(), rep.passed


def cmd_corollary(args, data):
    """Corollaries: siciak (max of V_j), sum (T = {(1,..,1)}), lowerhull (S replaced by its lower hull), pnorm (V^q = sum V_j^q)."""
    name = args.name or data.get("name")
    if name is None:
        raise UsageError("corollary needs --name or 'name' in the input")
    rep = corollary_suite(name, data.get("params"))
    return rep.to_dict(), rep.passed


def cmd_approx_v(args, data):
    """Bergman-sum approximation (1/2m) log sum |p_alpha(z)|^2 of V^S_{K,q}(z) = log Phi^S_{K,q}(z)."""
    inst = _instance(data)
    z = _complex_points(_need(data, "z"), inst.ps.dim)
    m = args.m if args.m is not None else int(_need(data, "m"))
    q = float(support(inst.ps.t_body, inst.q))
    vals = approx_v(ApproxConfig(m=m, q=q), inst.ps, inst.compacts, z)
    out = {"m": m, "values": vals}
    if inst.is_toric and not inst.inert_blocks:
        with np.errstate(divide="ignore"):
            exact = lhs_exact(inst)(np.log(np.abs(z)))
        out["exact"] = exact
        out["max_error"] = float(np.max(np.abs(vals - exact)))
    if args.format == "csv":
        cols = [vals] + ([out["exact"]] if "exact" in out else [])
        head = [f"z{d + 1}_{p}" for d in range(z.shape[1]) for p in ("re", "im")] + ["approx"] + (["exact"] if "exact" in out else [])
        parts = np.column_stack([np.column_stack([z.real[:, d], z.imag[:, d]]) for d in range(z.shape[1])] + cols)
        return _table_csv(head, parts), True
    return out, True


def cmd_sweep(args, data):
    """Convergence of the Bergman approximation to V^S_K as the degree m doubles."""
    inst = _instance(data)
    ms = [int(v) for v in data.get("ms", [4, 8, 16, 32])]
    xi = np.asarray(_need(data, "xi"), dtype=float)
    table = convergence_sweep(ms, inst.ps, inst.compacts, xi)
    if args.format == "csv":
        return table.to_csv(), table.monotone
    out = table.to_dict()
    out["pass"] = table.monotone
    return out, table.monotone


def cmd_counterexample_intro(args, data):
    """The body ch{(0,0),(1,0),(1,1),(0,a)}: H_S(1/R, R) = a log R < log R = phi_S(V(1/R), V(R))."""
    a = args.a if args.a is not None else float(data.get("a", 0.5))
    R = args.R if args.R is not None else float(data.get("R", math.e))
    rep = intro_counterexample(a, R)
    return rep, rep["pass"]


def cmd_counterexample_weighted(args, data):
    """With constant weights the product formula fails by phi_T(eta) + phi_T(-eta) > 0."""
    ps = ProductStructure.from_dict(_need(data, "ps"))
    try:
        w = weighted_counterexample(ps)
    except NoWitnessError as exc:
        return {"construction": "weighted", "no_witness": True, "reason": str(exc), "pass": False}, None
    return w.to_dict(), w.passed


def cmd_counterexample_sublevel(args, data):
    """For non-simplex S the sublevel sets {H_S <= t} are not convex once t exceeds t0."""
    body = _body(data)
    t = args.t if args.t is not None else data.get("t")
    try:
        w = sublevel_nonconvexity(body, t)
    except NotApplicableError as exc:
        return {"construction": "sublevel", "refused": "is_simplex", "reason": str(exc), "pass": False}, None
    return w.to_dict(), w.passed


def cmd_bw_check(args, data):
    """Bernstein-Walsh inequality |f(z)| <= ||f||_K exp(m V^S_K(z)) for random f in P^S_m."""
    inst = _instance(data)
    m = args.m if args.m is not None else int(data.get("m", 4))
    trials = args.trials if args.trials is not None else int(data.get("trials", 500))
    points = int(data.get("points", 100))
    slack = args.tol if args.tol is not None else float(data.get("slack", 1e-6))
    rep = bernstein_walsh_check(inst.ps, inst.compacts, m, trials, points, np.random.default_rng(args.seed), slack)
    return rep.to_dict(), rep.passed


COMMANDS = {
    "support": cmd_support,
    "hs": cmd_hs,
    "build-product": cmd_build_product,
    "lower-hull": cmd_lower_hull,
    "verify-theorem": cmd_verify_theorem,
    "corollary": cmd_corollary,
    "approx-v": cmd_approx_v,
    "sweep": cmd_sweep,
    "counterexample-intro": cmd_counterexample_intro,
    "counterexample-weighted": cmd_counterexample_weighted,
    "counterexample-sublevel": cmd_counterexample_sublevel,
    "bw-check": cmd_bw_check,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="convexgreen", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__.splitlines()[0], description=fn.__doc__)
        p.add_argument("--input", "-i", help="JSON input document ('-' for stdin)")
        p.add_argument("--output", "-o", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--seed", type=int, default=0, help="seed for every randomized probe")
        p.add_argument("--tol", type=float, default=None, help="tolerance override")
        p.add_argument("--m", type=int, default=None, help="polynomial degree")
        p.add_argument("--a", type=float, default=None)
        p.add_argument("--R", type=float, default=None)
        p.add_argument("--t", type=float, default=None, help="sublevel t")
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--name", default=None, help="corollary name")
        p.set_defaults(func=fn)
    return parser


CSV_COMMANDS = {"support", "verify-theorem", "approx-v", "sweep"}


def run(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.format == "csv" and args.command not in CSV_COMMANDS:
            raise UsageError(f"{args.command} has no CSV output")
        data = _read_input(args.input)
        report, ok = args.func(args, data)
    except UsageError as exc:
        print(f"convexgreen {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvexGreenError as exc:
        print(f"convexgreen {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = report if isinstance(report, str) else dumps(report) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if ok is None:
        return EXIT_USAGE
    return EXIT_PASS if ok else EXIT_FAIL


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":  # pragma: no cover
    main()
