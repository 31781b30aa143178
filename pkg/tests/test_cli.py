import io
import json
import math

import pytest

from convexgreen.cli import dumps, run

SICIAK = {
    "instance": {
        "ps": {"t_body": {"generators": [[0, 0], [1, 0], [0, 1]]},
               "factors": [{"generators": [[0], [1]]}, {"generators": [[0], [1]]}]},
        "compacts": [{"kind": "disc", "center": [0, 0], "radius": 1}, {"kind": "disc", "center": [0, 0], "radius": 1}],
    },
    "grid": {"lo": [-3, -3], "hi": [3, 3], "counts": [41, 41]},
}


def call(tmp_path, argv, data=None):
    if data is not None:
        path = tmp_path / "in.json"
        path.write_text(json.dumps(data))
        argv = argv + ["--input", str(path)]
    out = io.StringIO()
    code = run(argv, stdout=out)
    return code, out.getvalue()


def test_verify_theorem(tmp_path):
    code, text = call(tmp_path, ["verify-theorem"], SICIAK)
    rep = json.loads(text)
    assert code == 0 and rep["pass"] and rep["max_error"] <= 1e-9


def test_verify_theorem_csv(tmp_path):
    data = dict(SICIAK, grid={"lo": [-1, -1], "hi": [1, 1], "counts": [3, 3]})
    code, text = call(tmp_path, ["verify-theorem", "--format", "csv"], data)
    assert code == 0 and text.splitlines()[0] == "xi1,xi2,lhs,rhs,diff"


def test_mismatch_exit_one(tmp_path):
    data = {
        "instance": {
            "ps": {"t_body": {"generators": [[0, 0], [1, 0], [1, 1], [0, 0.5]]},
                   "factors": [{"generators": [[0], [1]]}, {"generators": [[0], [1]]}]},
            "compacts": [{"kind": "polydisc", "radii": [1]}, {"kind": "polydisc", "radii": [1]}],
        },
        "lhs_body": {"generators": [[0, 0], [1, 0], [1, 1], [0, 0.5]]},
        "grid": {"lo": [-3, -3], "hi": [3, 3], "counts": [5, 5]},
    }
    code, text = call(tmp_path, ["verify-theorem"], data)
    assert code == 1 and json.loads(text)["max_error"] == pytest.approx(1.5)


def test_intro(tmp_path):
    code, text = call(tmp_path, ["counterexample-intro", "--a", "0.5", "--R", "2.718281828"])
    rep = json.loads(text)
    assert code == 0 and rep["gap"] == pytest.approx(0.5, abs=1e-9)


def test_support_dimension_mismatch(tmp_path):
    code, _ = call(tmp_path, ["support"], {"body": {"generators": [[0, 0], [1, 0]]}, "xi": [1, 2, 3]})
    assert code == 2


def test_support_values(tmp_path):
    code, text = call(tmp_path, ["support"], {"body": {"generators": [[0, 0], [1, 0], [0, 1]]}, "xi": [[3, -1]]})
    assert code == 0 and json.loads(text)["values"] == [3]


def test_malformed_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"body":\n {"generators": [[0,0],}')
    assert run(["support", "--input", str(path)], stdout=io.StringIO()) == 2
    assert "line 2, column" in capsys.readouterr().err


def test_unsupported_configuration(tmp_path):
    data = {"body": {"generators": [[0, 0], [1, 0]]}, "xi": [[1, 1]]}
    code, _ = call(tmp_path, ["hs", "--format", "csv"], data)
    assert code == 2


def test_hs_with_minus_infinity(tmp_path):
    data = {"body": {"generators": [[0, 0], [1, 0], [0, 1], [1, 1]]}, "xi": [[None, 1.5], [0.5, 0.5]]}
    code, text = call(tmp_path, ["hs"], data)
    assert code == 0 and json.loads(text)["values"] == [1.5, 1.0]


def test_build_product_and_lower_hull(tmp_path):
    ps = {"t_body": {"generators": [[0, 0], [1, 0], [1, 1], [0, 0.5]]},
          "factors": [{"generators": [[0], [1]]}, {"generators": [[0], [1]]}]}
    code, text = call(tmp_path, ["build-product"], {"ps": ps})
    assert code == 0 and json.loads(text)["union_convex_probe"]
    code, text = call(tmp_path, ["lower-hull"], {"body": ps["t_body"]})
    assert code == 0 and len(json.loads(text)["body"]["generators"]) == 4


def test_weighted_and_no_witness(tmp_path):
    ps = {"t_body": {"generators": [[0, 0], [1, 0], [0, 1], [1, 1]]},
          "factors": [{"generators": [[0], [1]]}, {"generators": [[0], [1]]}]}
    code, text = call(tmp_path, ["counterexample-weighted"], {"ps": ps})
    assert code == 0 and json.loads(text)["gap"] == pytest.approx(math.sqrt(2))
    ps["t_body"] = {"generators": [[1, 1]]}
    code, text = call(tmp_path, ["counterexample-weighted"], {"ps": ps})
    assert code == 2 and json.loads(text)["no_witness"]


def test_sublevel(tmp_path):
    code, text = call(tmp_path, ["counterexample-sublevel", "--t", "1.5"], {"body": {"generators": [[0, 0], [1, 0], [0, 1], [1, 1]]}})
    assert code == 0 and json.loads(text)["midpoint_value"] == pytest.approx(3 - 2 * math.log(2))
    code, text = call(tmp_path, ["counterexample-sublevel"], {"body": {"generators": [[0, 0], [1, 0], [0, 1]]}})
    assert code == 2 and json.loads(text)["refused"] == "is_simplex"


def test_corollary_and_approx_and_sweep(tmp_path):
    code, text = call(tmp_path, ["corollary", "--name", "sum"])
    assert code == 0
    disc = {"instance": {"ps": {"t_body": {"generators": [[0], [1]]}, "factors": [{"generators": [[0], [1]]}]},
                         "compacts": [{"kind": "disc", "center": [0, 0], "radius": 1}]}}
    code, text = call(tmp_path, ["approx-v", "--m", "16"], dict(disc, z=[[[2, 0]]]))
    rep = json.loads(text)
    assert code == 0 and rep["values"][0] == pytest.approx(math.log(sum(4**k for k in range(17))) / 32)
    code, text = call(tmp_path, ["sweep", "--format", "csv"], dict(disc, ms=[2, 4, 8], xi=[[0.5], [1.0]]))
    assert code == 0 and text.startswith("m,max_error")


def test_bw_check(tmp_path):
    data = {"instance": {"ps": {"t_body": {"generators": [[0], [1]]}, "factors": [{"generators": [[0, 0], [1, 0], [0, 1]]}]},
                         "compacts": [{"kind": "polydisc", "radii": [1, 1]}]}, "m": 3, "trials": 20, "points": 30}
    code, text = call(tmp_path, ["bw-check", "--seed", "3"], data)
    assert code == 0 and json.loads(text)["violations"] == 0


def test_same_seed_same_bytes(tmp_path):
    data = {"body": {"generators": [[0, 0], [1, 0], [1, 1], [0, 0.5]]}}
    a = call(tmp_path, ["lower-hull", "--seed", "9"], data)[1]
    b = call(tmp_path, ["lower-hull", "--seed", "9"], data)[1]
    assert a == b


def test_dumps_precision():
    assert dumps(0.1) == "0.10000000000000001"
    assert dumps({"b": [1.5, float("-inf")], "a": True}) == '{\n  "b": [1.5, "-Infinity"],\n  "a": true\n}'


def test_reports_carry_schema_required_keys(tmp_path):
    import pathlib

    root = pathlib.Path(__file__).resolve().parent.parent / "docs" / "schemas"
    schemas = {p.name: json.loads(p.read_text()) for p in root.glob("*.json")}
    assert {"body.schema.json", "instance.schema.json", "report.schema.json"} <= set(schemas)
    _, text = call(tmp_path, ["verify-theorem"], SICIAK)
    assert set(schemas["report.schema.json"]["required"]) <= set(json.loads(text))
    _, text = call(tmp_path, ["counterexample-intro"])
    assert set(schemas["counterexample_report.schema.json"]["required"]) <= set(json.loads(text))
