"""End-to-end checks of the uslsq command-line tool."""

import json
import os
import re
import subprocess
from pathlib import Path

import jsonschema
import pytest

CLI = os.environ.get("USLSQ_CLI", "build/tools/uslsq")
ROOT = Path(os.environ.get("USLSQ_ROOT", Path(__file__).resolve().parents[1]))
FIXTURES = ROOT / "fixtures"
SCHEMA = json.loads((ROOT / "schema" / "report.schema.json").read_text())
M = str(FIXTURES / "fig1_M_6x6_10.json")
D1 = str(FIXTURES / "eq1_3x3_4.json")


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.update(env or {})
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, env=full_env, timeout=1200)


def run_json(*args, env=None):
    proc = run("--json", *args, env=env)
    report = json.loads(proc.stdout)
    jsonschema.validate(report, SCHEMA)
    return proc.returncode, report


# ---- text rendering ------------------------------------------------------

def parse_text(text):
    """Map of flattened key -> raw value text; list items collected per key."""
    out, current = {}, None
    for line in text.splitlines():
        if line.startswith("  - "):
            out[current].append(line[4:])
            continue
        key, _, value = line.partition(": ")
        if line.endswith(":") and not value:
            current = line[:-1]
            out[current] = []
        else:
            out[key] = value
    return out


def matches(value, text):
    if isinstance(value, bool):
        return text == ("true" if value else "false")
    if isinstance(value, str):
        return text == value
    if isinstance(value, (int, float)):
        return float(text) == value
    if isinstance(value, list):
        if all(not isinstance(x, (list, dict)) for x in value):
            if not (text.startswith("(") and text.endswith(")")):
                return False
            inner = text[1:-1]
            parts = inner.split(",") if inner else []
            return len(parts) == len(value) and all(matches(v, p) for v, p in zip(value, parts))
        return json.loads(text) == value
    if isinstance(value, dict):
        fields = dict(item.split("=", 1) for item in re.split(r" (?=\w+=)", text)) if text else {}
        return set(fields) == set(value) and all(matches(value[k], fields[k]) for k in value)
    return text == "null" and value is None


def flatten(obj, prefix=""):
    for key, value in obj.items():
        path = f"{prefix}.{key}" if prefix else key
        if isinstance(value, dict) and value:
            yield from flatten(value, path)
        else:
            yield path, value


def assert_text_equals_json(args, tmp_path):
    code_j, report = run_json(*args)
    proc = run(*args)
    assert proc.returncode == code_j
    if "error" in report:
        assert report["error"] in proc.stderr
        return report
    text = parse_text(proc.stdout)
    flat = dict(flatten(report))
    assert set(text) == set(flat)
    for key, value in flat.items():
        if isinstance(value, list) and value and isinstance(value[0], (dict, str)):
            assert len(text[key]) == len(value), key
            assert all(matches(v, t) for v, t in zip(value, text[key])), key
        else:
            assert matches(value, text[key]), (key, value, text[key])
    return report


# ---- fixtures ------------------------------------------------------------

@pytest.fixture(scope="module")
def work(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert run("mols", "--q", 5, "--out", d / "mols5.json").returncode == 0
    assert run("mols", "--q", 3, "--out", d / "mols3.json").returncode == 0
    assert run("construct", "bars", "--n", 5, "--out", d / "bars5.json").returncode == 0
    assert run("derive", "d1", M, "--out", d / "d1.json").returncode == 0
    assert run("derive", "d3", M, "--out", d / "d3.json").returncode == 0
    assert run("dual", M, "--out", d / "dualM.json").returncode == 0
    assert run("to-oa", d / "d1.json", "--out", d / "oa.txt").returncode == 0
    bad = json.loads(Path(D1).read_text())
    bad["cells"][0][0][0] = 2
    (d / "bad.json").write_text(json.dumps(bad))
    l4 = {"n": 4, "grid": [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]}
    (d / "latin4.json").write_text(json.dumps(l4))
    return d


def commands(w):
    return [
        ["field", "--q", 9],
        ["mols", "--q", 4],
        ["construct", "superpose", w / "mols3.json"],
        ["construct", "inflate", D1, "--s", 2],
        ["construct", "bars", "--mols", w / "mols5.json"],
        ["verify", M],
        ["verify", D1],
        ["verify", w / "bad.json"],
        ["verify", w / "d3.json"],
        ["eta", M],
        ["eta", w / "d3.json"],
        ["spectrum", D1],
        ["spectrum", D1, "--full"],
        ["dual", D1],
        ["underlying", D1],
        ["derive", "d2", M],
        ["derive", "d3", D1],
        ["to-oa", w / "d1.json"],
        ["oa-strength", w / "oa.txt"],
        ["resolve", w / "d1.json"],
        ["iso", D1, D1],
        ["iso", w / "d3.json", w / "d3.json"],
        ["aut", D1],
        ["aut", w / "dualM.json"],
        ["cert", D1],
        ["construct", "superpose", w / "latin4.json", w / "latin4.json"],
        ["verify", w / "missing.json"],
        ["iso", D1, w / "d3.json"],
    ]


def test_every_command_validates_and_text_matches_json(work, tmp_path):
    for args in commands(work):
        assert_text_equals_json(args, tmp_path)


# ---- reference values ------------------------------------------------

def test_verify_square_m(work):
    code, report = run_json("verify", M)
    assert code == 0
    r = report["result"]
    assert r["uniform"] is True and r["mu"] == 2
    assert r["eta"] == [532, 906, 294, 30, 6, 0, 2]


def test_bars_then_eta(work):
    code, report = run_json("eta", work / "bars5.json")
    assert code == 0
    assert report["result"]["eta"] == [1275, 1890, 675, 150, 0, 0, 15]


def test_automorphism_orders_of_square_m():
    code, report = run_json("aut", M)
    assert code == 0
    assert report["result"]["aut_order"] == 48
    assert report["result"]["aut_dual"] == 12


def test_derived_designs(work):
    _, d1 = run_json("derive", "d1", M)
    assert (d1["result"]["v"], d1["result"]["b"], d1["result"]["r"], d1["result"]["k"]) == (72, 36, 6, 12)
    assert d1["result"]["affine_mu"] == 2
    _, d3 = run_json("derive", "d3", M)
    assert (d3["result"]["v"], d3["result"]["b"], d3["result"]["r"], d3["result"]["k"]) == (36, 84, 14, 6)
    assert d3["result"]["bibd_lambda"] == 2
    _, oa = run_json("oa-strength", work / "oa.txt")
    assert oa["result"]["strength"] == 2
    _, res = run_json("resolve", work / "dualM.json")
    assert res["result"]["resolvable"] is False
    _, sp = run_json("spectrum", work / "d1.json")
    clusters = sp["result"]["spectrum"]["clusters"]
    assert [c["multiplicity"] for c in clusters] == [30, 41]
    assert abs(clusters[0]["value"] - 5 / 6) < 1e-9 and abs(clusters[1]["value"] - 1) < 1e-9


def test_3x3_construction_is_isomorphic(work, tmp_path):
    sup = tmp_path / "sup.json"
    inf = tmp_path / "inf.json"
    assert run("construct", "superpose", work / "mols3.json", "--out", sup).returncode == 0
    assert run("construct", "inflate", sup, "--s", 2, "--out", inf).returncode == 0
    code, report = run_json("iso", inf, D1)
    assert code == 0 and report["result"]["isomorphic"] is True


# ---- exit codes and diagnostics -----------------------------------------

def test_row_violation_exits_1_with_treatment_and_row(work):
    code, report = run_json("verify", work / "bad.json")
    assert code == 1
    assert report["status"] == "failed"
    v = report["result"]["violations"]
    assert any(x["kind"] == "repeated_in_row" and x["treatment"] == 2 and x["row"] == 1 for x in v)
    text = run("verify", work / "bad.json")
    assert text.returncode == 1
    assert "treatment 2 repeated in row 1" in text.stdout


def test_non_uniform_square_exits_1(work):
    code, report = run_json("construct", "superpose", work / "latin4.json", work / "latin4.json")
    assert code == 0 and report["result"]["uniform"] is False
    out = work / "nonuniform.json"
    assert run("construct", "superpose", work / "latin4.json", work / "latin4.json", "--out", out).returncode == 0
    code, report = run_json("verify", out)
    assert code == 1
    assert report["result"]["uniform"] is False
    assert "reference" in report["result"]


@pytest.mark.parametrize("args", [
    ["verify", "/nonexistent.json"],
    ["field", "--q", 6],
    ["mols", "--q", 2],
    ["construct", "inflate", D1, "--s", 0],
    ["nosuchcommand"],
    ["field"],
    ["derive", "d4", M],
    ["classify", "--n", 5, "--mu", 2, "--out", "/tmp/x", "--seed-range", "9..1"],
])
def test_input_errors_exit_2(args):
    proc = run(*args)
    assert proc.returncode == 2, proc
    assert proc.stderr.strip()
    assert len(proc.stderr.strip().splitlines()) <= 2


def test_malformed_json_exits_2(tmp_path):
    f = tmp_path / "broken.json"
    f.write_text("{\"n\": 3,")
    assert run("verify", f).returncode == 2


def test_bad_worker_env_exits_2(tmp_path):
    proc = run("classify", "--n", 4, "--mu", 1, "--out", tmp_path / "c", env={"USLSQ_WORKERS": "zero"})
    assert proc.returncode == 2


# ---- round trips ---------------------------------------------------------

def test_construct_write_read_is_lossless(work, tmp_path):
    cases = {
        "superpose": ["construct", "superpose", work / "mols3.json"],
        "inflate": ["construct", "inflate", D1, "--s", 3],
        "bars": ["construct", "bars", "--n", 4],
    }
    for name, args in cases.items():
        first, second = tmp_path / f"{name}1.json", tmp_path / f"{name}2.json"
        code, built = run_json(*args, "--out", first)
        assert code == 0
        # Superposing a single square reproduces it.
        assert run("construct", "superpose", first, "--out", second).returncode == 0
        assert json.loads(first.read_text()) == json.loads(second.read_text())
        code, checked = run_json("verify", first)
        assert code == 0
        for key in ("n", "k", "mu", "eta"):
            assert checked["result"][key] == built["result"][key]


# ---- classification and catalog -----------------------------------------

def test_catalog_of_empty_directory_exits_2(tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    proc = run("catalog", empty)
    assert proc.returncode == 2
    assert "empty" in proc.stderr


def test_sharded_classification_and_catalog(tmp_path):
    out = tmp_path / "c52"
    code, first = run_json("classify", "--n", 5, "--mu", 2, "--out", out, "--seed-range", "0..40")
    assert code == 0 and first["result"]["complete"] is False
    proc = run("catalog", out)
    assert proc.returncode == 2 and "incomplete" in proc.stderr
    code, second = run_json("classify", "--n", 5, "--mu", 2, "--out", out, env={"USLSQ_WORKERS": "2"})
    assert code == 0 and second["result"]["complete"] is True
    assert second["result"]["classes"] == 10
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["workers"] == 2
    report = assert_text_equals_json(["catalog", out], tmp_path)
    assert report["result"]["summary"] == "10 classes"
    assert len(report["result"]["classes"]) == 10
    assert any("affine resolvable" in line for line in report["result"]["derived"])
    assert any("BIBD" in line for line in report["result"]["derived"])
    index = json.loads((out / "index.json").read_text())
    for cls in index["classes"]:
        code, checked = run_json("verify", out / cls["file"])
        assert code == 0 and checked["result"]["mu"] == 2 and checked["result"]["eta"] == cls["eta"]


def test_catalog_5_3(tmp_path):
    out = tmp_path / "c53"
    code, report = run_json("classify", "--n", 5, "--mu", 3, "--out", out)
    assert code == 0 and report["result"]["classes"] == 277
    code, cat = run_json("catalog", out)
    assert code == 0
    assert cat["result"]["summary"] == "277 classes"
    assert cat["result"]["eta_min"] == [360, 1350, 0, 0, 0, 60]
    assert cat["result"]["eta_next"] == [488, 1062, 128, 64, 0, 28]
    assert cat["result"]["eta_worst"] == [720, 450, 600, 0, 0, 0]
