import json

import numpy as np
import pytest
from click.testing import CliRunner

from orbtqft import fusion_data as fd
from orbtqft.cli import main


def run(*args):
    res = CliRunner().invoke(main, list(args))
    return res.exit_code, res.output


def run_json(*args):
    code, out = run(*args)
    return code, json.loads(out)


def test_invariant_examples():
    code, r = run_json("invariant", "--cat", "vec_z2", "--manifold", "s3_two_balls")
    assert code == 0 and abs(r["value_re"] - 0.5) < 1e-9 and abs(r["value_im"]) < 1e-9
    assert set(r) >= {"manifold", "category", "value_re", "value_im", "skeleton_id", "move_log_hash"}
    code, r = run_json("invariant", "--manifold", "t3_dual", "--cat", "vec_z2")
    assert code == 0 and abs(r["value_re"] - 4.0) < 1e-9


@pytest.mark.parametrize("manifold", ["s3_two_balls", "s3_dual", "s2xs1_product", "t3_dual"])
def test_trivial_category_is_exactly_one(manifold):
    code, r = run_json("invariant", "--cat", "trivial", "--manifold", manifold)
    assert code == 0 and r["value_re"] == 1.0 and r["value_im"] == 0.0


def test_invariant_with_moves_is_deterministic():
    a = run_json("invariant", "--cat", "fibonacci", "--manifold", "s3_torus_halves", "--moves", "6", "--seed", "3")
    b = run_json("invariant", "--cat", "fibonacci", "--manifold", "s3_torus_halves", "--moves", "6", "--seed", "3")
    assert a == b
    assert a[0] == 0 and a[1]["moves"] == 6 and a[1]["max_drift"] < 1e-9


def test_axioms_fibonacci():
    code, r = run_json("axioms", "--cat", "fibonacci")
    assert code == 0 and r["ok"] and len(r["passed"]) == 8


def test_statespace_torus():
    code, r = run_json("statespace", "--cat", "vec_z3", "--surface", "t2")
    assert code == 0 and r["dim"] == 9


def test_graph_hopf():
    code, r = run_json("graph", "--cat", "vec_z2", "--manifold", "s3_two_balls", "--graph", "hopf.json")
    assert code == 0
    # colors (1, sign) and (1, trivial): chi_Y(g_X) chi_X(g_Y) / 2 = -1/2
    assert abs(complex(r["value_re"], r["value_im"]) + 0.5) < 1e-9


def test_graph_with_moves():
    code, r = run_json("graph", "--cat", "vec_z2", "--graph", "unknot", "--moves", "10", "--seed", "1")
    assert code == 0 and abs(r["value_re"] - 0.5) < 1e-9 and r["max_drift"] < 1e-8


def test_validate_examples(tmp_path):
    assert run("validate", "fibonacci")[0] == 0
    assert run("validate", "--manifold", "s3_two_balls")[0] == 0
    doc = json.loads(fd.dump_category(fd.builtin("fibonacci")))
    for ent in doc["F"]:
        if (ent["a"], ent["b"], ent["c"], ent["d"]) == (1, 1, 1, 1):
            ent["re"] *= 1.02
            break
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, r = run_json("validate", str(bad))
    assert code == 1
    item = r["items"][0]
    assert not item["ok"] and item["worst"] is not None and item["max_residual"] > 1e-3


def test_validate_skeleton_file(tmp_path):
    from orbtqft import library

    p = tmp_path / "sk.json"
    doc = library.get("s3_dual").to_doc()
    p.write_text(json.dumps(doc))
    assert run("validate", str(p))[0] == 0
    doc["flags"] = doc["flags"][1:]
    p.write_text(json.dumps(doc))
    assert run("validate", str(p))[0] == 1


def test_io_errors(tmp_path):
    assert run("validate", str(tmp_path / "missing.json"))[0] == 3
    assert run("invariant", "--cat", "nope")[0] == 3
    assert run("invariant", "--manifold", "nowhere")[0] == 3
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert run("invariant", "--cat", str(junk))[0] == 3
    assert run("invariant", "--tol", "-1")[0] == 3


def test_tolerance_breach_exit_code():
    # a tolerance below round-off makes the axiom check a breach
    assert run("axioms", "--cat", "fibonacci", "--tol", "1e-30")[0] == 2


def test_out_and_tsv(tmp_path):
    out = tmp_path / "r.json"
    code, _ = run("invariant", "--cat", "vec_z3", "--manifold", "s3_dual", "--out", str(out))
    assert code == 0
    r = json.loads(out.read_text())
    assert abs(r["value_re"] - 1 / 3) < 1e-9
    code, text = run("statespace", "--cat", "vec_z2", "--surface", "s2", "--format", "tsv")
    assert code == 0 and "dim\t1" in text


def test_user_category_file(tmp_path):
    p = tmp_path / "fib.json"
    p.write_text(fd.dump_category(fd.builtin("fibonacci")))
    code, r = run_json("invariant", "--cat", str(p), "--manifold", "s3_dual")
    phi = (1 + np.sqrt(5)) / 2
    assert code == 0 and abs(r["value_re"] - 1 / (1 + phi**2)) < 1e-9
