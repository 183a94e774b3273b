import json

import pytest

from quivrep import classes, fmodule
from quivrep.cli import main

from test_io import DATA


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_rooted_example(capsys):
    code, out, _ = run(capsys, "rooted", DATA / "example.quiver")
    assert code == 0
    assert out.splitlines() == ["V_0 = ∅", "V_1 = {1,2}", "V_2 = {1,2,3}", "V_3 = {1,2,3,4}"]


def test_rooted_loop_and_malformed(capsys):
    code, out, _ = run(capsys, "rooted", DATA / "loop.quiver")
    assert code == 1 and out.splitlines() == ["V_0 = ∅", "V_1 = ∅"]
    code, _, err = run(capsys, "rooted", DATA / "bad.quiver")
    assert code == 2 and "line 3" in err
    code, _, _ = run(capsys, "rooted", DATA / "missing.quiver")
    assert code == 2


def test_analyze_gf_not_flat(capsys):
    code, out, _ = run(capsys, "analyze", "--json", DATA / "gf_not_flat.rep")
    assert code == 0
    d = json.loads(out)
    assert d["flags"]["gorenstein_flat"] and not d["flags"]["flat"]
    assert d["vertices"]["3"]["C"] == "Z/2"
    assert d["witnesses"]["flat"]["vertex"] in {"1", "3"}
    code, out, _ = run(capsys, "analyze", DATA / "gf_not_flat.rep")
    assert "gorenstein_flat: true" in out and "flat: false" in out and "not flat: vertex" in out


def test_analyze_non_injective_phi(capsys):
    code, out, _ = run(capsys, "analyze", "--json", DATA / "nonmono.rep")
    d = json.loads(out)
    assert not d["flags"]["gorenstein_flat"]
    assert d["vertices"]["3"]["phi_kernel_witness"] == [2]
    assert d["witnesses"]["gorenstein_flat"]["reason"] == "phi not injective"


def test_analyze_zero_rep_all_true(capsys, tmp_path):
    (tmp_path / "z.rep").write_text(f"quiver {DATA / 'example.quiver'}\nring 4\n")
    code, out, _ = run(capsys, "analyze", "--json", tmp_path / "z.rep")
    d = json.loads(out)
    assert all(d["flags"].values()) and all(d["hovey"].values())


def test_analyze_wrong_ring(capsys):
    code, _, err = run(capsys, "analyze", "--ring", 6, DATA / "gf_not_flat.rep")
    assert code == 2 and "Z/6" in err


def test_dual_and_tensor(capsys, tmp_path):
    code, out, _ = run(capsys, "dual", "--quiver-path", "opp.quiver", DATA / "gf_not_flat.rep")
    assert code == 0
    (tmp_path / "y.rep").write_text(out)
    (tmp_path / "opp.quiver").write_text("vertex 1\nvertex 2\nvertex 3\nvertex 4\narrow a 3 1\narrow b 3 2\narrow c 4 3\n")
    code, out, _ = run(capsys, "tensor", "--json", tmp_path / "y.rep", DATA / "gf_not_flat.rep")
    assert code == 0 and json.loads(out)["order"] >= 1
    code, out, _ = run(capsys, "adjunction-check", "--module", "Z/4 + Z/2", tmp_path / "y.rep", DATA / "gf_not_flat.rep")
    assert code == 0 and "bijection" in out
    code, _, _ = run(capsys, "tensor", DATA / "gf_not_flat.rep", DATA / "gf_not_flat.rep")
    assert code == 2


def test_construct_and_verify_trace(capsys, tmp_path):
    out_file = tmp_path / "trace.json"
    code, out, _ = run(capsys, "construct", "cogenerator", DATA / "gf_not_flat.rep", "--out", out_file)
    assert code == 0 and "trace verified" in out
    code, out, _ = run(capsys, "verify-trace", out_file)
    assert code == 0 and "verified" in out
    data = json.loads(out_file.read_text())
    data["classes"]["W"] = "Prj"
    data["classes"]["X"] = "Prj"
    out_file.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify-trace", out_file)
    assert code == 1 and "FAILED" in out
    code, _, err = run(capsys, "construct", "cogenerator", DATA / "nonmono.rep")
    assert code == 1 and "construction failed" in err


def test_construct_trivial(capsys, tmp_path):
    (tmp_path / "x.rep").write_text(
        f"quiver {DATA / 'example.quiver'}\nring 4\nmodule 1 Z/4\nmodule 3 Z/4\nmodule 4 Z/4 + Z/4\nmap a [[1]]\nmap c [[1],[0]]\n"
    )
    code, out, _ = run(capsys, "construct", "trivial", "--json", tmp_path / "x.rep")
    d = json.loads(out)
    assert code == 0 and d["verified"]


def test_verify_suite_and_determinism(capsys, tmp_path):
    code, first, _ = run(capsys, "verify", "rooted", "--json", "--seed", 3)
    assert code == 0
    code, second, _ = run(capsys, "verify", "rooted", "--json", "--seed", 3)
    assert first == second
    d = json.loads(first)
    assert d["passed"] and all(r["passed"] for r in d["records"])
    code, _, err = run(capsys, "verify", "rooted", "--json")
    assert code == 2 and "--seed" in err


def test_verify_adjunction_small(capsys):
    code, out, _ = run(capsys, "verify", "adjunction", "--seed", 7, "--trials", 10, "--json")
    d = json.loads(out)
    assert code == 0 and sum(r["instances"] for r in d["records"]) == 10


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate", "--quiver", "a2", "--ring", 2, "--max-order", 2, "--count")
    assert code == 0 and out.strip() == "5"
    code, out, _ = run(capsys, "enumerate", "--quiver", "a2", "--ring", 2, "--max-order", 2, "--json")
    assert json.loads(out)["count"] == 5
    code, out, _ = run(capsys, "enumerate", "--quiver", "a2", "--ring", 4, "--max-order", 4, "--phi-class", "Prj", "--json")
    # 0, 0 -> Z/4, and Z/4 -> Z/4 by each of the two units
    assert json.loads(out)["count"] == 4
    code, out, _ = run(capsys, "enumerate", "--quiver", "a2", "--ring", 4, "--max-order", 4, "--phi-class", "Prj", "--count")
    assert code == 0 and out.strip() == "4"
    code, _, _ = run(capsys, "enumerate", "--quiver", "example", "--max-order", 8, "--limit", 10)
    assert code == 2


def test_fault_injection_is_caught_and_replays(capsys, monkeypatch, tmp_path):
    """Corrupt the Gorenstein flat oracle; `verify all` must fail with replayable counterexamples."""
    rules = dict(classes._RULES[fmodule.QUASI_FROBENIUS])
    rules["GF"] = classes.is_projective_module
    monkeypatch.setitem(classes._RULES, fmodule.QUASI_FROBENIUS, rules)
    report = tmp_path / "report.json"
    code, out, _ = run(
        capsys, "verify", "all", "--seed", 1, "--max-order", 2, "--trials", 2, "--json", "--out", report
    )
    assert code == 1
    d = json.loads(out)
    failing = [r for r in d["records"] if not r["passed"]]
    assert failing and any(r["counterexample"] for r in failing)
    cex = next(r["counterexample"] for r in failing if r["counterexample"])
    (tmp_path / "cex.json").write_text(json.dumps(cex))
    code, out, _ = run(capsys, "verify-trace", tmp_path / "cex.json")
    assert code == 1 and "failure reproduced" in out
    code, _, _ = run(capsys, "verify-trace", report)
    assert code == 1
