import io
import json
import subprocess
import sys

import pytest

from finslerkit.cli import EXIT_ERRATUM, EXIT_PASS, EXIT_USAGE, main
from finslerkit.fields import Scenario, catalog
from finslerkit.suites import Settings, VerifyReport, run_suite


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def _scenario(tmp_path, pair, name="s.json", **kw):
    sc = Scenario.from_pair(pair, **kw)
    path = tmp_path / name
    sc.save(path)
    return str(path)


def test_catalog_list():
    code, out, _ = run("catalog", "list", "--json")
    assert code == EXIT_PASS
    rows = json.loads(out)
    assert len(rows) >= 6
    assert {"euclidean", "space_form", "hopf_oneform"} <= {r["name"] for r in rows}


def test_catalog_show():
    code, out, _ = run("catalog", "show", "euclidean")
    assert code == EXIT_PASS and "n x n identity" in out
    code, out, _ = run("catalog", "show", "space_form")
    assert "μ" in out
    assert run("catalog", "show", "nope")[0] == EXIT_USAGE
    assert run("catalog", "show")[0] == EXIT_USAGE


@pytest.mark.parametrize("argv", [
    [], ["verify", "bogus"], ["verify", "--suite", "bogus"],
    ["verify", "spray", "--suite", "weyl"], ["verify", "--samples", "0", "symbolic"],
    ["frobnicate"], ["verify", "--samples", "many"], ["report"],
    ["report", "/no/such/file.json"],
])
def test_usage_errors(argv):
    assert run(*argv)[0] == EXIT_USAGE


def test_verify_symbolic_json():
    code, out, _ = run("verify", "symbolic", "--json")
    assert code == EXIT_ERRATUM
    rep = json.loads(out)
    recs = {c["name"]: c for c in rep["checks"]}
    q = recs["quadratic_reduction"]
    assert q["status"] == "erratum"
    assert q["details"]["diffs"][0]["printed"] == "16(1+2B)(5+4B)/9"
    assert recs["f1_expansion"]["status"] == "pass"


def test_verify_spray_passes():
    code, out, _ = run("verify", "spray", "--samples", "8", "--seed", "7")
    assert code == EXIT_PASS
    assert "suite spray: pass" in out


def test_verify_with_scenario(tmp_path):
    path = _scenario(tmp_path, catalog("hopf_oneform", c=0.3), samples=5)
    code, out, _ = run("verify", "--suite", "spray", "--scenario", path, "--json")
    assert code == EXIT_PASS
    assert json.loads(out)["checks"][0]["name"].startswith("closed_vs_direct[scenario")


def test_report_flat_constant(tmp_path):
    path = _scenario(tmp_path, catalog("constant_oneform", n=3, c=(0.2, 0.1, 0.0)))
    code, out, _ = run("report", path, "--samples", "6", "--json")
    assert code == EXIT_PASS
    rep = json.loads(out)
    for r in rep["samples"]:
        assert all(abs(g) < 1e-14 for g in r["G_direct"])
        assert r["W_norm"] <= 1e-10
        assert abs(r["K"]) < 1e-12
    assert rep["beta"]["is_parallel"]


def test_report_sphere(tmp_path):
    path = _scenario(tmp_path, catalog("space_form", n=3, mu=1.0))
    code, out, _ = run("report", "--scenario", path, "--samples", "5", "--json")
    rep = json.loads(out)
    for r in rep["samples"]:
        assert r["K"] == pytest.approx(1.0, abs=1e-6)
        assert r["W_norm"] <= 1e-7


def test_report_nonparallel_has_weyl(tmp_path):
    pair = catalog("linear_oneform", n=3, M=[[0, 0, 0], [0.1, 0, 0], [0, 0, 0]])
    path = _scenario(tmp_path, pair)
    code, out, _ = run("report", path, "--samples", "10", "--json")
    assert json.loads(out)["summary"]["max_W_norm"] > 1e-3


def test_report_explicit_point(tmp_path):
    path = _scenario(tmp_path, catalog("hopf_oneform", c=0.3))
    code, out, _ = run("report", path, "--x", "0.1,0,0", "--y", "0,1,0", "--json")
    rep = json.loads(out)
    assert code == EXIT_PASS and len(rep["samples"]) == 1
    assert rep["samples"][0]["y"] == [0.0, 1.0, 0.0]
    assert run("report", path, "--x", "0.1,0")[0] == EXIT_USAGE
    assert run("report", path, "--x", "0.1,0", "--y", "1,0")[0] == EXIT_USAGE


def test_report_text(tmp_path):
    path = _scenario(tmp_path, catalog("hopf_oneform", c=0.3))
    code, out, _ = run("report", path, "--samples", "2")
    assert code == EXIT_PASS and "max_W_norm" in out


def test_report_bad_scenario(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"dimension": 3}')
    assert run("report", str(path))[0] == EXIT_USAGE


def test_report_deterministic(tmp_path):
    path = _scenario(tmp_path, catalog("perturbed_oneform", n=3, seed=2, eps=0.1,
                                       base=(0.2, 0.1, 0.0)))
    a = run("report", path, "--samples", "4", "--seed", "3", "--json")[1]
    b = run("report", path, "--samples", "4", "--seed", "3", "--json")[1]
    c = run("report", path, "--samples", "4", "--seed", "4", "--json")[1]
    assert a == b and a != c


def test_verify_report_status_logic():
    rep = VerifyReport("x")
    rep.add("a", True, 0.0, 1)
    assert rep.exit_code == 0
    rep.add("b", True, 0.0, 1, erratum=True)
    assert rep.status == "erratum" and rep.exit_code == 2
    rep.add("c", False, float("nan"), 1)
    assert rep.exit_code == 1 and rep.checks[-1]["max_error"] is None
    with pytest.raises(KeyError):
        run_suite("bogus", Settings())


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "finslerkit", "catalog", "list"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "euclidean" in proc.stdout
