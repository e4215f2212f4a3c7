import json
import subprocess
import sys

import pytest

from bbg import __version__
from bbg.cli import build_parser, main, read_grid
from bbg.errors import BBGError
from bbg.graph_core import deserialize_many
from bbg.harness import (
    SCHEMA,
    CheckResult,
    alon_boppana_floor,
    check_coupling,
    check_meta_graph,
    check_sampler,
    derive_seed,
    make_report,
    plot_data,
    report_json,
    results_csv,
    run_verify_all,
    sweep_sigma2,
    verify_params,
    worker_count,
)
from bbg.graph_core import DegreeParams


def test_seed_derivation_is_stable():
    assert derive_seed(0, 1, 2) == derive_seed(0, 1, 2)
    assert derive_seed(0, 1, 2) != derive_seed(0, 2, 1)
    assert 0 <= derive_seed(5) < 2**64


def test_worker_count(monkeypatch):
    monkeypatch.setenv("BBG_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.delenv("BBG_THREADS")
    assert worker_count() >= 1


def test_report_envelope():
    r = make_report("x", {"a": 1}, 7, [CheckResult("c", "(1,1,1,1)", "pass", {"v": 1}).to_dict()])
    assert r["schema"] == SCHEMA and r["version"] == __version__ and r["pass"] is True
    text = report_json(r)
    assert json.loads(text)["seed"] == 7 and text == report_json(json.loads(text))
    assert results_csv(r["results"]).splitlines()[0] == "check,params,status,detail"
    bad = make_report("x", {}, 0, [CheckResult("c", "p", "fail", {}).to_dict()])
    assert bad["pass"] is False


def test_tiny_checks_pass():
    assert check_meta_graph((3, 3, 2, 2), False).status == "pass"
    assert check_meta_graph((4, 4, 2, 2), True).status == "pass"
    assert check_coupling((4, 4, 2, 2), False, steps=20_000).status == "pass"
    assert check_sampler((3, 3, 2, 2), per_member=50, min_samples=300).status == "pass"


def test_verify_params_reports_errors_and_skips():
    res = verify_params((3, 3, 2, 1))
    assert [(r.check, r.status) for r in res] == [("params", "error")]
    res = {r.check: r.status for r in verify_params((2, 3, 3, 2), light_vectors=100, coupling_steps=1000)}
    assert res["enumeration"] == "pass" and res["tails_f"] == "skip"
    rep = run_verify_all([(2, 2, 1, 1)], light_vectors=200, coupling_steps=2000)
    assert rep["pass"] and {r["status"] for r in rep["results"]} <= {"pass", "skip"}


def test_sweep_reproducible_across_workers():
    a = sweep_sigma2([(20, 30, 3, 2)], 4, seed=3, workers=1)
    b = sweep_sigma2([(20, 30, 3, 2)], 4, seed=3, workers=2)
    assert report_json(a) == report_json(b)
    files = plot_data(a)
    assert len(files) == 1 and next(iter(files.values())).count("\n") == 4
    assert alon_boppana_floor(DegreeParams(200, 300, 3, 2)) == pytest.approx((2**0.5 + 1) / 3**0.5)


def test_cli_enumerate_and_exit_codes(tmp_path, capsys):
    out = tmp_path / "fam.bbg"
    assert main(["enumerate", "--n", "3", "--m", "3", "--d1", "2", "--d2", "2", "--graphs", str(out)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["results"][0]["detail"]["members"] == 6
    assert len(deserialize_many(out.read_text())) == 6
    assert main(["sample", "--n", "3", "--m", "3", "--d1", "2", "--d2", "1"]) == 1
    assert "InfeasibleMargins" in capsys.readouterr().err
    assert main(["verify-all", "--params-list", "3,3,2,1", "--out", str(tmp_path / "r.json")]) == 2
    assert main(["spectra", "--input", str(tmp_path / "missing.bbg")]) == 1
    with pytest.raises(SystemExit):
        build_parser().parse_args(["nonsense"])


def test_cli_outputs(tmp_path):
    grid = tmp_path / "grid.txt"
    grid.write_text("# n m d1 d2\n20 30 3 2\n\n30 30 2 2\n")
    assert read_grid(str(grid)) == [(20, 30, 3, 2), (30, 30, 2, 2)]
    code = main(["sweep", "--grid", str(grid), "--trials", "3", "--out", str(tmp_path / "s.json"),
                 "--csv", str(tmp_path / "s.csv"), "--plot-data", str(tmp_path / "pd")])
    assert code == 0
    assert len(list((tmp_path / "pd").iterdir())) == 2
    assert (tmp_path / "s.csv").read_text().count("sigma2_ratio") == 2
    code = main(["sample", "--n", "6", "--m", "9", "--d1", "3", "--d2", "2", "--trials", "2",
                 "--graphs", str(tmp_path / "g.bbg"), "--out", str(tmp_path / "o.json")])
    assert code == 0 and len(deserialize_many((tmp_path / "g.bbg").read_text())) == 2
    code = main(["spectra", "--input", str(tmp_path / "g.bbg"), "--iterative", "--out", str(tmp_path / "sp.json")])
    assert code == 0
    code = main(["verify-switchings", "--n", "4", "--m", "4", "--d1", "2", "--d2", "2", "--out", str(tmp_path / "v.json")])
    assert code == 0
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2 3\n")
    with pytest.raises(BBGError):
        read_grid(str(bad))


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bbg.cli", "digraph", "--n", "20", "--degrees", "2,3",
                           "--trials", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["command"] == "digraph"
