import csv
import json
import os

import numpy as np
import pytest

from calctune import JointTable, StudyConfig, run_study
from calctune import io
from calctune.cli import main
from calctune.core import CELL_NAMES
from calctune.study import FILES, StageError, report_from_files

SMALL = dict(seed=7, networks=4, restarts=1)


def _read(path):
    with open(path, "rb") as fh:
        return fh.read()


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("study")
    report = run_study(StudyConfig(out_dir=str(out), **SMALL))
    return out, report


def test_all_files_written(small_run):
    out, _ = small_run
    for name in FILES.values():
        assert (out / name).is_file(), name


def test_networks_csv_format(small_run):
    out, _ = small_run
    with open(out / FILES["networks"]) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == ("id",) + CELL_NAMES
    assert len(rows) == 5
    ids, tables = io.read_networks(out / FILES["networks"])
    assert ids == ["0", "1", "2", "3"]
    from calctune.study import generate_networks

    assert tables == generate_networks(7, 4)[1]


def test_norms_csv_format(small_run):
    out, _ = small_run
    with open(out / FILES["norms"]) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["network_id", "p1", "p2", "posterior_c", "iterations", "residual"]
    assert len(rows) == 4 * 25
    assert all(float(r["residual"]) < 1e-10 for r in rows)


def test_tuned_json_schema(small_run):
    out, _ = small_run
    doc = json.loads((out / FILES["tuned"]).read_text())
    entry = doc["networks"][0]
    assert set(entry["calculi"]) == {"linear", "independence", "mycin", "prospector"}
    assert entry["calculi"]["mycin"]["calculus"] == "mycin"
    assert set(entry["calculi"]["mycin"]["values"]) == {
        "prior_e1", "prior_e2", "prior_c", "cf1", "cf2"}
    for diag in entry["diagnostics"].values():
        assert diag["mse"] <= diag["init_mse"]


def test_rmse_csv_precision(small_run):
    out, report = small_run
    methods, rows = io.read_rmse_table(out / FILES["rmse"])
    assert methods == list(report.methods)
    for (nid, add, values), r in zip(rows, report.results):
        assert nid == r.network_id and add == r.additivity
        assert values == r.rmse


def test_report_invariants(small_run):
    _, report = small_run
    for m in report.methods:
        assert report.low[m] <= report.average[m] <= report.high[m]
    c = report.correlations
    np.testing.assert_array_equal(c, c.T)
    np.testing.assert_array_equal(np.diag(c), 1.0)
    assert np.all(np.abs(c) <= 1.0)
    assert (report.anova.df1, report.anova.df2) == (3, 9)
    for r in report.results:
        assert all(v >= 0 for v in r.rmse.values())
        assert 0.0 <= r.additivity <= 2.0


def test_regeneration_from_files_matches(small_run, tmp_path):
    out, _ = small_run
    fresh = _read(out / FILES["report_json"])
    for key in ("networks", "norms", "tuned"):
        (tmp_path / FILES[key]).write_bytes(_read(out / FILES[key]))
    report_from_files(str(tmp_path))
    for key in ("report_json", "report_md", "rmse"):
        assert _read(tmp_path / FILES[key]) == _read(out / FILES[key]), key
    assert _read(tmp_path / FILES["report_json"]) == fresh


def test_staged_cli_matches_study(small_run, tmp_path):
    out, _ = small_run
    nets = str(tmp_path / "networks.csv")
    norms = str(tmp_path / "norms.csv")
    tuned = str(tmp_path / "tuned_params.json")
    assert main(["generate", "--seed", "7", "--networks", "4", "--out", nets]) == 0
    assert main(["solve", "--networks", nets, "--grid", "0.999,0.75,0.5,0.25,0.001",
                 "--out", norms]) == 0
    assert main(["tune", "--networks", nets, "--norms", norms, "--methods", "all",
                 "--restarts", "1", "--seed", "7", "--out", tuned]) == 0
    assert main(["report", "--out", str(tmp_path)]) == 0
    for key in ("networks", "norms", "tuned", "report_json", "rmse"):
        assert _read(tmp_path / FILES[key]) == _read(out / FILES[key]), key


def test_uniform_network_is_fit_by_everything(tmp_path):
    path = tmp_path / "uniform.csv"
    io.write_networks(path, ["u"], [JointTable.uniform()])
    report = run_study(StudyConfig(networks_path=str(path), restarts=2))
    assert report.metadata["networks"] == 1
    for m in report.methods:
        assert report.average[m] < 1e-6


def test_additive_networks_suit_the_linear_model():
    rng = np.random.default_rng(21)
    tables = []
    for _ in range(5):
        a, b1, b2 = 0.1 + 0.2 * rng.uniform(size=3)
        joint = rng.dirichlet(np.ones(4)).reshape(2, 2)
        cells = np.empty((2, 2, 2))
        for e1 in (0, 1):
            for e2 in (0, 1):
                pc = a + b1 * e1 + b2 * e2
                cells[e1, e2] = joint[e1, e2] * np.array([1 - pc, pc])
        tables.append(JointTable.from_cells(cells.reshape(-1), renormalize_tol=1e-9))
    from calctune.study import evaluate_networks, solve_norms, tune_networks

    ids = [str(i) for i in range(5)]
    norms = solve_norms(ids, tables)
    tuned = tune_networks(ids, tables, norms, ("linear",))
    params = {i: {"linear": tuned[i]["linear"].params} for i in ids}
    for r in evaluate_networks(ids, tables, norms, params, ("linear",)):
        assert r.additivity < 1e-6
        assert r.rmse["linear"] < 1e-3


def test_methods_subset(tmp_path):
    report = run_study(StudyConfig(seed=1, networks=3, restarts=0,
                                   methods=("linear", "prospector"), out_dir=str(tmp_path)))
    assert report.methods == ("linear", "prospector")
    with open(tmp_path / FILES["rmse"]) as fh:
        assert fh.readline().strip() == "network_id,additivity,linear,prospector"


def test_stage_errors_are_tagged(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("id,p000,p001,p010,p011,p100,p101,p110,p111\n0,1,1,1,1,1,1,1,1\n")
    assert main(["solve", "--networks", str(bad), "--out", str(tmp_path / "n.csv")]) == 2
    assert "[solve]" in capsys.readouterr().err

    assert main(["report", "--out", str(tmp_path / "missing")]) == 2
    assert "[report]" in capsys.readouterr().err

    assert main(["study", "--networks-file", str(bad), "--out", str(tmp_path / "s")]) == 2
    assert "[generate]" in capsys.readouterr().err


def test_degenerate_network_names_the_network(tmp_path):
    cells = np.full(8, 1 / 6)
    cells[6] = cells[7] = 0.0
    with pytest.raises(StageError, match=r"\[solve\] network x"):
        from calctune.study import solve_norms

        solve_norms(["x"], [JointTable.from_cells(cells)])


def test_cli_rejects_bad_arguments():
    with pytest.raises(SystemExit):
        main(["study", "--methods", "fuzzy", "--out", "x"])
    with pytest.raises(SystemExit):
        main(["solve", "--networks", "n.csv", "--grid", "0.5,1.5", "--out", "x"])
    with pytest.raises(SystemExit):
        main(["study", "--mycin-clamp", "maybe", "--out", "x"])


def test_mycin_clamp_flag_reaches_report(tmp_path):
    assert main(["study", "--seed", "2", "--networks", "2", "--restarts", "0",
                 "--methods", "mycin,linear", "--mycin-clamp", "true",
                 "--out", str(tmp_path)]) == 0
    meta = json.loads((tmp_path / FILES["report_json"]).read_text())["metadata"]
    assert meta["mycin_clamp"] is True
    assert meta["methods"] == ["linear", "mycin"]
