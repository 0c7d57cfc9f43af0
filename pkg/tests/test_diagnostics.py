import json

import numpy as np
import pytest

from sppm import DriverParams, load_problem, run_sppm
from sppm.criticality import CriticalityReport
from sppm.diagnostics import (
    convergence_table,
    csv_header,
    descent_report,
    export_run,
    fejer_report,
    load_run,
    run_to_csv,
    sweep_to_csv,
)
from sppm.driver import IterateRecord, RunRecord, run_sweep, sweep_rows
from sppm.errors import ExportError

REPORT = CriticalityReport(0.0, "smooth-qp", True, 0, None, 1e-5)


def fake_run(xs, fs=None):
    fs = fs if fs is not None else [(float(np.sum(np.square(x))),) for x in xs]
    hist = tuple(IterateRecord(k, tuple(map(float, x)), tuple(map(float, f)), 0.0, 1.0, 0.0, 0)
                 for k, (x, f) in enumerate(zip(xs, fs)))
    return RunRecord("fake", DriverParams(), hist, "step-tol", REPORT)


def test_fejer_constant_history():
    rep = fejer_report(fake_run([(2.0,)] * 4), [0.0])
    assert rep.distances == (2.0,) * 4 and rep.monotone and rep.max_violation == 0.0


def test_fejer_geometric_history():
    rep = fejer_report(fake_run([(3.0 ** -k,) for k in range(6)]), [0.0])
    assert rep.monotone
    assert rep.distances == pytest.approx([3.0 ** -k for k in range(6)])


def test_fejer_violation_detected():
    rep = fejer_report(fake_run([(1.0,), (0.0,), (1.0,)]), [0.0])
    assert not rep.monotone and rep.max_violation == 1.0
    with pytest.raises(ValueError):
        fejer_report(fake_run([(1.0,)]), [0.0, 0.0])


def test_descent_report():
    assert descent_report(fake_run([(2.0,), (1.0,), (0.5,)])) == (True, None)
    assert descent_report(fake_run([(2.0,), (1.0,), (1.5,), (0.0,)])) == (False, 2)
    assert descent_report(fake_run([(2.0,)])) == (True, None)
    # a rise inside the tolerance is not a violation
    assert descent_report(fake_run([(0.0,)] * 2, [(1.0,), (1.0 + 1e-13,)]), feas_tol=1e-12) == (True, None)


def test_csv_layout_and_round_trip():
    run = fake_run([(1.0,), (0.5,)])
    text = run_to_csv(run)
    lines = text.splitlines()
    assert lines[0].split(",") == csv_header(1, 1) == ["k", "step_norm", "beta", "inner_residual",
                                                         "inner_iters", "F_1", "x_1"]
    assert len(lines) == 3 and all(len(line.split(",")) == 7 for line in lines)
    assert [float(v) for v in lines[2].split(",")[5:]] == [0.25, 0.5]


def test_json_round_trip(tmp_path):
    run = run_sppm(load_problem("quad-tri"), DriverParams(seed=2))
    path = tmp_path / "run.json"
    export_run(run, "json", path)
    assert load_run(path) == run
    json.loads(path.read_text())


def test_csv_export_is_exact(tmp_path):
    run = run_sppm(load_problem("cobb2"), DriverParams(seed=0))
    path = tmp_path / "run.csv"
    export_run(run, "csv", path)
    rows = path.read_text().splitlines()[1:]
    xs = [tuple(float(v) for v in row.split(",")[-2:]) for row in rows]
    assert xs == [h.x for h in run.history]


def test_unwritable_path_leaves_nothing(tmp_path):
    target = tmp_path / "missing" / "run.csv"
    with pytest.raises(ExportError):
        export_run(fake_run([(1.0,)]), "csv", target)
    assert not target.exists()
    # replacing an existing directory fails even with elevated privileges
    occupied = tmp_path / "occupied"
    occupied.mkdir()
    with pytest.raises(ExportError):
        export_run(fake_run([(1.0,)]), "csv", occupied)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["occupied"]
    assert list(occupied.iterdir()) == []


def test_unknown_format(tmp_path):
    with pytest.raises(ValueError):
        export_run(fake_run([(1.0,)]), "xml", tmp_path / "x")


def test_convergence_table_rows():
    rows = convergence_table(fake_run([(1.0,), (0.5,)]))
    assert [r["k"] for r in rows] == [0, 1] and rows[1]["F"] == (0.25,)


def test_sweep_csv():
    rows = sweep_rows(run_sweep(load_problem("quad-seg"), DriverParams(x0=(3.0,)), grid=2))
    lines = sweep_to_csv(rows).splitlines()
    assert lines[0] == "t,x_1,F_1,F_2,nondominated"
    assert len(lines) == 4 and all(line.endswith(",1") for line in lines[1:])
