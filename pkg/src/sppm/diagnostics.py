"""Reports over run histories and CSV/JSON export.

CSV columns are ``k, step_norm, beta, inner_residual, inner_iters``, then
``F_1..F_m``, then ``x_1..x_n``.  Floats are written with 17 significant
digits so they round-trip exactly; JSON uses ``repr`` which does too.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass

import numpy as np

from .criticality import CriticalityReport
from .driver import DriverParams, IterateRecord, RunRecord
from .errors import ExportError
from .scalarizer import ScalarizationParams
from .subproblem import InnerOptions


@dataclass(frozen=True)
class FejerSeries:
    distances: tuple[float, ...]
    monotone: bool
    max_violation: float
    tolerance: float


def fejer_report(run: RunRecord, x_ref, tol: float = 1e-8) -> FejerSeries:
    """Distances ``||x^k - x_ref||`` and their largest increase."""
    x_ref = np.asarray(x_ref, dtype=float)
    xs = np.array([h.x for h in run.history], dtype=float)
    if xs.shape[1] != x_ref.size:
        raise ValueError(f"reference point has dimension {x_ref.size}, iterates have {xs.shape[1]}")
    d = np.linalg.norm(xs - x_ref, axis=1)
    viol = max(0.0, float(np.max(np.diff(d)))) if d.size > 1 else 0.0
    return FejerSeries(tuple(float(v) for v in d), viol <= tol, viol, tol)


def descent_report(run: RunRecord, feas_tol: float = 1e-12) -> tuple[bool, int | None]:
    """Check ``F(x^{k+1}) ⪯ F(x^k) + feas_tol`` along the history.

    Returns ``(True, None)`` or ``(False, k)`` where ``k`` is the index of
    the first iterate that rose above its predecessor.
    """
    fs = [np.asarray(h.F_x) for h in run.history]
    for k in range(1, len(fs)):
        if np.any(fs[k] > fs[k - 1] + feas_tol):
            return False, k
    return True, None


def convergence_table(run: RunRecord) -> list[dict]:
    """One row per iterate with the monitored scalars."""
    return [
        {"k": h.k, "step_norm": h.step_norm, "beta": h.beta, "inner_residual": h.inner_residual,
         "inner_iters": h.inner_iters, "F": h.F_x}
        for h in run.history
    ]


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")


def csv_header(m: int, n: int) -> list[str]:
    return (["k", "step_norm", "beta", "inner_residual", "inner_iters"]
            + [f"F_{i + 1}" for i in range(m)] + [f"x_{j + 1}" for j in range(n)])


def run_to_csv(run: RunRecord) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    first = run.history[0]
    w.writerow(csv_header(len(first.F_x), len(first.x)))
    for h in run.history:
        w.writerow([_fmt(h.k), _fmt(h.step_norm), _fmt(h.beta), _fmt(h.inner_residual),
                    _fmt(h.inner_iters)] + [_fmt(v) for v in h.F_x] + [_fmt(v) for v in h.x])
    return buf.getvalue()


def _params_to_dict(p: DriverParams) -> dict:
    d = asdict(p)
    if isinstance(p.schedule, ScalarizationParams):
        d["schedule"] = asdict(p.schedule)
    return d


def run_to_dict(run: RunRecord) -> dict:
    return {
        "problem_name": run.problem_name,
        "params": _params_to_dict(run.params),
        "history": [asdict(h) for h in run.history],
        "termination": run.termination,
        "final_criticality": asdict(run.final_criticality),
        "metadata": dict(run.metadata),
    }


def _sp(d: dict) -> ScalarizationParams:
    return ScalarizationParams(**{**d, "z": tuple(d["z"]), "e": tuple(d["e"])})


def run_from_dict(d: dict) -> RunRecord:
    p = dict(d["params"])
    sched = p.get("schedule")
    if isinstance(sched, dict):
        p["schedule"] = _sp(sched)
    elif isinstance(sched, list):
        p["schedule"] = tuple(_sp(s) for s in sched)
    p["inner"] = InnerOptions(**p["inner"])
    params = DriverParams(**p)
    history = tuple(
        IterateRecord(**{**h, "x": tuple(h["x"]), "F_x": tuple(h["F_x"])}) for h in d["history"]
    )
    fc = dict(d["final_criticality"])
    if fc.get("witness_direction") is not None:
        fc["witness_direction"] = tuple(fc["witness_direction"])
    return RunRecord(d["problem_name"], params, history, d["termination"], CriticalityReport(**fc),
                     dict(d.get("metadata", {})))


def write_text_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file; nothing is left on failure."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".sppm-", suffix=".tmp")
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc.strerror or exc}") from exc
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise ExportError(f"cannot write {path}: {exc.strerror or exc}") from exc


def export_run(run: RunRecord, fmt: str, path) -> None:
    """Write ``run`` to ``path`` as ``"csv"`` or ``"json"``."""
    if fmt == "csv":
        text = run_to_csv(run)
    elif fmt == "json":
        text = json.dumps(run_to_dict(run), indent=1) + "\n"
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    write_text_atomic(path, text)


def load_run(path) -> RunRecord:
    """Read a run previously written with ``export_run(run, "json", path)``."""
    try:
        with open(path, encoding="utf-8") as fh:
            return run_from_dict(json.load(fh))
    except OSError as exc:
        raise ExportError(f"cannot read {path}: {exc.strerror or exc}") from exc


def sweep_to_csv(rows) -> str:
    """Aggregate sweep rows ``(t, x, F, nondominated)`` as CSV text."""
    rows = list(rows)
    n, m = len(rows[0][1]), len(rows[0][2])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [f"x_{j + 1}" for j in range(n)] + [f"F_{i + 1}" for i in range(m)] + ["nondominated"])
    for t, x, f, nd in rows:
        w.writerow([_fmt(t)] + [_fmt(v) for v in x] + [_fmt(v) for v in f] + [int(nd)])
    return buf.getvalue()
