"""CSV/JSON writers shared by the command line tools."""

from __future__ import annotations

import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .embedding import CaoCurves, MICurve
from .radius_search import SweepResult
from .rqa import RQA_FIELDS, RQAVector
from .signal import GroupSummary, TimeSeries


def atomic_write(path: str | Path, text: str):
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(c if isinstance(c, str) else _fmt(c) for c in row) + "\n")
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def series_csv(ts: TimeSeries, name: str = "value", segments=None) -> str:
    header = ["timestamp", name] if ts.timestamps is not None else ["index", name]
    if segments is not None:
        header.append("segment")
    rows = []
    for k in range(len(ts)):
        stamp = (str(ts.timestamps[k]) + "Z") if ts.timestamps is not None else str(k)
        row = [stamp, float(ts.values[k])]
        if segments is not None:
            row.append(int(segments[k]))
        rows.append(row)
    return csv_text(header, rows)


def trajectory_csv(traj: np.ndarray) -> str:
    return csv_text(["step", "x", "y", "z"],
                    ([k, *traj[k]] for k in range(traj.shape[0])))


def mi_csv(curve: MICurve) -> str:
    return csv_text(["lag", "mi"], zip(curve.lags.tolist(), curve.mi))


def cao_csv(curves: CaoCurves) -> str:
    return csv_text(["dim", "e1", "e2"], zip(curves.dims.tolist(), curves.e1, curves.e2))


def rqa_csv(rows: list[tuple[float, RQAVector]]) -> str:
    return csv_text(["epsilon", *RQA_FIELDS],
                    ([eps, *q.as_array()] for eps, q in rows))


def groups_csv(groups: list[GroupSummary]) -> str:
    return csv_text(["group", "count", "min", "q1", "median", "q3", "max"],
                    ([g.group, g.count, g.min, g.q1, g.median, g.q3, g.max] for g in groups))


def sweep_csv(result: SweepResult) -> str:
    header = ["epsilon", "rec_target", "objective"]
    cols = [result.grid.radii, result.grid.rec_targets, result.objective]
    if result.method == 1:
        header += ["inertia", "dc"]
        cols += [result.curves["inertia"], result.curves["dc"]]
    return csv_text(header, zip(*cols))


def sweep_summary(result: SweepResult, config: dict, seeds: dict) -> dict:
    return {
        "method": result.method,
        "epsilon_star": result.epsilon_star,
        "rec_star": result.rec_star,
        "index_star": result.index_star,
        "rule_markers": dict(result.rule_markers),
        "degenerate": result.degenerate,
        "notes": list(result.notes),
        "seeds": seeds,
        "params": {"tau": config["tau"], "dim": config["dim"]},
        "config": config,
    }
