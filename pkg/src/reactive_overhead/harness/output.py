"""CSV and gnuplot-style .dat output."""

from __future__ import annotations

import csv
import math
from pathlib import Path

from .compare import ComparisonReport
from .runner import Metrics, RunMetrics

CSV_COLUMNS = ("protocol", "scenario", "x", "rreq", "rrep", "rerr", "hello", "nrl", "e2ed_ms",
               "data_sent", "data_delivered", "seed")
REPORT_COLUMNS = ("quantity", "analytic", "simulated", "relative_error")


def fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.6g}"
    return str(value)


def _runs(items) -> list:
    runs = []
    for item in items:
        if isinstance(item, Metrics):
            runs.extend(item.runs)
        elif isinstance(item, RunMetrics):
            runs.append(item)
        else:
            raise TypeError(f"cannot write {type(item).__name__} as a metrics row")
    return runs


def metric_rows(items) -> list:
    rows = []
    for r in _runs(items):
        rows.append([r.protocol, r.scenario, float(r.x), r.rreq, r.rrep, r.rerr, r.hello,
                     float(r.nrl), float(r.e2ed_ms), r.data_sent, r.data_delivered, r.seed])
    return rows


def _write(path, header, rows) -> Path:
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def emit_csv(data, path) -> Path:
    """Write metrics (``Metrics``/``RunMetrics`` items, one row per run) or a comparison report."""
    if isinstance(data, ComparisonReport):
        return _write(path, REPORT_COLUMNS, data.rows())
    return _write(path, CSV_COLUMNS, metric_rows(data))


def emit_dat(data, path) -> Path:
    """Numeric columns of the CSV, whitespace separated, with a commented header."""
    numeric = [c for c in CSV_COLUMNS if c not in ("protocol", "scenario")]
    path = Path(path)
    lines = ["# protocol " + " ".join(numeric)]
    for row in metric_rows(data):
        lines.append(" ".join([row[0]] + [fmt(v) for v in row[2:]]))
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path
