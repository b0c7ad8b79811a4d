"""Deterministic CSV / JSON-lines emission of metric records."""

from __future__ import annotations

import dataclasses
import json
import pathlib

from .records import METRIC_COLUMNS, MetricRecord


def format_value(value):
    """Render a value with 17 significant digits so emission is diff-stable."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, (tuple, list)):
        return ";".join(f"{float(v):.17g}" for v in value)
    return str(value)


def emit(records, fmt, path):
    """Write records to ``path`` as 'csv' or 'jsonl' with a fixed column order."""
    path = pathlib.Path(path)
    try:
        if fmt == "csv":
            _emit_csv(records, path)
        elif fmt == "jsonl":
            _emit_jsonl(records, path)
        else:
            raise ValueError(f"unknown output format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _emit_csv(records, path):
    lines = [",".join(METRIC_COLUMNS)]
    for rec in records:
        row = dataclasses.asdict(rec)
        lines.append(",".join(format_value(row[c]) for c in METRIC_COLUMNS))
    path.write_text("\n".join(lines) + "\n")


def _emit_jsonl(records, path):
    lines = []
    for rec in records:
        row = dataclasses.asdict(rec)
        row["sigma_leading"] = [float(v) for v in row["sigma_leading"]]
        lines.append(json.dumps(row, sort_keys=True))
    path.write_text("\n".join(lines) + "\n")


def parse_csv(path):
    """Read back an emitted metrics CSV into MetricRecord objects."""
    text = pathlib.Path(path).read_text().strip().split("\n")
    header = text[0].split(",")
    if tuple(header) != METRIC_COLUMNS:
        raise ValueError(f"unexpected header in {path}")
    out = []
    for line in text[1:]:
        cells = line.split(",")
        row = dict(zip(header, cells))
        sig = tuple(float(v) for v in row["sigma_leading"].split(";") if v)
        out.append(
            MetricRecord(
                abscissa=float(row["abscissa"]),
                method=row["method"],
                err_rel_l2=float(row["err_rel_l2"]),
                err_frob_norm=float(row["err_frob_norm"]),
                eta_bar_p=float(row["eta_bar_p"]),
                eta_bar_s=float(row["eta_bar_s"]),
                m_r=int(row["m_r"]),
                m_c=int(row["m_c"]),
                rank=int(row["rank"]),
                entries_accessed=int(row["entries_accessed"]),
                sigma_leading=sig,
                diverged=row["diverged"] == "1",
            )
        )
    return out


def write_table(path, header, rows):
    """Small helper for auxiliary CSVs (singular values, mean fields)."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    pathlib.Path(path).write_text("\n".join(lines) + "\n")
