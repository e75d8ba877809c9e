"""CSV and JSON writers with a small self-describing metadata header."""

from __future__ import annotations

import csv
import io
import json

import numpy as np

SIG_DIGITS = 15


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        # + 0.0 folds -0.0 into 0.0
        return f"{float(x) + 0.0:.{SIG_DIGITS}g}"
    return str(x)


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        return float(f"{float(x):.{SIG_DIGITS}g}")
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def to_csv(header, rows, meta: dict | None = None) -> str:
    """Render a table; metadata lines are prefixed with '#'."""
    buf = io.StringIO()
    for key, value in (meta or {}).items():
        buf.write(f"# {key}: {fmt(value) if not isinstance(value, str) else value}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _parse(cell: str):
    for conv in (int, float):
        try:
            return conv(cell)
        except ValueError:
            pass
    if cell in ("true", "false"):
        return cell == "true"
    return cell


def read_csv(text: str):
    """Inverse of :func:`to_csv`: returns ``(meta, header, rows)``."""
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            meta[key.strip()] = value.strip()
        elif line:
            body.append(line)
    reader = csv.reader(body)
    header = next(reader)
    rows = [[_parse(c) for c in row] for row in reader]
    return meta, header, rows


def to_json(meta: dict, data) -> str:
    return json.dumps({"meta": _plain(meta), "data": _plain(data)}, indent=2, sort_keys=False) + "\n"
