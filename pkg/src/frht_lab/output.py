"""Report writers: CSV and JSON rows with atomic file replacement."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np


def _scalar(v):
    if isinstance(v, (np.generic,)):
        v = v.item()
    return v


def split_complex(row: dict) -> dict:
    """Complex entries become ``re_<key>`` / ``im_<key>`` pairs, order preserved."""
    out = {}
    for k, v in row.items():
        v = _scalar(v)
        if isinstance(v, complex):
            out[f"re_{k}"] = v.real
            out[f"im_{k}"] = v.imag
        else:
            out[k] = v
    return out


def _fmt_csv(v) -> str:
    v = _scalar(v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def _json_safe(v):
    v = _scalar(v)
    if isinstance(v, float) and not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, dict):
        return {str(k): _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_json_safe(x) for x in v]
    if isinstance(v, complex):
        return {"re": _json_safe(v.real), "im": _json_safe(v.imag)}
    return v


def render_csv(rows: list) -> str:
    rows = [split_complex(r) for r in rows]
    header = []
    for r in rows:
        for k in r:
            if k not in header:
                header.append(k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt_csv(r.get(k)) for k in header])
    return buf.getvalue()


def render_json(rows: list, meta: dict) -> str:
    payload = {"metadata": _json_safe(meta), "rows": [_json_safe(split_complex(r)) for r in rows]}
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(rows: list, meta: dict, fmt: str, out) -> None:
    text = render_json(rows, meta) if fmt == "json" else render_csv(rows)
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)
