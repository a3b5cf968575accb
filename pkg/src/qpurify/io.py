"""Flat-file output: csv with a header line, or json ``{"meta": ..., "rows": [...]}``.

Floats go to csv as 17 significant digits in scientific notation, which
round-trips IEEE doubles exactly; json uses Python's shortest repr, which
does too. Files are written to a temporary sibling and moved into place, so a
failed run never leaves a partial file behind.
"""

import csv
import io
import json
import math
import os
import sys
import tempfile

TRAJECTORY_COLUMNS = (
    "k",
    "purity",
    "success_weight",
    "rho11_re",
    "rho11_im",
    "rho12_re",
    "rho12_im",
    "rho22_re",
    "rho22_im",
)

ANALYZE_COLUMNS = (
    "g",
    "a",
    "b",
    "c_tilde",
    "det_rho0",
    "local_min_at_1",
    "local_max_at_1_possible",
    "k_monotonic_sufficient",
    "k_monotonic_simplified",
    "simplified_is_exact",
)

SWEEP_COLUMNS = ("p_up", "two_eps_tau_over_pi", "eta", "eta_raw", "monotonic")

FORMATS = ("csv", "json")


def fmt_float(x):
    return f"{x:.16e}"


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return fmt_float(value)
    return str(value)


def _parse_csv_cell(text):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        return float(text)


def trajectory_rows(traj):
    rows = []
    for step in traj.steps:
        m = step.state.m
        rows.append(
            {
                "k": step.k,
                "purity": step.purity,
                "success_weight": step.success_weight,
                "rho11_re": float(m[0, 0].real),
                "rho11_im": float(m[0, 0].imag),
                "rho12_re": float(m[0, 1].real),
                "rho12_im": float(m[0, 1].imag),
                "rho22_re": float(m[1, 1].real),
                "rho22_im": float(m[1, 1].imag),
            }
        )
    return rows


def render(rows, columns, fmt, meta=None):
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_csv_cell(row[c]) for c in columns])
        return buf.getvalue()
    if fmt == "json":
        for row in rows:
            for v in row.values():
                if isinstance(v, float) and not math.isfinite(v):
                    raise ValueError("json output cannot carry non-finite floats")
        payload = {"meta": meta or {}, "rows": [{c: row[c] for c in columns} for row in rows]}
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def write_rows(path, rows, columns, fmt, meta=None):
    """Write ``rows`` to ``path`` (``"-"`` for stdout) atomically."""
    text = render(rows, columns, fmt, meta)
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qpurify-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_rows(path, fmt=None):
    """Parse a file written by :func:`write_rows`; returns ``(meta, rows)``."""
    if fmt is None:
        fmt = "json" if path.endswith(".json") else "csv"
    with open(path, newline="") as fh:
        if fmt == "json":
            payload = json.load(fh)
            return payload.get("meta", {}), payload["rows"]
        reader = csv.DictReader(fh)
        rows = [{k: _parse_csv_cell(v) for k, v in row.items()} for row in reader]
        return {}, rows
