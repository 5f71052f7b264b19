"""Serialisation of reports: JSON, delimited text, and figure files.

Every report object exposes ``to_dict()`` (the canonical machine-readable
form) and ``series()`` (named tabular data behind the verdict, one table per
diagnostic).  This module turns those into files: a single JSON or CSV
report, one CSV per series, and optionally one PNG per series rendered by
:mod:`mrplab.figures`.  Output is deterministic: keys are sorted and no
timestamps are embedded.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .errors import RejectedInputError

__all__ = [
    "report_to_json",
    "report_to_csv",
    "write_report",
    "summary_line",
]


def _as_dict(report) -> dict:
    if isinstance(report, dict):
        return report
    if hasattr(report, "to_dict"):
        return report.to_dict()
    raise RejectedInputError(f"cannot serialise {type(report).__name__}")


def report_to_json(report) -> str:
    return json.dumps(_as_dict(report), indent=2, sort_keys=True, allow_nan=True)


def _flatten(prefix: str, value, rows: list) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], rows)
    elif isinstance(value, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in value):
            rows.append((prefix, ";".join(str(v) for v in value)))
        else:
            for i, v in enumerate(value):
                _flatten(f"{prefix}.{i}", v, rows)
    else:
        rows.append((prefix, "" if value is None else str(value)))


def report_to_csv(report) -> str:
    """Two-column key,value form with dotted paths for nested fields."""
    rows: list = []
    _flatten("", _as_dict(report), rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    writer.writerows(rows)
    return buf.getvalue()


def _write_series_csv(name: str, header, rows, stem: Path) -> Path:
    path = stem.parent / f"{stem.name}_{name}.csv"
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_report(report, out_stem, fmt: str = "json", figures: bool = True) -> list[Path]:
    """Write the report and its diagnostic series under a path stem.

    Produces ``<stem>.json`` or ``<stem>.csv``, ``<stem>_<series>.csv`` for
    every series the report carries, and ``<stem>_<series>.png`` when
    ``figures`` is set.  Returns the written paths in creation order.
    """
    if fmt not in ("json", "csv"):
        raise RejectedInputError(f"unknown report format {fmt!r}")
    stem = Path(out_stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    main = stem.with_suffix(f".{fmt}")
    text = report_to_json(report) if fmt == "json" else report_to_csv(report)
    main.write_text(text + ("\n" if not text.endswith("\n") else ""))
    written.append(main)

    series = report.series() if hasattr(report, "series") else {}
    for name in sorted(series):
        header, rows = series[name]
        written.append(_write_series_csv(name, header, rows, stem))

    if figures and series:
        from .figures import render_series

        written.extend(render_series(series, stem))
    return written


def summary_line(report) -> str:
    """One human line: what was tested and how it came out."""
    d = _as_dict(report)
    if "decision" in d and "p_value" in d:
        p = d["p_value"]
        p_txt = f" p={p:.4g}" if isinstance(p, float) and p == p else ""
        return f"{d.get('test', 'report')}: {d['decision']}{p_txt}"
    if "is_mpp" in d:
        return (
            f"mpp: {'yes' if d['is_mpp'] else 'no'} "
            f"(max survival distance {d['max_distance']:.3g}, tol {d['tol']:.3g})"
        )
    if "overall" in d:
        return f"regularity: {'pass' if d['overall'] else 'fail'}"
    if "max_residuals" in d:
        worst = max(d["max_residuals"].values())
        return f"identities: worst residual {worst:.3g}"
    if "mass_b" in d:
        return f"consistency: z={d['z']:.3f} (mass of B {d['mass_b']:.3g})"
    if "max_ks" in d:
        return (
            f"kernel equality: max KS {d['max_ks']:.4g} "
            f"vs critical {d['critical_value']:.4g}"
        )
    return d.get("test", "report")
