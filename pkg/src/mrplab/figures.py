"""Figure rendering for report series.

Each series is a (header, rows) table; the column structure decides the
plot.  Tables whose first column is numeric become line plots against that
column; tables with a string first column become bar charts of the first
numeric column (side by side when an observed/implied pair is present).
Everything renders through the Agg backend straight to PNG files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["render_series"]

_DPI = 120


def _numeric(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _line_figure(name: str, header, rows, path: Path) -> None:
    xs = [r[0] for r in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for j in range(1, len(header)):
        ys = [r[j] for r in rows]
        if not all(_numeric(y) for y in ys):
            continue
        ax.plot(xs, ys, label=header[j], linewidth=1.4)
    ax.set_xlabel(header[0])
    ax.set_title(name.replace("_", " "))
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def _bar_figure(name: str, header, rows, path: Path) -> None:
    labels = [str(r[0]) for r in rows]
    numeric_cols = [
        j for j in range(1, len(header)) if all(_numeric(r[j]) for r in rows)
    ]
    if not numeric_cols:
        return
    pair = numeric_cols[:2] if {"observed", "implied"} <= set(header) else numeric_cols[:1]
    fig, ax = plt.subplots(figsize=(max(6.4, 0.5 * len(labels)), 4.0))
    width = 0.8 / len(pair)
    for k, j in enumerate(pair):
        xs = [i + k * width for i in range(len(labels))]
        ax.bar(xs, [r[j] for r in rows], width=width, label=header[j])
    ax.set_xticks([i + width * (len(pair) - 1) / 2 for i in range(len(labels))])
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
    ax.set_title(name.replace("_", " "))
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def render_series(series: dict, stem: Path) -> list[Path]:
    """Render one PNG per series next to the report files.

    Empty tables are skipped; the return lists only the files written.
    """
    written: list[Path] = []
    for name in sorted(series):
        header, rows = series[name]
        if not rows:
            continue
        path = stem.parent / f"{stem.name}_{name}.png"
        if _numeric(rows[0][0]):
            _line_figure(name, header, rows, path)
        else:
            _bar_figure(name, header, rows, path)
        if path.exists():
            written.append(path)
    return written
