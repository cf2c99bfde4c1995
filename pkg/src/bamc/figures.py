"""Plot-ready figure data and a dependency-free SVG line renderer.

Two figure shapes cover the benchmark outputs:

* quantile bands - per-iteration median and quantile series of best-so-far
  log-weight across runs (one line per quantile);
* single run - one run's per-iteration sample log-weights, their centered
  rolling median, and the best-so-far staircase.

Both are emitted as a long-format table (iteration, series_name, value)
that any plotting tool can consume; the SVG rendering is a convenience for
eyeballing results without extra dependencies.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .bench import DataError, QuantileSummary, RunRecord, rolling_median

__all__ = [
    "FigureRow",
    "quantile_figure_rows",
    "single_run_figure_rows",
    "write_figure_csv",
    "read_figure_csv",
    "render_svg",
]

FIGURE_HEADER = "iteration,series_name,value"

DEFAULT_WINDOW = 101

# fixed palette so regenerated SVGs are byte-identical
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


class FigureRow(NamedTuple):
    iteration: int
    series_name: str
    value: float


def quantile_figure_rows(summary: QuantileSummary) -> list:
    """Long-format rows for a quantile-band figure, one series per quantile."""
    rows = []
    for qi, q in enumerate(summary.quantiles):
        name = f"q{q:g}"
        series = summary.values[qi]
        for it, v in zip(summary.iterations, series):
            rows.append(FigureRow(int(it), name, float(v)))
    return rows


def single_run_figure_rows(records: Sequence[RunRecord], run_id: int,
                           window: int = DEFAULT_WINDOW) -> list:
    """Long-format rows for one run: raw samples, their rolling median, and
    the best-so-far staircase."""
    run = [r for r in records if r.run_id == run_id]
    if not run:
        raise DataError(f"no records for run {run_id}")
    run.sort(key=lambda r: r.iteration)
    samples = [r.sample_log_weight for r in run]
    smoothed = rolling_median(samples, window)
    rows = []
    for r, sm in zip(run, smoothed):
        rows.append(FigureRow(r.iteration, "sample", r.sample_log_weight))
        rows.append(FigureRow(r.iteration, "rolling_median", float(sm)))
        rows.append(FigureRow(r.iteration, "best_so_far", r.best_log_weight_so_far))
    return rows


def write_figure_csv(rows: Sequence[FigureRow], path, meta: Optional[dict] = None) -> Path:
    """Write the long-format table; optional metadata goes to a sidecar file
    (<path>.meta.txt) so the CSV itself stays plain tabular data."""
    path = Path(path)
    lines = [FIGURE_HEADER]
    for r in rows:
        lines.append(f"{r.iteration},{r.series_name},{float(r.value):.17g}")
    path.write_text("\n".join(lines) + "\n")
    if meta:
        sidecar = path.with_name(path.name + ".meta.txt")
        sidecar.write_text("".join(f"{k} {v}\n" for k, v in sorted(meta.items())))
    return path


def read_figure_csv(path) -> list:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != FIGURE_HEADER:
        raise DataError(f"{path}: not a figure CSV (unexpected header)")
    rows = []
    for ln in lines[1:]:
        if not ln:
            continue
        it, name, value = ln.split(",")
        rows.append(FigureRow(int(it), name, float(value)))
    return rows


def _finite(values):
    return [v for v in values if math.isfinite(v)]


def render_svg(rows: Sequence[FigureRow], path, title: str = "",
               width: int = 720, height: int = 420) -> Path:
    """Render one polyline per series.  Non-finite values break the line
    (a trace stuck at -inf simply has no points until it recovers)."""
    if not rows:
        raise DataError("no figure rows to render")
    series: dict = {}
    for r in rows:
        series.setdefault(r.series_name, []).append((r.iteration, r.value))

    xs = [r.iteration for r in rows]
    ys = _finite([r.value for r in rows])
    if not ys:
        raise DataError("no finite values to render")
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    margin = 50.0
    plot_w = width - 2 * margin
    plot_h = height - 2 * margin

    def sx(x: float) -> float:
        return margin + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return height - margin - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{margin:.1f}" y="{margin:.1f}" width="{plot_w:.1f}" height="{plot_h:.1f}" '
        f'fill="none" stroke="#cccccc"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>'
        )
    # axis extremes as tick labels
    parts.append(
        f'<text x="{margin:.1f}" y="{height - margin + 16:.1f}" font-family="sans-serif" '
        f'font-size="10">{x_lo}</text>'
    )
    parts.append(
        f'<text x="{width - margin:.1f}" y="{height - margin + 16:.1f}" text-anchor="end" '
        f'font-family="sans-serif" font-size="10">{x_hi}</text>'
    )
    parts.append(
        f'<text x="{margin - 4:.1f}" y="{height - margin:.1f}" text-anchor="end" '
        f'font-family="sans-serif" font-size="10">{y_lo:.6g}</text>'
    )
    parts.append(
        f'<text x="{margin - 4:.1f}" y="{margin + 4:.1f}" text-anchor="end" '
        f'font-family="sans-serif" font-size="10">{y_hi:.6g}</text>'
    )
    for si, (name, pts) in enumerate(sorted(series.items())):
        color = _COLORS[si % len(_COLORS)]
        pts.sort(key=lambda p: p[0])
        chunks: list = [[]]
        for x, y in pts:
            if math.isfinite(y):
                chunks[-1].append((x, y))
            elif chunks[-1]:
                chunks.append([])
        for chunk in chunks:
            if len(chunk) < 2:
                continue
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in chunk)
            parts.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.2"/>'
            )
        label_y = margin + 14 + 14 * si
        parts.append(
            f'<text x="{width - margin - 6:.1f}" y="{label_y:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11" fill="{color}">{name}</text>'
        )
    parts.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(parts) + "\n")
    return path
