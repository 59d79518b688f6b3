"""Static heatmap rendering for sweep tables, with optional iso-contour
export.  Uses the non-interactive matplotlib backend; nothing here opens a
window."""

from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .sweep import SweepTable


def _grid_from_table(
    table: SweepTable, metric: str
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pivot the long-format rows into a dense (len(ys), len(xs)) value grid.
    Missing values (error rows) become NaN; a ragged or duplicated grid is
    rejected."""
    rows = [r for r in table.rows if r.metric == metric]
    if not rows:
        raise ValueError(f"table has no rows with metric {metric!r}")
    xs = np.array(sorted({r.axis_values[0] for r in rows}))
    ys = np.array(sorted({r.axis_values[1] for r in rows}))
    if len(rows) != len(xs) * len(ys):
        raise ValueError(
            f"ragged grid: {len(rows)} rows for a {len(xs)}x{len(ys)} axis product"
        )
    xi = {v: i for i, v in enumerate(xs)}
    yi = {v: i for i, v in enumerate(ys)}
    grid = np.full((len(ys), len(xs)), np.nan)
    seen = np.zeros_like(grid, dtype=bool)
    for r in rows:
        i, j = yi[r.axis_values[1]], xi[r.axis_values[0]]
        if seen[i, j]:
            raise ValueError(f"duplicate grid point {r.axis_values}")
        seen[i, j] = True
        if r.value is not None:
            grid[i, j] = r.value
    return xs, ys, grid


def contour_vertices(
    xs: np.ndarray, ys: np.ndarray, grid: np.ndarray, level: float
) -> np.ndarray:
    """Vertices of the iso-contour ``metric == level``, concatenated across
    segments, as an (n, 2) array of (x, y) points.  Empty when the level is
    never crossed."""
    fig, ax = plt.subplots()
    try:
        cs = ax.contour(xs, ys, grid, levels=[level])
        segs = cs.allsegs[0]
    finally:
        plt.close(fig)
    if not segs:
        return np.empty((0, 2))
    return np.concatenate([np.asarray(s) for s in segs], axis=0)


def render_heatmap(
    table: SweepTable,
    x_axis: str,
    y_axis: str,
    metric: str,
    contour_level: float | None,
    path,
    contour_csv_path=None,
) -> int:
    """Render the metric surface to an image file.

    When ``contour_level`` is given the iso-contour is drawn on top and its
    vertices are written as a two-column (x, y) CSV to ``contour_csv_path``
    (header always present, body empty if the level is never crossed).
    Returns the number of contour vertices written.
    """
    if (x_axis, y_axis) != table.axis_names:
        raise ValueError(
            f"table axes are {table.axis_names}, requested ({x_axis}, {y_axis})"
        )
    xs, ys, grid = _grid_from_table(table, metric)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    mesh = ax.pcolormesh(xs, ys, grid, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=metric)
    ax.set_xlabel(x_axis)
    ax.set_ylabel(y_axis)
    n_vertices = 0
    if contour_level is not None:
        verts = contour_vertices(xs, ys, grid, contour_level)
        n_vertices = len(verts)
        if n_vertices:
            ax.contour(xs, ys, grid, levels=[contour_level], colors="white", linewidths=1.2)
        if contour_csv_path is not None:
            with open(contour_csv_path, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["x", "y"])
                for x, y in verts:
                    writer.writerow([format(x, ".12g"), format(y, ".12g")])
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return n_vertices
