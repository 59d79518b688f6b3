"""Heatmap rendering and iso-contour export on synthetic tables, where the
contour location is known exactly (matplotlib interpolates linearly, so a
linear field crosses a level on a straight line)."""

import numpy as np
import pytest

from quasiecs.plotting import contour_vertices, render_heatmap
from quasiecs.sweep import ResultRow, SweepTable


def linear_table(nx: int = 4, ny: int = 3, metric: str = "fidelity") -> SweepTable:
    """value == x on an integer grid."""
    rows = [
        ResultRow((float(x), float(y)), metric, float(x))
        for x in range(nx)
        for y in range(ny)
    ]
    return SweepTable(("a", "b"), tuple(rows))


class TestGridAssembly:
    def test_rejects_ragged_grid(self, tmp_path):
        table = linear_table()
        short = SweepTable(table.axis_names, table.rows[:-1])
        with pytest.raises(ValueError):
            render_heatmap(short, "a", "b", "fidelity", None, tmp_path / "x.png")

    def test_rejects_duplicate_points(self, tmp_path):
        table = linear_table()
        doubled = SweepTable(table.axis_names, table.rows + (table.rows[0],))
        with pytest.raises(ValueError):
            render_heatmap(doubled, "a", "b", "fidelity", None, tmp_path / "x.png")

    def test_rejects_axis_name_mismatch(self, tmp_path):
        with pytest.raises(ValueError):
            render_heatmap(linear_table(), "b", "a", "fidelity", None, tmp_path / "x.png")

    def test_rejects_unknown_metric(self, tmp_path):
        with pytest.raises(ValueError):
            render_heatmap(linear_table(), "a", "b", "purity", None, tmp_path / "x.png")


class TestContours:
    def test_linear_field_contour_is_exact(self):
        xs = np.arange(4.0)
        ys = np.arange(3.0)
        grid = np.tile(xs, (3, 1))
        verts = contour_vertices(xs, ys, grid, 1.25)
        assert len(verts) >= 2
        np.testing.assert_allclose(verts[:, 0], 1.25, atol=1e-9)

    def test_level_out_of_range_gives_no_vertices(self):
        xs = np.arange(4.0)
        ys = np.arange(3.0)
        grid = np.zeros((3, 4))
        assert contour_vertices(xs, ys, grid, 0.5).shape == (0, 2)


class TestRenderHeatmap:
    def test_writes_png_and_contour_csv(self, tmp_path):
        png = tmp_path / "surface.png"
        contour = tmp_path / "surface.contour.csv"
        n = render_heatmap(linear_table(), "a", "b", "fidelity", 1.25, png, contour)
        assert png.stat().st_size > 0
        assert n >= 2
        lines = contour.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "x,y"
        assert len(lines) == n + 1
        for line in lines[1:]:
            x, _ = line.split(",")
            assert float(x) == pytest.approx(1.25, abs=1e-9)

    def test_uncrossed_level_writes_header_only(self, tmp_path):
        png = tmp_path / "flat.png"
        contour = tmp_path / "flat.contour.csv"
        n = render_heatmap(linear_table(), "a", "b", "fidelity", 99.0, png, contour)
        assert n == 0
        assert contour.read_text(encoding="utf-8") == "x,y\n"
        assert png.stat().st_size > 0

    def test_tolerates_missing_values(self, tmp_path):
        table = linear_table()
        rows = list(table.rows)
        rows[5] = ResultRow(rows[5].axis_values, "fidelity", None, note="failed")
        patched = SweepTable(table.axis_names, tuple(rows))
        png = tmp_path / "gappy.png"
        render_heatmap(patched, "a", "b", "fidelity", None, png)
        assert png.stat().st_size > 0
