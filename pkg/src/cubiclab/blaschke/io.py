"""Field dumps (flat binary float64 + JSON header) and SVG heatmaps."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .grid import Grid2D


def save_field(field: np.ndarray, grid: Grid2D, path) -> None:
    """Write row-major float64 binary next to a JSON header."""
    path = Path(path)
    arr = np.ascontiguousarray(np.asarray(field, dtype=np.float64))
    arr.tofile(path.with_suffix(".bin"))
    header = {
        "dtype": "float64",
        "order": "row-major",
        "ny": grid.ny,
        "nx": grid.nx,
        "domain": [grid.x0, grid.x1, grid.y0, grid.y1],
        "bc": grid.bc,
    }
    path.with_suffix(".json").write_text(json.dumps(header, indent=1))


def load_field(path) -> tuple[np.ndarray, dict]:
    path = Path(path)
    header = json.loads(path.with_suffix(".json").read_text())
    arr = np.fromfile(path.with_suffix(".bin"), dtype=np.float64)
    return arr.reshape(header["ny"], header["nx"]), header


def heatmap_svg(field: np.ndarray, path, title: str = "") -> None:
    """A plain rect-per-cell SVG heatmap for quick inspection."""
    f = np.asarray(field, dtype=float)
    finite = np.isfinite(f)
    lo = float(f[finite].min()) if finite.any() else 0.0
    hi = float(f[finite].max()) if finite.any() else 1.0
    span = hi - lo if hi > lo else 1.0
    ny, nx = f.shape
    cell = max(2, 560 // max(nx, ny))
    w, h = nx * cell, ny * cell
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" '
             f'height="{h + 18}">']
    if title:
        parts.append(f'<text x="4" y="12" font-size="11">{title} '
                     f'[{lo:.4g}, {hi:.4g}]</text>')
    for iy in range(ny):
        for ix in range(nx):
            v = f[iy, ix]
            if not np.isfinite(v):
                color = "#ffffff"
            else:
                s = (v - lo) / span
                r = int(255 * s)
                b = int(255 * (1 - s))
                color = f"#{r:02x}40{b:02x}"
            y = 18 + (ny - 1 - iy) * cell
            parts.append(f'<rect x="{ix * cell}" y="{y}" width="{cell}" '
                         f'height="{cell}" fill="{color}"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))
