"""File formats for surfaces and curve classes, plus SVG rendering.

Surface JSON:
    {"triangles": [[[x, y], [x, y], [x, y]], ...],
     "gluings": [[[t, e], [t2, e2], {"rot": r, "tx": a, "ty": b}], ...],
     "punctures": [orbit ids]}
Curve class JSON: {"name": ..., "strip": [[t, e], ...]}.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .geodesics import GeodesicRepresentative, HomotopyClassPath, develop_strip
from .surface import TriangulatedFlatSurface, build_surface


def surface_to_dict(s: TriangulatedFlatSurface) -> dict:
    gluings = []
    for slot, partner in sorted(s.gluings.items()):
        if slot > partner:
            continue
        iso = s.isometries[slot]
        gluings.append([list(slot), list(partner),
                        {"rot": iso.rot, "tx": iso.tx, "ty": iso.ty}])
    return {
        "triangles": [t.tolist() for t in s.triangles],
        "gluings": gluings,
        "punctures": sorted(s.marked_punctures),
    }


def save_surface(s: TriangulatedFlatSurface, path) -> None:
    Path(path).write_text(json.dumps(surface_to_dict(s), indent=1))


def load_surface(path) -> TriangulatedFlatSurface:
    return build_surface(json.loads(Path(path).read_text()))


def class_to_dict(path: HomotopyClassPath) -> dict:
    return {"name": path.label or "",
            "strip": [list(c) for c in path.crossings]}


def save_classes(classes, path) -> None:
    Path(path).write_text(json.dumps([class_to_dict(c) for c in classes],
                                     indent=1))


def load_classes(path) -> list[HomotopyClassPath]:
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = [data]
    return [HomotopyClassPath(tuple(tuple(c) for c in entry["strip"]),
                              label=entry.get("name") or None)
            for entry in data]


def spectrum_csv_rows(reps: list[GeodesicRepresentative]) -> list[list]:
    rows = [["class", "length", "kind", "cone_hits"]]
    for g in reps:
        rows.append([g.label or "", f"{g.length:.15g}", g.kind,
                     ";".join(str(v.orbit) for v in g.cone_visits)])
    return rows


def render_geodesic_svg(s: TriangulatedFlatSurface,
                        g: GeodesicRepresentative, path) -> None:
    """Draw the developed strip of a geodesic with its polyline."""
    phis = develop_strip(s, g.crossings)
    polys = []
    for k, slot in enumerate(g.crossings):
        tri = s.triangles[slot[0]]
        polys.append(np.array([phis[k].apply(v) for v in tri]))
    pts = []
    for k, slot in enumerate(g.crossings):
        a, b = s.edge_endpoints(slot)
        pts.append(phis[k].apply(a + g.params[k] * (b - a)))
    a, b = s.edge_endpoints(g.crossings[0])
    pts.append(phis[-1].apply(a + g.params[0] * (b - a)))
    pts = np.array(pts)

    allpts = np.vstack([np.vstack(polys), pts])
    lo = allpts.min(axis=0) - 0.2
    hi = allpts.max(axis=0) + 0.2
    span = hi - lo
    width = 640.0
    scale = width / span[0]
    height = span[1] * scale

    def xy(p):
        return ((p[0] - lo[0]) * scale, (hi[1] - p[1]) * scale)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
             f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">']
    for poly in polys:
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in map(xy, poly))
        parts.append(f'<polygon points="{coords}" fill="#eef" '
                     f'stroke="#88a" stroke-width="1"/>')
    coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in map(xy, pts))
    parts.append(f'<polyline points="{coords}" fill="none" stroke="#c22" '
                 f'stroke-width="2"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))
