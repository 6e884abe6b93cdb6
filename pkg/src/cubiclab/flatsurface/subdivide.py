"""Tagged triangle soup: rebuild surfaces after cut-and-glue surgery.

Surgeries retriangulate some triangles into convex pieces whose boundary
edges carry symbolic tags.  Tags are matched in pairs to produce the gluing
list of the rebuilt surface, so no floating-point keys enter the matching.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .surface import TriangulatedFlatSurface

# A tag is any hashable value; each tag appears on exactly one soup edge and
# the assembler pairs tags via a caller-supplied partner function.


@dataclass
class Piece:
    """A convex polygon with symbolic vertex ids and tagged boundary edges.

    ``tags[j]`` tags the edge from verts[j] to verts[j+1] (cyclically).
    """

    verts: list
    coords: list  # np arrays aligned with verts
    tags: list

    def index_of(self, vid) -> int:
        return self.verts.index(vid)

    def signed_area(self) -> float:
        a = 0.0
        n = len(self.verts)
        for j in range(n):
            p, q = self.coords[j], self.coords[(j + 1) % n]
            a += float(p[0] * q[1] - p[1] * q[0])
        return 0.5 * a

    def centroid(self) -> np.ndarray:
        return np.mean(np.asarray(self.coords), axis=0)


def split_piece(piece: Piece, id_a, id_b, tag_ab, tag_ba) -> tuple[Piece, Piece]:
    """Split a piece along the segment joining two boundary vertices.

    Returns (piece keeping the a->b chord edge, piece keeping b->a).
    """
    n = len(piece.verts)
    ia, ib = piece.index_of(id_a), piece.index_of(id_b)

    def walk(start, stop):
        verts, coords, tags = [], [], []
        j = start
        while True:
            verts.append(piece.verts[j])
            coords.append(piece.coords[j])
            if j == stop:
                break
            tags.append(piece.tags[j])
            j = (j + 1) % n
        return verts, coords, tags

    v1, c1, t1 = walk(ib, ia)  # boundary from b around to a, then chord a->b
    p_ab = Piece(v1, c1, t1 + [tag_ab])
    v2, c2, t2 = walk(ia, ib)
    p_ba = Piece(v2, c2, t2 + [tag_ba])
    return p_ab, p_ba


@dataclass
class FanPiece:
    """A fan-triangulated piece: global soup indices in path order."""

    subtris: list[int] = field(default_factory=list)
    apex: int = 0


class Soup:
    """Accumulates tagged triangles and assembles the final surface."""

    def __init__(self):
        self.tris: list[np.ndarray] = []
        self.tags: list[list] = []
        self._fresh = itertools.count()
        self._internal_pairs: list[tuple] = []

    def add_triangle(self, pts, tags3) -> int:
        self.tris.append(np.asarray(pts, dtype=float).reshape(3, 2))
        self.tags.append(list(tags3))
        return len(self.tris) - 1

    def add_fan(self, piece: Piece) -> FanPiece:
        """Fan-triangulate a piece; internal diagonals are paired here.

        The fan apex is chosen so every fan triangle is counterclockwise
        with positive area (handles one reflex vertex).
        """
        m = len(piece.verts)
        if m == 3:
            idx = self.add_triangle(piece.coords, piece.tags)
            return FanPiece([idx])
        scale = max(1.0, float(np.abs(np.asarray(piece.coords)).max())) ** 2
        for a in range(m):
            ok = True
            for i in range(1, m - 1):
                p0 = piece.coords[a]
                p1 = piece.coords[(a + i) % m]
                p2 = piece.coords[(a + i + 1) % m]
                area2 = ((p1[0] - p0[0]) * (p2[1] - p0[1])
                         - (p2[0] - p0[0]) * (p1[1] - p0[1]))
                if area2 <= 1e-12 * scale:
                    ok = False
                    break
            if ok:
                break
        else:
            raise ValueError("piece admits no valid fan apex")

        fan = FanPiece([], apex=a)
        prev_diag = None
        for i in range(1, m - 1):
            j0, j1, j2 = a, (a + i) % m, (a + i + 1) % m
            pts = [piece.coords[j0], piece.coords[j1], piece.coords[j2]]
            tags3 = [None, piece.tags[j1], None]
            if i == 1:
                tags3[0] = piece.tags[j0]
            if i == m - 2:
                tags3[2] = piece.tags[j2]
            idx = self.add_triangle(pts, tags3)
            if prev_diag is not None:
                pid = ("fan", next(self._fresh))
                self.tags[prev_diag][2] = pid
                self.tags[idx][0] = (pid, "twin")
                self._internal_pairs.append((pid, (pid, "twin")))
            prev_diag = idx
            fan.subtris.append(idx)
        return fan

    def assemble(self, partner_fn, marked_punctures=()) -> TriangulatedFlatSurface:
        """Pair all tagged edges and build the validated surface.

        ``partner_fn(tag) -> tag`` must be an involution on non-internal tags.
        """
        index: dict = {}
        for ti, tags3 in enumerate(self.tags):
            for e, tag in enumerate(tags3):
                if tag is None:
                    raise ValueError(f"untagged soup edge ({ti}, {e})")
                if tag in index:
                    raise ValueError(f"duplicate soup tag {tag!r}")
                index[tag] = (ti, e)
        used = set()
        gluings = []
        internal = {a: b for a, b in self._internal_pairs}
        internal.update({b: a for a, b in self._internal_pairs})
        for tag, slot in index.items():
            if tag in used:
                continue
            partner = internal.get(tag)
            if partner is None:
                partner = partner_fn(tag)
            if partner is None or partner not in index:
                raise ValueError(f"no partner for soup tag {tag!r}")
            gluings.append((slot, index[partner]))
            used.add(tag)
            used.add(partner)
        return TriangulatedFlatSurface(
            [t for t in self.tris], gluings, marked_punctures=marked_punctures)


def edge_sub_tag(slot, a_id, b_id):
    """Tag for the piece of original edge ``slot`` between two cut ids.

    Endpoint markers "lo"/"hi" refer to the slot's own parameter 0/1; cut
    ids are shared with the glued partner.
    """
    return ("slot", slot, a_id, b_id)


def flip_endpoint(eid):
    if eid == "lo":
        return "hi"
    if eid == "hi":
        return "lo"
    return eid


def slot_partner_tag(tag, gluings):
    """Partner of an edge_sub_tag under the original gluing."""
    _, slot, a_id, b_id = tag
    return ("slot", gluings[slot], flip_endpoint(b_id), flip_endpoint(a_id))
