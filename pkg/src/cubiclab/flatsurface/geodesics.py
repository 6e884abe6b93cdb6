"""Geodesic representatives of free homotopy classes on flat cone surfaces.

A class is encoded combinatorially as a cyclic sequence of directed edge
crossings (a triangle strip).  Tightening alternates two moves until the
local geodesic criterion holds: exact coordinate-descent shortening of the
polyline within the current strip, and a combinatorial slide of the strip
across a vertex whenever the polyline pins there with angle < pi on one
side.  A returned representative is certified by the angle condition: at
every visited cone point both side angles are at least pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import NoConvergence, TrivialClass
from .surface import PlanarIsometry, Slot, TriangulatedFlatSurface

ANGLE_TOL = 1e-9
PIN_TOL = 1e-12


@dataclass(frozen=True)
class HomotopyClassPath:
    """A free homotopy class as a cyclic triangle strip.

    ``crossings[k] = (t, e)`` means the loop leaves triangle t through its
    edge slot e; the next crossing must start from the glued neighbour.
    """

    crossings: tuple[Slot, ...]
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "crossings",
                           tuple((int(t), int(e)) for t, e in self.crossings))
        if not self.crossings:
            raise ValueError("a homotopy class needs at least one crossing")

    def validate_on(self, s: TriangulatedFlatSurface) -> None:
        n = len(self.crossings)
        for k, (t, e) in enumerate(self.crossings):
            if not (0 <= t < s.num_triangles and 0 <= e < 3):
                raise ValueError(f"crossing {k} references invalid slot {(t, e)}")
            nxt_tri = s.gluings[(t, e)][0]
            t_next = self.crossings[(k + 1) % n][0]
            if t_next != nxt_tri:
                raise ValueError(
                    f"crossings {k} -> {(k + 1) % n} do not share a triangle: "
                    f"edge {(t, e)} leads into {nxt_tri}, not {t_next}")

    def rotated(self, shift: int) -> "HomotopyClassPath":
        n = len(self.crossings)
        shift %= n
        return HomotopyClassPath(self.crossings[shift:] + self.crossings[:shift],
                                 label=self.label)

    def __len__(self) -> int:
        return len(self.crossings)


@dataclass(frozen=True)
class ConeVisit:
    """A cone point visited by a geodesic, with the two side angles."""

    orbit: int
    cone_angle: float
    side_angles: tuple[float, float]  # (strip side, far side)


@dataclass(frozen=True)
class GeodesicRepresentative:
    """A tightened polyline geodesic.

    ``segments`` lists (triangle, entry chart point, exit chart point); the
    crossing data (slots and edge parameters) is kept for downstream
    operations such as cylinder detection and intersection counts.
    """

    surface: TriangulatedFlatSurface = field(repr=False)
    crossings: tuple[Slot, ...]
    params: tuple[float, ...]
    length: float
    kind: str  # "nonsingular" | "cone-concatenation"
    cone_visits: tuple[ConeVisit, ...]
    holonomy: PlanarIsometry
    label: str | None = None

    @property
    def segments(self) -> list[tuple[int, np.ndarray, np.ndarray]]:
        s = self.surface
        n = len(self.crossings)
        out = []
        for k in range(n):
            prev = (k - 1) % n
            p_slot, p_u = s.partner_param(self.crossings[prev], self.params[prev])
            entry = s.edge_point(p_slot, p_u)
            exit_ = s.edge_point(self.crossings[k], self.params[k])
            out.append((self.crossings[k][0], entry, exit_))
        return out

    def angle_condition_ok(self, tol: float = 1e-7) -> bool:
        return all(min(v.side_angles) >= math.pi - tol for v in self.cone_visits)


# -- developing a strip -----------------------------------------------------

def develop_strip(s: TriangulatedFlatSurface, crossings) -> list[PlanarIsometry]:
    """Chart-to-plane maps phi_0..phi_n for the strip; phi_n is the holonomy.

    phi_k maps the chart of the triangle entered after crossing k-1 into the
    common developed frame (phi_0 is the identity on the start triangle).
    """
    phis = [PlanarIsometry.identity()]
    for slot in crossings:
        iso = s.isometries[slot]
        phis.append(phis[-1].compose(iso.inverse()))
    return phis


def _heron_param(A, B, p, q):
    """Minimize |z - p| + |z - q| over z on segment [A, B]; returns the param.

    Exact one-dimensional step for the convex polyline-shortening objective.
    """
    d = B - A
    L2 = float(d @ d)
    if L2 == 0.0:
        return 0.0
    nx, ny = -d[1], d[0]
    sp = (p[0] - A[0]) * nx + (p[1] - A[1]) * ny
    sq = (q[0] - A[0]) * nx + (q[1] - A[1]) * ny
    if sp * sq > 0.0:
        # same side: reflect q across the edge line
        scale = 2.0 * sq / L2
        q = np.array([q[0] - scale * nx, q[1] - scale * ny])
        sq = -sq
    denom = sp - sq
    if abs(denom) < 1e-300:
        z = 0.5 * (p + q)
    else:
        t = sp / denom
        z = p + t * (q - p)
    u = float((z - A) @ d) / L2
    return min(1.0, max(0.0, u))


class _Strip:
    """Mutable tightening state: a strip with developed data and params."""

    def __init__(self, s: TriangulatedFlatSurface, crossings, params=None):
        self.s = s
        self.crossings = list(crossings)
        self.params = list(params) if params is not None else [0.5] * len(crossings)
        self.refresh()

    def refresh(self):
        self.phis = develop_strip(self.s, self.crossings)
        self.edges = []
        for k, slot in enumerate(self.crossings):
            a, b = self.s.edge_endpoints(slot)
            self.edges.append((self.phis[k].apply(a), self.phis[k].apply(b)))
        self.holonomy = self.phis[-1]

    def point(self, k):
        A, B = self.edges[k]
        return A + self.params[k] * (B - A)

    def closing_point(self):
        a, b = self.s.edge_endpoints(self.crossings[0])
        z = a + self.params[0] * (b - a)
        return self.holonomy.apply(z)

    def length(self) -> float:
        pts = [self.point(k) for k in range(len(self.crossings))]
        pts.append(self.closing_point())
        return float(sum(np.linalg.norm(pts[k + 1] - pts[k])
                         for k in range(len(self.crossings))))

    def sweep(self) -> float:
        """One Gauss-Seidel pass of exact 1-d shortening steps."""
        n = len(self.crossings)
        hinv = self.holonomy.inverse()
        for k in range(n):
            if k == 0:
                p = hinv.apply(self.point(n - 1))
            else:
                p = self.point(k - 1)
            if k == n - 1:
                q = self.closing_point()
            else:
                q = self.point(k + 1)
            A, B = self.edges[k]
            self.params[k] = _heron_param(A, B, p, q)
        return self.length()

    # -- pivots and slides --------------------------------------------------

    def pinned_vertex(self, k):
        """(chart vertex index, orbit) of the pinned endpoint, or None."""
        u = self.params[k]
        t, e = self.crossings[k]
        if u <= PIN_TOL:
            i = e
        elif u >= 1.0 - PIN_TOL:
            i = (e + 1) % 3
        else:
            return None
        return i, self.s.orbit_of[(t, i)]

    def pivots(self):
        """Maximal cyclic runs of crossings pinned at one developed point."""
        n = len(self.crossings)
        pin = [self.pinned_vertex(k) for k in range(n)]
        if all(p is not None for p in pin):
            groups = self._group_all_pinned(pin)
        else:
            start = next(k for k in range(n) if pin[k] is None)
            groups = []
            run = []
            for off in range(1, n + 1):
                k = (start + off) % n
                if pin[k] is None:
                    if run:
                        groups.append(run)
                        run = []
                else:
                    if run and not self._same_point(run[-1], k):
                        groups.append(run)
                        run = []
                    run.append(k)
            if run:
                groups.append(run)
        return [(g, pin[g[0]][1]) for g in groups]

    def _group_all_pinned(self, pin):
        n = len(self.crossings)
        breaks = [k for k in range(n)
                  if not self._same_point((k - 1) % n, k)]
        if not breaks:
            raise TrivialClass("polyline collapsed to a single vertex")
        groups = []
        for bi, start in enumerate(breaks):
            end = breaks[(bi + 1) % len(breaks)]
            run = []
            k = start
            while True:
                run.append(k)
                k = (k + 1) % n
                if k == end:
                    break
            groups.append(run)
        return groups

    def _same_point(self, k1, k2) -> bool:
        """Whether crossings k1 and k2 sit at one developed point.

        Callers pass (previous, current) in cyclic order, so the only wrap
        case is (n-1, 0), where crossing 0 is seen through the holonomy.
        """
        p1, p2 = self.point(k1), self.point(k2)
        if k2 == 0 and k1 == len(self.crossings) - 1:
            p2 = self.closing_point()
        scale = max(1.0, float(np.abs(p1).max()), float(np.abs(p2).max()))
        return bool(np.linalg.norm(p1 - p2) <= 1e-9 * scale)

    def pivot_angles(self, group):
        """(strip-side angle, far-side angle, orbit) for a pinned run."""
        s = self.s
        n = len(self.crossings)
        i, j = group[0], group[-1]
        V = self.point(i)
        # incoming point (previous crossing, honoring the cyclic closing)
        if i == 0:
            p_in = self.holonomy.inverse().apply(self.point(n - 1))
        else:
            p_in = self.point((i - 1) % n)
        if j == n - 1:
            p_out = self.closing_point()
        else:
            p_out = self.point((j + 1) % n)

        def ray(k):
            """Developed direction of crossing k's edge away from the pivot."""
            A, B = self.edges[k]
            far = B if self.params[k] <= 0.5 else A
            return far - self.point(k)

        ang = _angle_between(p_in - V, ray(i))
        for idx in range(1, len(group)):
            k = group[idx]
            t, e = self.crossings[k]
            c = e if self.params[k] <= 0.5 else (e + 1) % 3
            ang += s.corner_angle(t, c)
        # outgoing wedge lives in the triangle after crossing j
        Vj = self.point(j)
        ang += _angle_between(ray(j), p_out - Vj)
        orbit = self.pinned_vertex(group[0])[1]
        total = float(s.orbit_angles[orbit])
        return ang, total - ang, orbit

    def slide(self, group, simplify: bool = True):
        """Push the polyline across the pivot vertex to the far side.

        Returns (kept_index_map, first_new_index, new_count, vertex_param):
        kept_index_map maps old crossing indices to their new positions,
        the new fan crossings occupy [first_new_index, first_new_index +
        new_count), and vertex_param (0.0 or 1.0) is the edge parameter of
        the pivot vertex on every new crossing.
        """
        s = self.s
        i, j = group[0], group[-1]
        ci, orbit = self.pinned_vertex(i)
        cj_out = self._exit_corner(j)
        t_i = self.crossings[i][0]
        start = (t_i, ci)
        e_i = self.crossings[i][1]
        if e_i == ci:
            # strip went clockwise; complementary fan is counterclockwise,
            # whose crossed edges all end at the pivot vertex (param 1)
            opposite_step = s.corner_step_ccw
            vertex_param = 1.0
        else:
            opposite_step = s.corner_step_cw
            vertex_param = 0.0
        new_slots = []
        corner = start
        budget = 3 * s.num_triangles + 3
        target = cj_out
        while budget > 0:
            crossed, corner = opposite_step(*corner)
            new_slots.append(crossed)
            if corner == target:
                break
            budget -= 1
        else:
            raise RuntimeError("pivot slide did not close up around the vertex")

        # replace crossings i..j (cyclic) with the complementary fan,
        # rebuilding in cyclic order starting at crossing (j+1) % n
        n = len(self.crossings)
        order = []
        k = (j + 1) % n
        while True:
            if k == i:
                break
            order.append(k)
            k = (k + 1) % n
        new_crossings = []
        new_params = []
        kept_index_map = {}
        for k in order:
            kept_index_map[k] = len(new_crossings)
            new_crossings.append(self.crossings[k])
            new_params.append(self.params[k])
        first_new = len(new_crossings)
        for slot in new_slots:
            new_crossings.append(slot)
            # initialise away from the pivot end of the new edge
            new_params.append(0.25 if vertex_param == 1.0 else 0.75)
        self.crossings = new_crossings
        self.params = new_params
        if simplify:
            self.simplify()
        self.refresh()
        return kept_index_map, first_new, len(new_slots), vertex_param

    def _exit_corner(self, j):
        """Corner of the pivot vertex in the triangle after crossing j."""
        s = self.s
        t2, e2 = s.gluings[self.crossings[j]]
        u = self.params[j]
        return (t2, (e2 + 1) % 3) if u <= 0.5 else (t2, e2)

    def simplify(self) -> None:
        """Remove immediate backtracks (crossing an edge and re-crossing it)."""
        changed = True
        while changed:
            changed = False
            n = len(self.crossings)
            if n == 0:
                raise TrivialClass("class simplified to the trivial loop")
            for k in range(n):
                k2 = (k + 1) % n
                if self.s.gluings[self.crossings[k]] == self.crossings[k2]:
                    for idx in sorted((k, k2), reverse=True):
                        del self.crossings[idx]
                        del self.params[idx]
                    changed = True
                    break
        if not self.crossings:
            raise TrivialClass("class simplified to the trivial loop")


def _angle_between(u, v) -> float:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    c = float(np.dot(u, v)) / (nu * nv)
    return math.acos(min(1.0, max(-1.0, c)))


def tighten_geodesic(s: TriangulatedFlatSurface, path: HomotopyClassPath,
                     tol: float = 1e-7, max_iterations: int = 100_000,
                     initial_params=None) -> GeodesicRepresentative:
    """Shorten a combinatorial loop to a geodesic representative.

    Iterates in-strip coordinate descent with combinatorial slides across
    vertices until the angle condition certifies a geodesic.  ``tol`` bounds
    the length change per sweep at convergence.
    """
    path.validate_on(s)
    strip = _Strip(s, path.crossings, initial_params)
    strip.simplify()
    strip.refresh()

    budget = max_iterations
    prev_len = strip.length()
    while budget > 0:
        # phase 1: coordinate descent inside the current strip
        while budget > 0:
            cur = strip.sweep()
            budget -= 1
            if prev_len - cur <= tol * max(1.0, cur):
                prev_len = cur
                break
            prev_len = cur
        # phase 2: examine pivots, slide where a side angle is < pi
        slid = False
        for group, orbit in strip.pivots():
            strip_side, far_side, orbit = strip.pivot_angles(group)
            if min(strip_side, far_side) < math.pi - 10 * ANGLE_TOL:
                strip.slide(group)
                prev_len = strip.length()
                budget -= 1
                slid = True
                break
        if not slid:
            break
    else:
        raise NoConvergence(
            f"tightening exhausted {max_iterations} iterations "
            f"(last length {prev_len:.12g})")

    visits = []
    for group, orbit in strip.pivots():
        a1, a2, orbit = strip.pivot_angles(group)
        if s.orbit_orders[orbit] != 0:
            visits.append(ConeVisit(orbit, float(s.orbit_angles[orbit]),
                                    (a1, a2)))
    kind = "cone-concatenation" if visits else "nonsingular"
    return GeodesicRepresentative(
        surface=s,
        crossings=tuple(strip.crossings),
        params=tuple(strip.params),
        length=strip.length(),
        kind=kind,
        cone_visits=tuple(visits),
        holonomy=strip.holonomy,
        label=path.label,
    )
