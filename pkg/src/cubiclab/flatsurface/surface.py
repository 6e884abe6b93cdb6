"""Flat metrics with cone singularities as glued Euclidean triangle complexes.

A surface is a finite list of planar triangles together with an involutive
pairing of edge slots.  Each pairing carries the orientation-preserving planar
isometry identifying the two edge charts, so the complex can be developed
triangle by triangle.  Cone data is derived from vertex-orbit angle sums and
validated against the admissible angles 2*pi*(1 + k/3), k >= -2 an integer,
with k < 0 allowed only at marked punctures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import (
    BadConeAngle,
    EdgeLengthMismatch,
    NegativeOrderAtInterior,
    NonInvolutiveGluing,
)

# Geometric equality tolerance used throughout the triangle complex code.
GEOM_TOL = 1e-9

Slot = tuple[int, int]  # (triangle index, edge index); edge e runs v[e] -> v[e+1]


@dataclass(frozen=True)
class PlanarIsometry:
    """Orientation-preserving isometry p -> R(rot) p + (tx, ty)."""

    rot: float
    tx: float
    ty: float

    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.rot), math.sin(self.rot)
        return np.array([[c, -s], [s, c]])

    def apply(self, p: np.ndarray) -> np.ndarray:
        return p @ self.matrix().T + np.array([self.tx, self.ty])

    def compose(self, other: "PlanarIsometry") -> "PlanarIsometry":
        """self after other: (self o other)(p) = self(other(p))."""
        t = self.apply(np.array([other.tx, other.ty]))
        return PlanarIsometry(_wrap_angle(self.rot + other.rot),
                              float(t[0]), float(t[1]))

    def inverse(self) -> "PlanarIsometry":
        c, s = math.cos(self.rot), math.sin(self.rot)
        tx = -(c * self.tx + s * self.ty)
        ty = -(-s * self.tx + c * self.ty)
        return PlanarIsometry(_wrap_angle(-self.rot), tx, ty)

    @staticmethod
    def identity() -> "PlanarIsometry":
        return PlanarIsometry(0.0, 0.0, 0.0)

    @staticmethod
    def from_segment_match(a: np.ndarray, b: np.ndarray,
                           c: np.ndarray, d: np.ndarray) -> "PlanarIsometry":
        """The unique orientation-preserving isometry with a -> c, b -> d."""
        u = b - a
        v = d - c
        rot = math.atan2(v[1], v[0]) - math.atan2(u[1], u[0])
        rot = _wrap_angle(rot)
        cs, sn = math.cos(rot), math.sin(rot)
        ra = np.array([cs * a[0] - sn * a[1], sn * a[0] + cs * a[1]])
        t = c - ra
        return PlanarIsometry(rot, float(t[0]), float(t[1]))

    def is_close(self, other: "PlanarIsometry", tol: float = GEOM_TOL) -> bool:
        dr = abs(_wrap_angle(self.rot - other.rot))
        return (dr <= tol and abs(self.tx - other.tx) <= tol
                and abs(self.ty - other.ty) <= tol)


def _wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


@dataclass(frozen=True)
class ConePoint:
    """A vertex orbit carrying a cone angle c = 2*pi*(1 + k/3)."""

    orbit: int
    angle: float
    order: int  # the integer k

    @property
    def curvature_defect(self) -> float:
        return 2.0 * math.pi - self.angle


class TriangulatedFlatSurface:
    """A closed flat cone surface encoded as glued Euclidean triangles.

    Instances are immutable; all derived combinatorics (vertex orbits, cone
    points, Euler characteristic) are computed at construction time and the
    constructor raises if any invariant fails.
    """

    def __init__(self, triangles, gluings, marked_punctures=(), _isometries=None):
        tris = [np.array(t, dtype=float).reshape(3, 2) for t in triangles]
        for idx, t in enumerate(tris):
            if _signed_area(t) <= GEOM_TOL * max(1.0, float(np.abs(t).max())) ** 2:
                raise ValueError(
                    f"triangle {idx} is degenerate or not counterclockwise")
            t.setflags(write=False)
        self.triangles: list[np.ndarray] = tris

        self.gluings: dict[Slot, Slot] = {}
        self.isometries: dict[Slot, PlanarIsometry] = {}
        self._install_gluings(gluings, _isometries)
        self._check_involution()
        self._check_edges()

        self._build_orbits()
        # punctures may be given as orbit ids or as (triangle, corner) pairs
        resolved = set()
        for p in marked_punctures:
            if isinstance(p, (tuple, list)):
                resolved.add(self.orbit_of[(int(p[0]), int(p[1]))])
            else:
                p = int(p)
                if not 0 <= p < len(self.vertex_orbits):
                    raise ValueError(
                        f"marked puncture {p} is not a vertex orbit id")
                resolved.add(p)
        self.marked_punctures = frozenset(resolved)
        self._check_cone_angles()

    # -- construction helpers ---------------------------------------------

    def _install_gluings(self, gluings, isometries) -> None:
        pairs: dict[Slot, Slot] = {}
        isos: dict[Slot, PlanarIsometry] = {}
        if isinstance(gluings, dict):
            items = [(a, b, None) for a, b in gluings.items()]
        else:
            items = []
            for entry in gluings:
                if len(entry) == 2:
                    a, b = entry
                    iso = None
                else:
                    a, b, iso = entry
                items.append((a, b, iso))
        for a, b, iso in items:
            a = (int(a[0]), int(a[1]))
            b = (int(b[0]), int(b[1]))
            for s in (a, b):
                if not (0 <= s[0] < len(self.triangles) and 0 <= s[1] < 3):
                    raise ValueError(f"gluing references invalid slot {s}")
            if a == b:
                raise NonInvolutiveGluing(f"slot {a} glued to itself")
            if a in pairs and pairs[a] != b:
                raise NonInvolutiveGluing(f"slot {a} glued twice")
            if b in pairs and pairs[b] != a:
                raise NonInvolutiveGluing(f"slot {b} glued twice")
            pairs[a] = b
            pairs[b] = a
            if iso is not None:
                if isinstance(iso, dict):
                    iso = PlanarIsometry(float(iso.get("rot", 0.0)),
                                         float(iso.get("tx", 0.0)),
                                         float(iso.get("ty", 0.0)))
                isos[a] = iso
        if isometries:
            for slot, iso in isometries.items():
                isos[(int(slot[0]), int(slot[1]))] = iso

        all_slots = {(t, e) for t in range(len(self.triangles)) for e in range(3)}
        missing = all_slots - set(pairs)
        if missing:
            raise NonInvolutiveGluing(
                f"{len(missing)} edge slots unglued, e.g. {sorted(missing)[0]}")

        self.gluings = pairs
        # Derive the canonical isometry for each direction and check any
        # user-provided ones against it.
        for slot, partner in pairs.items():
            a, b = self.edge_endpoints(slot)
            c, d = self.edge_endpoints(partner)
            derived = PlanarIsometry.from_segment_match(a, b, d, c)
            given = isos.get(slot)
            if given is not None and not given.is_close(derived, tol=1e-7):
                raise NonInvolutiveGluing(
                    f"stored isometry for {slot} does not map its edge onto "
                    f"the partner edge {partner}")
            self.isometries[slot] = derived

    def _check_involution(self) -> None:
        for slot, partner in self.gluings.items():
            if self.gluings.get(partner) != slot:
                raise NonInvolutiveGluing(
                    f"pairing of {slot} and {partner} is not involutive")

    def _check_edges(self) -> None:
        for slot, partner in self.gluings.items():
            if slot > partner:
                continue
            la = self.edge_length(slot)
            lb = self.edge_length(partner)
            if abs(la - lb) > GEOM_TOL * max(la, lb, 1.0):
                raise EdgeLengthMismatch(
                    f"edges {slot} (len {la:.12g}) and {partner} "
                    f"(len {lb:.12g}) differ beyond tolerance")

    def _build_orbits(self) -> None:
        corners = [(t, i) for t in range(len(self.triangles)) for i in range(3)]
        parent = {c: c for c in corners}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[ry] = rx

        for (t, e), (t2, e2) in self.gluings.items():
            # start of edge e is vertex e, identified with the end of e2
            union((t, e), (t2, (e2 + 1) % 3))
            union((t, (e + 1) % 3), (t2, e2))

        groups: dict[Slot, list[Slot]] = {}
        for c in corners:
            groups.setdefault(find(c), []).append(c)
        orbits = sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])
        self.vertex_orbits: list[list[Slot]] = orbits
        self.orbit_of: dict[Slot, int] = {}
        for idx, orbit in enumerate(orbits):
            for c in orbit:
                self.orbit_of[c] = idx
        self.orbit_angles = np.array(
            [sum(self.corner_angle(t, i) for (t, i) in orbit) for orbit in orbits])

    def _check_cone_angles(self) -> None:
        self.orbit_orders: list[int] = []
        cone_points: list[ConePoint] = []
        for idx, angle in enumerate(self.orbit_angles):
            k_real = 3.0 * (angle / (2.0 * math.pi) - 1.0)
            k = round(k_real)
            if abs(k_real - k) > 1e-8 or k < -2:
                raise BadConeAngle(
                    f"vertex orbit {idx} has angle {angle:.12g} "
                    f"(k = {k_real:.6g}), not of the form 2*pi*(1 + k/3)")
            if k < 0 and idx not in self.marked_punctures:
                raise NegativeOrderAtInterior(
                    f"vertex orbit {idx} has order k = {k} but is not a "
                    f"marked puncture")
            self.orbit_orders.append(int(k))
            if k != 0:
                cone_points.append(ConePoint(idx, float(angle), int(k)))
        self.cone_points: list[ConePoint] = cone_points

    # -- basic geometry -----------------------------------------------------

    def edge_endpoints(self, slot: Slot) -> tuple[np.ndarray, np.ndarray]:
        t, e = slot
        tri = self.triangles[t]
        return tri[e], tri[(e + 1) % 3]

    def edge_length(self, slot: Slot) -> float:
        a, b = self.edge_endpoints(slot)
        return float(np.linalg.norm(b - a))

    def edge_point(self, slot: Slot, u: float) -> np.ndarray:
        a, b = self.edge_endpoints(slot)
        return a + u * (b - a)

    def corner_angle(self, t: int, i: int) -> float:
        tri = self.triangles[t]
        u = tri[(i + 1) % 3] - tri[i]
        v = tri[(i + 2) % 3] - tri[i]
        cosv = float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))
        return math.acos(min(1.0, max(-1.0, cosv)))

    def partner_param(self, slot: Slot, u: float) -> tuple[Slot, float]:
        """The same surface point seen from the glued slot."""
        return self.gluings[slot], 1.0 - u

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    @property
    def num_edges(self) -> int:
        return 3 * len(self.triangles) // 2

    @property
    def euler_characteristic(self) -> int:
        return len(self.vertex_orbits) - self.num_edges + len(self.triangles)

    def total_cone_order(self) -> int:
        return sum(self.orbit_orders)

    # -- corner walking (used by geodesics and surgeries) -------------------

    def corner_step_ccw(self, t: int, i: int) -> tuple[Slot, Slot]:
        """Rotate counterclockwise around vertex (t, i).

        Returns (crossed slot, next corner).  The crossed slot is the edge of
        triangle t ending at vertex i.
        """
        crossed = (t, (i + 2) % 3)
        t2, e2 = self.gluings[crossed]
        return crossed, (t2, e2)

    def corner_step_cw(self, t: int, i: int) -> tuple[Slot, Slot]:
        """Rotate clockwise around vertex (t, i).

        The crossed slot is the edge of triangle t starting at vertex i.
        """
        crossed = (t, i)
        t2, e2 = self.gluings[crossed]
        return crossed, (t2, (e2 + 1) % 3)

    def corner_fan(self, t: int, i: int) -> list[Slot]:
        """All corners of the vertex orbit of (t, i) in ccw order around it."""
        fan = [(t, i)]
        while True:
            _, nxt = self.corner_step_ccw(*fan[-1])
            if nxt == (t, i):
                return fan
            fan.append(nxt)
            if len(fan) > 3 * len(self.triangles):
                raise RuntimeError("corner fan does not close up")

    def scaled(self, factor: float) -> "TriangulatedFlatSurface":
        """A copy with all lengths multiplied by factor > 0."""
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        tris = [t * factor for t in self.triangles]
        return TriangulatedFlatSurface(tris, self.gluings,
                                       marked_punctures=self.marked_punctures)

    def __repr__(self) -> str:
        return (f"TriangulatedFlatSurface({self.num_triangles} triangles, "
                f"chi={self.euler_characteristic}, "
                f"{len(self.cone_points)} cone points)")


def _signed_area(tri: np.ndarray) -> float:
    a, b, c = tri
    return 0.5 * float((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))


def build_surface(spec: dict) -> TriangulatedFlatSurface:
    """Build and validate a surface from the external JSON-style description.

    Expected keys: "triangles" (list of 3 [x, y] pairs each), "gluings"
    (list of [[t, e], [t2, e2]] or [[t, e], [t2, e2], {"rot":, "tx":, "ty":}]),
    optional "punctures" (list of vertex-orbit ids).
    """
    return TriangulatedFlatSurface(
        spec["triangles"],
        spec.get("gluings", []),
        marked_punctures=spec.get("punctures", ()),
    )


def area(s: TriangulatedFlatSurface) -> float:
    """Total area: sum of triangle areas by the shoelace formula."""
    return float(sum(_signed_area(t) for t in s.triangles))


def gauss_bonnet_defect(s: TriangulatedFlatSurface, cone_angles=None) -> float:
    """2*pi*chi(S) minus the sum of curvature defects 2*pi - c(x).

    Zero for every valid flat cone surface.  ``cone_angles`` may override the
    orbit angles (as a mapping orbit -> angle) to probe invalid data in tests.
    """
    angles = dict(enumerate(s.orbit_angles))
    if cone_angles:
        angles.update({int(k): float(v) for k, v in cone_angles.items()})
    defect_sum = sum(2.0 * math.pi - a for a in angles.values())
    return 2.0 * math.pi * s.euler_characteristic - defect_sum
