"""Length-spectrum bookkeeping over finite curve markings.

Geodesic currents are represented only through marked length spectra and
explicit intersection tables; weak-* convergence is replaced by
componentwise convergence over the marking.  The degeneration classifier
computes the null set (classes whose limit length vanishes while every
crossing class stays positive), partitions the remaining marking into
subsurface groups, and reports per-part systoles over the marking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    MarkingMismatch,
    NotConverged,
    OverlappingSupports,
    UnknownClass,
    ZeroSpectrum,
)
from .flatsurface import TriangulatedFlatSurface, tighten_geodesic
from .flatsurface.surface import area as flat_area

SELF_INTERSECTION_FACTOR = math.pi / 2.0


@dataclass(frozen=True)
class MarkedLengthSpectrum:
    """Lengths of the marking classes, with a provenance tag."""

    marking: tuple[str, ...]
    values: tuple[float, ...]
    source: str = "synthetic"  # flat | blaschke | mixed | synthetic

    def __post_init__(self):
        if len(set(self.marking)) != len(self.marking):
            raise ValueError("marking ids must be unique")
        if len(self.values) != len(self.marking):
            raise ValueError("one value per marking class required")
        if any(v < 0 for v in self.values):
            raise ValueError("lengths must be nonnegative")

    def value(self, class_id: str) -> float:
        try:
            return self.values[self.marking.index(class_id)]
        except ValueError:
            raise UnknownClass(class_id)


@dataclass(frozen=True)
class ProjectiveSpectrum:
    """A spectrum normalized to max-norm one, with its original scale."""

    marking: tuple[str, ...]
    values: tuple[float, ...]
    scale: float


def projectivize(sp: MarkedLengthSpectrum) -> ProjectiveSpectrum:
    scale = max(sp.values)
    if scale <= 0:
        raise ZeroSpectrum("cannot projectivize the zero spectrum")
    return ProjectiveSpectrum(sp.marking,
                              tuple(v / scale for v in sp.values), scale)


def spectrum_from_flat(s: TriangulatedFlatSurface, marking,
                       tol: float = 1e-12) -> MarkedLengthSpectrum:
    """Tightened lengths of the marking classes on a flat surface."""
    reps = [tighten_geodesic(s, path, tol=tol) for path in marking]
    names = tuple(p.label or f"class{i}" for i, p in enumerate(marking))
    return MarkedLengthSpectrum(names, tuple(r.length for r in reps),
                                source="flat")


def self_intersection_flat(s: TriangulatedFlatSurface) -> float:
    """(pi/2) * area: the self-intersection of the induced current."""
    return SELF_INTERSECTION_FACTOR * flat_area(s)


# -- degeneration classifier -------------------------------------------------


@dataclass(frozen=True)
class SubsurfaceMarking:
    """Marking classes grouped into one complementary subsurface."""

    part_id: int
    classes: tuple[str, ...]
    peripheral: tuple[str, ...]
    systole_over_marking: float
    label: str  # "flat-candidate" | "laminar-candidate"


@dataclass(frozen=True)
class LimitClassification:
    limit: ProjectiveSpectrum
    modes: tuple[str, ...]          # per-class: direct | extrapolated
    null_set: tuple[str, ...]
    parts: tuple[SubsurfaceMarking, ...]
    laminar_weights: dict | None    # weights on the null set, when fittable
    converged: bool
    report: dict = field(default_factory=dict)


def _component_limit(seq: list[float], tol: float):
    """Limit of one marking component: direct or clamped-Aitken.

    Returns (limit, mode) or raises NotConverged.  A geometric tail (stable
    successive-difference ratios below one) is extrapolated by Aitken's
    delta-squared formula, clamped to the admissible cone [0, inf).
    """
    if len(seq) == 1:
        return seq[0], "direct"
    diffs = [b - a for a, b in zip(seq, seq[1:])]
    if abs(diffs[-1]) < tol:
        return seq[-1], "direct"
    if len(seq) >= 3:
        d1, d2 = diffs[-2], diffs[-1]
        if abs(d1) > 0:
            r = d2 / d1
            stable = True
            if len(diffs) >= 3 and abs(diffs[-3]) > 0:
                stable = abs(d1 / diffs[-3] - r) < 0.2
            if stable and 0 < r < 0.9:
                denom = d1 - d2
                est = seq[-1] + d2 * d2 / denom if abs(denom) > 0 else seq[-1]
                return max(est, 0.0), "extrapolated"
    raise NotConverged(
        f"component tail {seq[-3:]} neither settles below {tol} nor "
        f"extrapolates geometrically")


def classify_limit(seq: list[MarkedLengthSpectrum], table: np.ndarray,
                   tol: float = 1e-6, zero_tol: float = 1e-9,
                   ) -> LimitClassification:
    """Classify the limit of a sequence of spectra over a fixed marking.

    The sequence is projectivized (max-norm) and each component's limit is
    declared by direct convergence (successive differences below tol) or by
    clamped geometric extrapolation.  The null set collects classes with
    zero limit all of whose crossing classes have positive limit; classes
    disjoint from the null set are grouped by the intersection graph into
    subsurface parts labeled flat-candidate (positive systole over the
    marking) or laminar-candidate.
    """
    if not seq:
        raise ValueError("empty spectrum sequence")
    marking = seq[0].marking
    if any(sp.marking != marking for sp in seq):
        raise MarkingMismatch("spectra do not share one marking")
    n = len(marking)
    table = np.asarray(table)
    if table.shape != (n, n):
        raise MarkingMismatch("intersection table shape mismatch")
    if not np.array_equal(table, table.T):
        raise ValueError("intersection table must be symmetric")
    if np.any(table < 0) or not np.array_equal(table, np.round(table)):
        raise ValueError("intersection table entries are nonnegative ints")

    proj = [projectivize(sp) for sp in seq]
    comps = np.array([p.values for p in proj])
    limits = []
    modes = []
    for j in range(n):
        lim, mode = _component_limit(list(comps[:, j]), tol)
        limits.append(lim)
        modes.append(mode)
    top = max(limits)
    if top <= 0:
        raise NotConverged("all projectivized limits vanished")
    limits = [v / top for v in limits]
    limit = ProjectiveSpectrum(marking, tuple(limits), proj[-1].scale)

    null_set = []
    for j in range(n):
        if limits[j] > zero_tol:
            continue
        crossing = [k for k in range(n) if table[j, k] > 0]
        if all(limits[k] > zero_tol for k in crossing):
            null_set.append(j)
    null_ids = tuple(marking[j] for j in null_set)

    # group classes disjoint from the null set by the intersection graph
    null = set(null_set)
    disjoint = [j for j in range(n) if j not in null
                and all(table[j, k] == 0 for k in null)]
    crossing_cls = [j for j in range(n) if j not in null and j not in disjoint]
    adj = {j: set() for j in disjoint}
    for a in disjoint:
        for b in disjoint:
            if a != b and table[a, b] > 0:
                adj[a].add(b)
    seen: set[int] = set()
    parts: list[SubsurfaceMarking] = []
    for j in disjoint:
        if j in seen:
            continue
        comp = {j}
        stack = [j]
        while stack:
            cur = stack.pop()
            for nxt in adj[cur]:
                if nxt not in comp:
                    comp.add(nxt)
                    stack.append(nxt)
        seen |= comp
        members = tuple(marking[k] for k in sorted(comp))
        periph = tuple(marking[k] for k in sorted(
            set(null_set) | {c for c in crossing_cls
                             if any(table[c, k] > 0 for k in comp)}))
        systole = min(limits[k] for k in sorted(comp))
        label = "flat-candidate" if systole > zero_tol else "laminar-candidate"
        parts.append(SubsurfaceMarking(len(parts), members, periph,
                                       systole, label))
    # classes crossing the null set cannot be certified inside any part;
    # when the null set is nonempty the laminar candidate supported on it
    # is reported as its own entry with systole zero
    if null_ids:
        parts.append(SubsurfaceMarking(
            len(parts), null_ids,
            tuple(marking[c] for c in crossing_cls), 0.0,
            "laminar-candidate"))

    weights = None
    if null_ids and not any(p.label == "flat-candidate" for p in parts):
        # fit nonnegative weights: limit(beta) = sum_alpha w_alpha i(alpha, beta)
        rows = [k for k in range(n) if k not in null]
        A = np.array([[table[k, j] for j in null_set] for k in rows],
                     dtype=float)
        b = np.array([limits[k] for k in rows])
        if A.size and np.linalg.matrix_rank(A) == len(null_set):
            w, *_ = np.linalg.lstsq(A, b, rcond=None)
            if np.all(w >= -1e-9):
                weights = {marking[j]: max(float(wj), 0.0)
                           for j, wj in zip(null_set, w)}

    report = {
        "modes": dict(zip(marking, modes)),
        "tolerance": tol,
        "sequence_length": len(seq),
    }
    return LimitClassification(limit, tuple(modes), null_ids, tuple(parts),
                               weights, True, report)


# -- mixed structures --------------------------------------------------------


@dataclass(frozen=True)
class MixedStructure:
    """A flat metric on a subsurface plus a weighted multicurve.

    Flat parts are (part id, surface, restriction) triples where the
    restriction maps marking class ids to combinatorial classes on the part
    (ids absent from the mapping do not meet that part).  The multicurve is
    a mapping class id -> weight >= 0; boundary ids have length zero.
    """

    flat_parts: tuple
    multicurve: dict
    boundary: tuple[str, ...] = ()

    def __post_init__(self):
        for _pid, _s, restriction in self.flat_parts:
            overlap = set(restriction) & set(self.multicurve)
            if overlap:
                raise OverlappingSupports(
                    f"classes {sorted(overlap)} lie in a flat part and in "
                    f"the multicurve")
        if any(w < 0 for w in self.multicurve.values()):
            raise ValueError("multicurve weights must be nonnegative")

    def total_flat_area(self) -> float:
        return sum(flat_area(s) for _pid, s, _r in self.flat_parts)


def evaluate_mixed(m: MixedStructure, class_id: str, marking,
                   table: np.ndarray) -> float:
    """i(mixed structure, class): flat lengths plus weighted crossings."""
    marking = list(marking)
    if class_id not in marking:
        raise UnknownClass(class_id)
    if class_id in m.boundary:
        return 0.0
    total = 0.0
    for _pid, s, restriction in m.flat_parts:
        path = restriction.get(class_id)
        if path is not None:
            total += tighten_geodesic(s, path, tol=1e-12).length
    j = marking.index(class_id)
    for curve_id, w in m.multicurve.items():
        if w == 0.0 or curve_id not in marking:
            continue
        total += w * float(table[marking.index(curve_id), j])
    return total


def self_intersection_mixed(m: MixedStructure, marking,
                            table: np.ndarray) -> float:
    """pi/2 when a flat part is present (unit total area), else zero.

    The multicurve must be pairwise disjoint and disjoint from the flat
    parts; a pure multicurve has vanishing self-intersection.
    """
    marking = list(marking)
    ids = [c for c in m.multicurve if c in marking]
    for a in ids:
        for b in ids:
            if a != b and table[marking.index(a), marking.index(b)] != 0:
                raise OverlappingSupports(
                    f"multicurve classes {a} and {b} cross")
    if not m.flat_parts:
        return 0.0
    area_total = m.total_flat_area()
    if abs(area_total - 1.0) > 1e-9:
        raise ValueError(
            f"flat parts must be normalized to unit total area "
            f"(got {area_total:.12g})")
    return SELF_INTERSECTION_FACTOR
