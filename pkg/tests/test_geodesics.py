import math

import numpy as np
import pytest

from cubiclab.errors import TrivialClass
from cubiclab.flatsurface import HomotopyClassPath, presets, tighten_geodesic
from oracles import lattice_norm, strip_dijkstra_length

TORUS_CLASSES = [(1, 0), (0, 1), (1, 1), (1, 2), (2, 3), (-1, 2), (3, -2)]


@pytest.mark.parametrize("p,q", TORUS_CLASSES)
def test_torus_lattice_norms(p, q):
    s = presets.square_torus()
    g = tighten_geodesic(s, presets.torus_class(p, q), tol=1e-12)
    assert g.kind == "nonsingular"
    assert abs(g.length - lattice_norm(p, q)) < 1e-9


def test_rectangle_torus_lattice_norms():
    s = presets.rectangle_torus(1.0, 3.0)
    for (p, q) in [(1, 0), (0, 1), (1, 1)]:
        g = tighten_geodesic(s, presets.torus_class(p, q, 1.0, 3.0), tol=1e-12)
        assert abs(g.length - lattice_norm(p, q, 1.0, 3.0)) < 1e-9


def test_octagon_width_classes():
    o = presets.regular_octagon()
    for cls in (presets.octagon_class_vertical(),
                presets.octagon_class_horizontal()):
        g = tighten_geodesic(o, cls, tol=1e-12)
        assert g.kind == "nonsingular"
        assert abs(g.length - (1.0 + math.sqrt(2.0))) < 1e-9


def test_octagon_product_class_certified():
    o = presets.regular_octagon()
    g = tighten_geodesic(o, presets.octagon_class_product(), tol=1e-12)
    assert g.kind == "cone-concatenation"
    assert g.cone_visits
    assert g.angle_condition_ok(tol=1e-6)
    # geodesic through the cone point: both side angles >= pi, summing to 6 pi
    for v in g.cone_visits:
        assert min(v.side_angles) >= math.pi - 1e-6
        assert abs(sum(v.side_angles) - 6.0 * math.pi) < 1e-6


def test_dijkstra_oracle_upper_bounds_and_monotone_gap():
    s = presets.square_torus()
    for (p, q) in [(1, 2), (2, 3)]:
        cls = presets.torus_class(p, q)
        tight = tighten_geodesic(s, cls, tol=1e-12).length
        gaps = []
        for level in (4, 8, 16):
            oracle = strip_dijkstra_length(s, cls, level)
            assert oracle >= tight - 1e-9
            gaps.append(oracle - tight)
        assert gaps[0] >= gaps[1] >= gaps[2] >= -1e-12


def test_dijkstra_oracle_octagon():
    o = presets.regular_octagon()
    cls = presets.octagon_class_vertical()
    tight = tighten_geodesic(o, cls, tol=1e-12).length
    gaps = [strip_dijkstra_length(o, cls, level) - tight
            for level in (4, 8, 16)]
    assert all(g >= -1e-9 for g in gaps)
    assert gaps[0] >= gaps[1] >= gaps[2] >= -1e-9


def test_initial_params_do_not_change_length():
    s = presets.square_torus()
    cls = presets.torus_class(2, 3)
    rng = np.random.default_rng(11)
    lengths = []
    for _ in range(5):
        init = rng.uniform(0.2, 0.8, size=len(cls.crossings)).tolist()
        lengths.append(tighten_geodesic(s, cls, tol=1e-12,
                                        initial_params=init).length)
    assert max(lengths) - min(lengths) < 1e-9


def test_trivial_class_detected():
    s = presets.square_torus()
    # crossing an edge and returning straight back is null-homotopic
    slot = (0, 1)
    partner = s.gluings[slot]
    with pytest.raises(TrivialClass):
        tighten_geodesic(s, HomotopyClassPath((slot, partner)))


def test_invalid_strip_rejected():
    s = presets.square_torus()
    with pytest.raises(ValueError):
        tighten_geodesic(s, HomotopyClassPath(((0, 0), (0, 1))))


def test_scale_equivariance():
    o = presets.regular_octagon()
    big = o.scaled(3.0)
    cls = presets.octagon_class_vertical()
    l1 = tighten_geodesic(o, cls, tol=1e-12).length
    l2 = tighten_geodesic(big, cls, tol=1e-12).length
    assert abs(l2 - 3.0 * l1) < 1e-9


def test_segments_concatenate():
    s = presets.square_torus()
    g = tighten_geodesic(s, presets.torus_class(1, 2), tol=1e-12)
    total = sum(float(np.linalg.norm(b - a)) for _t, a, b in g.segments)
    assert abs(total - g.length) < 1e-9
