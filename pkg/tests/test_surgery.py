import math

import pytest

from cubiclab.errors import AngleClash, EpsTooLarge
from cubiclab.flatsurface import presets
from cubiclab.flatsurface.surface import (
    TriangulatedFlatSurface,
    area,
    gauss_bonnet_defect,
)
from cubiclab.flatsurface.surgery import triangle_surgery_glue

WEDGE_AREA = math.sqrt(3.0) / 4.0  # equilateral triangle of unit side


def _marked_octagon():
    o = presets.regular_octagon()
    return TriangulatedFlatSurface([t for t in o.triangles], o.gluings,
                                   marked_punctures=(0,))


def test_glue_two_tori_weightless():
    t1 = presets.square_torus(mark_vertex=True)
    t2 = presets.square_torus(mark_vertex=True)
    eps = 0.2
    g = triangle_surgery_glue([(t1, 0), (t2, 0)], eps)
    assert abs(gauss_bonnet_defect(g)) < 1e-9
    assert g.euler_characteristic == -2  # genus two
    assert sorted(g.orbit_orders) == [0, 0, 2, 2, 2]
    assert g.total_cone_order() == -3 * g.euler_characteristic
    assert abs(area(g) - (2.0 - 2.0 * WEDGE_AREA * eps ** 2)) < 1e-12
    assert not g.marked_punctures


def test_glue_with_prism_band():
    t1 = presets.square_torus(mark_vertex=True)
    t2 = presets.square_torus(mark_vertex=True)
    eps, w = 0.2, 1.0
    g = triangle_surgery_glue([(t1, 0), (t2, 0)], eps, weights=[w])
    assert abs(gauss_bonnet_defect(g)) < 1e-9
    assert g.euler_characteristic == -2  # the band is an annulus
    # prism lateral surface adds 3 * eps * w
    expect = 2.0 - 2.0 * WEDGE_AREA * eps ** 2 + 3.0 * eps * w
    assert abs(area(g) - expect) < 1e-12
    assert sorted(g.orbit_orders) == [0, 0, 0, 0, 1, 1, 1, 1, 1, 1]


def test_glue_octagons_at_cone_points():
    o1, o2 = _marked_octagon(), _marked_octagon()
    g = triangle_surgery_glue([(o1, 0), (o2, 0)], 0.3)
    assert abs(gauss_bonnet_defect(g)) < 1e-9
    assert g.euler_characteristic == -6
    assert sorted(o for o in g.orbit_orders if o != 0) == [2, 2, 14]


def test_eps_too_large_clearance():
    # octagon's cone point has a closed saddle connection of length 1
    o1, o2 = _marked_octagon(), _marked_octagon()
    with pytest.raises(EpsTooLarge):
        triangle_surgery_glue([(o1, 0), (o2, 0)], 0.6)


def test_double_pole_rejected():
    d = presets.doubled_triangle()
    t = presets.square_torus(mark_vertex=True)
    with pytest.raises(AngleClash):
        triangle_surgery_glue([(d, 0), (t, 0)], 0.1)


def test_weight_and_pairing_validation():
    t1 = presets.square_torus(mark_vertex=True)
    with pytest.raises(ValueError):
        triangle_surgery_glue([(t1, 0)], 0.1)
    t2 = presets.square_torus(mark_vertex=True)
    with pytest.raises(ValueError):
        triangle_surgery_glue([(t1, 0), (t2, 0)], 0.1, weights=[-1.0])
    with pytest.raises(ValueError):
        triangle_surgery_glue([(t1, 0), (t2, 0)], 0.1, weights=[0.0, 0.0])


def test_unglued_punctures_survive():
    d1 = presets.doubled_triangle()
    d2 = presets.doubled_triangle()
    # glue two flat spheres at one k=-1-free puncture is rejected (k=-2),
    # so instead glue tori and check an untouched puncture elsewhere:
    t1 = presets.square_torus(mark_vertex=True)
    t2 = presets.square_torus(mark_vertex=True)
    g = triangle_surgery_glue([(t1, 0), (t2, 0)], 0.15)
    assert not g.marked_punctures  # both listed punctures were consumed
    assert d1.marked_punctures and d2.marked_punctures  # inputs untouched


def test_prism_core_lengths_scale_with_eps():
    t1 = presets.square_torus(mark_vertex=True)
    t2 = presets.square_torus(mark_vertex=True)
    for eps in (0.1, 0.25):
        g = triangle_surgery_glue([(t1, 0), (t2, 0)], eps, weights=[0.5])
        expect = 2.0 - 2.0 * WEDGE_AREA * eps ** 2 + 3.0 * eps * 0.5
        assert abs(area(g) - expect) < 1e-12
