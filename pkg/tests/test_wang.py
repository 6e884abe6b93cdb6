import math

import numpy as np
import pytest

from cubiclab.blaschke import (
    AreaBounds,
    CubicDifferentialField,
    Grid2D,
    area_and_bounds,
    check_subsolution,
    curvature_field,
    gap_upper_bound,
    largest_root,
    log_density_curvature,
    minimal_surface_metric,
    solve_wang,
    unit_torus_grid,
)
from cubiclab.errors import (
    NegativeInput,
    NonpositiveRadius,
    NoSolution,
)

CBRT2 = 2.0 ** (1.0 / 3.0)


def hyperbolic_disk_density(zs):
    return np.log((4.0 / (4.0 - np.abs(zs) ** 2)) ** 2)


@pytest.fixture(scope="module")
def torus_solution():
    g = unit_torus_grid(24)
    q = CubicDifferentialField.constant(g, 1.0)
    return solve_wang(g, q, tol=1e-12), q


@pytest.fixture(scope="module")
def zcubic_solution():
    n = 129
    g = Grid2D(-4, 4, -4, 4, n, n)
    q = CubicDifferentialField.from_polynomial(g, [0.0, 1.0])
    with np.errstate(divide="ignore"):
        bc = np.log(2.0 * np.abs(g.zs) ** 2) / 3.0
    return solve_wang(g, q, tol=1e-10, boundary_psi=bc), q, g


def test_torus_constant_solution(torus_solution):
    sol, _q = torus_solution
    assert np.abs(sol.psi - math.log(2.0) / 3.0).max() < 1e-10
    assert sol.residual < 1e-12
    assert sol.flags["subsolution_ok"]


def test_torus_curvature_is_zero(torus_solution):
    sol, q = torus_solution
    kappa = curvature_field(sol)
    # - 1 + 2 |q|^2 e^(-3 psi) = -1 + 2 * (1/2) = 0: the flat boundary case
    assert np.abs(kappa).max() < 1e-9
    margin = check_subsolution(sol, q)
    assert np.abs(margin).max() < 1e-9  # the bound is an infimum here


def test_torus_area_equality(torus_solution):
    sol, q = torus_solution
    ab = area_and_bounds(sol, q, region="torus")
    assert abs(ab.flat_area - 1.0) < 1e-12
    assert abs(ab.area_h - CBRT2) < 1e-9
    assert ab.literal and abs(ab.lower - ab.upper) < 1e-15
    assert ab.area_h >= ab.lower - 1e-9


def test_torus_area_scaling():
    for c in (2.0, 5.0):
        g = unit_torus_grid(16)
        q = CubicDifferentialField.constant(g, c)
        sol = solve_wang(g, q, tol=1e-12)
        ab = area_and_bounds(sol, q, region="torus")
        assert abs(ab.area_h - CBRT2 * c ** (2.0 / 3.0)) < 1e-8


def test_q_zero_periodic_has_no_solution():
    g = unit_torus_grid(16)
    q = CubicDifferentialField.constant(g, 0.0)
    with pytest.raises(NoSolution):
        solve_wang(g, q, tol=1e-10)


def test_disk_refinement_second_order():
    errs = []
    for n in (65, 129):
        g = Grid2D(-1.3, 1.3, -1.3, 1.3, n, n)
        q = CubicDifferentialField.constant(g, 0.0)
        sol = solve_wang(g, q, tol=1e-10,
                         boundary_psi=hyperbolic_disk_density)
        err = np.abs(sol.psi - hyperbolic_disk_density(g.zs))
        errs.append(float(err[g.interior_mask()].max()))
    ratio = errs[0] / errs[1]
    assert 3.0 < ratio < 5.0


def test_disk_curvature_minus_one():
    g = Grid2D(-1.3, 1.3, -1.3, 1.3, 65, 65)
    q = CubicDifferentialField.constant(g, 0.0)
    sol = solve_wang(g, q, tol=1e-10, boundary_psi=hyperbolic_disk_density)
    kappa = curvature_field(sol)
    inner = g.interior_mask()
    assert np.abs(kappa[inner] + 1.0).max() < 1e-8


def test_curvature_stencil_second_order_on_exact_density():
    # apply the curvature stencil to the analytic hyperbolic density:
    # kappa -> -1 at second order under refinement
    maxima = []
    for n in (33, 65, 129):
        g = Grid2D(-1.3, 1.3, -1.3, 1.3, n, n)
        k = log_density_curvature(hyperbolic_disk_density(g.zs), g.dx, g.dy)
        maxima.append(float(np.abs(k[g.interior_mask()] + 1.0).max()))
    assert maxima[0] > maxima[1] > maxima[2]
    assert 3.0 < maxima[0] / maxima[1] < 5.0
    assert 3.0 < maxima[1] / maxima[2] < 5.0


def test_zcubic_estimate_suite(zcubic_solution):
    sol, q, g = zcubic_solution
    inner = g.interior_mask()
    assert (sol.gap[inner] > 0).all()
    kappa = curvature_field(sol)
    assert (kappa[inner] < 0).all()
    ident = np.abs(kappa + 1.0 - 2.0 * q.abs2 * np.exp(-3.0 * sol.psi))
    assert ident[inner].max() < 1e-4
    assert (check_subsolution(sol, q)[inner] > 0).all()


def test_zcubic_center_matches_fine_grid_oracle(zcubic_solution):
    sol, _q, g = zcubic_solution
    # frozen from a 257-node run of the same problem (4x the 65 grid)
    oracle_257 = -0.045085110473
    center = float(sol.psi[g.ny // 2, g.nx // 2])
    assert abs(center - oracle_257) < 1.2e-3


def test_minimal_surface_sandwich(zcubic_solution):
    sol, q, g = zcubic_solution
    gm = minimal_surface_metric(sol)
    h = sol.h
    inner = g.interior_mask()
    nz = q.abs2 > 0
    sel = inner & nz
    assert (gm[sel] > 12.0 * h[sel]).all()
    assert (gm[sel] <= 24.0 * h[sel] + 1e-12).all()
    # at the zero of q the gap is +inf and the metric collapses to 12 h
    assert np.allclose(gm[~nz], 12.0 * h[~nz])


def test_minimal_surface_limits(torus_solution):
    sol, _q = torus_solution
    gm = minimal_surface_metric(sol)
    assert np.allclose(gm, 24.0 * sol.h, atol=1e-9)  # gap identically zero


def test_gap_upper_bound_values():
    assert abs(gap_upper_bound(CBRT2 * math.pi, 1.0)) < 1e-14
    up1 = gap_upper_bound(2.0, 1.0)
    up2 = gap_upper_bound(4.0, 1.0)
    assert abs((up2 - up1) - 1.5 * math.log(2.0)) < 1e-14
    with pytest.raises(NonpositiveRadius):
        gap_upper_bound(1.0, 0.0)


def test_largest_root():
    assert largest_root(0.0) == 1.0
    for a in (0.5, 1.0, 4.0, 13.0):
        r = largest_root(a)
        assert abs(2 * r ** 3 - 2 * r ** 2 - 4 * a) < 1e-12
        assert r >= 1.0
        # numpy.roots as the independent oracle
        roots = np.roots([2.0, -2.0, 0.0, -4.0 * a])
        real = roots[np.abs(roots.imag) < 1e-9].real
        assert abs(r - real.max()) < 1e-9
    assert largest_root(4.0) > largest_root(1.0)
    with pytest.raises(NegativeInput):
        largest_root(-1.0)


def test_phase_invariance_of_solutions():
    g = unit_torus_grid(16)
    base = CubicDifferentialField.from_polynomial(g, [0.3, 1.0])
    sol = solve_wang(g, base, tol=1e-12)
    # exact negation: |q|^2 bit-identical, hence bit-identical psi
    neg = CubicDifferentialField(g, -base.values)
    sol_neg = solve_wang(g, neg, tol=1e-12)
    assert np.array_equal(sol.psi, sol_neg.psi)
    # generic unit phase: identical up to rounding in |q|^2
    rot = CubicDifferentialField(g, base.values * np.exp(0.7j))
    sol_rot = solve_wang(g, rot, tol=1e-12)
    assert np.abs(sol.psi - sol_rot.psi).max() < 1e-12


def test_discrete_maximum_principle():
    n = 65
    g = Grid2D(-2, 2, -2, 2, n, n)
    q = CubicDifferentialField.from_polynomial(g, [0.5, 0.8])
    with np.errstate(divide="ignore"):
        bc = np.log(2.0 * np.abs(q.values) ** 2 + 0.3) / 3.0
    sol = solve_wang(g, q, tol=1e-10, boundary_psi=bc)
    bmask = ~g.interior_mask()
    floor = min(float(sol.psi[bmask].min()),
                float(np.log(2.0 * q.abs2.max()) / 3.0))
    assert sol.psi.min() >= floor - 1e-8
