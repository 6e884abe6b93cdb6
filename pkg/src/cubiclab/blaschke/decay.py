"""Decay certification for the gap along rays t * q of cubic differentials.

For each t the gap equation is solved on a Dirichlet window with constant
boundary value B.  On a coordinate disk of radius R around the probe that
is free of zeros of q, the gap G satisfies Lap G >= m G with

    m = 3 * 2^(4/3) e^(-B/3) * min_disk |t q|^(2/3),

so the comparison function  g = B cosh(a x) cosh(a y) / cosh(a R),
a = sqrt(m/2), dominates G on the disk (g >= B on its boundary and
Lap g = m g); in particular G(probe) <= B / cosh(a R).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from ..errors import ProbeTooCloseToZero
from .cubic import CubicDifferentialField
from .estimates import discrete_laplacian
from .grid import square_window
from .solver import solve_tzitzeica


@dataclass(frozen=True)
class DecayCertificate:
    """One barrier check: measured gap at the probe against the closed form."""

    t: float
    bound: float          # boundary value B
    flat_radius: float    # zero-free radius around the probe in |t q|^(2/3)
    coord_radius: float   # coordinate radius of the comparison disk
    barrier: float        # B / cosh(sqrt(m/2) * coord_radius)
    measured: float       # solved gap at the probe node
    residual: float       # max-norm residual of the gap solve
    passed: bool


def flat_metric_path_length(q_coeffs, z_from: complex, z_to: complex,
                            scale: float = 1.0) -> float:
    """Length of the straight segment in the |scale * q|^(2/3) metric."""
    coeffs = np.asarray(q_coeffs, dtype=complex)

    def density(s):
        z = z_from + s * (z_to - z_from)
        return abs(scale * np.polyval(coeffs[::-1], z)) ** (1.0 / 3.0)

    val, _err = quad(density, 0.0, 1.0, limit=200)
    return float(val * abs(z_to - z_from))


def _min_abs_q_on_disk(coeffs, center: complex, radius: float,
                       n_r: int = 48, n_th: int = 96) -> float:
    cs = np.asarray(coeffs, dtype=complex)
    rr = np.linspace(0.0, radius, n_r)
    th = np.linspace(0.0, 2.0 * math.pi, n_th, endpoint=False)
    zz = center + rr[:, None] * np.exp(1j * th)[None, :]
    return float(np.abs(np.polyval(cs[::-1], zz)).min())


def decay_experiment(q_coeffs, t_list, probe: complex, *,
                     window_side: float = 4.0, n: int = 129,
                     bound: float = 1.0, tol: float = 1e-10,
                     disc_tol: float = 1e-6) -> list[DecayCertificate]:
    """Certify the gap decay for the ray t * q at a probe point.

    The window is a Dirichlet square centered at the probe with boundary
    gap value ``bound``; t_list must be increasing and the probe must keep
    a positive coordinate distance from the zeros of q.
    """
    ts = [float(t) for t in t_list]
    if not ts or any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t_list must be strictly increasing and nonempty")
    coeffs = np.asarray(q_coeffs, dtype=complex)

    zero_pts = np.roots(np.trim_zeros(coeffs, "b")[::-1]) \
        if len(np.trim_zeros(coeffs, "b")) > 1 else np.array([])
    d_boundary = window_side / 2.0
    d_zero = float(np.abs(zero_pts - probe).min()) if zero_pts.size else \
        math.inf
    coord_radius = 0.999 * min(d_boundary, d_zero)
    grid = square_window(probe, window_side, n)
    if coord_radius <= 3.0 * grid.dx:
        raise ProbeTooCloseToZero(
            f"zero-free coordinate radius {coord_radius:.3g} around the "
            f"probe is below the grid resolution")

    # solve on the inscribed coordinate disk: all nodes outside it carry
    # the boundary bound, matching the comparison region of the barrier
    disk_fixed = np.abs(grid.zs - probe) >= coord_radius
    out = []
    for t in ts:
        q = CubicDifferentialField.from_polynomial(grid, coeffs * t)
        F = solve_tzitzeica(grid, q, boundary=bound, tol=tol,
                            fixed_mask=disk_fixed)
        iy, ix = grid.nearest_node(probe)
        measured = float(F[iy, ix])
        lap = discrete_laplacian(F, grid.dx, grid.dy)
        rhs = (3.0 * 2.0 ** (4.0 / 3.0) * q.abs23
               * np.exp(-F / 3.0) * np.sinh(F))
        free = ~disk_fixed & grid.interior_mask()
        residual = float(np.abs(lap - rhs)[free].max())
        min_d = _min_abs_q_on_disk(coeffs * t, probe, coord_radius) ** (2 / 3)
        m = 3.0 * 2.0 ** (4.0 / 3.0) * math.exp(-bound / 3.0) * min_d
        barrier = bound / math.cosh(math.sqrt(m / 2.0) * coord_radius)
        if zero_pts.size:
            d_flat = min(flat_metric_path_length(coeffs, probe, z0, scale=t)
                         for z0 in zero_pts)
        else:
            d_flat = math.inf
        edge_mids = [probe + d_boundary, probe - d_boundary,
                     probe + 1j * d_boundary, probe - 1j * d_boundary]
        d_flat = min([d_flat] + [
            flat_metric_path_length(coeffs, probe, zb, scale=t)
            for zb in edge_mids])
        passed = measured <= barrier + disc_tol * max(1.0, bound)
        out.append(DecayCertificate(t, bound, d_flat, coord_radius,
                                    barrier, measured, residual, passed))
    return out
