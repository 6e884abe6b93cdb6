"""Damped-Newton solvers for the Wang equation and the gap equation.

In coordinate gauge (h = e^psi |dz|^2) the Wang equation reads

    Lap psi = 2 e^psi - 4 |q|^2 e^(-2 psi),

and the log-density gap F = (3/2)(psi - (1/3) log(2 |q|^2)) between h and
the flat comparison metric 2^(1/3)|q|^(2/3) satisfies

    Lap F = 3 * 2^(4/3) |q|^(2/3) e^(-F/3) sinh(F).

Both linearizations have strictly positive zeroth-order coefficients, so
the Newton systems are uniformly invertible (also in the doubly periodic
case) and the discrete solutions obey the maximum principle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import NegativeBoundary, NoConvergence, NoSolution, \
    SingularJacobian
from .cubic import CubicDifferentialField
from .grid import DIRICHLET, Grid2D

_EXP_CAP = 300.0


def _safe_exp(x):
    return np.exp(np.clip(x, -_EXP_CAP, _EXP_CAP))


def laplacian_matrix(grid: Grid2D, fixed_mask=None) -> sp.csr_matrix:
    """5-point Laplacian; rows of fixed (Dirichlet) nodes are identity rows.

    ``fixed_mask`` defaults to the rectangle boundary; a caller may fix a
    larger node set (e.g. everything outside an inscribed disk).
    """
    nx, ny = grid.nx, grid.ny
    idx2 = 1.0 / grid.dx ** 2
    idy2 = 1.0 / grid.dy ** 2

    def d2(n, step, periodic):
        main = -2.0 * np.ones(n)
        off = np.ones(n - 1)
        mat = sp.diags([off, main, off], [-1, 0, 1], format="lil")
        if periodic:
            mat[0, -1] = 1.0
            mat[-1, 0] = 1.0
        return mat * step

    periodic = grid.bc != DIRICHLET
    L = (sp.kron(sp.identity(ny), d2(nx, idx2, periodic))
         + sp.kron(d2(ny, idy2, periodic), sp.identity(nx))).tolil()
    if not periodic:
        if fixed_mask is None:
            fixed_mask = ~grid.interior_mask()
        for i in np.flatnonzero(np.asarray(fixed_mask).ravel()):
            L.rows[i] = [i]
            L.data[i] = [1.0]
    return L.tocsr()


@dataclass
class BlaschkeSolution:
    """Discrete solution of the Wang equation on a grid."""

    grid: Grid2D
    q: CubicDifferentialField
    psi: np.ndarray
    residual: float
    newton_iterations: int
    flags: dict = field(default_factory=dict)

    @property
    def u(self) -> np.ndarray:
        sigma = self.grid.sigma
        if sigma is None:
            return self.psi
        return self.psi - np.log(sigma)

    @property
    def h(self) -> np.ndarray:
        return _safe_exp(self.psi)

    @property
    def gap(self) -> np.ndarray:
        """F = (3/2)(psi - (1/3) log(2|q|^2)); +inf at zeros of q."""
        with np.errstate(divide="ignore"):
            flat = np.log(2.0 * self.q.abs2) / 3.0
        return 1.5 * (self.psi - flat)


def _newton(L, f_and_deriv, x0, tol, max_iter, label):
    """Damped Newton for Lap x = f(x) with monotone f' > 0."""
    x = x0.copy()
    n = x.size

    def residual(v):
        fv, _ = f_and_deriv(v)
        return L @ v - fv

    r = residual(x)
    rn = float(np.abs(r).max())
    for it in range(max_iter):
        if rn <= tol:
            return x, rn, it
        _, fp = f_and_deriv(x)
        J = L - sp.diags(fp)
        try:
            delta = spla.spsolve(J.tocsc(), -r)
        except Exception as err:  # pragma: no cover - factorization failure
            raise SingularJacobian(f"{label}: {err}")
        if not np.all(np.isfinite(delta)):
            raise SingularJacobian(f"{label}: non-finite Newton step")
        step = 1.0
        while step > 1e-8:
            xn = x + step * delta
            r2 = residual(xn)
            rn2 = float(np.abs(r2).max())
            if rn2 < (1.0 - 0.25 * step) * rn or rn2 <= tol:
                x, r, rn = xn, r2, rn2
                break
            step *= 0.5
        else:
            raise NoConvergence(
                f"{label}: line search stalled at residual {rn:.3e}")
    if rn <= tol:
        return x, rn, max_iter
    raise NoConvergence(f"{label}: residual {rn:.3e} after {max_iter} steps")


def solve_wang(grid: Grid2D, q: CubicDifferentialField, tol: float = 1e-10,
               boundary_psi=None, max_iter: int = 60) -> BlaschkeSolution:
    """Solve Lap psi = 2 e^psi - 4 |q|^2 e^(-2 psi) on the grid.

    Dirichlet solves take boundary psi values (array or callable of z);
    doubly periodic solves need q not identically zero.
    """
    abs2 = q.abs2.ravel()
    periodic = grid.bc != DIRICHLET
    if periodic and float(abs2.max()) == 0.0:
        raise NoSolution(
            "q = 0 on a periodic grid: the integral of Lap psi vanishes "
            "but the right side 2 e^psi is strictly positive")

    L = laplacian_matrix(grid)
    bmask = (~grid.interior_mask()).ravel()

    if periodic:
        bc_vec = None
    else:
        if boundary_psi is None:
            raise ValueError("Dirichlet solves need boundary psi values")
        if callable(boundary_psi):
            bvals = np.asarray(boundary_psi(grid.zs), dtype=float)
        else:
            bvals = np.asarray(boundary_psi, dtype=float)
        if bvals.shape != (grid.ny, grid.nx):
            raise ValueError("boundary field shape mismatch")
        if not np.all(np.isfinite(bvals.ravel()[bmask])):
            raise ValueError("boundary psi must be finite")
        bc_vec = bvals.ravel()

    def f_and_deriv(psi):
        e1 = _safe_exp(psi)
        e2 = _safe_exp(-2.0 * psi)
        fv = 2.0 * e1 - 4.0 * abs2 * e2
        fp = 2.0 * e1 + 8.0 * abs2 * e2
        if not periodic:
            fv = fv.copy()
            fp = fp.copy()
            fv[bmask] = bc_vec[bmask]
            fp[bmask] = 0.0
        return fv, fp

    # initial guess: capped subsolution, blended with boundary data
    with np.errstate(divide="ignore"):
        sub = np.log(2.0 * abs2) / 3.0
    if periodic:
        floor = sub[np.isfinite(sub)].max() - 50.0
        x0 = np.maximum(sub, floor)
    else:
        bmin = float(bc_vec[bmask].min())
        harmonic = spla.spsolve(L.tocsc(), np.where(bmask, bc_vec, 0.0))
        x0 = np.maximum(harmonic, np.maximum(sub, bmin - 50.0))
        x0[bmask] = bc_vec[bmask]

    psi, rn, its = _newton(L, f_and_deriv, x0, tol, max_iter, "wang")
    psi = psi.reshape(grid.ny, grid.nx)
    sol = BlaschkeSolution(grid, q, psi, rn, its)
    margin = sol.h - 2.0 ** (1.0 / 3.0) * q.abs23
    sol.flags["subsolution_ok"] = bool(margin.min() >= -1e-8 * max(
        1.0, float(sol.h.max())))
    if np.any(q.abs2 > 0):
        sol.flags["gap_nonnegative"] = bool(
            np.nanmin(np.where(q.abs2 > 0, sol.gap, np.nan)) >= -1e-7)
    else:
        sol.flags["gap_nonnegative"] = True
    return sol


def solve_tzitzeica(grid: Grid2D, q: CubicDifferentialField,
                    boundary=None, tol: float = 1e-10,
                    max_iter: int = 60, fixed_mask=None) -> np.ndarray:
    """Solve the gap equation Lap F = 3*2^(4/3)|q|^(2/3) e^(-F/3) sinh F.

    Dirichlet boundary values must be nonnegative; the discrete solution
    then satisfies F >= 0 everywhere (comparison with the zero solution).
    ``fixed_mask`` may pin additional nodes to the boundary value, e.g. to
    solve on an inscribed disk.
    """
    c = 3.0 * 2.0 ** (4.0 / 3.0) * q.abs23.ravel()
    periodic = grid.bc != DIRICHLET
    if fixed_mask is not None:
        fixed_mask = np.asarray(fixed_mask, dtype=bool) \
            | ~grid.interior_mask()
    L = laplacian_matrix(grid, fixed_mask)
    bmask = (~grid.interior_mask()).ravel() if fixed_mask is None \
        else fixed_mask.ravel()

    if periodic:
        bc_vec = None
        x0 = np.zeros(grid.nx * grid.ny)
    else:
        if boundary is None:
            raise ValueError("Dirichlet solves need boundary values")
        bvals = np.asarray(boundary, dtype=float)
        if bvals.ndim == 0:
            bvals = np.full((grid.ny, grid.nx), float(bvals))
        if bvals.shape != (grid.ny, grid.nx):
            raise ValueError("boundary field shape mismatch")
        bc_vec = bvals.ravel()
        if bc_vec[bmask].min() < 0:
            raise NegativeBoundary(
                f"boundary gap value {bc_vec[bmask].min():.6g} < 0")
        x0 = np.full(grid.nx * grid.ny, float(bc_vec[bmask].mean()))
        x0[bmask] = bc_vec[bmask]

    def f_and_deriv(F):
        Fc = np.clip(F, -_EXP_CAP, _EXP_CAP)
        e3 = np.exp(-Fc / 3.0)
        fv = c * e3 * np.sinh(Fc)
        fp = c * e3 * (np.cosh(Fc) - np.sinh(Fc) / 3.0)
        if not periodic:
            fv = fv.copy()
            fp = fp.copy()
            fv[bmask] = bc_vec[bmask]
            fp[bmask] = 0.0
        return fv, fp

    F, rn, _ = _newton(L, f_and_deriv, x0, tol, max_iter, "tzitzeica")
    return F.reshape(grid.ny, grid.nx)
