"""Off-grid field evaluation by local cubic (Catmull-Rom) interpolation.

Fields are evaluated along Monte Carlo paths far more often than they are
transformed, so this is the package's hot loop; the arithmetic lives in
`_kernels` (compiled when available, numpy otherwise, bit-identical either
way).  Interpolation is C^1 with periodic wraparound.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .fields import PeriodicGrid

__all__ = ["interp_periodic", "invert_shift_points", "kernel_backend", "InversionError"]


class InversionError(RuntimeError):
    pass


def kernel_backend() -> str:
    return _kernels.BACKEND


def _as_points(points: np.ndarray, d: int) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if d == 1:
        return np.ascontiguousarray(pts.reshape(-1))
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.shape[-1] != d:
        raise ValueError(f"points must have {d} coordinates")
    return np.ascontiguousarray(pts.reshape(-1, d))


def interp_periodic(table: np.ndarray, points: np.ndarray, L: float) -> np.ndarray:
    """Interpolate stacked grid tables at arbitrary points.

    table: (ncomp,) + (N,)*d physical samples; points: (n,) in d=1 or (n, d);
    returns (n, ncomp).
    """
    table = np.ascontiguousarray(table, dtype=np.float64)
    d = table.ndim - 1
    if d == 1:
        return _kernels.catmull_rom_1d(table, _as_points(points, 1), float(L))
    if d == 2:
        return _kernels.catmull_rom_2d(table, _as_points(points, 2), float(L))
    raise ValueError("tables must be 1- or 2-dimensional")


def invert_shift_points(
    xi_table: np.ndarray,
    v: np.ndarray,
    L: float,
    tol: float = 1e-10,
    max_iter: int = 60,
) -> np.ndarray:
    """Solve y + xi(y) = v per point by fixed-point iteration.

    Needs the interpolated shift to be a contraction (grid sup |grad xi| <=
    1/2 guarantees a ratio well below 1); non-convergence within `max_iter`
    signals that precondition failed.  The returned points satisfy
    |y + xi(y) - v| <= tol (verified, one extra interpolation pass).
    """
    xi_table = np.ascontiguousarray(xi_table, dtype=np.float64)
    d = xi_table.ndim - 1
    if d == 1:
        pts = _as_points(v, 1)
        y, ok = _kernels.invert_shift_1d(xi_table, pts, float(L), tol, max_iter)
        residual = np.abs(y + _kernels.catmull_rom_1d(xi_table, y, float(L))[:, 0] - pts)
    else:
        pts = _as_points(v, 2)
        y, ok = _kernels.invert_shift_2d(xi_table, pts, float(L), tol, max_iter)
        residual = np.max(
            np.abs(y + _kernels.catmull_rom_2d(xi_table, y, float(L)) - pts), axis=1
        )
    if not np.all(ok):
        bad = int(np.count_nonzero(~ok))
        raise InversionError(
            f"shift inversion failed for {bad}/{ok.size} points within {max_iter} "
            "iterations; the gradient bound on the straightening field was likely violated"
        )
    if np.any(residual > 10.0 * tol):
        raise InversionError(
            f"shift inversion residual {residual.max():.3e} exceeds {10.0 * tol:.1e}"
        )
    return y
