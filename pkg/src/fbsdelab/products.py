"""Smoothed Fourier truncations and the distribution-function pointwise product.

The product of a rough field g (negative Sobolev order) with a smoother field
h is taken as S^J(g) * S^J(h) at the finest level J the grid resolves, where
S^j multiplies coefficients by a radial cutoff bump psi(|xi| / 2^j).  The
multiplication itself is dealiased: both factors are zero-padded to a grid
twice as fine, multiplied pointwise, and truncated back, which is the exact
coefficient convolution for band-limited factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fields import PeriodicGrid, SpectralField, to_physical, to_spectral
from .params import SolverParams

__all__ = [
    "CutoffBump",
    "QUINTIC_BUMP",
    "smooth_cutoff",
    "finest_level",
    "pointwise_product",
    "dealiased_multiply",
    "apply_pointwise",
    "refine",
    "upsample",
    "downsample",
]


def _quintic(r: np.ndarray) -> np.ndarray:
    return r**3 * (10.0 - 15.0 * r + 6.0 * r**2)


def _cubic(r: np.ndarray) -> np.ndarray:
    return r**2 * (3.0 - 2.0 * r)


@dataclass(frozen=True)
class CutoffBump:
    """Radial profile psi: 1 on |x|<1, 0 on |x|>=3/2, smooth monotone between.

    `transition` maps [0,1] onto [0,1] monotonically with value 0 at 0 and 1
    at 1; it interpolates 1-psi across the shell 1 <= |x| <= 3/2.
    """

    transition: Callable[[np.ndarray], np.ndarray] = _quintic

    def profile(self, x: np.ndarray) -> np.ndarray:
        r = np.clip(2.0 * (np.abs(np.asarray(x, dtype=np.float64)) - 1.0), 0.0, 1.0)
        return 1.0 - self.transition(r)


QUINTIC_BUMP = CutoffBump()
CUBIC_BUMP = CutoffBump(transition=_cubic)


def smooth_cutoff(fld: SpectralField, level: int, bump: CutoffBump = QUINTIC_BUMP) -> SpectralField:
    """Multiply coefficients by psi(|xi| / 2^level)."""
    if level < 0:
        raise ValueError(f"level must be >= 0, got {level}")
    radius = np.sqrt(fld.grid.frequency_sq) / float(2**level)
    return fld.with_coeffs(fld.coeffs * bump.profile(radius))


def finest_level(grid: PeriodicGrid) -> int:
    """Smallest level whose psi-plateau covers every retained mode.

    With the default torus half-width 2*pi this equals floor(log2(N/3)).
    """
    return max(0, math.ceil(math.log2(grid.max_frequency)))


def refine(grid: PeriodicGrid) -> PeriodicGrid:
    return PeriodicGrid(grid.d, 2 * grid.N, grid.L)


def upsample(fld: SpectralField) -> SpectralField:
    """Zero-pad coefficients onto the grid twice as fine (same torus)."""
    grid = fld.grid
    axes = tuple(range(1, fld.coeffs.ndim))
    shifted = np.fft.fftshift(fld.coeffs, axes=axes)
    half = grid.N // 2
    pad = [(0, 0)] + [(half, half)] * grid.d
    padded = np.pad(shifted, pad)
    return SpectralField(refine(grid), np.fft.ifftshift(padded, axes=axes), fld.time_label)


def downsample(fld: SpectralField, coarse: PeriodicGrid) -> SpectralField:
    """Truncate coefficients back onto `coarse` (half the points per axis)."""
    if fld.grid.N != 2 * coarse.N or fld.grid.L != coarse.L or fld.grid.d != coarse.d:
        raise ValueError("downsample expects the doubled grid of `coarse`")
    axes = tuple(range(1, fld.coeffs.ndim))
    shifted = np.fft.fftshift(fld.coeffs, axes=axes)
    half = coarse.N // 2
    sl = (slice(None),) + (slice(fld.grid.N // 2 - half, fld.grid.N // 2 + half),) * coarse.d
    return SpectralField(coarse, np.fft.ifftshift(shifted[sl], axes=axes), fld.time_label)


def _complex_values(fld: SpectralField) -> np.ndarray:
    axes = tuple(range(1, fld.coeffs.ndim))
    return np.fft.ifftn(fld.coeffs, axes=axes) * (fld.grid.N**fld.grid.d)


def dealiased_multiply(a: SpectralField, b: SpectralField) -> SpectralField:
    """Pointwise product via zero-padding to 2N modes and truncation back.

    Components broadcast: (1, m) and (m, m) pairings are allowed.  Works on
    complex coefficient content (single complex modes convolve exactly).
    """
    if a.grid != b.grid:
        raise ValueError("product factors live on different grids")
    if a.ncomp != b.ncomp and 1 not in (a.ncomp, b.ncomp):
        raise ValueError(f"component mismatch: {a.ncomp} vs {b.ncomp}")
    va = _complex_values(upsample(a))
    vb = _complex_values(upsample(b))
    fine = refine(a.grid)
    axes = tuple(range(1, va.ndim))
    coeffs = np.fft.fftn(va * vb, axes=axes) / (fine.N**fine.d)
    prod = SpectralField(fine, coeffs, a.time_label)
    return downsample(prod, a.grid)


def pointwise_product(
    g: SpectralField,
    h: SpectralField,
    params: SolverParams,
    bump: CutoffBump = QUINTIC_BUMP,
    level: int | None = None,
) -> SpectralField:
    """Product of a rough field g (order -beta) with h (order delta).

    Requires the exponent gate 1 < p, q < inf, q > max(p, d/delta),
    0 < beta < 1/2, beta < delta; the result carries order -beta.
    """
    _check_product_gate(params)
    if g.grid != h.grid:
        raise ValueError("product factors live on different grids")
    j = finest_level(g.grid) if level is None else level
    return dealiased_multiply(smooth_cutoff(g, j, bump), smooth_cutoff(h, j, bump))


def _check_product_gate(params: SolverParams) -> None:
    errors = []
    if not (1.0 < params.p < np.inf):
        errors.append(f"p = {params.p} ∉ (1, ∞)")
    if not (1.0 < params.q < np.inf):
        errors.append(f"q = {params.q} ∉ (1, ∞)")
    if params.delta <= 0 or params.q <= max(params.p, params.d / params.delta):
        errors.append("q ≤ max(p, d/δ)")
    if not (0.0 < params.beta < 0.5):
        errors.append(f"β = {params.beta} ∉ (0, 1/2)")
    if params.beta >= params.delta:
        errors.append("β ≥ δ")
    if errors:
        raise ValueError("pointwise product gate violated: " + "; ".join(errors))


def apply_pointwise(
    fn: Callable[..., np.ndarray],
    grid: PeriodicGrid,
    *flds: SpectralField,
    time_label: float | None = None,
) -> SpectralField:
    """Evaluate a pointwise nonlinearity on the dealiased (doubled) grid.

    `fn` receives the tuple of padded point meshes followed by the padded
    physical values of each input field (each (ncomp,) + fine shape) and must
    return (ncomp_out,) + fine shape.  The result is transformed back and
    truncated to `grid`.
    """
    fine = refine(grid)
    vals = [to_physical(upsample(f)) for f in flds]
    out = np.asarray(fn(fine.point_mesh, *vals), dtype=np.float64)
    return downsample(to_spectral(fine, out, time_label), grid)
