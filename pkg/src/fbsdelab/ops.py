"""Fourier-multiplier operators: Bessel powers, Sobolev norms, heat flow, gradients.

All operators act diagonally on the coefficients of a SpectralField:

    bessel_power(g, s):  multiply by (1 + |xi|^2/2)^(s/2)
    heat_semigroup(g,t): multiply by exp(-t |xi|^2/2)
    partial_deriv(g, j): multiply by i * xi_j

The H^s_p norm is the L^p quadrature norm of the Bessel-weighted field,
with vector components combined as (sum_i ||g_i||^p)^(1/p).
"""

from __future__ import annotations

import numpy as np

from .fields import PeriodicGrid, SpectralField, to_physical, to_spectral

__all__ = [
    "bessel_power",
    "heat_semigroup",
    "gradient",
    "partial_deriv",
    "sobolev_norm",
    "sup_norm",
    "sup_norm_and_holder",
    "random_sobolev_field",
]


def bessel_power(fld: SpectralField, s: float) -> SpectralField:
    """Apply (I - Laplacian/2)^(s/2); an isomorphism H^r_p -> H^(r-s)_p."""
    symbol = (1.0 + 0.5 * fld.grid.frequency_sq) ** (0.5 * s)
    return fld.with_coeffs(fld.coeffs * symbol)


def heat_semigroup(fld: SpectralField, t: float) -> SpectralField:
    """Heat flow over duration t >= 0 (generator Laplacian/2)."""
    if t < 0:
        raise ValueError(f"negative duration t = {t}")
    return fld.with_coeffs(fld.coeffs * np.exp(-0.5 * t * fld.grid.frequency_sq))


def partial_deriv(fld: SpectralField, axis: int) -> SpectralField:
    return fld.with_coeffs(fld.coeffs * (1j * fld.grid.frequency_mesh[axis]))


def gradient(fld: SpectralField):
    """Spectral gradient: one field in d=1, a tuple of d fields in d=2."""
    if fld.grid.d == 1:
        return partial_deriv(fld, 0)
    return tuple(partial_deriv(fld, ax) for ax in range(fld.grid.d))


def partial_fields(fld: SpectralField) -> tuple[SpectralField, ...]:
    """All partial derivatives as a tuple of fields (length d)."""
    return tuple(partial_deriv(fld, ax) for ax in range(fld.grid.d))


def gradient_stack(fld: SpectralField) -> np.ndarray:
    """Coefficients of all partials, shape (ncomp, d) + grid.shape."""
    mesh = fld.grid.frequency_mesh
    return np.stack([fld.coeffs * (1j * m) for m in mesh], axis=1)


def _lp_quadrature(values: np.ndarray, p: float, cell: float) -> float:
    """Equal-weight L^p norm of one component's samples (trapezoid = rectangle
    rule on a periodic grid)."""
    return float((np.sum(np.abs(values) ** p) * cell) ** (1.0 / p))


def sobolev_norm(fld: SpectralField, s: float, p: float) -> float:
    """H^s_p norm: Bessel weight, then grid L^p, components combined in l^p."""
    if not (1.0 < p < np.inf):
        raise ValueError(f"p must lie in (1, inf), got {p}")
    vals = to_physical(bessel_power(fld, s))
    cell = fld.grid.cell_volume
    comps = [_lp_quadrature(vals[i], p, cell) for i in range(vals.shape[0])]
    return float(np.sum(np.asarray(comps) ** p) ** (1.0 / p))


def sup_norm(fld: SpectralField) -> float:
    """Grid sup of the pointwise Euclidean norm across components."""
    vals = to_physical(fld)
    return float(np.max(np.sqrt(np.sum(vals**2, axis=0))))


def sup_norm_and_holder(times, flds, gamma: float) -> tuple[float, float]:
    """Sup over knots and grid, and the empirical gamma-Holder-in-time quotient
    max_{s<t} ||f(t)-f(s)||_sup / (t-s)^gamma over all knot pairs."""
    times = np.asarray(times, dtype=np.float64)
    if len(flds) != times.size or times.size == 0:
        raise ValueError("need one field per time knot")
    vals = [to_physical(f) for f in flds]
    sup = max(float(np.max(np.sqrt(np.sum(v**2, axis=0)))) for v in vals)
    quotient = 0.0
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            diff = vals[j] - vals[i]
            gap = float(np.max(np.sqrt(np.sum(diff**2, axis=0))))
            quotient = max(quotient, gap / (times[j] - times[i]) ** gamma)
    return sup, quotient


def random_sobolev_field(
    grid: PeriodicGrid,
    order: float,
    rng: np.random.Generator,
    ncomp: int = 1,
    band: int | None = None,
) -> SpectralField:
    """Random real field with unit-scale H^order norm.

    White noise on the grid is pushed through the inverse Bessel weight of the
    requested order, so its H^order norm equals the L^p norm of the noise.
    `band` optionally truncates to integer wavenumbers |k| <= band first.
    """
    noise = rng.standard_normal((ncomp,) + grid.shape)
    fld = to_spectral(grid, noise)
    if band is not None:
        k = np.fft.fftfreq(grid.N, d=1.0 / grid.N)
        mesh = np.meshgrid(*(k,) * grid.d, indexing="ij")
        keep = np.sqrt(sum(m**2 for m in mesh)) <= band
        fld = fld.with_coeffs(fld.coeffs * keep)
    return bessel_power(fld, -order)
