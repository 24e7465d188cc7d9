"""Declarative descriptions of drift, driver and terminal data.

Profiles know how to sample themselves at arbitrary points of the torus, so
the same object serves grid realization, dealiased-grid evaluation inside the
PDE solver, and closed-form evaluation along Monte Carlo paths.  Drifts
realize into a `DriftPath` (one field per time knot, possibly shared), either
exactly from a mode list or from a seeded random series.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .fields import PeriodicGrid, SpectralField, to_spectral, zero_field

__all__ = [
    "ZeroProfile",
    "GaussianBump",
    "SinusoidProfile",
    "TerminalSpec",
    "DriverSpec",
    "DriverZero",
    "DriverLinear",
    "DriverSinusoid",
    "DriverCustom",
    "DriftSpec",
    "DriftZero",
    "DriftSmooth",
    "DriftFractionalNoise",
    "DriftPath",
    "empirical_lipschitz",
]


# ---------------------------------------------------------------------------
# spatial profiles


@dataclass(frozen=True)
class ZeroProfile:
    def sample(self, mesh: tuple[np.ndarray, ...], L: float) -> np.ndarray:
        return np.zeros((1,) + np.shape(mesh[0]))


@dataclass(frozen=True)
class GaussianBump:
    """amplitude * exp(-|x - center|^2 / (2 width^2)), minimal-image on the torus."""

    center: float | tuple[float, ...] = 0.0
    width: float = 0.5
    amplitude: float = 1.0

    def sample(self, mesh: tuple[np.ndarray, ...], L: float) -> np.ndarray:
        center = np.atleast_1d(np.asarray(self.center, dtype=np.float64))
        if center.size == 1 and len(mesh) > 1:
            center = np.repeat(center, len(mesh))
        r2 = np.zeros_like(np.asarray(mesh[0], dtype=np.float64))
        for ax, m in enumerate(mesh):
            dx = np.asarray(m, dtype=np.float64) - center[ax]
            dx = dx - 2.0 * L * np.round(dx / (2.0 * L))
            r2 = r2 + dx**2
        return (self.amplitude * np.exp(-0.5 * r2 / self.width**2))[np.newaxis]


@dataclass(frozen=True)
class SinusoidProfile:
    """Finite cosine/sine series: sum_k a_k cos(xi_k . x) + b_k sin(xi_k . x).

    `modes` holds (k, cos_amp, sin_amp) with integer wavenumber k (a tuple in
    d=2); xi_k = pi*k/L.
    """

    modes: tuple[tuple, ...] = ((1, 1.0, 0.0),)

    def sample(self, mesh: tuple[np.ndarray, ...], L: float) -> np.ndarray:
        out = np.zeros_like(np.asarray(mesh[0], dtype=np.float64))
        for k, ca, sa in self.modes:
            ks = np.atleast_1d(np.asarray(k, dtype=np.float64))
            phase = sum(
                (np.pi * ks[ax] / L) * np.asarray(mesh[ax], dtype=np.float64)
                for ax in range(len(mesh))
            )
            out = out + ca * np.cos(phase) + sa * np.sin(phase)
        return out[np.newaxis]


Profile = ZeroProfile | GaussianBump | SinusoidProfile


def sample_at_points(profile, x: np.ndarray, L: float) -> np.ndarray:
    """Profile values at points x of shape (n, d); returns (n, 1)."""
    mesh = tuple(x[:, ax] for ax in range(x.shape[1]))
    return profile.sample(mesh, L).T


# ---------------------------------------------------------------------------
# terminal condition


@dataclass(frozen=True)
class TerminalSpec:
    """Terminal condition as a profile or explicit grid samples."""

    profile: Profile | None = None
    samples: np.ndarray | None = None

    def realize(self, grid: PeriodicGrid, time_label: float | None = None) -> SpectralField:
        if self.samples is not None:
            return to_spectral(grid, np.asarray(self.samples, dtype=np.float64), time_label)
        if self.profile is None:
            raise ValueError("terminal spec needs a profile or samples")
        vals = self.profile.sample(grid.point_mesh, grid.L)
        if vals.shape[0] == 1 and grid.d > 1:
            vals = np.repeat(vals, grid.d, axis=0)
        return to_spectral(grid, vals, time_label)


# ---------------------------------------------------------------------------
# drivers


class DriverSpec:
    """Nonlinearity f(t, x, y, z); y has the field's components, z its partials.

    `eval_grid` acts on sampled values of any resolution; `eval_paths` acts on
    per-path values y (n, nc) and z (n, nc, d).  `lipschitz` is the declared
    Lipschitz constant in (y, z).
    """

    lipschitz: float = 0.0

    def eval_grid(self, t: float, mesh, L: float, u_vals: np.ndarray, grad_vals: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def eval_paths(self, t: float, x: np.ndarray, y: np.ndarray, z: np.ndarray, L: float) -> np.ndarray:
        raise NotImplementedError

    @property
    def is_zero(self) -> bool:
        return False


@dataclass(frozen=True)
class DriverZero(DriverSpec):
    lipschitz: float = 0.0

    def eval_grid(self, t, mesh, L, u_vals, grad_vals):
        return np.zeros_like(u_vals)

    def eval_paths(self, t, x, y, z, L):
        return np.zeros_like(y)

    @property
    def is_zero(self) -> bool:
        return True


def _coefficient(c, t: float) -> float:
    return float(c(t)) if callable(c) else float(c)


@dataclass(frozen=True)
class DriverLinear(DriverSpec):
    """f_i = c(t) * (y_i + sum_j z_ij) + offset_i(x)."""

    c: float | Callable[[float], float] = 1.0
    offset: Profile = field(default_factory=ZeroProfile)
    c_sup: float | None = None

    @property
    def lipschitz(self) -> float:  # type: ignore[override]
        # sqrt(2) covers the row-sum coupling in both supported dimensions
        return np.sqrt(2.0) * abs(self.c_sup if self.c_sup is not None else _coefficient(self.c, 0.0))

    def eval_grid(self, t, mesh, L, u_vals, grad_vals):
        return _coefficient(self.c, t) * (u_vals + grad_vals.sum(axis=1)) + self.offset.sample(mesh, L)

    def eval_paths(self, t, x, y, z, L):
        return _coefficient(self.c, t) * (y + z.sum(axis=2)) + sample_at_points(self.offset, x, L)


@dataclass(frozen=True)
class DriverSinusoid(DriverSpec):
    """f_i = c(t) * sin(y_i + sum_j z_ij) + offset_i(x)."""

    c: float | Callable[[float], float] = 1.0
    offset: Profile = field(default_factory=ZeroProfile)
    c_sup: float | None = None

    @property
    def lipschitz(self) -> float:  # type: ignore[override]
        return np.sqrt(2.0) * abs(self.c_sup if self.c_sup is not None else _coefficient(self.c, 0.0))

    def eval_grid(self, t, mesh, L, u_vals, grad_vals):
        return _coefficient(self.c, t) * np.sin(u_vals + grad_vals.sum(axis=1)) + self.offset.sample(mesh, L)

    def eval_paths(self, t, x, y, z, L):
        return _coefficient(self.c, t) * np.sin(y + z.sum(axis=2)) + sample_at_points(self.offset, x, L)


@dataclass(frozen=True)
class DriverCustom(DriverSpec):
    """Registered evaluation routines with a declared Lipschitz constant."""

    grid_fn: Callable | None = None
    path_fn: Callable | None = None
    lipschitz: float = 0.0

    def eval_grid(self, t, mesh, L, u_vals, grad_vals):
        return self.grid_fn(t, mesh, L, u_vals, grad_vals)

    def eval_paths(self, t, x, y, z, L):
        return self.path_fn(t, x, y, z, L)


def empirical_lipschitz(driver: DriverSpec, d: int, rng: np.random.Generator, n: int = 256) -> float:
    """Sampled Lipschitz quotient of f in (y, z) at random pairs."""
    t = 0.0
    x = rng.uniform(-1.0, 1.0, size=(n, d))
    y1, y2 = rng.standard_normal((2, n, d))
    z1, z2 = rng.standard_normal((2, n, d, d))
    L = 2.0 * np.pi
    f1 = driver.eval_paths(t, x, y1, z1, L)
    f2 = driver.eval_paths(t, x, y2, z2, L)
    num = np.linalg.norm(f1 - f2, axis=1)
    den = np.linalg.norm(y1 - y2, axis=1) + np.linalg.norm((z1 - z2).reshape(n, -1), axis=1)
    return float(np.max(num / np.maximum(den, 1e-300)))


# ---------------------------------------------------------------------------
# drifts


@dataclass(frozen=True)
class DriftPath:
    """Per-knot drift fields; static drifts share one field object."""

    times: np.ndarray
    fields: tuple[SpectralField, ...]

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        object.__setattr__(self, "times", times)
        if len(self.fields) != times.size:
            raise ValueError("need one drift field per knot")

    def at(self, k: int) -> SpectralField:
        return self.fields[k]

    @property
    def is_static(self) -> bool:
        return all(f is self.fields[0] for f in self.fields)

    def map(self, fn) -> DriftPath:
        if self.is_static:
            shared = fn(self.fields[0])
            return DriftPath(self.times, (shared,) * len(self.fields))
        return DriftPath(self.times, tuple(fn(f) for f in self.fields))


class DriftSpec:
    time_dependence: str = "static"

    def realize(self, grid: PeriodicGrid, times) -> DriftPath:
        raise NotImplementedError

    @property
    def is_zero(self) -> bool:
        return False


@dataclass(frozen=True)
class DriftZero(DriftSpec):
    time_dependence: str = "static"

    def realize(self, grid: PeriodicGrid, times) -> DriftPath:
        z = zero_field(grid, ncomp=grid.d)
        return DriftPath(times, (z,) * np.asarray(times).size)

    @property
    def is_zero(self) -> bool:
        return True


def _per_knot(one_field, times, time_dependence: str) -> DriftPath:
    times = np.asarray(times, dtype=np.float64)
    if time_dependence == "piecewise":
        return DriftPath(times, tuple(one_field() for _ in range(times.size)))
    shared = one_field()
    return DriftPath(times, (shared,) * times.size)


@dataclass(frozen=True)
class DriftSmooth(DriftSpec):
    """Band-limited drift: explicit modes, or a seeded random series on |k| <= band."""

    modes: tuple[tuple, ...] | None = None
    band: int | None = None
    amplitude: float = 1.0
    seed: int = 0
    time_dependence: str = "static"

    def realize(self, grid: PeriodicGrid, times) -> DriftPath:
        rng = np.random.default_rng(self.seed)

        def one() -> SpectralField:
            if self.modes is not None:
                profile = SinusoidProfile(self.modes)
                vals = np.repeat(self.amplitude * profile.sample(grid.point_mesh, grid.L), grid.d, axis=0)
                return to_spectral(grid, vals)
            if self.band is None:
                raise ValueError("smooth drift needs `modes` or `band`")
            noise = rng.standard_normal((grid.d,) + grid.shape)
            fld = to_spectral(grid, noise)
            k = np.fft.fftfreq(grid.N, d=1.0 / grid.N)
            mesh = np.meshgrid(*(k,) * grid.d, indexing="ij")
            radius = np.sqrt(sum(m**2 for m in mesh))
            coeffs = fld.coeffs * ((radius <= self.band) & (radius > 0))
            peak = np.max(np.sum(np.abs(coeffs), axis=tuple(range(1, coeffs.ndim))))
            if peak > 0:
                # normalize so the realized sup norm is close to `amplitude`
                coeffs = coeffs * (self.amplitude / peak)
            return SpectralField(grid, coeffs)

        return _per_knot(one, times, self.time_dependence)


@dataclass(frozen=True)
class DriftFractionalNoise(DriftSpec):
    """Formal space derivative of a random series with Hurst-like decay.

    Coefficients scale like |k|^(1/2 - hurst) (the derivative of a series
    decaying like |k|^-(hurst + 1/2)), so the realized drift has finite
    H^-beta_q norm exactly when beta > 1 - hurst.
    """

    hurst: float = 0.75
    seed: int = 0
    amplitude: float = 1.0
    time_dependence: str = "static"

    def __post_init__(self) -> None:
        if not (0.5 < self.hurst < 1.0):
            raise ValueError(f"hurst must lie in (1/2, 1), got {self.hurst}")

    def realize(self, grid: PeriodicGrid, times) -> DriftPath:
        rng = np.random.default_rng(self.seed)
        k = np.fft.fftfreq(grid.N, d=1.0 / grid.N)
        mesh = np.meshgrid(*(k,) * grid.d, indexing="ij")
        radius = np.sqrt(sum(m**2 for m in mesh))
        envelope = np.zeros_like(radius)
        nz = radius > 0
        envelope[nz] = radius[nz] ** (0.5 - self.hurst)
        # fft of unit white noise has per-mode std N^(-d/2); undo it so the
        # stated coefficient decay |k|^(1/2-H) holds at unit amplitude.
        envelope = envelope * np.sqrt(float(grid.N) ** grid.d)

        def one() -> SpectralField:
            noise = rng.standard_normal((grid.d,) + grid.shape)
            white = to_spectral(grid, noise)
            return white.with_coeffs(self.amplitude * white.coeffs * envelope)

        return _per_knot(one, times, self.time_dependence)
