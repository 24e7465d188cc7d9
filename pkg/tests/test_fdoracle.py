"""The reference solver must stand on its own; these checks use closed forms
only, never the spectral path."""

import numpy as np
import pytest

from fbsdelab.fdoracle import cn_solve_backward


def _grid(N=256, L=2 * np.pi):
    return -L + (2 * L / N) * np.arange(N)


def test_pure_heat_against_closed_form():
    # backward heat flow of a gaussian: at time t the solution is the heat
    # kernel smoothing over T - t
    x = _grid()
    T, sigma2 = 0.4, 0.3**2
    times = np.linspace(0.0, T, 513)
    terminal = np.exp(-0.5 * x**2 / sigma2)
    out = cn_solve_backward(x, times, terminal)
    s2 = sigma2 + T
    expected = np.sqrt(sigma2 / s2) * np.exp(-0.5 * x**2 / s2)
    interior = np.abs(x) < 0.5 * np.pi
    assert np.max(np.abs(out[0][interior] - expected[interior])) <= 2e-5


def test_constant_drift_translates_profile():
    # v_t + v_xx/2 + c v_x = 0 backward means v(0,x) = heat(T) applied to
    # terminal, translated by c*T
    x = _grid()
    T, c = 0.3, 0.8
    times = np.linspace(0.0, T, 513)
    terminal = np.exp(-0.5 * x**2 / 0.3**2)
    out = cn_solve_backward(x, times, terminal, b=lambda t, xx: np.full_like(xx, c))
    ref = cn_solve_backward(x, times, terminal)
    # translated comparison via spectral shift of the drift-free solution
    k = 2 * np.pi * np.fft.fftfreq(x.size, d=x[1] - x[0])
    shifted = np.real(np.fft.ifft(np.fft.fft(ref[0]) * np.exp(1j * k * c * T)))
    assert np.max(np.abs(out[0] - shifted)) <= 5e-4


def test_zero_order_damping_scales_solution():
    x = _grid(N=64)
    T, lam = 0.5, 3.0
    times = np.linspace(0.0, T, 257)
    terminal = np.cos(x)
    plain = cn_solve_backward(x, times, terminal)
    damped = cn_solve_backward(x, times, terminal, damping=-lam)
    assert np.allclose(damped[0], np.exp(-lam * T) * plain[0], atol=1e-6)


def test_source_only_integrates_in_time():
    # v_t + s(x) = 0 with flat-in-x terminal keeps no diffusion effect:
    # v(t) = terminal + (T-t) s
    x = _grid(N=64)
    T = 0.25
    times = np.linspace(0.0, T, 129)
    s = np.cos(x)
    out = cn_solve_backward(x, times, np.zeros_like(x), source=lambda t, xx: np.cos(xx))
    # the exact solution of v_t + v_xx/2 + cos = 0, v(T)=0 is
    # v(t) = 2(1 - exp(-(T-t)/2)) cos(x)
    expected = 2.0 * (1.0 - np.exp(-0.5 * T)) * s
    assert np.max(np.abs(out[0] - expected)) <= 1e-5


def test_nonlinearity_second_order_in_time():
    # scalar ODE v' = -sin(v) (flat in x): compare against a tiny RK4 run
    x = _grid(N=32)
    T = 0.5
    terminal = np.full_like(x, 1.2)

    def f(t, xx, v, vx):
        return np.sin(v)

    errs = []
    v = 1.2

    def rhs(v):
        return np.sin(v)

    n = 4096
    dt = T / n
    for _ in range(n):  # integrate dv/dt = sin(v) backward from T (reversed)
        k1 = rhs(v)
        k2 = rhs(v + 0.5 * dt * k1)
        k3 = rhs(v + 0.5 * dt * k2)
        k4 = rhs(v + dt * k3)
        v = v + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    for K in (64, 128):
        times = np.linspace(0.0, T, K + 1)
        out = cn_solve_backward(x, times, terminal, nonlinearity=f)
        errs.append(abs(out[0][0] - v))
    assert errs[1] <= errs[0] / 3.0  # ~4x per halving
