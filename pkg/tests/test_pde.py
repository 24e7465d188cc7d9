import numpy as np
import pytest

from fbsdelab import (
    DriftFractionalNoise,
    DriftSmooth,
    DriftZero,
    DriverLinear,
    DriverSinusoid,
    DriverZero,
    GaussianBump,
    PeriodicGrid,
    SinusoidProfile,
    SolverParams,
    TerminalSpec,
    duhamel_integral,
    duhamel_profile,
    heat_semigroup,
    holder_time_bound_check,
    solve_correction,
    solve_semilinear,
    solve_straightening,
    to_physical,
    to_spectral,
    tune_straightening,
)
from fbsdelab.fields import SpectralField, constant_field, zero_field
from fbsdelab.fdoracle import cn_solve_backward
from fbsdelab.ops import sobolev_norm
from fbsdelab.pde import (
    FixedPointConfig,
    NonContractionError,
    drift_gradient_term,
    sup_gradient,
)


def make_params(**kw):
    base = dict(d=1, beta=0.25, q=3.0, delta=0.5, p=2.5, gamma=0.1, T=0.5, num_steps=64)
    base.update(kw)
    return SolverParams(**base)


GRID = PeriodicGrid(d=1, N=128, L=2.0 * np.pi)
BUMP = TerminalSpec(GaussianBump(width=0.6))


# ---------------------------------------------------------------------------
# Duhamel integral


def test_duhamel_zero_source(grid64):
    times = np.linspace(0.0, 1.0, 9)
    srcs = [zero_field(grid64) for _ in times]
    out = duhamel_profile(srcs, times)
    assert all(not np.any(f.coeffs) for f in out)


def test_duhamel_constant_zero_mode(grid64):
    times = np.linspace(0.0, 1.0, 17)
    c = 0.7
    srcs = [constant_field(grid64, c) for _ in times]
    out = duhamel_profile(srcs, times)
    for t, f in zip(times, out):
        assert f.coeffs[0][0].real == pytest.approx(c * (1.0 - t), abs=1e-14)
        assert np.max(np.abs(f.coeffs[0][1:])) <= 1e-15


def test_duhamel_single_mode_closed_form(grid64):
    times = np.linspace(0.0, 1.0, 17)
    c, k = 2.0, 5
    coeffs = np.zeros((1, grid64.N), dtype=complex)
    coeffs[0, k] = c
    src = SpectralField(grid64, coeffs)
    out = duhamel_profile([src] * times.size, times)
    mu = 0.5 * grid64.axis_frequencies[k] ** 2
    for t, f in zip(times, out):
        expected = c * (1.0 - np.exp(-(1.0 - t) * mu)) / mu
        assert f.coeffs[0, k] == pytest.approx(expected, rel=1e-12)


def test_duhamel_decay_shift_matches_damped_form(grid64):
    times = np.linspace(0.0, 1.0, 17)
    c, kappa = 1.5, 3.0
    srcs = [constant_field(grid64, c) for _ in times]
    out = duhamel_profile(srcs, times, decay_shift=kappa)
    for t, f in zip(times, out):
        expected = c * (1.0 - np.exp(-(1.0 - t) * kappa)) / kappa
        assert f.coeffs[0][0].real == pytest.approx(expected, rel=1e-12)


def test_duhamel_integral_indexing(grid64):
    times = np.linspace(0.0, 1.0, 5)
    srcs = [constant_field(grid64, 1.0) for _ in times]
    fld = duhamel_integral(srcs, times, 2)
    assert fld.coeffs[0][0].real == pytest.approx(0.5)
    with pytest.raises(IndexError):
        duhamel_integral(srcs, times, 7)
    with pytest.raises(ValueError):
        duhamel_profile(srcs[:-1], times)


# ---------------------------------------------------------------------------
# semilinear solve


def test_pure_heat_reproduced_to_1e10():
    params = make_params()
    terminal = BUMP.realize(GRID, params.T)
    sol = solve_semilinear(None, DriverZero(), terminal, params)
    for t, f in zip(sol.times, sol.fields):
        ref = heat_semigroup(terminal, params.T - t)
        gap = sobolev_norm(f - ref, 0.0, 2.0)
        assert gap <= 1e-10 * max(1.0, sobolev_norm(ref, 0.0, 2.0))


def test_terminal_knot_exact():
    params = make_params()
    terminal = BUMP.realize(GRID, params.T)
    drift = DriftSmooth(modes=((1, 0.1, 0.0),)).realize(GRID, params.knots())
    sol = solve_semilinear(drift, DriverLinear(c=0.3), terminal, params)
    assert np.array_equal(sol.fields[-1].coeffs, terminal.coeffs)


def test_linear_driver_ode_closed_form():
    # flat terminal, f = c*(y+z): the zero mode solves v' = -c v backward
    c, y0 = 0.6, 1.5
    gaps = []
    for K in (64, 128):
        params = make_params(num_steps=K, T=0.5)
        terminal = constant_field(GRID, y0, params.T)
        sol = solve_semilinear(None, DriverLinear(c=c), terminal, params, FixedPointConfig(tol=1e-12))
        exact = y0 * np.exp(c * params.T)
        gaps.append(abs(sol.fields[0].coeffs[0][0].real - exact))
    assert gaps[0] <= 0.01 * y0  # O(dt) at K=64
    assert 1.5 <= gaps[0] / gaps[1] <= 2.5  # first order in dt


def test_semilinear_matches_cn_oracle_smooth_drift():
    params = make_params(num_steps=128)
    drift_modes = ((1, 0.15, 0.0), (2, 0.0, 0.1))
    drift = DriftSmooth(modes=drift_modes).realize(GRID, params.knots())
    terminal = BUMP.realize(GRID, params.T)
    driver = DriverSinusoid(c=0.5, offset=GaussianBump(center=1.0, width=0.8, amplitude=0.2))
    sol = solve_semilinear(drift, driver, terminal, params, FixedPointConfig(tol=1e-11))

    prof = SinusoidProfile(drift_modes)
    off = GaussianBump(center=1.0, width=0.8, amplitude=0.2)
    oracle = cn_solve_backward(
        GRID.axis_points,
        np.linspace(0.0, params.T, 1025),
        to_physical(terminal)[0],
        b=lambda t, x: prof.sample((x,), GRID.L)[0],
        nonlinearity=lambda t, x, v, vx: 0.5 * np.sin(v + vx) + off.sample((x,), GRID.L)[0],
    )
    rel = np.max(np.abs(to_physical(sol.fields[0])[0] - oracle[0])) / np.max(np.abs(oracle[0]))
    assert rel <= 2e-3


def test_contraction_metadata_recorded():
    params = make_params()
    drift = DriftFractionalNoise(hurst=0.75, seed=3, amplitude=0.4).realize(GRID, params.knots())
    sol = solve_semilinear(drift, DriverZero(), BUMP.realize(GRID, params.T), params)
    assert sol.meta["converged"]
    assert sol.meta["contraction_ratio"] < 1.0
    assert len(sol.meta["increments"]) == sol.meta["iterations"]


def test_rho_weighted_diagnostic_recorded():
    params = make_params(num_steps=16)
    drift = DriftSmooth(modes=((1, 0.2, 0.0),)).realize(GRID, params.knots())
    cfg = FixedPointConfig(rho=2.0)
    sol = solve_semilinear(drift, DriverZero(), BUMP.realize(GRID, params.T), params, cfg)
    weighted = sol.meta["weighted_increments"]
    assert len(weighted) == sol.meta["iterations"]
    assert all(w <= u + 1e-15 for w, u in zip(weighted, sol.meta["increments"]))


def test_non_contraction_diagnostic():
    params = make_params(num_steps=16, T=1.0)
    drift = DriftFractionalNoise(hurst=0.75, seed=1, amplitude=60.0).realize(GRID, params.knots())
    with pytest.raises(NonContractionError) as err:
        solve_semilinear(drift, DriverZero(), BUMP.realize(GRID, params.T), params)
    assert err.value.ratio > 1.0


def test_invalid_params_rejected_before_work():
    params = make_params(delta=0.2)
    with pytest.raises(ValueError, match="rejected"):
        solve_semilinear(None, DriverZero(), BUMP.realize(GRID, 0.5), params)


def test_degenerate_horizon_returns_terminal():
    params = make_params(num_steps=1, T=0.5)
    terminal = BUMP.realize(GRID, params.T)
    # single-knot grid: K = 0 collapses to the terminal condition
    params0 = SolverParams(d=1, beta=0.25, q=3.0, delta=0.5, p=2.5, gamma=0.1, T=0.5, num_steps=1)
    sol = solve_semilinear(None, DriverZero(), terminal, params0)
    assert np.allclose(sol.fields[-1].coeffs, terminal.coeffs)


def test_drift_knot_mismatch_raises():
    params = make_params(num_steps=32)
    drift = DriftSmooth(modes=((1, 0.1, 0.0),)).realize(GRID, np.linspace(0, params.T, 11))
    with pytest.raises(ValueError, match="knots"):
        solve_semilinear(drift, DriverZero(), BUMP.realize(GRID, params.T), params)


# ---------------------------------------------------------------------------
# correction equation


def test_correction_zero_drift_is_zero():
    params = make_params()
    sol = solve_semilinear(None, DriverZero(), BUMP.realize(GRID, params.T), params)
    w = solve_correction(DriftZero().realize(GRID, params.knots()), sol, params)
    assert all(not np.any(f.coeffs) for f in w.fields)
    assert not np.any(w.fields[-1].coeffs)  # w(T) = 0


def test_correction_linear_in_drift_and_solution():
    params = make_params(num_steps=16)
    drift = DriftSmooth(modes=((1, 0.2, 0.0), (3, 0.0, 0.1))).realize(GRID, params.knots())
    drift2 = drift.map(lambda f: 2.0 * f)
    u = solve_semilinear(drift, DriverZero(), BUMP.realize(GRID, params.T), params)
    w1 = solve_correction(drift, u, params)
    w2 = solve_correction(drift2, u, params)
    for a, b in zip(w1.fields, w2.fields):
        assert np.max(np.abs(b.coeffs - 2.0 * a.coeffs)) <= 1e-12 * max(1e-30, np.max(np.abs(b.coeffs)))
    # linearity in the solution slot: scale every u-field by 3
    u3 = type(u)(u.times, [3.0 * f for f in u.fields], {})
    w3 = solve_correction(drift, u3, params)
    for a, b in zip(w1.fields, w3.fields):
        assert np.max(np.abs(b.coeffs - 3.0 * a.coeffs)) <= 1e-12 * max(1e-30, np.max(np.abs(b.coeffs)))


def test_correction_matches_cn_oracle():
    params = make_params(num_steps=128)
    drift_modes = ((1, 0.2, 0.0), (2, 0.0, 0.15))
    drift = DriftSmooth(modes=drift_modes).realize(GRID, params.knots())
    u = solve_semilinear(drift, DriverZero(), BUMP.realize(GRID, params.T), params, FixedPointConfig(tol=1e-11))
    w = solve_correction(drift, u, params)

    # oracle source: -(b . grad u) with u sampled from the mild solution but
    # differentiated by finite differences (independent of the spectral path)
    prof = SinusoidProfile(drift_modes)
    x = GRID.axis_points
    h = GRID.spacing
    u_tab = u.physical_table()[:, 0]
    times = u.times

    def source(t, xx):
        k = int(round(t / params.T * (times.size - 1)))
        vals = u_tab[k]
        ux = (np.roll(vals, -1) - np.roll(vals, 1)) / (2 * h)
        return -prof.sample((xx,), GRID.L)[0] * ux

    oracle = cn_solve_backward(x, times, np.zeros_like(x), source=source)
    got = to_physical(w.fields[0])[0]
    assert np.max(np.abs(got - oracle[0])) <= 2e-3 * max(1.0, np.max(np.abs(oracle[0])))
    assert np.max(np.abs(got)) > 1e-4  # non-trivial comparison


# ---------------------------------------------------------------------------
# straightening equation


def test_straightening_zero_drift():
    params = make_params()
    xi = solve_straightening(DriftZero().realize(GRID, params.knots()), 1.0, params)
    assert all(not np.any(f.coeffs) for f in xi.fields)


def test_straightening_damping_decreases_gradient():
    params = make_params(beta=0.3, gamma=0.05, num_steps=64)
    drift = DriftFractionalNoise(hurst=0.75, seed=7, amplitude=0.5).realize(GRID, params.knots())
    sups = [sup_gradient(solve_straightening(drift, lam, params)) for lam in (0.0, 10.0, 100.0)]
    assert sups[0] > sups[1] > sups[2]


def test_straightening_matches_cn_oracle():
    params = make_params(num_steps=128)
    lam = 2.0
    drift_modes = ((1, 0.3, 0.0), (2, 0.0, 0.2))
    drift = DriftSmooth(modes=drift_modes).realize(GRID, params.knots())
    xi = solve_straightening(drift, lam, params, FixedPointConfig(tol=1e-11))
    prof = SinusoidProfile(drift_modes)

    def b_fn(t, xx):
        return prof.sample((xx,), GRID.L)[0]

    oracle = cn_solve_backward(
        GRID.axis_points,
        np.linspace(0.0, params.T, 1025),
        np.zeros(GRID.N),
        b=b_fn,
        source=b_fn,
        damping=-(lam + 1.0),
    )
    got = to_physical(xi.fields[0])[0]
    assert np.max(np.abs(got - oracle[0])) <= 1e-3 * max(np.max(np.abs(oracle[0])), 1e-6)
    assert np.max(np.abs(got)) > 1e-4


def test_straightening_terminal_zero():
    params = make_params(num_steps=16)
    drift = DriftSmooth(modes=((1, 0.3, 0.0),)).realize(GRID, params.knots())
    xi = solve_straightening(drift, 1.0, params)
    assert not np.any(xi.fields[-1].coeffs)


def test_tune_straightening_zero_drift_returns_unit_damping():
    params = make_params()
    lam, xi = tune_straightening(DriftZero().realize(GRID, params.knots()), params)
    assert lam == 1.0
    assert sup_gradient(xi) == 0.0


def test_tune_straightening_small_drift_first_try():
    params = make_params(num_steps=32)
    drift = DriftSmooth(modes=((1, 0.05, 0.0),)).realize(GRID, params.knots())
    lam, xi = tune_straightening(drift, params)
    assert lam == 1.0
    assert sup_gradient(xi) <= 0.5


def test_tune_straightening_monotone_in_amplitude():
    params = make_params(beta=0.3, gamma=0.05, num_steps=32)
    small = DriftFractionalNoise(hurst=0.75, seed=5, amplitude=0.3).realize(GRID, params.knots())
    big = small.map(lambda f: 10.0 * f)
    lam_small, _ = tune_straightening(small, params)
    lam_big, _ = tune_straightening(big, params)
    assert lam_big >= lam_small


# ---------------------------------------------------------------------------
# drift-gradient term equals the batched solver source


def test_drift_gradient_term_consistency():
    params = make_params(num_steps=8)
    drift = DriftFractionalNoise(hurst=0.75, seed=11, amplitude=0.5).realize(GRID, params.knots())
    u = solve_semilinear(drift, DriverZero(), BUMP.realize(GRID, params.T), params)
    w = solve_correction(drift, u, params)
    # recompute via the public per-knot op and one Duhamel pass
    from fbsdelab import duhamel_profile as profile

    srcs = [drift_gradient_term(drift.at(k), u.fields[k], params) for k in range(u.times.size)]
    ref = profile(srcs, u.times)
    for a, b in zip(w.fields, ref):
        assert np.max(np.abs(a.coeffs - b.coeffs)) <= 1e-12 * max(1e-30, np.max(np.abs(b.coeffs)))


# ---------------------------------------------------------------------------
# time-regularity report


def test_holder_check_constant_solution():
    params = make_params(num_steps=8)
    terminal = constant_field(GRID, 2.0, params.T)
    sol = solve_semilinear(None, DriverZero(), terminal, params)
    report = holder_time_bound_check(sol, gamma=0.05, eps=0.1, params=params)
    assert report.fitted_constant == 0.0


def test_holder_check_heat_flow_stable_under_refinement():
    consts = []
    for K in (16, 32):
        params = make_params(num_steps=K)
        sol = solve_semilinear(None, DriverZero(), BUMP.realize(GRID, params.T), params)
        consts.append(holder_time_bound_check(sol, 0.05, 0.12, params).fitted_constant)
    assert consts[1] <= 1.5 * consts[0]
    assert consts[0] <= 1.5 * consts[1]


def test_holder_check_distributional_drift_finite():
    params = make_params(beta=0.3, gamma=0.05, num_steps=16)
    drift = DriftFractionalNoise(hurst=0.75, seed=2, amplitude=0.5).realize(GRID, params.knots())
    sol = solve_semilinear(drift, DriverZero(), BUMP.realize(GRID, params.T), params)
    report = holder_time_bound_check(sol, 0.04, 0.1, params)
    assert np.isfinite(report.fitted_constant)
    assert report.fitted_constant > 0.0


def test_holder_check_gate():
    params = make_params(num_steps=8)
    sol = solve_semilinear(None, DriverZero(), BUMP.realize(GRID, params.T), params)
    with pytest.raises(ValueError):
        holder_time_bound_check(sol, 0.2, 0.1, params)
    with pytest.raises(ValueError):
        holder_time_bound_check(sol, 0.05, 0.4, params)  # eps beyond (1-d-b)/2
