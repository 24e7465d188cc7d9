"""Independent Crank-Nicolson finite-difference reference solver (d = 1).

Solves the backward equation

    v_t + v_xx/2 + b(t,x) v_x + damping * v + source(t,x)
        + f(t, x, v, v_x) = 0,     v(T, x) = terminal,

on the periodic grid with second-order centered stencils and trapezoidal
time stepping (one predictor-corrector pass for the nonlinear term).  The
drift is treated classically (sampled pointwise), so the oracle is only
meaningful for smooth b; that is exactly the regime in which it
cross-checks the spectral mild-solution path.  Nothing here shares code
with the spectral solver.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

__all__ = ["cn_solve_backward"]


def _stencils(N: int, h: float) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    main = -2.0 * np.ones(N)
    off = np.ones(N - 1)
    d2 = sp.diags([off, main, off], [-1, 0, 1], format="lil")
    d2[0, -1] = 1.0
    d2[-1, 0] = 1.0
    d1 = sp.diags([-off, off], [-1, 1], format="lil")
    d1[0, -1] = -1.0
    d1[-1, 0] = 1.0
    return (d2.tocsr() / h**2, d1.tocsr() / (2.0 * h))


def cn_solve_backward(
    x: np.ndarray,
    times: np.ndarray,
    terminal: np.ndarray,
    b: Callable[[float, np.ndarray], np.ndarray] | None = None,
    source: Callable[[float, np.ndarray], np.ndarray] | None = None,
    nonlinearity: Callable[[float, np.ndarray, np.ndarray, np.ndarray], np.ndarray] | None = None,
    damping: float = 0.0,
) -> np.ndarray:
    """March the backward equation from the last knot to the first.

    x: grid points (N,), uniformly spaced, periodic; times: knots (K+1,);
    terminal: values at times[-1].  Returns values at every knot, shape
    (K+1, N).  `b`, `source` map (t, x) to arrays; `nonlinearity` maps
    (t, x, v, v_x) to an array.
    """
    x = np.asarray(x, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    N = x.size
    h = x[1] - x[0]
    d2, d1 = _stencils(N, h)
    eye = sp.identity(N, format="csr")

    def operator(t: float) -> sp.csr_matrix:
        A = 0.5 * d2 + damping * eye
        if b is not None:
            A = A + sp.diags(np.asarray(b(t, x), dtype=np.float64)) @ d1
        return A.tocsr()

    def explicit(t: float, v: np.ndarray) -> np.ndarray:
        out = np.zeros_like(v)
        if source is not None:
            out = out + source(t, x)
        if nonlinearity is not None:
            vx = d1 @ v
            out = out + nonlinearity(t, x, v, vx)
        return out

    static_b = b is None
    K = times.size - 1
    out = np.empty((K + 1, N), dtype=np.float64)
    out[K] = np.asarray(terminal, dtype=np.float64)

    lu = None
    lu_dt = None
    for k in range(K - 1, -1, -1):
        dt = times[k + 1] - times[k]
        A_new = operator(times[k])
        A_old = operator(times[k + 1]) if not static_b else A_new
        if lu is None or lu_dt != dt or not static_b:
            lu = spla.splu((eye - 0.5 * dt * A_new).tocsc())
            lu_dt = dt
        v_old = out[k + 1]
        rhs_lin = v_old + 0.5 * dt * (A_old @ v_old)
        # predictor with the old-time forcing, one corrector with the average
        g_old = explicit(times[k + 1], v_old)
        v_pred = lu.solve(rhs_lin + dt * g_old)
        g_new = explicit(times[k], v_pred)
        out[k] = lu.solve(rhs_lin + 0.5 * dt * (g_old + g_new))
    return out
