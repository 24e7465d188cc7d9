"""Solver parameters and the admissibility gate on (beta, q, delta, p, gamma).

The drift regularity exponents must satisfy, for dimension d:

    beta in (0, 1/2),          q in (d/(1-beta), d/beta),
    beta < delta < 1 - beta,   d/delta < p < q,
    2*gamma < 1 - delta - beta.

`validate_standing_assumptions` names every violated inequality instead of
raising, so configuration errors surface all at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["SolverParams", "ValidationReport", "validate_standing_assumptions"]


@dataclass(frozen=True)
class SolverParams:
    d: int
    beta: float
    q: float
    delta: float
    p: float
    gamma: float
    lam: float = 0.0
    T: float = 1.0
    num_steps: int = 256
    lipschitz: float = 0.0

    @property
    def q_tilde(self) -> float:
        """Extra integrability index d/(1-beta) required by the singular-drift forward SDE."""
        return self.d / (1.0 - self.beta)

    @property
    def alpha(self) -> float:
        """Holder exponent delta - d/p of the gradient of H^{1+delta}_p fields."""
        return self.delta - self.d / self.p

    @property
    def dt(self) -> float:
        return self.T / self.num_steps

    def knots(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.num_steps + 1)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...] = field(default_factory=tuple)

    def __str__(self) -> str:
        if self.ok:
            return "parameters admissible"
        return "; ".join(self.violations)


def validate_standing_assumptions(params: SolverParams) -> ValidationReport:
    """Check every admissibility inequality; report names each violation."""
    v: list[str] = []

    numeric = {
        "beta": params.beta,
        "q": params.q,
        "delta": params.delta,
        "p": params.p,
        "gamma": params.gamma,
        "lambda": params.lam,
        "T": params.T,
    }
    for name, value in numeric.items():
        if not math.isfinite(value):
            v.append(f"{name} is not finite")
    if v:
        return ValidationReport(False, tuple(v))

    d = params.d
    if d not in (1, 2):
        v.append(f"d = {d} ∉ {{1, 2}}")
        return ValidationReport(False, tuple(v))

    if not (0.0 < params.beta < 0.5):
        v.append(f"β = {params.beta} ∉ (0, 1/2)")
    else:
        lo, hi = d / (1.0 - params.beta), d / params.beta
        if params.q <= lo:
            v.append(f"q ≤ d/(1−β) = {lo:g}")
        if params.q >= hi:
            v.append(f"q ≥ d/β = {hi:g}")

    if params.delta <= params.beta:
        v.append("δ ≤ β")
    if params.delta >= 1.0 - params.beta:
        v.append(f"δ ≥ 1−β = {1.0 - params.beta:g}")
    if params.delta > 0:
        if params.p <= d / params.delta:
            v.append(f"p ≤ d/δ = {d / params.delta:g}")
    if params.p >= params.q:
        v.append("p ≥ q")

    if 2.0 * params.gamma >= 1.0 - params.delta - params.beta:
        v.append(f"2γ ≥ 1−δ−β = {1.0 - params.delta - params.beta:g}")
    if params.gamma <= 0:
        v.append("γ ≤ 0")

    if params.lam < 0:
        v.append("λ < 0")
    if params.T <= 0:
        v.append("T ≤ 0")
    if params.num_steps < 1:
        v.append("time grid needs at least one step")
    if params.lipschitz < 0:
        v.append("Lipschitz constant < 0")

    return ValidationReport(not v, tuple(v))
