"""Staggered space-time finite differences for the damped acoustic system

    d(rho)/dt + dJ/dx = 0,    dJ/dt + c0^2 d(rho)/dx + gamma J = 0

on a periodic grid. Density lives on the lattice nodes x_k at integer time
levels; momentum lives on x_{k+1/2} at half-integer levels. The damping term
is centred in time, which makes the per-step damping factor
(1/dt - gamma/2) / (1/dt + gamma/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ParameterError
from .lattice import Grid1D, SchemeParams, check_alpha, step_count

STARTUP_MODES = ("half_step", "rest")


@dataclass(frozen=True)
class AcousticParams:
    c0: float
    gamma: float
    dx: float
    dt: float

    def __post_init__(self):
        if self.c0 < 0:
            raise ParameterError(f"sound speed must be non-negative, got {self.c0!r}")
        if self.gamma < 0:
            raise ParameterError(f"damping must be non-negative, got {self.gamma!r}")
        if not (self.dx > 0 and self.dt > 0):
            raise ParameterError("dx and dt must be positive")

    @classmethod
    def from_diffusion(cls, mu: float, alpha: float, lam: float, dx: float) -> "AcousticParams":
        """Acoustic limit of the D1Q3 scheme with diffusivity held fixed, on the LBM time step."""
        check_alpha(alpha)
        if not mu > 0:
            raise ParameterError(f"mu must be positive, got {mu!r}")
        c0_sq = lam * lam * (4.0 + alpha) / 6.0
        return cls(c0=math.sqrt(c0_sq), gamma=c0_sq / mu, dx=dx, dt=dx / lam)

    @classmethod
    def from_scheme(cls, p: SchemeParams, mu: Optional[float] = None) -> "AcousticParams":
        return cls.from_diffusion(p.mu if mu is None else mu, p.alpha, p.lam, p.dx)

    @property
    def cfl(self) -> float:
        return self.c0 * self.dt / self.dx

    @property
    def damping_factor(self) -> float:
        return (1.0 / self.dt - self.gamma / 2.0) / (1.0 / self.dt + self.gamma / 2.0)


@dataclass
class StaggeredState:
    """rho^n at x_k and J^{n+1/2} at x_{k+1/2}.

    ``j_prev`` holds J^{n-1/2} once a full step has been taken, so the
    momentum can be averaged back onto (x_k, t_n).
    """

    rho: np.ndarray
    j: np.ndarray
    level: int = 0
    j_prev: Optional[np.ndarray] = None

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=np.float64)
        self.j = np.asarray(self.j, dtype=np.float64)
        if self.rho.shape != self.j.shape:
            raise ValueError("rho and J must have the same length")


def forward_difference(rho: np.ndarray) -> np.ndarray:
    """rho_{k+1} - rho_k, living on x_{k+1/2}."""
    return np.roll(rho, -1) - rho


def haway_mass_step(state: StaggeredState, p: AcousticParams) -> np.ndarray:
    # J_{k+1/2} - J_{k-1/2}; the sum over k telescopes, so mass is conserved.
    return state.rho - (p.dt / p.dx) * (state.j - np.roll(state.j, 1))


def haway_momentum_step(state: StaggeredState, p: AcousticParams) -> np.ndarray:
    """Advance J^{n+1/2} to J^{n+3/2}; ``state.rho`` must already be at level n+1."""
    lhs = 1.0 / p.dt + p.gamma / 2.0
    rhs = 1.0 / p.dt - p.gamma / 2.0
    return (rhs * state.j - (p.c0 * p.c0 / p.dx) * forward_difference(state.rho)) / lhs


def haway_step(state: StaggeredState, p: AcousticParams) -> StaggeredState:
    rho_next = haway_mass_step(state, p)
    half = StaggeredState(rho_next, state.j, state.level + 1)
    return StaggeredState(rho_next, haway_momentum_step(half, p), state.level + 1, j_prev=state.j)


def haway_init(rho0: Callable[[np.ndarray], np.ndarray], p: AcousticParams, grid: Grid1D,
               startup: str = "half_step") -> StaggeredState:
    """Sample rho0 on the nodes and build J^{1/2} from J(0) = 0.

    ``half_step`` takes a damped half step of the momentum equation, which keeps
    the scheme second order. ``rest`` sets J^{1/2} = 0, a first-order startup.
    """
    rho = np.asarray(rho0(grid.nodes()), dtype=np.float64) * np.ones(grid.n)
    if startup == "half_step":
        grad = forward_difference(rho) / p.dx
        j = -(p.dt / 2.0) * p.c0 * p.c0 * grad / (1.0 + p.gamma * p.dt / 4.0)
    elif startup == "rest":
        j = np.zeros_like(rho)
    else:
        raise ParameterError(f"unknown startup {startup!r}; expected one of {STARTUP_MODES}")
    return StaggeredState(rho, j)


def haway_march(state: StaggeredState, p: AcousticParams, steps: int) -> StaggeredState:
    for _ in range(steps):
        state = haway_step(state, p)
    return state


def haway_run(rho0: Callable[[np.ndarray], np.ndarray], p: AcousticParams, grid: Grid1D,
              t_final: float, startup: str = "half_step") -> StaggeredState:
    """March to ``t_final``; returns rho^N and J^{N+1/2} with N = t_final/dt."""
    if not math.isclose(grid.dx, p.dx, rel_tol=1e-12):
        raise ParameterError(f"grid dx={grid.dx!r} does not match acoustic dx={p.dx!r}")
    if p.cfl > 1.0:
        raise ParameterError(f"CFL number {p.cfl:.6g} exceeds 1")
    steps = step_count(t_final, p.dt)
    return haway_march(haway_init(rho0, p, grid, startup), p, steps)


def momentum_at_nodes(state: StaggeredState) -> np.ndarray:
    """J averaged onto (x_k, t_n) from its four staggered neighbours."""
    if state.j_prev is None:
        raise ValueError("need J^{n-1/2}; take at least one step first")
    in_time = 0.5 * (state.j + state.j_prev)
    return 0.5 * (in_time + np.roll(in_time, 1))


def discrete_energy(state: StaggeredState, p: AcousticParams) -> float:
    """Staggered energy dx * sum(c0^2 rho^n rho^{n+1} + (J^{n+1/2})^2).

    With gamma = 0 this quantity is an exact invariant of the scheme, and it
    is positive whenever the CFL number is below one.
    """
    rho_next = haway_mass_step(state, p)
    return p.dx * float(p.c0 * p.c0 * np.dot(state.rho, rho_next) + np.dot(state.j, state.j))
