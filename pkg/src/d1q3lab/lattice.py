"""D1Q3 multiple-relaxation-time lattice Boltzmann scheme on a periodic line.

Velocities are (+lam, 0, -lam). A time step is a collision in moment space
(rho, J, e) followed by exact streaming of the two moving populations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ParameterError, TimeAlignmentError

ALPHA_MIN = -4.0
ALPHA_MAX = 2.0
TIME_ALIGNMENT_RTOL = 1e-9


def check_alpha(alpha: float) -> None:
    if not (ALPHA_MIN < alpha < ALPHA_MAX):
        raise ParameterError(f"alpha outside (-4,2): alpha={alpha!r}")


def _check_rate(name: str, s: float) -> None:
    if not (0.0 < s < 2.0):
        raise ParameterError(f"{name} outside (0,2): {name}={s!r}")


@dataclass(frozen=True)
class Grid1D:
    """Periodic grid: node k sits at ``x_min + k*dx`` and x_max is identified with x_min."""

    x_min: float
    x_max: float
    n: int
    periodic: bool = field(default=True, init=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"cell count must be a positive integer, got {self.n!r}")
        if not self.x_max > self.x_min:
            raise ParameterError(f"empty domain [{self.x_min}, {self.x_max}]")

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return self.length / self.n

    def nodes(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)


@dataclass(frozen=True)
class SchemeParams:
    """Numerical parameters of the D1Q3 scheme.

    ``mu`` and ``sigma`` are derived from ``s_j`` so the three are always
    consistent; use :meth:`from_diffusivity` to go the other way.
    """

    lam: float
    dx: float
    alpha: float
    s_j: float
    s_e: float = 1.5

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError(f"lambda must be positive, got {self.lam!r}")
        if not self.dx > 0:
            raise ParameterError(f"dx must be positive, got {self.dx!r}")
        check_alpha(self.alpha)
        _check_rate("s_j", self.s_j)
        _check_rate("s_e", self.s_e)

    @classmethod
    def from_diffusivity(cls, mu: float, alpha: float, dx: float,
                         lam: float = 1.0, s_e: float = 1.5) -> "SchemeParams":
        return cls(lam=lam, dx=dx, alpha=alpha, s_j=derive_s_j(mu, alpha, lam, dx), s_e=s_e)

    @property
    def dt(self) -> float:
        return self.dx / self.lam

    @property
    def sigma(self) -> float:
        return 1.0 / self.s_j - 0.5

    @property
    def mu(self) -> float:
        return (4.0 + self.alpha) / 6.0 * self.sigma * self.lam * self.dx


@dataclass
class DistributionField:
    """Populations moving right, at rest, and moving left."""

    f_plus: np.ndarray
    f_zero: np.ndarray
    f_minus: np.ndarray

    def __post_init__(self):
        self.f_plus = np.asarray(self.f_plus, dtype=np.float64)
        self.f_zero = np.asarray(self.f_zero, dtype=np.float64)
        self.f_minus = np.asarray(self.f_minus, dtype=np.float64)
        if not (self.f_plus.shape == self.f_zero.shape == self.f_minus.shape):
            raise ValueError("population arrays must share one shape")

    def __len__(self):
        return self.f_plus.shape[0]

    def as_array(self) -> np.ndarray:
        return np.stack([self.f_plus, self.f_zero, self.f_minus])

    @property
    def rho(self) -> np.ndarray:
        return self.f_plus + self.f_zero + self.f_minus


@dataclass
class MomentField:
    rho: np.ndarray
    j: np.ndarray
    e: np.ndarray

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=np.float64)
        self.j = np.asarray(self.j, dtype=np.float64)
        self.e = np.asarray(self.e, dtype=np.float64)


def derive_s_j(mu: float, alpha: float, lam: float, dx: float) -> float:
    """Momentum relaxation rate that yields diffusivity ``mu`` on a mesh ``dx``.

    Exact inversion of ``mu = (4+alpha)/6 * sigma * lam * dx`` with
    ``sigma = 1/s_j - 1/2``. To leading order this is
    ``(4+alpha)/(6 mu) * lam * dx``, so ``s_j -> 0`` under refinement.
    """
    check_alpha(alpha)
    if not mu > 0:
        raise ParameterError(f"mu must be positive, got {mu!r}")
    if not (lam > 0 and dx > 0):
        raise ParameterError(f"lambda and dx must be positive, got {lam!r}, {dx!r}")
    sigma = 6.0 * mu / ((4.0 + alpha) * lam * dx)
    s_j = 1.0 / (sigma + 0.5)
    _check_rate("s_j", s_j)
    return s_j


def moment_matrix(lam: float) -> np.ndarray:
    """The matrix M with m = M f for f = (f+, f0, f-)."""
    l2 = lam * lam
    return np.array([[1.0, 1.0, 1.0],
                     [lam, 0.0, -lam],
                     [l2, -2.0 * l2, l2]])


def inverse_moment_matrix(lam: float) -> np.ndarray:
    l2 = lam * lam
    return np.array([[1.0 / 3.0, 1.0 / (2.0 * lam), 1.0 / (6.0 * l2)],
                     [1.0 / 3.0, 0.0, -1.0 / (3.0 * l2)],
                     [1.0 / 3.0, -1.0 / (2.0 * lam), 1.0 / (6.0 * l2)]])


def moments_from_distributions(f: DistributionField, p: SchemeParams) -> MomentField:
    lam = p.lam
    return MomentField(
        rho=f.f_plus + f.f_zero + f.f_minus,
        j=lam * (f.f_plus - f.f_minus),
        e=lam * lam * (f.f_plus - 2.0 * f.f_zero + f.f_minus),
    )


def distributions_from_moments(m: MomentField, p: SchemeParams) -> DistributionField:
    lam = p.lam
    l2 = lam * lam
    third = m.rho / 3.0
    even = third + m.e / (6.0 * l2)
    odd = m.j / (2.0 * lam)
    return DistributionField(f_plus=even + odd,
                             f_zero=(m.rho - m.e / l2) / 3.0,
                             f_minus=even - odd)


def equilibrium(rho, p: SchemeParams) -> MomentField:
    rho = np.asarray(rho, dtype=np.float64)
    return MomentField(rho=rho.copy(), j=np.zeros_like(rho),
                       e=p.alpha * (p.lam * p.lam / 2.0) * rho)


def relax(m: MomentField, p: SchemeParams) -> MomentField:
    """Diagonal relaxation: rho is conserved, J and e move toward equilibrium."""
    eq = equilibrium(m.rho, p)
    return MomentField(rho=m.rho.copy(),
                       j=m.j + p.s_j * (eq.j - m.j),
                       e=m.e + p.s_e * (eq.e - m.e))


def stream(f_star: DistributionField) -> DistributionField:
    # np.roll returns fresh arrays, so the post-collision buffer is never overwritten.
    return DistributionField(f_plus=np.roll(f_star.f_plus, 1),
                             f_zero=f_star.f_zero.copy(),
                             f_minus=np.roll(f_star.f_minus, -1))


def collide(f: DistributionField, p: SchemeParams) -> DistributionField:
    return distributions_from_moments(relax(moments_from_distributions(f, p), p), p)


def lbm_step(f: DistributionField, p: SchemeParams) -> DistributionField:
    return stream(collide(f, p))


def init_at_equilibrium(rho0: Callable[[np.ndarray], np.ndarray], grid: Grid1D,
                        p: SchemeParams) -> DistributionField:
    rho = np.asarray(rho0(grid.nodes()), dtype=np.float64) * np.ones(grid.n)
    return distributions_from_moments(equilibrium(rho, p), p)


def step_count(t_final: float, dt: float) -> int:
    """Number of steps reaching ``t_final``; rejects times off the step lattice."""
    if t_final < 0:
        raise ParameterError(f"final time must be non-negative, got {t_final!r}")
    ratio = t_final / dt
    steps = round(ratio)
    if abs(ratio - steps) > TIME_ALIGNMENT_RTOL * max(1.0, abs(ratio)):
        raise TimeAlignmentError(
            f"final time {t_final!r} is not an integer multiple of dt={dt!r} "
            f"(t_final/dt = {ratio!r})")
    return int(steps)


def lbm_run(f: DistributionField, p: SchemeParams, steps: int) -> DistributionField:
    for _ in range(steps):
        f = lbm_step(f, p)
    return f


def post_collision_momentum(f: DistributionField, p: SchemeParams) -> np.ndarray:
    """J* = (1 - s_j) J, the momentum the acoustic limit is written for."""
    return (1.0 - p.s_j) * p.lam * (f.f_plus - f.f_minus)


def simulate(rho0: Callable[[np.ndarray], np.ndarray], grid: Grid1D, p: SchemeParams,
             t_final: float) -> DistributionField:
    """Initialize at equilibrium and march to ``t_final``."""
    if not math.isclose(grid.dx, p.dx, rel_tol=1e-12):
        raise ParameterError(f"grid dx={grid.dx!r} does not match scheme dx={p.dx!r}")
    steps = step_count(t_final, p.dt)
    return lbm_run(init_at_equilibrium(rho0, grid, p), p, steps)
