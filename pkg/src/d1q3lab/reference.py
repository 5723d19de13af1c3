"""Closed-form heat-equation solutions, discrete error norms, and observed orders."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError

SINE_DOMAIN = (-1.0, 1.0)
GAUSSIAN_DOMAIN = (-16.0, 16.0)


def sine_exact(x, t: float, mu: float):
    """Decaying mode sin(pi x) exp(-mu pi^2 t), period 2."""
    if t < 0:
        raise ParameterError(f"time must be non-negative, got {t!r}")
    return np.sin(np.pi * np.asarray(x, dtype=np.float64)) * math.exp(-mu * math.pi ** 2 * t)


def gaussian_exact(x, t: float, mu: float):
    """Spreading Gaussian with unit peak at t = 0 and width sqrt(4 mu (1+t))."""
    if t < 0:
        raise ParameterError(f"time must be non-negative, got {t!r}")
    if not mu > 0:
        raise ParameterError(f"mu must be positive, got {mu!r}")
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-x * x / (4.0 * mu * (1.0 + t))) / math.sqrt(1.0 + t)


@dataclass(frozen=True)
class AnalyticProfile:
    kind: str
    mu: float
    x_min: float
    x_max: float

    def __post_init__(self):
        if self.kind not in ("sine", "gaussian"):
            raise ParameterError(f"unknown initial condition {self.kind!r}")
        if not self.mu > 0:
            raise ParameterError(f"mu must be positive, got {self.mu!r}")

    @classmethod
    def default(cls, kind: str, mu: float) -> "AnalyticProfile":
        lo, hi = SINE_DOMAIN if kind == "sine" else GAUSSIAN_DOMAIN
        return cls(kind, mu, lo, hi)

    def initial(self, x):
        return self(x, 0.0)

    def __call__(self, x, t: float):
        if self.kind == "sine":
            return sine_exact(x, t, self.mu)
        return gaussian_exact(x, t, self.mu)


@dataclass(frozen=True)
class ErrorReport:
    """Discrete error norms on a uniform grid.

    ``l2`` carries the sqrt(dx) weight so values compare across meshes;
    ``l2_unweighted`` is the plain Euclidean norm of the nodal error.
    """

    l2: float
    linf: float
    n: int
    dx: float
    l2_unweighted: float


def error_norms(u, v, dx: float) -> ErrorReport:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    d = u - v
    plain = math.sqrt(float(np.dot(d, d)))
    linf = float(np.max(np.abs(d))) if d.size else 0.0
    return ErrorReport(l2=math.sqrt(dx) * plain, linf=linf, n=d.size, dx=dx, l2_unweighted=plain)


def _check_errors(errors: Sequence[tuple[float, float]]) -> None:
    if len(errors) < 2:
        raise ValueError("need at least two (dx, error) pairs")
    for dx, err in errors:
        if not err > 0:
            raise ParameterError(f"errors must be positive to take logs, got {err!r} at dx={dx!r}")


def convergence_order(errors: Sequence[tuple[float, float]]) -> list[float]:
    """Observed order between consecutive levels, log(e_i/e_{i+1}) / log(dx_i/dx_{i+1})."""
    _check_errors(errors)
    orders = []
    for (h0, e0), (h1, e1) in zip(errors, errors[1:]):
        if not h1 < h0:
            raise ValueError(f"dx must strictly decrease, got {h0!r} then {h1!r}")
        orders.append(math.log(e0 / e1) / math.log(h0 / h1))
    return orders


def fitted_order(errors: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of log(error) against log(dx)."""
    _check_errors(errors)
    h = np.log([dx for dx, _ in errors])
    e = np.log([err for _, err in errors])
    return float(np.polyfit(h, e, 1)[0])
