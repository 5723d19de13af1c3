"""Von Neumann analysis of the D1Q3 scheme.

For a Fourier mode exp(i k x) the one-step operator is the 3x3 matrix
L(xi) = A(xi) M^-1 R M with xi = k dx. Its eigenvalues are the per-step
amplification factors; their logs zeta are the reduced growth rates.

For small s_j = eps*s1 and xi = eps*kappa the two slow modes follow
zeta/eps -> omega with omega^2 + s1 omega + (4+alpha)/6 kappa^2 = 0, which is
the damped acoustic dispersion relation in lattice units. The kappa^2 term is
what makes the threshold kappa* = s1 / (2 sqrt((4+alpha)/6)) consistent.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EigenvalueConvergenceError, ParameterError
from .lattice import SchemeParams, inverse_moment_matrix, moment_matrix

RESIDUAL_TOL = 1e-10
IMAG_TOL = 1e-9
MAX_POLISH = 30

DIFFUSIVE = "diffusive"
PROPAGATIVE = "propagative"
OTHER = "other"


@dataclass(frozen=True)
class AmplificationMatrix:
    entries: np.ndarray
    xi: float


@dataclass(frozen=True)
class DispersionResult:
    xi: float
    eigenvalues: tuple[complex, complex, complex]
    zeta: tuple[complex, complex, complex]
    classification: str
    residuals: tuple[float, float, float]


@dataclass(frozen=True)
class AsymptoticInputs:
    s1: float
    kappa: float
    alpha: float

    def __post_init__(self):
        if not self.s1 > 0:
            raise ParameterError(f"s1 must be positive, got {self.s1!r}")


def collision_matrix(alpha: float, s_j: float, s_e: float, lam: float = 1.0) -> np.ndarray:
    """R with m* = R m; lower triangular because e relaxes toward alpha lam^2/2 rho."""
    return np.array([[1.0, 0.0, 0.0],
                     [0.0, 1.0 - s_j, 0.0],
                     [alpha * lam * lam / 2.0 * s_e, 0.0, 1.0 - s_e]])


def advection_matrix(xi: float) -> np.ndarray:
    return np.diag([cmath.exp(-1j * xi), 1.0 + 0j, cmath.exp(1j * xi)])


def amplification_from_rates(xi: float, alpha: float, s_j: float, s_e: float,
                             lam: float = 1.0) -> AmplificationMatrix:
    """Same as :func:`build_amplification` but without the admissibility checks."""
    collide = inverse_moment_matrix(lam) @ collision_matrix(alpha, s_j, s_e, lam) @ moment_matrix(lam)
    return AmplificationMatrix(advection_matrix(xi) @ collide, float(xi))


def build_amplification(xi: float, p: SchemeParams) -> AmplificationMatrix:
    return amplification_from_rates(xi, p.alpha, p.s_j, p.s_e, p.lam)


def characteristic_coefficients(a: np.ndarray) -> tuple[complex, complex, complex]:
    """(c2, c1, c0) with det(z I - a) = z^3 + c2 z^2 + c1 z + c0."""
    tr = a[0, 0] + a[1, 1] + a[2, 2]
    minors = (a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
              + a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0]
              + a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
    det = (a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
           - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
           + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0]))
    return complex(-tr), complex(minors), complex(-det)


def _cbrt(z: complex) -> complex:
    if z == 0:
        return 0j
    return cmath.exp(cmath.log(z) / 3.0)


def cubic_roots(c2: complex, c1: complex, c0: complex) -> list[complex]:
    """Roots of z^3 + c2 z^2 + c1 z + c0 by Cardano's formula over the complex field."""
    shift = c2 / 3.0
    p = c1 - c2 * c2 / 3.0
    q = 2.0 * c2 ** 3 / 27.0 - c2 * c1 / 3.0 + c0
    disc = cmath.sqrt(q * q / 4.0 + p ** 3 / 27.0)
    # pick the branch that avoids cancellation in -q/2 +- sqrt(.)
    u3 = -q / 2.0 + disc
    alt = -q / 2.0 - disc
    if abs(alt) > abs(u3):
        u3 = alt
    u = _cbrt(u3)
    if u == 0:
        return [-shift] * 3
    rot = cmath.exp(2j * math.pi / 3.0)
    roots = []
    for k in range(3):
        uk = u * rot ** k
        roots.append(uk - p / (3.0 * uk) - shift)
    return roots


def _horner(coeffs: Sequence[complex], z: complex) -> tuple[complex, complex]:
    c2, c1, c0 = coeffs
    val = ((z + c2) * z + c1) * z + c0
    der = (3.0 * z + 2.0 * c2) * z + c1
    return val, der


def _polish(root: complex, coeffs: Sequence[complex]) -> complex:
    val, der = _horner(coeffs, root)
    for _ in range(MAX_POLISH):
        if val == 0 or der == 0:
            break
        cand = root - val / der
        cval, cder = _horner(coeffs, cand)
        if not abs(cval) < abs(val):
            break
        root, val, der = cand, cval, cder
    return root


def eigenvector(a: np.ndarray, ev: complex) -> np.ndarray:
    """Unit null vector of a - ev I from the best-conditioned row cross product."""
    b = a - ev * np.eye(3)
    rows = [b[0], b[1], b[2]]
    best, best_norm = None, -1.0
    for i, j in ((0, 1), (0, 2), (1, 2)):
        v = np.cross(rows[i], rows[j])
        nv = float(np.linalg.norm(v))
        if nv > best_norm:
            best, best_norm = v, nv
    scale = float(np.linalg.norm(b)) ** 2 + 1e-300
    if best_norm <= 1e-14 * scale:
        # rank <= 1: any vector orthogonal (bilinearly) to the dominant row
        r = max(rows, key=lambda row: float(np.linalg.norm(row)))
        if float(np.linalg.norm(r)) <= 1e-14:
            return np.array([1.0, 0.0, 0.0], dtype=complex)
        cands = [np.cross(r, e) for e in np.eye(3)]
        best = max(cands, key=lambda v: float(np.linalg.norm(v)))
        best_norm = float(np.linalg.norm(best))
    return best / best_norm


def _same(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))


def _compare(z: complex, w: complex) -> int:
    for key in (abs, lambda c: c.real, lambda c: c.imag):
        a, b = key(z), key(w)
        if not _same(a, b):
            return -1 if a > b else 1
    return 0


def sort_eigenvalues(values: Iterable[complex]) -> list[complex]:
    """Descending modulus, then real part, then imaginary part, with a 1e-12 tie band."""
    return sorted(values, key=functools.cmp_to_key(_compare))


def _residual(a: np.ndarray, ev: complex, v: np.ndarray) -> float:
    return float(np.linalg.norm(a @ v - ev * v))


def _refine_on_matrix(a: np.ndarray, ev: complex) -> tuple[complex, np.ndarray]:
    """Inverse iteration plus Rayleigh quotient on the matrix itself.

    Forming the characteristic polynomial limits a root to roughly
    eps / |p'(root)|, which is poor for clustered or repeated roots; iterating
    on ``a`` recovers full accuracy. Bounded by MAX_POLISH, never worsens the pair.
    """
    v = eigenvector(a, ev)
    best = (_residual(a, ev, v), ev, v)
    eye = np.eye(3)
    for k in range(MAX_POLISH):
        try:
            y = np.linalg.solve(a - ev * eye, v)
        except np.linalg.LinAlgError:
            break
        ny = float(np.linalg.norm(y))
        if not np.isfinite(ny) or ny == 0:
            break
        v = y / ny
        ev = np.vdot(v, a @ v)
        res = _residual(a, ev, v)
        if res < best[0]:
            best = (res, ev, v)
        elif k >= 2:
            break
    return complex(best[1]), best[2].astype(complex)


def eigenpairs(m: AmplificationMatrix) -> tuple[list[complex], list[float]]:
    """Eigenvalues (sorted) and the residual of each against its eigenvector."""
    a = np.asarray(m.entries, dtype=complex)
    coeffs = characteristic_coefficients(a)
    real_matrix = not np.any(a.imag)
    pairs = []
    for root in cubic_roots(*coeffs):
        root = _polish(root, coeffs)
        ev, v = None, None
        if real_matrix and abs(root.imag) <= IMAG_TOL * abs(root):
            # a real matrix has exactly real eigenvalues here; refining in real
            # arithmetic keeps rounding noise out of the imaginary part
            ev, v = _refine_on_matrix(a.real, root.real)
            if not _residual(a, ev, v) <= RESIDUAL_TOL:
                ev = None
        if ev is None:
            ev, v = _refine_on_matrix(a, root)
        res = _residual(a, ev, v)
        if not res <= RESIDUAL_TOL:
            raise EigenvalueConvergenceError(
                f"eigenpair residual {res:.3e} above {RESIDUAL_TOL:g} at xi={m.xi!r}, ev={ev!r}")
        pairs.append((ev, res))
    order = sort_eigenvalues(ev for ev, _ in pairs)
    by_value = {}
    for ev, res in pairs:
        by_value.setdefault(ev, []).append(res)
    return order, [by_value[ev].pop() for ev in order]


def eigenvalues(m: AmplificationMatrix) -> list[complex]:
    return eigenpairs(m)[0]


def is_real(ev: complex) -> bool:
    return abs(ev.imag) <= IMAG_TOL * abs(ev)


def classify(values: Sequence[complex]) -> str:
    """Propagative if a conjugate pair exists, diffusive if all real with a positive dominant value."""
    if any(not is_real(ev) for ev in values):
        return PROPAGATIVE
    if values[0].real > 0:
        return DIFFUSIVE
    return OTHER


def analyse(xi: float, p: SchemeParams) -> DispersionResult:
    values, residuals = eigenpairs(build_amplification(xi, p))
    zeta = tuple(cmath.log(ev) if ev != 0 else complex(-math.inf, 0.0) for ev in values)
    return DispersionResult(float(xi), tuple(values), zeta, classify(values), tuple(residuals))


def sweep(p: SchemeParams, xi_grid: Iterable[float]) -> list[DispersionResult]:
    out = []
    for xi in xi_grid:
        if not (0.0 <= xi <= math.pi):
            raise ParameterError(f"xi must lie in [0, pi], got {xi!r}")
        out.append(analyse(xi, p))
    return out


def spectral_radius(m: AmplificationMatrix) -> float:
    return max(abs(ev) for ev in eigenvalues(m))


def asymptotic_roots(inp: AsymptoticInputs) -> tuple[complex, complex]:
    """Roots (slow, fast) of omega^2 + s1 omega + (4+alpha)/6 kappa^2."""
    c = math.sqrt((4.0 + inp.alpha) / 6.0)
    ck2 = 2.0 * c * inp.kappa
    # factored discriminant keeps the threshold double root clean
    disc = cmath.sqrt(complex((inp.s1 - ck2) * (inp.s1 + ck2)))
    return (-inp.s1 + disc) / 2.0, (-inp.s1 - disc) / 2.0


def discriminant_threshold(s1: float, alpha: float) -> float:
    if not s1 > 0:
        raise ParameterError(f"s1 must be positive, got {s1!r}")
    if not alpha > -4.0:
        raise ParameterError(f"alpha must exceed -4, got {alpha!r}")
    return s1 / (2.0 * math.sqrt((4.0 + alpha) / 6.0))


def slow_mode_slope(mu: float, alpha: float, lam: float = 1.0) -> float:
    """s1 = (4+alpha)/(6 mu) lam, so that s_j ~ s1 dx under acoustic refinement."""
    return (4.0 + alpha) / (6.0 * mu) * lam
