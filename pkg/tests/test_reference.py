import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from d1q3lab.errors import ParameterError
from d1q3lab.reference import (
    AnalyticProfile,
    convergence_order,
    error_norms,
    fitted_order,
    gaussian_exact,
    sine_exact,
)


def test_sine_examples():
    assert sine_exact(0.5, 0.0, 0.3) == pytest.approx(1.0, abs=1e-16)
    assert sine_exact(0.0, 4.0, 0.3) == 0.0
    assert sine_exact(0.5, 5.0, 0.01) == pytest.approx(math.exp(-0.05 * math.pi ** 2), rel=1e-15)
    assert sine_exact(0.5, 5.0, 0.01) == pytest.approx(0.610498, abs=5e-7)


def test_gaussian_examples():
    assert gaussian_exact(0.0, 3.0, 0.7) == 0.5
    assert gaussian_exact(0.0, 0.0, 0.7) == 1.0
    assert gaussian_exact(0.2, 0.0, 0.01) == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert gaussian_exact(0.2, 0.0, 0.01) == pytest.approx(0.367879, abs=5e-7)


def test_negative_time_rejected():
    with pytest.raises(ParameterError):
        sine_exact(0.0, -1.0, 0.1)
    with pytest.raises(ParameterError):
        gaussian_exact(0.0, -1.0, 0.1)


@pytest.mark.parametrize("kind, mu", [("sine", 0.01), ("sine", 0.3), ("gaussian", 0.01),
                                       ("gaussian", 0.5)])
def test_closed_forms_solve_heat_equation(kind, mu):
    prof = AnalyticProfile.default(kind, mu)
    width = 1.0 if kind == "sine" else math.sqrt(mu)
    xs = np.linspace(-0.8, 0.8, 7) * width + 0.013 * width
    t = 0.7

    def residual(h):
        hx = h * width
        dt = (prof(xs, t + h) - prof(xs, t - h)) / (2 * h)
        dxx = (prof(xs + hx, t) - 2 * prof(xs, t) + prof(xs - hx, t)) / (hx * hx)
        return np.max(np.abs(dt - mu * dxx))

    r1, r2 = residual(1e-2), residual(5e-3)
    assert r2 < r1
    assert math.log2(r1 / r2) == pytest.approx(2.0, abs=0.1)


@pytest.mark.parametrize("mu, half_width", [(0.01, 16), (0.15, 16), (1.5, 64)])
def test_gaussian_mass_is_constant(mu, half_width):
    # for mu = 1.5 the t = 6 tail at |x| = 16 is still ~2e-3, so widen the window
    x = np.linspace(-half_width, half_width, 2 ** 14, endpoint=False)
    dx = x[1] - x[0]
    m0 = dx * gaussian_exact(x, 0.0, mu).sum()
    for t in (1.0, 3.0, 6.0):
        assert dx * gaussian_exact(x, t, mu).sum() == pytest.approx(m0, rel=1e-8)


@given(st.floats(0.001, 2.0), st.floats(0.0, 10.0))
def test_sine_uniform_norm(mu, t):
    x = np.linspace(-1, 1, 9)  # contains +-1/2
    assert np.max(np.abs(sine_exact(x, t, mu))) == pytest.approx(math.exp(-mu * math.pi ** 2 * t),
                                                               rel=1e-15)


def test_error_norm_examples():
    r = error_norms([3.0, 4.0], [0.0, 0.0], 1.0)
    assert (r.l2, r.linf) == (5.0, 4.0)
    z = error_norms([1.0, 2.0], [1.0, 2.0], 0.1)
    assert (z.l2, z.linf) == (0.0, 0.0)
    n, length, c = 50, 32.0, -0.3
    k = error_norms(np.full(n, c), np.zeros(n), length / n)
    assert k.l2 == pytest.approx(abs(c) * math.sqrt(length), rel=1e-14)
    assert k.linf == pytest.approx(abs(c))
    assert k.l2_unweighted == pytest.approx(abs(c) * math.sqrt(n))


def test_error_norm_length_mismatch():
    with pytest.raises(ValueError):
        error_norms([1.0], [1.0, 2.0], 0.1)


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=40), st.floats(1e-3, 1.0))
def test_l2_bounded_by_linf(vals, dx):
    r = error_norms(vals, np.zeros(len(vals)), dx)
    assert r.l2 >= 0 and r.linf >= 0
    assert r.l2 <= r.linf * math.sqrt(dx * len(vals)) * (1 + 1e-12) + 1e-300


def test_convergence_order_examples():
    h = 0.1
    assert convergence_order([(h, 0.1), (h / 2, 0.05)]) == pytest.approx([1.0])
    assert convergence_order([(h, 0.1), (h / 2, 0.025)]) == pytest.approx([2.0])
    assert convergence_order([(h, 0.3), (h / 2, 0.3)]) == [0.0]


def test_convergence_order_domain_errors():
    with pytest.raises(ParameterError):
        convergence_order([(0.1, 0.0), (0.05, 0.01)])
    with pytest.raises(ParameterError):
        convergence_order([(0.1, -1.0), (0.05, 0.01)])
    with pytest.raises(ValueError):
        convergence_order([(0.1, 1.0)])
    with pytest.raises(ValueError):
        convergence_order([(0.1, 1.0), (0.2, 0.5)])


def test_fitted_order():
    data = [(2.0 ** -k, 3.0 * 2.0 ** (-1.5 * k)) for k in range(5)]
    assert fitted_order(data) == pytest.approx(1.5, rel=1e-12)
    with pytest.raises(ParameterError):
        fitted_order([(0.1, 0.0), (0.05, 1.0)])


def test_profile_validation():
    with pytest.raises(ParameterError):
        AnalyticProfile("square", 0.1, -1.0, 1.0)
    p = AnalyticProfile.default("gaussian", 0.01)
    assert (p.x_min, p.x_max) == (-16.0, 16.0)
