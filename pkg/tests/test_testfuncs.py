import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special
from scipy.integrate import quad

from fracgls.testfuncs import (
    TestFunction,
    UnsupportedDimensionError,
    bubble,
    bump,
    custom_radial,
    dilate,
    evaluate,
    fourier_cutoff,
    fourier_radial,
    fourier_small_rho,
    gaussian,
    lp_tail_finite,
    make,
    radial_kernel,
    scaled,
    translated,
)

BUMP_MASS_1D = 2 * quad(lambda r: math.exp(-1 / (1 - r * r)), 0, 1, epsabs=0, epsrel=1e-13)[0]


def test_profiles():
    assert evaluate(gaussian(1), 0.0) == 1.0
    assert evaluate(bubble(1, 2.0), 1.0) == pytest.approx(0.5, rel=1e-15)
    assert evaluate(bump(1), 1.0) == 0.0
    assert evaluate(bump(1), 0.0) == pytest.approx(math.exp(-1.0), rel=1e-15)


def test_evaluate_rejects_negative_radius():
    with pytest.raises(ValueError):
        evaluate(gaussian(2), -1.0)


@pytest.mark.parametrize("kw", [dict(family="gaussian", n=1, sigma=0.0), dict(family="bubble", n=1, beta=-1.0),
                                dict(family="bump", n=1, radius=0.0), dict(family="gaussian", n=0),
                                dict(family="nope", n=1), dict(family="gaussian", n=1, dilation=0.0)])
def test_invalid_parameters(kw):
    with pytest.raises(ValueError):
        TestFunction(**kw)


def test_dilation():
    u = gaussian(1)
    assert evaluate(dilate(u, 2.0), 1.0) == pytest.approx(evaluate(u, 2.0), rel=1e-15)
    assert dilate(dilate(u, 2.0), 0.5) == u
    assert dilate(bump(3), 2.0).support_radius == 0.5
    with pytest.raises(ValueError):
        dilate(u, 0.0)


@given(st.sampled_from(["gaussian", "bubble", "bump"]), st.integers(1, 3),
       st.floats(0.1, 10.0), st.floats(0.0, 3.0))
def test_radial_and_bounded(family, n, lam, r):
    u = make(family, n, beta=1.5, lam=lam) if family == "bubble" else make(family, n, lam=lam)
    v = evaluate(u, r)
    assert 0.0 <= v <= evaluate(u, 0.0)
    direction = np.zeros(n)
    direction[-1] = r
    assert u.at(direction[None, :] if n > 1 else np.array([r]))[0] == pytest.approx(v, rel=1e-14)


def test_make_parses_config_names():
    u = make(" Bump ", 2, R=0.5, dilation=2.0, amplitude=3.0, center=1.0)
    assert (u.family, u.radius, u.dilation, u.amplitude, u.center) == ("bump", 0.5, 2.0, 3.0, 1.0)
    with pytest.raises(ValueError):
        make("bubble", 1)
    with pytest.raises(ValueError):
        make("gaussian", 1, colour=1.0)


@given(st.sampled_from(["gaussian", "bubble", "bump"]), st.floats(-2.0, 2.0), st.floats(-0.5, 0.5))
def test_increment_matches_difference(family, x, h):
    u = make(family, 1, beta=1.5) if family == "bubble" else make(family, 1)
    u = translated(u, 0.3)
    direct = u.at(np.array([x + h]))[0] - u.at(np.array([x]))[0]
    assert u.increment(np.array([x]), h)[0] == pytest.approx(direct, rel=1e-9, abs=1e-15)


def test_increment_resolves_tiny_steps():
    u = gaussian(1)
    h = 1e-12
    # derivative of e^{-x^2/2} at x = 1 is -e^{-1/2}
    assert u.increment(np.array([1.0]), h)[0] / h == pytest.approx(-math.exp(-0.5), rel=1e-9)


def test_increment_in_3d():
    u = bump(3, 1.5)
    x = np.array([[0.2, -0.1, 0.3]])
    h = np.array([0.05, 0.02, -0.04])
    assert u.increment(x, h)[0] == pytest.approx((u.at(x + h) - u.at(x))[0], rel=1e-12)


def test_scaled_and_translated():
    u = scaled(translated(gaussian(1), 2.0), 3.0)
    assert u.at(np.array([2.0]))[0] == pytest.approx(3.0)
    assert scaled(u, 0.0).is_zero


def test_radial_kernels():
    t = np.array([0.0, 0.5, 3.0])
    assert np.allclose(radial_kernel(1, t), np.cos(t))
    assert np.allclose(radial_kernel(2, t), special.j0(t))
    assert np.allclose(radial_kernel(3, t), [1.0, math.sin(0.5) / 0.5, math.sin(3.0) / 3.0])
    with pytest.raises(UnsupportedDimensionError):
        radial_kernel(4, t)


def test_fourier_gaussian_values():
    u = gaussian(1)
    assert fourier_radial(u, 0.0) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-15)
    assert fourier_radial(u, 1.0) == pytest.approx(math.sqrt(2 * math.pi) * math.exp(-0.5), rel=1e-15)


def test_fourier_bump_mass():
    assert BUMP_MASS_1D == pytest.approx(0.4439938, abs=5e-8)
    assert fourier_radial(bump(1), 0.0) == pytest.approx(BUMP_MASS_1D, rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_fourier_gaussian_numeric_vs_closed(n):
    u = gaussian(n, 0.7)
    rho = np.linspace(0.0, 10.0, 41)
    closed = fourier_radial(u, rho)
    numeric = fourier_radial(u, rho, method="numeric")
    # relative to the peak value: far in the tail the closed form is below rounding of the integral
    assert np.max(np.abs(numeric - closed)) <= 1e-8 * closed[0]


def _hankel_oracle(profile, n, rho):
    if n == 1:
        return 2 * quad(profile, 0, np.inf, weight="cos", wvar=rho)[0]
    if n == 3:
        return 4 * math.pi / rho * quad(lambda r: r * profile(r), 0, np.inf, weight="sin", wvar=rho)[0]
    raise ValueError


@pytest.mark.parametrize("n,beta", [(1, 1.5), (1, 3.2), (3, 3.5)])
@pytest.mark.parametrize("rho", [0.3, 1.0, 4.0])
def test_fourier_bubble_closed_form_vs_oscillatory_quadrature(n, beta, rho):
    u = bubble(n, beta)
    ref = _hankel_oracle(lambda r: (1 + r * r) ** (-beta / 2), n, rho)
    assert fourier_radial(u, rho) == pytest.approx(ref, rel=1e-8)


def test_fourier_bump_3d_vs_quadrature():
    prof = lambda r: math.exp(-1 / (1 - r * r)) if r < 1 else 0.0  # noqa: E731
    for rho in (0.5, 2.0, 9.0):
        ref = 4 * math.pi / rho * quad(lambda r: r * prof(r) * math.sin(rho * r), 0, 1, epsabs=0, epsrel=1e-12, limit=200)[0]
        assert fourier_radial(bump(3), rho) == pytest.approx(ref, rel=1e-9, abs=1e-14)


@given(st.sampled_from(["gaussian", "bump"]), st.integers(1, 3), st.floats(0.25, 4.0), st.floats(0.0, 6.0))
def test_fourier_dilation_law(family, n, lam, rho):
    u = make(family, n)
    lhs = fourier_radial(dilate(u, lam), rho)
    rhs = lam ** (-n) * fourier_radial(u, rho / lam)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12 * fourier_radial(u, 0.0))


def test_fourier_unsupported_dimension():
    with pytest.raises(UnsupportedDimensionError):
        fourier_radial(gaussian(4), 1.0)


def test_bubble_numeric_transform_refused():
    with pytest.raises(ValueError):
        fourier_radial(bubble(1, 2.0), 1.0, method="numeric")


@pytest.mark.parametrize("u", [gaussian(1), bump(2), bubble(1, 1.5), bubble(3, 2.4)])
def test_small_rho_series(u):
    rho = 0.05
    series = sum(c * rho**e for c, e in fourier_small_rho(u))
    assert series == pytest.approx(fourier_radial(u, rho), rel=1e-10)


def test_small_rho_series_rejects_logarithmic_case():
    with pytest.raises(ValueError):
        fourier_small_rho(bubble(1, 3.0))


def test_fourier_cutoff_quiets_the_transform():
    for u in (gaussian(1), bump(1), bubble(3, 2.0)):
        c = fourier_cutoff(u)
        tail = abs(fourier_radial(u, 2 * c)) * (2 * c) ** (u.n + 1)
        peak = max(abs(fourier_radial(u, r)) * r ** (u.n + 1) for r in np.linspace(0.01, c, 200))
        at_rounding_floor = u.family != "bubble" and abs(fourier_radial(u, 2 * c)) <= 1e-14 * fourier_radial(u, 0.0)
        assert tail <= 1e-12 * peak or at_rounding_floor


def test_lp_tail_finiteness():
    assert not lp_tail_finite(bubble(1, 1.0), 1.0)
    assert lp_tail_finite(bubble(1, 1.0), 1.5)
    assert lp_tail_finite(gaussian(3), 1.0)


def test_custom_profile():
    u = custom_radial(1, lambda r: np.exp(-np.abs(r)), scale=1.0, label="laplace")
    assert u.name == "laplace"
    assert evaluate(u, 1.0) == pytest.approx(math.exp(-1))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bump_cutoff_is_scale_invariant(n):
    # quadrature noise of the numeric transform must not keep the scan running
    scaled_cutoffs = [fourier_cutoff(bump(n, R)) * R for R in (0.3, 0.7094883643612235, 0.9, 1.0, 2.7)]
    assert max(scaled_cutoffs) < 2e3
    assert max(scaled_cutoffs) / min(scaled_cutoffs) < 2.0
