"""Radial test-function families on R^n and their Fourier data.

Three analytic families are provided:

========  ==========================================  ===========
family    radial profile at dilation ``lam``           parameter
========  ==========================================  ===========
gaussian  ``exp(-(lam r)^2 / (2 sigma^2))``            ``sigma``
bubble    ``(1 + (lam r)^2)^(-beta/2)``                ``beta``
bump      ``exp(-1/(1 - (lam r/R)^2))`` for lam r < R  ``radius``
========  ==========================================  ===========

plus ``custom`` profiles supplied as a callable.  The Fourier transform
uses the unnormalized kernel ``exp(-i x.xi)``, so the inverse transform
carries ``(2 pi)^-n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, ClassVar

import numpy as np
from scipy.special import j0 as _scipy_j0

from .numerics import (
    bessel_j0,
    integrate_1d,
    log_gamma,
    reciprocal_gamma,
    sphere_area,
)

__all__ = [
    "TestFunction",
    "FAMILIES",
    "gaussian",
    "bubble",
    "bump",
    "custom_radial",
    "make",
    "evaluate",
    "dilate",
    "scaled",
    "translated",
    "fourier_radial",
    "fourier_small_rho",
    "fourier_cutoff",
    "radial_kernel",
    "UnsupportedDimensionError",
]

FAMILIES = ("gaussian", "bubble", "bump", "custom")
FOURIER_DIMS = (1, 2, 3)


class UnsupportedDimensionError(ValueError):
    pass


@dataclass(frozen=True)
class TestFunction:
    """Immutable description of one radial test function.

    ``center`` shifts the function along the first coordinate axis.  Norms
    over all of R^n ignore it; norms over a domain do not.
    """

    __test__: ClassVar[bool] = False  # keep pytest from collecting it

    family: str
    n: int
    sigma: float = 1.0
    beta: float = 1.0
    radius: float = 1.0
    dilation: float = 1.0
    amplitude: float = 1.0
    center: float = 0.0
    profile: Callable | None = None
    scale_hint: float = 1.0
    label: str = ""

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"dimension must be an integer >= 1, got {self.n!r}")
        if not self.dilation > 0:
            raise ValueError("dilation must be positive")
        if self.family == "gaussian" and not self.sigma > 0:
            raise ValueError("gaussian width sigma must be positive")
        if self.family == "bubble" and not self.beta > 0:
            raise ValueError("bubble exponent beta must be positive")
        if self.family == "bump" and not self.radius > 0:
            raise ValueError("bump radius must be positive")
        if self.family == "custom" and self.profile is None:
            raise ValueError("custom family needs a profile callable")

    @property
    def scale(self) -> float:
        """Characteristic length of the profile (already divided by the dilation)."""
        if self.family == "gaussian":
            base = self.sigma
        elif self.family == "bump":
            base = self.radius
        elif self.family == "custom":
            base = self.scale_hint
        else:
            base = 1.0
        return base / self.dilation

    @property
    def support_radius(self) -> float:
        if self.family == "bump":
            return self.radius / self.dilation
        if self.family == "custom":
            return self.radius / self.dilation
        return math.inf

    @property
    def is_zero(self) -> bool:
        return self.amplitude == 0.0

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.family == "gaussian":
            return f"gaussian(sigma={self.sigma:g})"
        if self.family == "bubble":
            return f"bubble(beta={self.beta:g})"
        if self.family == "bump":
            return f"bump(R={self.radius:g})"
        return "custom"

    def base_profile(self, t: np.ndarray) -> np.ndarray:
        """Undilated, unit-amplitude profile at radius ``t >= 0``."""
        if self.family == "gaussian":
            return np.exp(-0.5 * (t / self.sigma) ** 2)
        if self.family == "bubble":
            return (1.0 + t * t) ** (-0.5 * self.beta)
        if self.family == "bump":
            z = t / self.radius
            inside = z < 1.0
            zz = np.where(inside, z, 0.0)
            return np.where(inside, np.exp(-1.0 / (1.0 - zz * zz)), 0.0)
        return np.asarray(self.profile(t), dtype=float)

    def __call__(self, r):
        return evaluate(self, r)

    def at(self, x) -> np.ndarray:
        """Values at points of R^n, ``x`` of shape ``(N, n)`` (or ``(N,)`` when n = 1)."""
        x = np.asarray(x, dtype=float)
        if self.n == 1 and x.ndim <= 1:
            r = np.abs(x - self.center)
        else:
            y = x.copy()
            y[..., 0] -= self.center
            r = np.sqrt(np.sum(y * y, axis=-1))
        return evaluate(self, r)


    def increment(self, x, h) -> np.ndarray:
        """``u(x + h) - u(x)`` without cancellation for small steps ``h``.

        The squared radius changes by ``h.(2(x - c) + h)``, which is formed
        directly, and the profile difference goes through ``expm1``.
        """
        x = np.asarray(x, dtype=float)
        h = np.asarray(h, dtype=float)
        if self.n == 1 and x.ndim <= 1:
            y = x - self.center
            w0 = y * y
            dw = h * (2.0 * y + h)
        else:
            y = x.copy()
            y[..., 0] -= self.center
            w0 = np.sum(y * y, axis=-1)
            dw = np.sum(h * (2.0 * y + h), axis=-1)
        lam2 = self.dilation ** 2
        amp = self.amplitude
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            if self.family == "gaussian":
                k = 0.5 * lam2 / self.sigma ** 2
                return amp * np.exp(-k * w0) * np.expm1(-k * dw)
            if self.family == "bubble":
                base = 1.0 + lam2 * w0
                u0 = base ** (-0.5 * self.beta)
                return amp * u0 * np.expm1(-0.5 * self.beta * np.log1p(lam2 * dw / base))
            if self.family == "bump":
                r2 = self.radius ** 2
                z0 = lam2 * w0 / r2
                dz = lam2 * dw / r2
                z1 = z0 + dz
                inside0 = z0 < 1.0
                inside1 = z1 < 1.0
                both = inside0 & inside1
                q0 = np.where(inside0, 1.0 - z0, 1.0)
                q1 = np.where(inside1, 1.0 - z1, 1.0)
                u0 = np.where(inside0, np.exp(-1.0 / q0), 0.0)
                u1 = np.where(inside1, np.exp(-1.0 / q1), 0.0)
                shift = -dz / (q0 * q1)
                small = both & (np.abs(shift) < 1.0)
                close = u0 * np.expm1(np.where(small, shift, 0.0))
                return amp * np.where(small, close, u1 - u0)
        r0 = np.sqrt(w0)
        r1 = np.sqrt(np.maximum(w0 + dw, 0.0))
        return evaluate(self, r1) - evaluate(self, r0)


def gaussian(n: int, sigma: float = 1.0) -> TestFunction:
    return TestFunction("gaussian", n, sigma=sigma)


def bubble(n: int, beta: float) -> TestFunction:
    return TestFunction("bubble", n, beta=beta)


def bump(n: int, radius: float = 1.0) -> TestFunction:
    return TestFunction("bump", n, radius=radius)


def custom_radial(n: int, profile: Callable, *, radius: float = math.inf,
                  scale: float = 1.0, label: str = "custom") -> TestFunction:
    """Wrap a vectorized radial profile.  ``radius`` is its support radius if compact."""
    return TestFunction("custom", n, profile=profile, radius=radius,
                        scale_hint=scale, label=label)


def make(family: str, n: int, **params) -> TestFunction:
    """Build a family member from a config-style name and keyword parameters."""
    family = family.strip().lower()
    if family == "gaussian":
        u = gaussian(n, float(params.pop("sigma", 1.0)))
    elif family == "bubble":
        if "beta" not in params:
            raise ValueError("bubble needs a beta parameter")
        u = bubble(n, float(params.pop("beta")))
    elif family == "bump":
        u = bump(n, float(params.pop("radius", params.pop("R", 1.0))))
    else:
        raise ValueError(f"unknown family {family!r}")
    lam = float(params.pop("dilation", params.pop("lam", 1.0)))
    amp = float(params.pop("amplitude", 1.0))
    center = float(params.pop("center", 0.0))
    if params:
        raise ValueError(f"unused parameters for {family}: {sorted(params)}")
    return replace(u, dilation=lam, amplitude=amp, center=center)


def evaluate(u: TestFunction, r):
    """Radial profile of ``u`` at ``r >= 0`` (scalar or array)."""
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0):
        raise ValueError("radius must be non-negative")
    out = u.amplitude * u.base_profile(u.dilation * arr)
    return float(out) if np.ndim(out) == 0 else out


def dilate(u: TestFunction, lam: float) -> TestFunction:
    """``x -> u(lam x)``; dilations compose multiplicatively."""
    if not lam > 0:
        raise ValueError(f"dilation factor must be positive, got {lam!r}")
    return replace(u, dilation=u.dilation * lam, center=u.center / lam)


def scaled(u: TestFunction, factor: float) -> TestFunction:
    return replace(u, amplitude=u.amplitude * factor)


def translated(u: TestFunction, shift: float) -> TestFunction:
    return replace(u, center=u.center + shift)


# ---------------------------------------------------------------------------
# Fourier side

def radial_kernel(n: int, t):
    """Spherical average of exp(i t w.e) over the unit sphere of R^n."""
    if n == 1:
        return np.cos(t)
    if n == 2:
        # scipy's j0 for the large kernel matrices; the internal series is kept for scalar use
        return _scipy_j0(t)
    if n == 3:
        return np.sinc(np.asarray(t) / math.pi)
    raise UnsupportedDimensionError(f"radial transforms are implemented for n in {FOURIER_DIMS}, got {n}")


def _check_dim(n: int):
    if n not in FOURIER_DIMS:
        raise UnsupportedDimensionError(
            f"Fourier data is implemented for n in {FOURIER_DIMS}, got n={n}")


def _integral(u: TestFunction) -> float:
    """Integral of u over R^n (finite only when it converges)."""
    n = u.n
    lam = u.dilation
    if u.family == "gaussian":
        return u.amplitude * (2.0 * math.pi) ** (0.5 * n) * (u.sigma / lam) ** n
    if u.family == "bubble":
        if u.beta <= n:
            return math.inf
        # omega_n/2 * B(n/2, (beta-n)/2)
        logb = log_gamma(0.5 * n) + log_gamma(0.5 * (u.beta - n)) - log_gamma(0.5 * u.beta)
        return u.amplitude * 0.5 * sphere_area(n) * math.exp(logb) / lam ** n
    return _moment(u, 0)


@lru_cache(maxsize=512)
def _moment(u: TestFunction, k: int) -> float:
    """Directional moment  int (x.e)^{2k} u(x) dx  of a compactly supported u."""
    n = u.n
    R = u.support_radius
    if not math.isfinite(R):
        raise ValueError("moments are only computed for compactly supported profiles")
    sphere_avg = math.exp(log_gamma(0.5 * n) + log_gamma(k + 0.5)
                          - 0.5 * math.log(math.pi) - log_gamma(k + 0.5 * n))
    res = integrate_1d(lambda r: r ** (n - 1 + 2 * k) * evaluate(u, r), 0.0, R,
                       tol=1e-14, atol=0.0)
    return sphere_area(n) * sphere_avg * res.value


_GL_ORDER = 20
_MAX_PANELS = 2**16
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)


def composite_gl(edges: np.ndarray, order: int = _GL_ORDER) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on consecutive panels."""
    if order == _GL_ORDER:
        gx, gw = _GL_X, _GL_W
    else:
        gx, gw = np.polynomial.legendre.leggauss(order)
    edges = np.asarray(edges, dtype=float)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    weights = (half[:, None] * gw[None, :]).ravel()
    return nodes, weights


def _numeric_transform(u: TestFunction, rho: np.ndarray, cutoff: float | None = None) -> np.ndarray:
    """omega_n int_0^R r^{n-1} u(r) kernel(rho r) dr by composite Gauss-Legendre.

    ``R`` is the support radius, or ``cutoff`` for non-compact profiles.
    Panels per transform grow with rho*R so that no panel spans more than ten radians.
    """
    n = u.n
    R = u.support_radius if cutoff is None else cutoff
    if not math.isfinite(R):
        raise ValueError(f"{u.name} has no compact support; numeric transform needs a cutoff")
    rho = np.asarray(rho, dtype=float)
    flat = rho.ravel()
    out = np.empty_like(flat)
    # 20-point Gauss-Legendre integrates cos over ~10 radians per panel to
    # rounding level; 16 panels are the floor that resolves the profile itself
    panels_needed = np.maximum(16, np.ceil(np.abs(flat) * R / 10.0)).astype(int)
    # round panel counts up to powers of two so transforms share node sets
    levels = 2 ** np.ceil(np.log2(panels_needed)).astype(int)
    # beyond rho*R ~ 6e5 smooth profiles have transforms far below rounding level
    beyond = levels > _MAX_PANELS
    out[beyond] = 0.0
    omega = sphere_area(n)
    for level in np.unique(levels[~beyond]):
        idx = np.nonzero(levels == level)[0]
        nodes, weights = composite_gl(np.linspace(0.0, R, level + 1))
        vals = omega * weights * nodes ** (n - 1) * evaluate(u, nodes)
        rows = max(1, int(4_000_000 // nodes.size))
        for start in range(0, idx.size, rows):
            sel = idx[start:start + rows]
            out[sel] = radial_kernel(n, np.outer(flat[sel], nodes)) @ vals
    return out.reshape(rho.shape)


def _bubble_transform(u: TestFunction, rho: np.ndarray) -> np.ndarray:
    from scipy.special import kv

    n = u.n
    lam = u.dilation
    beta = u.beta
    nu = 0.5 * (n - beta)
    z = np.asarray(rho, dtype=float) / lam
    pref = u.amplitude * (2.0 * math.pi) ** (0.5 * n) * 2.0 ** (1.0 - 0.5 * beta) \
        * reciprocal_gamma(0.5 * beta) / lam ** n
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        val = pref * z ** (-nu) * kv(nu, z)
    zero = z == 0
    if np.any(zero):
        val = np.where(zero, _integral(u), val)
    return val


def fourier_radial(u: TestFunction, rho, method: str | None = None):
    """Radial profile of the Fourier transform of ``u`` at frequency radius ``rho``.

    Gaussians and bubbles use closed forms; bumps and compact custom
    profiles use the numeric radial transform.  ``method="numeric"``
    forces quadrature (gaussians are then cut off where they drop below
    e^-40 of their peak).
    """
    _check_dim(u.n)
    arr = np.asarray(rho, dtype=float)
    if np.any(arr < 0):
        raise ValueError("frequency radius must be non-negative")
    if u.is_zero:
        out = np.zeros_like(arr)
    elif method == "numeric":
        if u.family == "gaussian":
            out = _numeric_transform(u, arr, cutoff=math.sqrt(80.0) * u.scale)
        elif u.family == "bubble":
            raise ValueError("bubble profiles are not integrable enough for a numeric transform")
        else:
            out = _numeric_transform(u, arr)
    elif u.family == "gaussian":
        lam = u.dilation
        out = _integral(u) * np.exp(-0.5 * (u.sigma * arr / lam) ** 2)
    elif u.family == "bubble":
        out = _bubble_transform(u, arr)
    else:
        out = _numeric_transform(u, arr)
    return float(out) if np.ndim(out) == 0 else out


@lru_cache(maxsize=256)
def fourier_small_rho(u: TestFunction, max_terms: int = 40) -> tuple[tuple[float, float], ...]:
    """Small-frequency expansion of the transform as ``((coef, exponent), ...)``.

    The transform equals ``sum coef * rho**exponent`` near rho = 0.  Smooth
    transforms (gaussian, compact profiles) only carry even exponents;
    the bubble also carries the non-analytic powers ``rho^(2k + beta - n)``.
    """
    _check_dim(u.n)
    n = u.n
    lam = u.dilation
    terms: list[tuple[float, float]] = []
    if u.is_zero:
        return ((0.0, 0.0),)
    if u.family == "gaussian":
        a0 = _integral(u)
        w = -0.5 * (u.sigma / lam) ** 2
        coef = a0
        for k in range(max_terms):
            terms.append((coef, 2.0 * k))
            coef = coef * w / (k + 1)
    elif u.family == "bubble":
        nu = 0.5 * (n - u.beta)
        if abs(nu - round(nu)) < 1e-9:
            raise ValueError(
                f"bubble with beta={u.beta} in n={n} has a logarithmic small-frequency "
                "expansion; not supported")
        pref = u.amplitude * (2.0 * math.pi) ** (0.5 * n) * 2.0 ** (1.0 - 0.5 * u.beta) \
            * reciprocal_gamma(0.5 * u.beta) / lam ** n
        c = 0.5 * math.pi / math.sin(nu * math.pi)
        for k in range(max_terms // 2):
            fact = math.exp(log_gamma(k + 1.0))
            e1 = 2.0 * k - 2.0 * nu
            terms.append((pref * c * 2.0 ** (nu - 2.0 * k) * reciprocal_gamma(k - nu + 1.0)
                          / fact * lam ** (-e1), e1))
            e2 = 2.0 * k
            terms.append((-pref * c * 2.0 ** (-2.0 * k - nu) * reciprocal_gamma(k + nu + 1.0)
                          / fact * lam ** (-e2), e2))
        terms.sort(key=lambda t: t[1])
    else:
        for k in range(max_terms):
            coef = (-1.0) ** k * _moment(u, k) * math.exp(-log_gamma(2.0 * k + 1.0))
            terms.append((coef, 2.0 * k))
    return tuple(terms)


@lru_cache(maxsize=256)
def fourier_cutoff(u: TestFunction, rtol: float = 1e-15) -> float:
    """Frequency beyond which ``rho^(n+1) |u_hat(rho)|`` stays below ``rtol`` of its peak.

    The transform is sampled sixteen times per octave; scanning stops after
    the first octave that lies entirely under the threshold.  Values below
    the rounding floor of the transform (``1e-14 |u_hat(0)|``) also count as
    quiet: quadrature noise of numeric transforms reaches a few times
    ``1e-15 |u_hat(0)|`` and would otherwise never decay.
    """
    _check_dim(u.n)
    if u.is_zero:
        return 1.0
    base = 1.0 / u.scale
    floor = 1e-14 * abs(fourier_radial(u, 0.0)) if u.family != "bubble" else 0.0
    per_octave = 16
    peak = 0.0
    k = -6 * per_octave
    quiet = 0
    last_loud = base * 2.0 ** (k / per_octave)
    while quiet < per_octave:
        rho = base * 2.0 ** (k / per_octave)
        mag = abs(fourier_radial(u, rho))
        v = rho ** (u.n + 1) * mag
        if v > peak:
            peak = v
        if v > rtol * peak and mag > floor:
            quiet = 0
            last_loud = rho
        else:
            quiet += 1
        k += 1
        if k > 40 * per_octave:
            raise RuntimeError(f"transform of {u.name} does not decay within 2^40 / scale")
    return 1.25 * last_loud


def lp_tail_finite(u: TestFunction, p: float) -> bool:
    """Whether |u|^p r^(n-1) is integrable at infinity."""
    if u.family == "bubble":
        return u.beta * p > u.n
    return True

