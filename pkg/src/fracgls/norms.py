"""Lebesgue, fractional Sobolev and weighted norms of radial test functions.

The fractional Laplacian ``(-Delta)^(s/2)`` is evaluated on the Fourier
side.  Inside a core ball the radial inverse transform of
``rho^s u_hat(rho)`` is summed on a composite Gauss-Legendre mesh; outside
it the small-frequency expansion of ``u_hat`` is turned term by term into
a generalized multipole series (the inverse transform of ``rho^t`` is a
multiple of ``r^(-n-t)``).  The two representations are compared at the
core radius, which gives an independent error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

import numpy as np
from scipy.optimize import brentq

from .numerics import (
    IntegrationError,
    QuadResult,
    integrate_1d,
    integrate_halfline,
    integrate_qmc,
    log_gamma,
    reciprocal_gamma,
    sphere_area,
)
from .testfuncs import (
    TestFunction,
    composite_gl,
    evaluate,
    fourier_cutoff,
    fourier_radial,
    fourier_small_rho,
    radial_kernel,
)

__all__ = [
    "NormResult",
    "ConvexDomain",
    "HALF_LINE",
    "lp_norm",
    "apply_frac_laplacian",
    "FracLaplacian",
    "frac_sobolev_norm",
    "plancherel_sobolev_norm",
    "slobodetskii_norm",
    "complete_norm",
    "dist_alpha",
    "weighted_lp_norm",
    "delta_seminorm",
    "riesz_multiplier",
]

METHODS = ("radial-quadrature", "qmc", "spectral", "closed-form")

Function1D = Callable[[np.ndarray], np.ndarray]
FunctionLike = Union[TestFunction, Function1D]


@dataclass(frozen=True)
class NormResult:
    """A norm value with an absolute error estimate.

    Infinite norms are ordinary results with ``value == inf``.
    ``low_confidence`` marks results whose error estimate exceeds the
    requested tolerance (QMC) rather than raising.
    """

    value: float
    error_estimate: float
    method: str
    evaluations: int = 1
    low_confidence: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if not self.value >= 0:
            raise ValueError(f"norm value must be >= 0, got {self.value!r}")
        if not self.error_estimate >= 0:
            raise ValueError("error_estimate must be >= 0")

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    @property
    def relative_error(self) -> float:
        if self.value == 0 or self.is_infinite:
            return 0.0
        return self.error_estimate / self.value

    @classmethod
    def infinite(cls, method: str) -> "NormResult":
        return cls(math.inf, 0.0, method)

    @classmethod
    def zero(cls, method: str) -> "NormResult":
        return cls(0.0, 0.0, method)


def _root(res: QuadResult, p: float, method: str, low_confidence: bool = False) -> NormResult:
    """Turn a quadrature of |f|^p into a norm with a propagated error."""
    total = max(res.value, 0.0)
    if total == 0.0:
        return NormResult(0.0, res.error_estimate ** (1.0 / p), method, res.evaluations, low_confidence)
    value = total ** (1.0 / p)
    err = value * res.error_estimate / (p * total)
    return NormResult(value, err, method, res.evaluations, low_confidence)


# ---------------------------------------------------------------------------
# Domains

_DOMAIN_KINDS = ("half-line", "half-space", "ball")


@dataclass(frozen=True)
class ConvexDomain:
    """Open convex domain: ``(0, inf)`` (n=1), ``{x_1 > 0}`` (n=2,3) or the unit ball."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in _DOMAIN_KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}; expected one of {_DOMAIN_KINDS}")
        if self.kind == "half-line" and self.n != 1:
            raise ValueError("half-line is a domain in n=1 only")
        if self.kind == "half-space" and self.n not in (2, 3):
            raise ValueError("half-space domains are supported for n in {2, 3}")
        if self.kind == "ball" and self.n not in (1, 2, 3):
            raise ValueError("ball domains are supported for n in {1, 2, 3}")

    def boundary_distance(self, x) -> np.ndarray:
        """Distance to the complement; negative outside the domain."""
        x = np.asarray(x, dtype=float)
        if self.n == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            first = x
            radius = np.abs(x)
        else:
            first = x[..., 0]
            radius = np.sqrt(np.sum(x * x, axis=-1))
        if self.kind == "ball":
            return 1.0 - radius
        return first

    def contains(self, x) -> np.ndarray:
        return self.boundary_distance(x) > 0


HALF_LINE = ConvexDomain("half-line", 1)


def dist_alpha(x, domain: ConvexDomain, alpha: float):
    """``dist(x, complement)^alpha`` for a point inside ``domain``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    d = domain.boundary_distance(x)
    if np.any(d <= 0):
        raise ValueError(f"point {np.asarray(x).tolist()} is not inside the {domain.kind}")
    out = d ** alpha
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# L_p norms

@lru_cache(maxsize=4096)
def lp_norm(u: TestFunction, p: float, tol: float = 1e-12) -> NormResult:
    """``(omega_n int_0^inf |u(r)|^p r^(n-1) dr)^(1/p)``.

    Gaussians and bubbles use their closed forms; other profiles use radial
    quadrature.  A divergent tail gives an infinite result.
    """
    if not p >= 1:
        raise ValueError(f"exponent p must be >= 1, got {p!r}")
    n = u.n
    if u.is_zero:
        return NormResult.zero("closed-form")
    amp = abs(u.amplitude)
    lam = u.dilation
    if u.family == "gaussian":
        log_int = 0.5 * n * math.log(2.0 * math.pi * u.sigma ** 2 / (p * lam * lam))
        val = amp * math.exp(log_int / p)
        return NormResult(val, 4e-16 * val, "closed-form")
    if u.family == "bubble":
        if u.beta * p <= n:
            return NormResult.infinite("closed-form")
        log_int = (math.log(0.5 * sphere_area(n)) + log_gamma(0.5 * n)
                   + log_gamma(0.5 * (u.beta * p - n)) - log_gamma(0.5 * u.beta * p)
                   - n * math.log(lam))
        val = amp * math.exp(log_int / p)
        return NormResult(val, 4e-15 * val, "closed-form")

    omega = sphere_area(n)

    def integrand(r):
        return omega * np.abs(evaluate(u, r)) ** p * r ** (n - 1)

    R = u.support_radius
    if math.isfinite(R):
        res = integrate_1d(integrand, 0.0, R, tol=tol, atol=0.0)
    else:
        try:
            res = integrate_halfline(integrand, 0.0, tol=tol, scale=u.scale, atol=0.0)
        except IntegrationError:
            return NormResult.infinite("radial-quadrature")
    return _root(res, p, "radial-quadrature")


# ---------------------------------------------------------------------------
# Fractional Laplacian

def riesz_multiplier(n: int, t: float) -> float:
    """Coefficient ``R`` with inverse transform of ``|xi|^t`` equal to ``R |x|^(-n-t)``.

    ``R = 2^t Gamma((n+t)/2) / (pi^(n/2) Gamma(-t/2))``; it vanishes when
    ``t`` is a non-negative even integer (the multiplier is then a
    polynomial and its transform is supported at the origin).
    """
    inv = reciprocal_gamma(-0.5 * t)
    if inv == 0.0:
        return 0.0
    return (2.0 ** t * math.exp(log_gamma(0.5 * (n + t)) - 0.5 * n * math.log(math.pi)) * inv)


_CHECK_ORDER = 14
_FAR_TOL = 1e-14


class FracLaplacian:
    """Radial profile of ``(-Delta)^(s/2) u``, callable on radii ``r >= 0``.

    Attributes of interest: ``r_core`` (switch radius between the spectral
    sum and the multipole series), ``error_estimate`` (absolute, uniform in
    r) and ``far_terms`` (``(coefficient, exponent)`` pairs of the series
    ``sum a_j r^(-n-s-e_j)``).
    """

    def __init__(self, u: TestFunction, s: float):
        if not 0 < s <= 2:
            raise ValueError(f"order s must lie in (0, 2], got {s!r}")
        if u.n not in (1, 2, 3):
            from .testfuncs import UnsupportedDimensionError
            raise UnsupportedDimensionError(f"fractional Laplacian needs n in {{1,2,3}}, got {u.n}")
        self.u = u
        self.s = float(s)
        self.n = u.n
        n = self.n
        self._zero = u.is_zero
        if self._zero:
            self.r_core = 1.0
            self.far_terms = ()
            self.error_estimate = 0.0
            self.truncation = 0.0
            return

        self._setup_far_field()
        rho_max = fourier_cutoff(u)
        self.rho_max = rho_max
        h = min(8.0 / self.r_core, rho_max / 8.0)
        graded = h * 2.0 ** -np.arange(40, -1, -1, dtype=float)
        uniform = np.linspace(h, h * math.ceil(rho_max / h), int(math.ceil(rho_max / h)) + 1)
        edges = np.concatenate([[0.0], graded, uniform[1:]])
        const = sphere_area(n) / (2.0 * math.pi) ** n

        def weights_for(order):
            nodes, w = composite_gl(edges, order)
            return nodes, const * w * nodes ** (n - 1 + self.s) * fourier_radial(u, nodes)

        self._nodes, self._weights = weights_for(20)
        nodes14, weights14 = weights_for(_CHECK_ORDER)

        probe = np.linspace(0.0, self.r_core, 33)
        main = self._spectral(probe)
        check = radial_kernel(n, np.outer(probe, nodes14)) @ weights14
        rule_err = float(np.max(np.abs(main - check)))
        # mass of the multiplier beyond the frequency cutoff
        tail = const * rho_max ** (n + self.s) * abs(fourier_radial(u, rho_max))
        self.truncation = rule_err + tail
        self.match_error = abs(main[-1] - self._far(np.array([self.r_core]))[0])
        self.error_estimate = self.truncation + self.match_error

    # -- far field -------------------------------------------------------
    def _setup_far_field(self):
        u, n, s = self.u, self.n, self.s
        if u.family == "gaussian":
            r_core = 8.5 * u.scale
            max_terms = 80
        elif u.family == "bubble":
            r_core = 4.0 / u.dilation
            max_terms = 80
        elif math.isfinite(u.support_radius):
            r_core = 2.0 * u.support_radius
            max_terms = 60
        else:
            r_core = 10.0 * u.scale
            max_terms = 60
        series = fourier_small_rho(u, max_terms)
        amps = [(c * riesz_multiplier(n, s + e), e) for c, e in series]
        for _ in range(12):
            mags = np.array([abs(a) * r_core ** (-n - s - e) for a, e in amps])
            total = float(np.sum(mags[:1])) or float(np.max(mags))
            nonzero = np.nonzero(mags > 0)[0]
            if nonzero.size == 0:
                self.far_terms = ()
                self.r_core = r_core
                return
            # truncate the (possibly asymptotic) series at its smallest term
            cut = int(nonzero[np.argmin(mags[nonzero])])
            scale_ref = float(np.max(mags))
            if mags[cut] <= _FAR_TOL * scale_ref or total == 0.0:
                break
            r_core *= 1.3
        else:
            raise IntegrationError(
                f"multipole series of (-Delta)^({s}/2) {u.name} does not settle "
                f"below {_FAR_TOL:g} (radius {r_core:.3g})")
        self.r_core = r_core
        self.far_terms = tuple((a, e) for a, e in amps[:cut] if a != 0.0)

    def _far(self, r: np.ndarray) -> np.ndarray:
        out = np.zeros_like(r, dtype=float)
        n, s = self.n, self.s
        for a, e in self.far_terms:
            out += a * r ** (-n - s - e)
        return out

    def _spectral(self, r: np.ndarray) -> np.ndarray:
        out = np.empty_like(r, dtype=float)
        rows = max(1, int(2_000_000 // self._nodes.size))
        for start in range(0, r.size, rows):
            block = r[start:start + rows]
            out[start:start + rows] = radial_kernel(self.n, np.outer(block, self._nodes)) @ self._weights
        return out

    def __call__(self, r):
        arr = np.asarray(r, dtype=float)
        if np.any(arr < 0):
            raise ValueError("radius must be non-negative")
        flat = arr.ravel()
        if self._zero:
            out = np.zeros_like(flat)
        else:
            out = np.empty_like(flat)
            inner = flat <= self.r_core
            if np.any(inner):
                out[inner] = self._spectral(flat[inner])
            if np.any(~inner):
                out[~inner] = self._far(flat[~inner])
        out = out.reshape(arr.shape)
        return float(out) if out.ndim == 0 else out

    # -- L_p of the output ----------------------------------------------
    def leading_far_term(self) -> tuple[float, float] | None:
        return self.far_terms[0] if self.far_terms else None

    def tail_integral(self, p: float, tol: float) -> QuadResult:
        """``int_{r_core}^inf |L u|^p r^(n-1) dr`` from the multipole series.

        With the leading term ``a0 r^(-n-s-e0)`` the substitution
        ``r = r_core x^(-1/delta)``, ``delta = p(n+s+e0) - n``, maps the
        tail onto ``(0, 1]`` with a bounded integrand.
        """
        if not self.far_terms:
            return QuadResult(0.0, 0.0, 1)
        n, s, rc = self.n, self.s, self.r_core
        a0, e0 = self.far_terms[0]
        delta = p * (n + s + e0) - n
        if delta <= 0:
            return QuadResult(math.inf, 0.0, 1)
        rest = self.far_terms[1:]
        pref = abs(a0) ** p * rc ** (-delta) / delta

        def integrand(x):
            r = rc * x ** (-1.0 / delta)
            corr = np.ones_like(x)
            for a, e in rest:
                corr += (a / a0) * r ** (e0 - e)
            return pref * np.abs(corr) ** p

        return integrate_1d(integrand, 0.0, 1.0, tol=tol, atol=0.0)


@lru_cache(maxsize=256)
def apply_frac_laplacian(u: TestFunction, s: float) -> FracLaplacian:
    """``(-Delta)^(s/2) u`` as a radial function (see :class:`FracLaplacian`)."""
    return FracLaplacian(u, s)


@lru_cache(maxsize=8192)
def frac_sobolev_norm(u: TestFunction, s: float, p: float, tol: float = 1e-10) -> NormResult:
    """``|(-Delta)^(s/2) u|_p``, spectral core plus analytic multipole tail."""
    if not p > 1:
        raise ValueError(f"exponent p must be > 1, got {p!r}")
    if u.is_zero:
        return NormResult.zero("spectral")
    L = apply_frac_laplacian(u, s)
    n = u.n
    omega = sphere_area(n)
    tail = L.tail_integral(p, tol)
    if math.isinf(tail.value):
        return NormResult.infinite("spectral")

    def core_integrand(r):
        return np.abs(L(r)) ** p * r ** (n - 1)

    core = integrate_1d(core_integrand, 0.0, L.r_core, tol=tol, atol=0.0, max_panels=8000)
    total = omega * (core.value + tail.value)
    value = total ** (1.0 / p)
    quad_err = omega * (core.error_estimate + tail.error_estimate)
    # uniform absolute error of L u over the core ball, measured in L_p
    core_volume = omega * L.r_core ** n / n
    spectral_err = L.error_estimate * core_volume ** (1.0 / p)
    err = value * quad_err / (p * total) + spectral_err
    return NormResult(value, err, "spectral", core.evaluations + tail.evaluations)


def plancherel_sobolev_norm(u: TestFunction, s: float, tol: float = 1e-12) -> NormResult:
    """``||u||_{W_2^s}`` from the frequency side: ``((2pi)^-n int |xi|^(2s) |u_hat|^2)^(1/2)``."""
    if u.is_zero:
        return NormResult.zero("spectral")
    n = u.n
    const = sphere_area(n) / (2.0 * math.pi) ** n

    def integrand(rho):
        return const * rho ** (n - 1 + 2 * s) * fourier_radial(u, rho) ** 2

    res = integrate_halfline(integrand, 0.0, tol=tol, scale=1.0 / u.scale, atol=0.0)
    return _root(res, 2.0, "spectral")


def complete_norm(u: TestFunction, s: float, p: float) -> NormResult:
    """``(|u|_p^p + ||u||_{W_p^s}^p)^(1/p)``."""
    a = lp_norm(u, p)
    b = frac_sobolev_norm(u, s, p)
    if a.is_infinite or b.is_infinite:
        return NormResult.infinite("spectral")
    total = a.value ** p + b.value ** p
    if total == 0:
        return NormResult.zero("spectral")
    value = total ** (1.0 / p)
    err = (a.value ** (p - 1) * a.error_estimate + b.value ** (p - 1) * b.error_estimate) / value ** (p - 1)
    return NormResult(value, err, "spectral")


# ---------------------------------------------------------------------------
# Double-integral seminorms

def _effective_radius(u: TestFunction, p: float) -> float:
    """Radius beyond which ``|u|^p`` is below ``e^-37`` of its peak (inf if slowly decaying)."""
    if math.isfinite(u.support_radius):
        return u.support_radius
    if u.family == "gaussian":
        return u.scale * (math.sqrt(2.0 * 37.0 / p) + 1.0)
    return math.inf


def _as_line_function(f: FunctionLike, p: float):
    """(values on R, increments, length scale, support interval or None, even about centre).

    For test functions the support is the effective one, so that
    Gaussian tails below rounding level are not integrated.
    """
    if isinstance(f, TestFunction):
        if f.n != 1:
            raise ValueError("expected a one-dimensional function")
        R = _effective_radius(f, p)
        support = (f.center - R, f.center + R) if math.isfinite(R) else None
        return f.at, f.increment, f.scale, support, True

    def g(x):
        return np.asarray(f(x), dtype=float)

    def incr(x, h):
        return g(x + h) - g(x)

    return g, incr, 1.0, None, False


def _robust(integrate, *args, accept: float = 1e-7, **kwargs) -> float:
    """Run an inner quadrature; accept a stalled one whose error is already small.

    Plain subtraction ``f(x+h) - f(x)`` of a generic callable carries rounding
    noise of relative size ``eps/h``, which can stall a tight tolerance.
    """
    try:
        return integrate(*args, **kwargs).value
    except IntegrationError as exc:
        part = exc.partial
        if part is not None and part.error_estimate <= accept * abs(part.value):
            return part.value
        raise


def _inner_difference(incr, h: float, p: float, domain: ConvexDomain | None,
                      scale: float, support, even_center: float | None, tol: float) -> float:
    """``G(h) = int |f(x+h) - f(x)|^p dx`` over ``{x, x+h in domain}``."""
    def integrand(x):
        return np.abs(incr(x, h)) ** p

    opts = dict(tol=tol, atol=0.0, max_panels=600)
    if h < 1e-6 * scale:
        # shifts this small carry weight O((h/scale)^(p-kappa)) <= 1e-6 in the
        # outer integral, so a noisy but bounded partial result is good enough
        opts["accept"] = 1.0
    if domain is None and even_center is not None:
        # radial symmetry about the centre: the integrand is even about centre - h/2
        lo = even_center - 0.5 * h
        if support is not None:
            hi = support[1]
            if hi <= lo:
                return 0.0
            return 2.0 * _robust(integrate_1d, integrand, lo, hi, **opts)
        return 2.0 * _robust(integrate_halfline, integrand, lo, scale=scale, **opts)
    if domain is None:
        lo, hi = -math.inf, math.inf
    elif domain.kind == "half-line":
        lo, hi = 0.0, math.inf
    else:
        lo, hi = -1.0, 1.0 - h
    if support is not None:
        lo = max(lo, support[0] - h)
        hi = min(hi, support[1])
    if hi <= lo:
        return 0.0
    if math.isinf(lo):
        raise ValueError("two-sided infinite inner integrals need a symmetric test function")
    return _split_at_sign_changes(integrand, lambda x: incr(x, h), lo, hi, scale, p, opts)


def _sign_changes(d, lo: float, hi: float, samples: int = 256) -> list[float]:
    x = np.linspace(lo, hi, samples)
    y = np.asarray(d(x), dtype=float)
    out = []
    for i in np.nonzero(np.sign(y[:-1]) * np.sign(y[1:]) < 0)[0]:
        out.append(brentq(lambda t: float(np.asarray(d(np.array([t])))[0]), x[i], x[i + 1], xtol=1e-14))
    return out


def _split_at_sign_changes(integrand, d, lo: float, hi: float, scale: float, p: float, opts) -> float:
    """Integrate ``|d|^p`` piecewise between the zeros of ``d``.

    Unless ``p`` is an even integer, ``|d|^p`` is not smooth where ``d`` changes
    sign, which ruins the convergence rate of Gauss-Kronrod panels.
    """
    scan_hi = hi if math.isfinite(hi) else lo + 40.0 * scale
    cuts = []
    if not (p == round(p) and round(p) % 2 == 0):
        cuts = [c for c in _sign_changes(d, lo, scan_hi) if lo < c < hi]
    edges = [lo] + cuts
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += _robust(integrate_1d, integrand, a, b, **opts)
    if math.isinf(hi):
        total += _robust(integrate_halfline, integrand, edges[-1], scale=scale, **opts)
    else:
        total += _robust(integrate_1d, integrand, edges[-1], hi, **opts)
    return total


def _double_integral_line(f: FunctionLike, kappa: float, p: float,
                          domain: ConvexDomain | None, tol: float) -> QuadResult:
    """``int int |f(x)-f(y)|^p / |x-y|^(1+kappa)`` over a 1D domain squared.

    Written as ``2 int_0^inf h^(-1-kappa) G(h) dh``.  The far part uses
    ``G(h) -> G_inf`` (the p-th power of the norm on the domain, twice on the
    whole line) so that only ``G - G_inf`` is integrated numerically.
    """
    g, incr, scale, support, even = _as_line_function(f, p)
    center = f.center if isinstance(f, TestFunction) else None
    even_center = center if even else None
    inner_tol = tol * 1e-2
    h0 = 0.1 * scale

    def G(h: float) -> float:
        return _inner_difference(incr, h, p, domain, scale, support, even_center, inner_tol)

    def norm_p(lo, hi):
        integrand = lambda x: np.abs(g(x)) ** p  # noqa: E731
        if support is not None:
            lo, hi = max(lo, support[0]), min(hi, support[1])
            if hi <= lo:
                return 0.0
        if math.isinf(hi):
            if math.isinf(lo):
                return 2.0 * integrate_halfline(integrand, center, tol=inner_tol, scale=scale, atol=0.0).value
            return integrate_halfline(integrand, lo, tol=inner_tol, scale=scale, atol=0.0).value
        return integrate_1d(integrand, lo, hi, tol=inner_tol, atol=0.0).value

    def weighted_G(hh: float, shift: float = 0.0) -> float:
        v = G(hh) - shift
        return 0.0 if v == 0.0 else hh ** (-1.0 - kappa) * v

    def near(hs):
        return np.array([weighted_G(float(hh)) for hh in np.atleast_1d(hs)])

    # test functions have cancellation-free increments, generic callables do not
    h_min = (1e-9 if isinstance(f, TestFunction) else 1e-6) * scale

    def near_integral(h_end: float) -> QuadResult:
        # (0, lo): G(h) = h^p (c0 + c1 h + ...) fitted at lo and 2 lo
        lo = min(h_min, 0.25 * h_end)
        r1 = G(lo) / lo ** p
        r2 = G(2.0 * lo) / (2.0 * lo) ** p
        c1 = (r2 - r1) / lo
        c0 = r1 - c1 * lo
        e = p - kappa
        correction = c1 * lo ** (e + 1.0) / (e + 1.0)
        head = c0 * lo ** e / e + correction
        # above lo in log h, where h^(-kappa) G(h) is smooth
        body = integrate_1d(lambda u: np.array([weighted_G(math.exp(v)) * math.exp(v) for v in np.atleast_1d(u)]),
                            math.log(lo), math.log(h_end), tol=tol, atol=0.0)
        err = body.error_estimate + abs(correction)
        return QuadResult(body.value + head, err, body.evaluations + 2)

    if domain is not None and domain.kind == "ball":
        h_end = 2.0
        near_res = near_integral(min(h0, h_end))
        far_res = integrate_1d(near, min(h0, h_end), h_end, tol=tol, atol=0.0) if h0 < h_end else QuadResult(0.0, 0.0, 1)
        total = near_res.value + far_res.value
        err = near_res.error_estimate + far_res.error_estimate
        return QuadResult(2.0 * total, 2.0 * err, near_res.evaluations + far_res.evaluations)

    if domain is None:
        g_inf = norm_p(-math.inf, math.inf) * (2.0 if even else 1.0)
        if not even:
            raise ValueError("whole-line seminorms need a radial test function")
    else:
        g_inf = norm_p(0.0, math.inf)

    near_res = near_integral(h0)

    def far(hs):
        return np.array([weighted_G(float(hh), g_inf) for hh in np.atleast_1d(hs)])

    far_atol = tol * abs(near_res.value)
    if support is not None:
        # beyond h_stop the two copies no longer overlap and G(h) = G_inf exactly
        h_stop = support[1] - support[0] if domain is None else support[1]
        if h_stop > h0:
            far_res = integrate_1d(far, h0, h_stop, tol=tol, atol=far_atol)
        else:
            far_res = QuadResult(0.0, 0.0, 1)
    else:
        far_res = integrate_halfline(far, h0, tol=tol, scale=scale, atol=far_atol)
    analytic = g_inf * h0 ** (-kappa) / kappa
    total = near_res.value + far_res.value + analytic
    err = near_res.error_estimate + far_res.error_estimate + abs(analytic) * 1e-13
    return QuadResult(2.0 * total, 2.0 * err, near_res.evaluations + far_res.evaluations)


def _qmc_box_halfwidth(u: TestFunction, p: float) -> float:
    X = _effective_radius(u, p)
    if math.isinf(X):
        raise ValueError(f"{u.name} decays too slowly for the QMC seminorm")
    return X


def _double_integral_qmc(u: TestFunction, kappa: float, p: float, domain: ConvexDomain | None,
                         budget: int, seed: int) -> QuadResult:
    """Monte Carlo form over ``(x, t, w)`` with ``y = x + t w``.

    The integrand is symmetric in (x, y), so only pairs with
    ``|y - c| >= |x - c|`` are sampled and the result doubled.  For a
    radially decreasing profile this confines ``x`` to a box around the
    centre ``c``.  The radial step uses ``t = T (v/(1-v))^m``, with ``m``
    chosen so the transformed integrand stays bounded at both ends.
    """
    n = u.n
    X = _qmc_box_halfwidth(u, p)
    c = np.zeros(n)
    c[0] = u.center
    lo = c - X
    hi = c + X
    if domain is not None:
        if domain.kind == "half-space":
            lo[0] = max(lo[0], 0.0)
        else:
            lo = np.maximum(lo, -1.0)
            hi = np.minimum(hi, 1.0)
        if np.any(hi <= lo):
            return QuadResult(0.0, 0.0, 1)
    T = u.scale
    m = max(1.0 / (p - kappa), 1.0 / kappa, 1.0)
    volume = float(np.prod(hi - lo))
    sphere = sphere_area(n)

    def integrand(v):
        x = lo + (hi - lo) * v[:, :n]
        w = v[:, n]
        w = np.clip(w, 1e-300, 1.0 - 1e-16)
        ratio = w / (1.0 - w)
        t = T * ratio ** m
        dt = T * m * ratio ** (m - 1.0) / (1.0 - w) ** 2
        if n == 2:
            ang = 2.0 * math.pi * v[:, n + 1]
            omega = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        else:
            mu = 2.0 * v[:, n + 1] - 1.0
            ang = 2.0 * math.pi * v[:, n + 2]
            sq = np.sqrt(np.maximum(0.0, 1.0 - mu * mu))
            omega = np.stack([mu, sq * np.cos(ang), sq * np.sin(ang)], axis=1)
        step = t[:, None] * omega
        y = x + step
        keep = np.sum((x - c) * omega, axis=1) >= -0.5 * t
        if domain is not None:
            keep &= domain.contains(x) & domain.contains(y)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            diff = np.abs(u.increment(x, step)) ** p
            val = 2.0 * volume * sphere * diff * t ** (-1.0 - kappa) * dt
        return np.where(keep & (diff > 0), val, 0.0)

    return integrate_qmc(integrand, 2 * n, [(0.0, 1.0)] * (2 * n), budget=budget, seed=seed)


def _double_integral(f, kappa: float, p: float, domain, tol, budget, seed, n) -> tuple[QuadResult, str]:
    if n == 1:
        return _double_integral_line(f, kappa, p, domain, tol), "radial-quadrature"
    if not isinstance(f, TestFunction):
        raise ValueError("multi-dimensional seminorms need a TestFunction")
    return _double_integral_qmc(f, kappa, p, domain, budget, seed), "qmc"


def _dimension_of(f: FunctionLike, domain: ConvexDomain | None) -> int:
    if isinstance(f, TestFunction):
        if domain is not None and domain.n != f.n:
            raise ValueError(f"domain dimension {domain.n} does not match function dimension {f.n}")
        return f.n
    return domain.n if domain is not None else 1


def _is_zero(f: FunctionLike) -> bool:
    return isinstance(f, TestFunction) and f.is_zero


def slobodetskii_norm(u: FunctionLike, s: float, p: float, domain: ConvexDomain | None = None,
                      tol: float = 1e-9, budget: int = 2**18, seed: int = 0) -> NormResult:
    """``(int int |u(x)-u(y)|^p / |x-y|^(n+sp))^(1/p)`` over the domain squared.

    n = 1 uses nested adaptive quadrature in ``(x, h = y - x)``; n = 2, 3
    use randomized QMC, and results whose error exceeds ``tol`` relative
    are flagged ``low_confidence``.
    """
    if not 0 < s < 1:
        raise ValueError(f"order s must lie in (0, 1), got {s!r}")
    if not p >= 1:
        raise ValueError(f"exponent p must be >= 1, got {p!r}")
    n = _dimension_of(u, domain)
    if _is_zero(u):
        return NormResult.zero("radial-quadrature" if n == 1 else "qmc")
    res, method = _double_integral(u, s * p, p, domain, tol, budget, seed, n)
    out = _root(res, p, method)
    if method == "qmc" and out.relative_error > max(tol, 1e-3):
        out = NormResult(out.value, out.error_estimate, method, out.evaluations, True)
    return out


def delta_seminorm(f: FunctionLike, p: float, domain: ConvexDomain, alpha: float,
                   tol: float = 1e-9, budget: int = 2**18, seed: int = 0) -> NormResult:
    """``(int int_{domain^2} |f(x)-f(y)|^p / |x-y|^(n+alpha))^(1/p)``."""
    if not 1 < alpha < p:
        raise ValueError(f"need 1 < alpha < p, got alpha={alpha!r}, p={p!r}")
    n = _dimension_of(f, domain)
    if _is_zero(f):
        return NormResult.zero("radial-quadrature" if n == 1 else "qmc")
    res, method = _double_integral(f, alpha, p, domain, tol, budget, seed, n)
    out = _root(res, p, method)
    if method == "qmc" and out.relative_error > max(tol, 1e-3):
        out = NormResult(out.value, out.error_estimate, method, out.evaluations, True)
    return out


# ---------------------------------------------------------------------------
# Boundary-weighted L_p

def _boundary_power(g: Function1D, scale: float) -> float | None:
    """Local power ``-m`` of ``g(d) ~ d^m`` as ``d -> 0+``; None when g vanishes there."""
    d1, d2 = 1e-9 * scale, 1e-7 * scale
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        g1 = float(np.asarray(g(np.array([d1])))[0])
        g2 = float(np.asarray(g(np.array([d2])))[0])
    if g1 == 0.0 or g2 == 0.0 or not (math.isfinite(g1) and math.isfinite(g2)):
        if g1 == 0.0 and g2 == 0.0:
            return None
        return math.inf if not math.isfinite(g1) else None
    return -math.log(g2 / g1) / math.log(d2 / d1)


def _weighted_distance_integral(g: Function1D, d_max: float, scale: float, tol: float) -> QuadResult | None:
    """``int_0^{d_max} g(d) dd`` for ``g`` possibly singular at 0; None means divergent."""
    power = _boundary_power(g, scale)
    if power is not None and power >= 1.0 - 1e-6:
        return None
    hint = (0.0, power) if power is not None and power > 1e-3 else None
    if math.isinf(d_max):
        split = scale
        near = integrate_1d(g, 0.0, split, tol=tol, singularity=hint, atol=0.0)
        far = integrate_halfline(g, split, tol=tol, scale=scale, atol=tol * abs(near.value))
        return QuadResult(near.value + far.value, near.error_estimate + far.error_estimate,
                          near.evaluations + far.evaluations)
    return integrate_1d(g, 0.0, d_max, tol=tol, singularity=hint, atol=0.0)


def weighted_lp_norm(f: FunctionLike, p: float, domain: ConvexDomain, alpha: float,
                     tol: float = 1e-11) -> NormResult:
    """``(int_domain |f|^p / dist(x, complement)^alpha dx)^(1/p)``."""
    if not p >= 1:
        raise ValueError("exponent p must be >= 1")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    n = _dimension_of(f, domain)
    if _is_zero(f):
        return NormResult.zero("radial-quadrature")
    if n == 1:
        g, _, scale, support, _ = _as_line_function(f, p)
        if domain.kind == "half-line":
            if support is not None and support[0] > 0:
                res = integrate_1d(lambda x: np.abs(g(x)) ** p * x ** (-alpha),
                                   support[0], support[1], tol=tol, atol=0.0)
            else:
                upper = support[1] if support is not None else math.inf
                res = _weighted_distance_integral(
                    lambda d: np.abs(g(d)) ** p * d ** (-alpha), upper, scale, tol)
        else:
            left = _weighted_distance_integral(
                lambda d: np.abs(g(-1.0 + d)) ** p * d ** (-alpha), 1.0, 1.0, tol)
            right = _weighted_distance_integral(
                lambda d: np.abs(g(1.0 - d)) ** p * d ** (-alpha), 1.0, 1.0, tol)
            if left is None or right is None:
                res = None
            else:
                res = QuadResult(left.value + right.value, left.error_estimate + right.error_estimate,
                                 left.evaluations + right.evaluations)
        if res is None:
            return NormResult.infinite("radial-quadrature")
        return _root(res, p, "radial-quadrature")

    if not isinstance(f, TestFunction):
        raise ValueError("multi-dimensional weighted norms need a TestFunction")
    u = f
    inner_tol = tol * 1e-1
    if domain.kind == "half-space":
        section = sphere_area(n - 1)
        R = u.support_radius

        def slab(d):
            """Integral of |u|^p over the hyperplane x_1 = d."""
            off = d - u.center
            if math.isfinite(R):
                if abs(off) >= R:
                    return 0.0
                top = math.sqrt(R * R - off * off)
                return section * integrate_1d(
                    lambda rho: np.abs(evaluate(u, np.sqrt(off * off + rho * rho))) ** p * rho ** (n - 2),
                    0.0, top, tol=inner_tol, atol=0.0).value
            return section * integrate_halfline(
                lambda rho: np.abs(evaluate(u, np.sqrt(off * off + rho * rho))) ** p * rho ** (n - 2),
                0.0, tol=inner_tol, scale=u.scale, atol=0.0).value

        def g(ds):
            return np.array([slab(float(d)) * d ** (-alpha) for d in np.atleast_1d(ds)])

        if math.isfinite(R) and u.center - R > 0:
            res = integrate_1d(g, u.center - R, u.center + R, tol=tol, atol=0.0)
        else:
            upper = u.center + R if math.isfinite(R) else math.inf
            res = _weighted_distance_integral(g, upper, u.scale, tol)
    else:
        # unit ball; u is radial about (center, 0, ...)
        def shell(r):
            """Integral of |u|^p over the sphere of radius r about the origin."""
            c = u.center

            def polar(mu):
                dist = np.sqrt(np.maximum(r * r + c * c - 2.0 * r * c * mu, 0.0))
                return np.abs(evaluate(u, dist)) ** p

            if n == 2:
                val = 2.0 * integrate_1d(lambda th: polar(np.cos(th)), 0.0, math.pi,
                                         tol=inner_tol, atol=0.0).value
            else:
                val = 2.0 * math.pi * integrate_1d(polar, -1.0, 1.0, tol=inner_tol, atol=0.0).value
            return val * r ** (n - 1)

        def g(ds):
            return np.array([shell(1.0 - float(d)) * d ** (-alpha) for d in np.atleast_1d(ds)])

        res = _weighted_distance_integral(g, 1.0, 1.0, tol)
    if res is None:
        return NormResult.infinite("radial-quadrature")
    return _root(res, p, "radial-quadrature")
