"""Embedding constants, exponent maps and the boundary-weight integral L_alpha(p).

All Gamma-ratio expressions are evaluated through ``log_gamma`` so that
factors such as ``Gamma(p+1)`` stay finite for large ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .numerics import QuadResult, integrate_1d, integrate_halfline, log_gamma, sphere_area

__all__ = [
    "sharp_constant_K",
    "K_asymptote",
    "conformal_sharp_constant",
    "sobolev_q",
    "inverse_p",
    "conformal_pair",
    "ExponentPair",
    "L_alpha",
    "case_A_asymptote",
    "case_B_asymptote",
    "CaseCBounds",
    "case_C_bounds",
    "D_alpha_n",
    "g_alpha_n",
    "Z_bounds",
    "z_attainment_quadrature",
    "EmpiricalFit",
    "empirical_c_alpha",
]


def _check_order(n: int, s: float):
    if int(n) != n or n < 1:
        raise ValueError(f"dimension must be an integer >= 1, got {n!r}")
    if not 0 < s < n:
        raise ValueError(f"order s must lie in (0, n) = (0, {n}), got {s!r}")


def _log_K(n: int, s: float) -> float:
    return (0.5 * s * math.log(math.pi)
            + log_gamma(0.5 * (n - s)) - log_gamma(0.5 * (n + s))
            + (s / n) * (log_gamma(float(n)) - log_gamma(0.5 * n)))


def sharp_constant_K(n: int, s: float) -> float:
    """``pi^(s/2) Gamma((n-s)/2)/Gamma((n+s)/2) (Gamma(n)/Gamma(n/2))^(s/n)``."""
    _check_order(n, s)
    return math.exp(_log_K(n, s))


def K_asymptote(n: int, s: float) -> float:
    """Leading behaviour ``omega_n / (n - s)`` of K as ``s -> n``."""
    _check_order(n, s)
    return sphere_area(n) / (n - s)


def conformal_sharp_constant(n: int, s: float) -> float:
    """Best constant of ``|u|_q <= C |(-Delta)^(s/2) u|_p`` at ``p = 2n/(n+s)``.

    This is ``K(n, s) (2 pi)^-s``.  K itself is the sharp value when the
    Fourier transform carries ``2 pi`` in its exponent; with the unweighted
    kernel ``exp(-i x.xi)`` used throughout this package the multiplier is
    the genuine ``|xi|^s`` and the factor ``(2 pi)^-s`` appears.  Conformal
    bubbles ``(1+|x|^2)^(-(n-s)/2)`` attain it.
    """
    _check_order(n, s)
    return math.exp(_log_K(n, s) - s * math.log(2.0 * math.pi))


# ---------------------------------------------------------------------------
# Exponent maps

def sobolev_q(p: float, n: int, s: float) -> float:
    """``q = p n / (n - s p)`` for ``1 < p < n/s``."""
    _check_order(n, s)
    if not p > 1:
        raise ValueError(f"need p > 1, got {p!r}")
    if not s * p < n:
        raise ValueError(f"need s*p < n, got s*p = {s * p!r} with n = {n}")
    return p * n / (n - s * p)


def inverse_p(q: float, n: int, s: float) -> float:
    """``p = q n / (n + q s)`` for ``q > n/(n - s)``."""
    _check_order(n, s)
    if not q > n / (n - s):
        raise ValueError(f"need q > n/(n-s) = {n / (n - s)!r}, got {q!r}")
    return q * n / (n + q * s)


def conformal_pair(n: int, s: float) -> tuple[float, float]:
    """``(2n/(n+s), 2n/(n-s))``."""
    _check_order(n, s)
    return 2.0 * n / (n + s), 2.0 * n / (n - s)


@dataclass(frozen=True)
class ExponentPair:
    """A Sobolev-conjugate pair; build with :meth:`from_p` or :meth:`from_q`."""

    p: float
    q: float
    n: int
    s: float

    def __post_init__(self):
        _check_order(self.n, self.s)
        if not 1 < self.p < self.n / self.s:
            raise ValueError(f"need 1 < p < n/s, got p={self.p!r}")
        expected = sobolev_q(self.p, self.n, self.s)
        if not math.isclose(self.q, expected, rel_tol=1e-12):
            raise ValueError(f"q={self.q!r} is not the conjugate of p={self.p!r} (expected {expected!r})")

    @classmethod
    def from_p(cls, p: float, n: int, s: float) -> "ExponentPair":
        return cls(p, sobolev_q(p, n, s), n, s)

    @classmethod
    def from_q(cls, q: float, n: int, s: float) -> "ExponentPair":
        p = inverse_p(q, n, s)
        return cls(p, sobolev_q(p, n, s), n, s)

    @classmethod
    def conformal(cls, n: int, s: float) -> "ExponentPair":
        return cls.from_p(conformal_pair(n, s)[0], n, s)


# ---------------------------------------------------------------------------
# L_alpha(p) = int_0^1 |1 - r^((alpha-1)/p)|^p / (1-r)^(1+alpha) dr

def _check_alpha_p(alpha: float, p: float):
    if not alpha > 1:
        raise ValueError(f"need alpha > 1, got {alpha!r}")
    if not p > alpha:
        raise ValueError(f"need p > alpha, got p={p!r}, alpha={alpha!r}")


def _log_h(d: np.ndarray, c: float) -> np.ndarray:
    """``log h(d)`` with ``h(d) = (1 - (1-d)^c) / (c d)``, accurate as ``d -> 0``."""
    d = np.asarray(d, dtype=float)
    out = np.empty_like(d)
    small = d < 1e-3
    if np.any(small):
        ds = d[small]
        # binomial series: h = sum_k (-1)^k binom(c-1, k) d^k / (k+1)
        term = np.ones_like(ds)
        acc = np.zeros_like(ds)
        coef = 1.0
        for k in range(8):
            acc += coef * term / (k + 1)
            coef *= -(c - 1.0 - k) / (k + 1)
            term = term * ds
        out[small] = np.log1p(acc - 1.0)
    big = ~small
    if np.any(big):
        db = d[big]
        out[big] = np.log(-np.expm1(c * np.log1p(-db))) - np.log(c * db)
    return out


@lru_cache(maxsize=4096)
def L_alpha(alpha: float, p: float, tol: float = 1e-11) -> QuadResult:
    """Quadrature of ``L_alpha(p)``.

    The range is split at r = 1/2.  Near r = 1 the integrand equals
    ``c^p d^(p-1-alpha) h(d)^p`` (``d = 1-r``, ``c = (alpha-1)/p``,
    ``h -> 1``); the pure power is integrated exactly and only
    ``(h^p - 1) d^(p-1-alpha)`` numerically, which keeps full accuracy as
    ``p -> alpha``.  On (0, 1/2) the substitution ``r = e^-t`` gives a
    smooth integrand on ``(ln 2, inf)``.
    """
    _check_alpha_p(alpha, p)
    c = (alpha - 1.0) / p
    gamma_exp = p - 1.0 - alpha
    log_cp = p * math.log(c)

    def near(d):
        d = np.asarray(d, dtype=float)
        with np.errstate(divide="ignore"):
            return np.expm1(p * _log_h(d, c)) * d ** gamma_exp

    near_res = integrate_1d(near, 0.0, 0.5, tol=tol, atol=0.0)
    exact = 0.5 ** (gamma_exp + 1.0) / (gamma_exp + 1.0)
    near_val = math.exp(log_cp) * (exact + near_res.value)
    near_err = math.exp(log_cp) * near_res.error_estimate

    def far(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", under="ignore"):
            logv = p * np.log(-np.expm1(-c * t)) - (1.0 + alpha) * np.log(-np.expm1(-t)) - t
        return np.exp(logv)

    far_res = integrate_halfline(far, math.log(2.0), tol=tol, scale=max(1.0, p), atol=0.0)
    value = near_val + far_res.value
    return QuadResult(value, near_err + far_res.error_estimate,
                      near_res.evaluations + far_res.evaluations)


def _log_prefactor(alpha: float, p: float) -> float:
    return p * (math.log(alpha - 1.0) - math.log(p))


def case_A_asymptote(alpha: float, p: float) -> float:
    """``((alpha-1)/p)^p / (p - alpha)``, the blow-up as ``p -> alpha+``."""
    _check_alpha_p(alpha, p)
    return math.exp(_log_prefactor(alpha, p) - math.log(p - alpha))


def case_B_asymptote(alpha: float, p: float) -> float:
    """``((alpha-1)/p)^p Gamma(p+1)``, the large-p form."""
    _check_alpha_p(alpha, p)
    return math.exp(_log_prefactor(alpha, p) + log_gamma(p + 1.0))


@dataclass(frozen=True)
class CaseCBounds:
    """Two-sided bracket of ``L_alpha(p)`` split at ``r = delta``.

    ``lower_shape`` omits the unspecified factor ``C(alpha)^p`` of the
    lower bound, so only its positivity is meaningful.
    """

    delta: float
    upper: float
    lower_shape: float


def case_C_bounds(alpha: float, p: float, delta: float = 0.5) -> CaseCBounds:
    _check_alpha_p(alpha, p)
    if not 0 < delta < 1:
        raise ValueError(f"split point must lie in (0, 1), got {delta!r}")
    pref = _log_prefactor(alpha, p)
    first = log_gamma(p + 1.0) - (1.0 + alpha) * math.log1p(-delta)
    second = (p * math.log(abs(math.log(delta))) - p * math.log1p(-delta)
              - math.log(p - alpha))
    upper = math.exp(pref + first) + math.exp(pref + second)
    lower = math.exp(pref + log_gamma(p + 1.0)) + math.exp(pref - math.log(p - alpha))
    return CaseCBounds(delta, upper, lower)


def _log_D_prefactor(alpha: float, n: int) -> float:
    return (math.log(2.0) + 0.5 * (n - 1) * math.log(math.pi)
            + log_gamma(0.5 * (1.0 + alpha)) - log_gamma(0.5 * (n + alpha)))


def D_alpha_n(alpha: float, n: int, p: float, tol: float = 1e-11) -> float:
    """``2 pi^((n-1)/2) Gamma((1+alpha)/2) / Gamma((n+alpha)/2) * L_alpha(p)``."""
    if int(n) != n or n < 1:
        raise ValueError("dimension must be an integer >= 1")
    return math.exp(_log_D_prefactor(alpha, n)) * L_alpha(alpha, p, tol).value


def g_alpha_n(alpha: float, n: int, p: float, tol: float = 1e-11) -> float:
    """``D_alpha_n(p)^(-1/p)``."""
    return D_alpha_n(alpha, n, p, tol) ** (-1.0 / p)


# ---------------------------------------------------------------------------
# Fractional capacity-type bounds

def Z_bounds(n: int, s: float, p: float) -> tuple[float, float]:
    """``(sp)^-1 omega_n^(1+sp/n) n^(-sp/n)`` times ``(1/n, 1)``."""
    if int(n) != n or n < 1:
        raise ValueError("dimension must be an integer >= 1")
    if not 0 < s < 1:
        raise ValueError(f"order s must lie in (0, 1), got {s!r}")
    if not p >= 1:
        raise ValueError(f"need p >= 1, got {p!r}")
    sp = s * p
    omega = sphere_area(n)
    log_upper = -math.log(sp) + (1.0 + sp / n) * math.log(omega) - (sp / n) * math.log(n)
    upper = math.exp(log_upper)
    return upper / n, upper


def z_attainment_quadrature(n: int, s: float, p: float, tol: float = 1e-12) -> QuadResult:
    """``|B_1|^(sp/n) int_{|y| >= 1} |y|^-(n+sp) dy`` by radial quadrature.

    With ``r = 1/t`` the radial integral becomes ``omega_n int_0^1 t^(sp-1) dt``.
    """
    sp = s * p
    omega = sphere_area(n)
    hint = (0.0, 1.0 - sp) if sp < 1 else None
    res = integrate_1d(lambda t: omega * t ** (sp - 1.0), 0.0, 1.0, tol=tol, singularity=hint, atol=0.0)
    factor = (omega / n) ** (sp / n)
    return QuadResult(res.value * factor, res.error_estimate * factor, res.evaluations)


@dataclass(frozen=True)
class EmpiricalFit:
    """An empirically fitted constant; ``label`` is always ``"empirical"``."""

    value: float
    argmin_p: float
    grid: tuple[float, ...]
    label: str = "empirical"


def empirical_c_alpha(alpha: float, p_grid: Iterable[float]) -> EmpiricalFit:
    """``inf_p (L_alpha(p) / lower_shape)^(1/p)`` over a finite grid (a fit, not a proof)."""
    grid = tuple(float(p) for p in p_grid)
    if not grid:
        raise ValueError("empty p-grid")
    best, arg = math.inf, grid[0]
    for p in grid:
        ratio = L_alpha(alpha, p).value / case_C_bounds(alpha, p).lower_shape
        val = ratio ** (1.0 / p)
        if val < best:
            best, arg = val, p
    return EmpiricalFit(best, arg, grid)
