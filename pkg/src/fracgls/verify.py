"""Inequality checks with explicit slack and confidence.

Every check yields :class:`SlackRecord` objects holding both sides of the
inequality.  A record counts as violated only when the slack is negative
by more than three times its combined numerical error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .constants import (
    conformal_pair,
    conformal_sharp_constant,
    g_alpha_n,
    inverse_p,
    sharp_constant_K,
    sobolev_q,
)
from .glspaces import (
    GNormResult,
    PsiFunction,
    SweepGrid,
    TauFunction,
    dgl_norm,
    golden_section,
    gls_norm,
    lambda_transform,
    nu_transform,
    sgl_norm,
    theta_transform,
)
from .norms import ConvexDomain, FunctionLike, delta_seminorm, frac_sobolev_norm, lp_norm, weighted_lp_norm
from .testfuncs import TestFunction, bubble, dilate, gaussian

__all__ = [
    "SlackRecord",
    "VIOLATION_FACTOR",
    "check_sobolev",
    "dilation_covariance",
    "relative_slack_drift",
    "check_gl_sobolev",
    "check_dgl_sobolev",
    "check_dgl_lambda",
    "check_weighted",
    "check_gl_weighted",
    "ProbeReport",
    "sharpness_probe",
    "sort_records",
]

VIOLATION_FACTOR = 3.0


@dataclass(frozen=True)
class SlackRecord:
    """One inequality ``lhs <= rhs`` with ``slack = rhs - lhs``.

    ``asserted`` is False for configurations where the inequality is only
    measured (e.g. the Sobolev bound away from the conformal exponent).
    """

    inequality: str
    coords: dict
    lhs: float
    rhs: float
    constant: float
    confidence: float
    asserted: bool = True
    note: str = ""
    slack: float = field(init=False)
    relative_slack: float = field(init=False)

    def __post_init__(self):
        if math.isinf(self.lhs) and math.isinf(self.rhs):
            slack = 0.0
        else:
            slack = self.rhs - self.lhs
        object.__setattr__(self, "slack", slack)
        if self.rhs == 0 or math.isinf(self.rhs):
            rel = 0.0 if slack == 0 else (math.copysign(math.inf, slack) if self.rhs == 0 else 1.0)
        else:
            rel = slack / self.rhs
        object.__setattr__(self, "relative_slack", rel)

    @property
    def violated(self) -> bool:
        return self.slack < -VIOLATION_FACTOR * self.confidence

    @property
    def status(self) -> str:
        if not self.asserted:
            return "measured"
        return "violated" if self.violated else "ok"

    def sort_key(self):
        c = self.coords
        return (self.inequality,) + tuple(str(c.get(k, "")) for k in
                                          ("family", "n", "s", "p", "q", "alpha", "dilation"))


def sort_records(records: Iterable[SlackRecord]) -> list[SlackRecord]:
    return sorted(records, key=lambda r: r.sort_key())


def _family(u) -> str:
    return u.name if isinstance(u, TestFunction) else getattr(u, "__name__", "callable")


def _resolve_p(p, n: int, s: float) -> float:
    if isinstance(p, str):
        if p != "conformal":
            raise ValueError(f"unknown exponent keyword {p!r}")
        return conformal_pair(n, s)[0]
    return float(p)


def _check_conditions(n: int, s: float, p: float):
    if not 0 < s < n:
        raise ValueError(f"need 0 < s < n, got s={s!r}, n={n}")
    if not 1 < p < n / s:
        raise ValueError(f"need 1 < p < n/s = {n / s:g}, got p={p!r}")


def _is_conformal(n: int, s: float, p: float) -> bool:
    return abs(p - conformal_pair(n, s)[0]) <= 1e-12 * p


def check_sobolev(u: TestFunction, n: int, s: float, p, q: float | None = None) -> SlackRecord:
    """``|u|_q <= K(n, s) ||u||_{W_p^s}`` with ``q`` the Sobolev conjugate of ``p``.

    Passing a different ``q`` is allowed (for negative controls) and marks the
    record as measured only.
    """
    if u.n != n:
        raise ValueError(f"test function lives in n={u.n}, not n={n}")
    conformal = p == "conformal"
    p = _resolve_p(p, n, s)
    _check_conditions(n, s, p)
    q_true = conformal_pair(n, s)[1] if conformal else sobolev_q(p, n, s)
    q_used = q_true if q is None else float(q)
    K = sharp_constant_K(n, s)
    left = lp_norm(u, q_used)
    right = frac_sobolev_norm(u, s, p)
    conf = left.error_estimate + K * right.error_estimate
    asserted = _is_conformal(n, s, p) and q is None
    coords = dict(n=n, s=s, p=p, q=q_used, family=u.name, dilation=u.dilation)
    return SlackRecord("sobolev", coords, left.value, K * right.value, K, conf, asserted)


def dilation_covariance(u: TestFunction, n: int, s: float, p,
                        lambdas: Sequence[float] = (0.5, 2.0, 4.0),
                        q: float | None = None) -> list[SlackRecord]:
    """Sobolev records for ``u`` and its dilations; relative slack should not move."""
    out = [check_sobolev(u, n, s, p, q)]
    for lam in lambdas:
        out.append(check_sobolev(dilate(u, lam), n, s, p, q))
    return out


def relative_slack_drift(records: Sequence[SlackRecord]) -> float:
    vals = [r.relative_slack for r in records]
    return max(vals) - min(vals)


def _g_record(tag: str, coords: dict, left: GNormResult, right: GNormResult,
              constant: float, asserted: bool = True, note: str = "") -> SlackRecord:
    conf = left.error_estimate + constant * right.error_estimate
    flags = []
    if left.possibly_infinite:
        flags.append("lhs possibly infinite at endpoint")
    if right.possibly_infinite:
        flags.append("rhs possibly infinite at endpoint")
    if note:
        flags.append(note)
    return SlackRecord(tag, coords, left.value, constant * right.value, constant, conf,
                       asserted, "; ".join(flags))


def check_gl_sobolev(u: TestFunction, psi: PsiFunction, n: int, s: float,
                    q_points: Sequence[float] = (), p_grid: SweepGrid | None = None,
                    q_grid: SweepGrid | None = None) -> list[SlackRecord]:
    """Grand-Lebesgue form of the Sobolev embedding plus its pointwise chain.

    The first record is ``||u||_{G nu} <= K ||u||_{SGL psi}``; one further
    record per requested ``q`` checks ``|u|_q <= K psi(p(q)) ||u||_{SGL psi}``.
    """
    if u.n != n:
        raise ValueError(f"test function lives in n={u.n}, not n={n}")
    K = sharp_constant_K(n, s)
    nu = nu_transform(psi, n, s)
    right = sgl_norm(u, psi, s, p_grid)
    left = gls_norm(lambda q: lp_norm(u, q), nu, q_grid)
    coords = dict(n=n, s=s, family=u.name, dilation=u.dilation, psi=psi.label)
    if psi.kind == "degenerate":
        coords.update(p=psi.point, q=nu.point)
    records = [_g_record("gl-sobolev", coords, left, right, K)]
    for q in q_points:
        p = inverse_p(q, n, s)
        w = psi(p)
        lq = lp_norm(u, q)
        rhs = K * w * right.value
        conf = lq.error_estimate + K * w * right.error_estimate
        records.append(SlackRecord("gl-sobolev-chain", dict(coords, q=q, p=p), lq.value, rhs,
                                   K * w, conf))
    return records


def check_dgl_sobolev(u: TestFunction, tau: TauFunction, n: int, q: float,
                    p_grid: SweepGrid | None = None, s_points: Sequence[float] | None = None) -> SlackRecord:
    """``|u|_q <= lambda(q) |||u|||_{DGL tau}`` with ``lambda(q) = inf_s K tau(p(q,s), s)``."""
    lam, where = lambda_transform(tau, n, [q])
    lam_q = lam(q)
    if math.isinf(lam_q):
        raise ValueError(f"q={q:g} admits no order in the tau range")
    d = dgl_norm(u, tau, p_grid, s_points)
    left = lp_norm(u, q)
    coords = dict(n=n, q=q, s=where[q], family=u.name, dilation=u.dilation, tau=tau.label)
    conf = left.error_estimate + lam_q * d.error_estimate
    note = "rhs possibly infinite at endpoint" if d.possibly_infinite else ""
    return SlackRecord("dgl-sobolev", coords, left.value, lam_q * d.value, lam_q, conf, True, note)


def check_dgl_lambda(u: TestFunction, tau: TauFunction, n: int, q_points: Sequence[float],
                      p_grid: SweepGrid | None = None, s_points: Sequence[float] | None = None) -> SlackRecord:
    """``||u||_{G lambda} <= |||u|||_{DGL tau}`` with ``lambda`` tabulated on ``q_points``."""
    lam, _ = lambda_transform(tau, n, q_points)
    d = dgl_norm(u, tau, p_grid, s_points)
    if lam.kind == "degenerate":
        left = gls_norm(lambda q: lp_norm(u, q), lam)
    else:
        left = gls_norm(lambda q: lp_norm(u, q), lam,
                        SweepGrid(lam.support[0], lam.support[1], count=max(4, len(lam.nodes))))
    coords = dict(n=n, family=u.name, dilation=u.dilation, tau=tau.label)
    return _g_record("dgl-lambda", coords, left, d, 1.0, note="lambda tabulated (approximate)")


def _dim(f: FunctionLike, domain: ConvexDomain) -> int:
    return f.n if isinstance(f, TestFunction) else domain.n


def check_weighted(f: FunctionLike, domain: ConvexDomain, alpha: float, p: float,
                   budget: int = 2**18, seed: int = 0) -> SlackRecord:
    """``|f|_{L_p(mu_alpha)} <= g_{alpha,n}(p) |delta f|_{L_p(nu_alpha)}``."""
    if not 1 < alpha < p:
        raise ValueError(f"need 1 < alpha < p, got alpha={alpha!r}, p={p!r}")
    n = _dim(f, domain)
    g = g_alpha_n(alpha, n, p)
    left = weighted_lp_norm(f, p, domain, alpha)
    right = delta_seminorm(f, p, domain, alpha, budget=budget, seed=seed)
    conf = left.error_estimate + g * right.error_estimate
    coords = dict(n=n, p=p, alpha=alpha, family=_family(f), domain=domain.kind)
    note = "low-confidence seminorm" if right.low_confidence else ""
    return SlackRecord("weighted", coords, left.value, g * right.value, g, conf, True, note)


def check_gl_weighted(f: FunctionLike, psi: PsiFunction, domain: ConvexDomain, alpha: float,
                    grid: SweepGrid | None = None, budget: int = 2**18, seed: int = 0) -> SlackRecord:
    """``||f||_{G theta}(mu_alpha) <= ||delta f||_{G psi}(nu_alpha)`` with ``theta = g psi``."""
    n = _dim(f, domain)
    theta = theta_transform(psi, alpha, n)
    left = gls_norm(lambda p: weighted_lp_norm(f, p, domain, alpha), theta, grid)
    right = gls_norm(lambda p: delta_seminorm(f, p, domain, alpha, budget=budget, seed=seed), psi, grid)
    coords = dict(n=n, alpha=alpha, family=_family(f), domain=domain.kind, psi=psi.label)
    if psi.kind == "degenerate":
        coords["p"] = psi.point
    return _g_record("gl-weighted", coords, left, right, 1.0)


# ---------------------------------------------------------------------------
# Sharpness probe

@dataclass(frozen=True)
class ProbeReport:
    """Best ratio ``|u|_q / ||u||_{W_p^s}`` found over a probe family.

    ``ratio_over_K`` compares it with K(n, s); ``ratio_over_sharp`` with
    :func:`conformal_sharp_constant`, the attainable value for the
    transform convention in use.
    """

    family: str
    n: int
    s: float
    p: float
    q: float
    max_ratio: float
    argmax: dict
    K: float
    ratio_over_K: float
    ratio_over_sharp: float
    confidence: float
    recheck_ratio: float
    dilation_ratio: float
    excluded: tuple = ()
    samples: tuple = ()

    @property
    def within_K(self) -> bool:
        return self.ratio_over_K <= 1.0 + VIOLATION_FACTOR * self.confidence / self.K


def _ratio(u: TestFunction, s: float, p: float, q: float, tol: float = 1e-10):
    a = lp_norm(u, q)
    b = frac_sobolev_norm(u, s, p, tol)
    r = a.value / b.value
    err = r * (a.relative_error + b.relative_error)
    return r, err


def _log_singular_bubble(n: int, beta: float, margin: float = 0.02) -> bool:
    nu = 0.5 * (n - beta)
    return abs(nu - round(nu)) < margin


def sharpness_probe(n: int, s: float, probe: str = "conformal-bubble", p=None,
                    count: int = 16, refine_iterations: int = 20) -> ProbeReport:
    """Maximize the Sobolev ratio over the bubble exponent or the Gaussian width.

    For bubbles the exponent ranges over ``((n - s)/2, 3n)`` (the lower end is
    where ``|u|_q`` or the W-norm stops being finite); exponents whose Fourier
    expansion is logarithmic are skipped and listed in ``excluded``.
    """
    p = _resolve_p(p if p is not None else "conformal", n, s)
    _check_conditions(n, s, p)
    q = sobolev_q(p, n, s)
    K = sharp_constant_K(n, s)
    excluded = []
    samples = []

    if probe == "conformal-bubble":
        beta_min = max(n / q, n / p - s)
        lo, hi = beta_min + 0.02 * (1 + beta_min), 3.0 * n

        def score(beta):
            if _log_singular_bubble(n, beta):
                excluded.append(beta)
                return -math.inf
            r, _ = _ratio(bubble(n, beta), s, p, q)
            samples.append((beta, r))
            return r

        grid = [lo + (hi - lo) * i / (count - 1) for i in range(count)]
        vals = [score(b) for b in grid]
        i = max(range(count), key=lambda j: vals[j])
        a = grid[max(i - 1, 0)]
        b = grid[min(i + 1, count - 1)]
        best_beta, best = golden_section(score, a, b, refine_iterations)
        if vals[i] > best:
            best_beta, best = grid[i], vals[i]
        make = lambda lam=1.0: dilate(bubble(n, best_beta), lam)  # noqa: E731
        argmax = {"beta": best_beta, "dilation": 1.0}
    elif probe == "gaussian-scale-family":
        def score(sig):
            r, _ = _ratio(gaussian(n, sig), s, p, q)
            samples.append((sig, r))
            return r

        sigmas = [2.0 ** k for k in range(-3, 4)]
        vals = [score(x) for x in sigmas]
        i = max(range(len(sigmas)), key=lambda j: vals[j])
        best_sigma, best = sigmas[i], vals[i]
        make = lambda lam=1.0: dilate(gaussian(n, best_sigma), lam)  # noqa: E731
        argmax = {"sigma": best_sigma, "dilation": 1.0}
    else:
        raise ValueError(f"unknown probe family {probe!r}")

    best_ratio, conf = _ratio(make(), s, p, q)
    recheck, _ = _ratio(make(), s, p, q, tol=1e-12)
    dil, _ = _ratio(make(2.0), s, p, q)
    conf = max(conf, abs(recheck - best_ratio))
    return ProbeReport(probe, n, s, p, q, best_ratio, argmax, K, best_ratio / K,
                       best_ratio / conformal_sharp_constant(n, s), conf, recheck, dil,
                       tuple(excluded), tuple(sorted(samples)))
