"""Grand Lebesgue norms: suprema of ``|f|_p / psi(p)`` over open exponent intervals.

Suprema (and infima) over open intervals are approximated by a sweep over
an interior grid, golden-section refinement around the best grid point,
and probes at shrinking distances ``eps`` from each open endpoint.  The
probe values are reported as a trend, so a supremum that is still growing
at the closest probe is flagged instead of being silently truncated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .constants import g_alpha_n, inverse_p, sharp_constant_K, sobolev_q
from .norms import NormResult, frac_sobolev_norm, lp_norm
from .testfuncs import TestFunction

__all__ = [
    "PsiFunction",
    "TauFunction",
    "SweepGrid",
    "GNormResult",
    "InfResult",
    "gls_norm",
    "natural_psi",
    "sgl_norm",
    "nu_transform",
    "dgl_norm",
    "lambda_transform",
    "zeta_of_u",
    "theta_transform",
    "golden_section",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_PSI_KINDS = ("analytic", "degenerate", "natural", "tabulated")


@dataclass(frozen=True, eq=False)
class PsiFunction:
    """Positive weight on an open exponent interval ``(A, B)``, ``+inf`` outside.

    ``kind == "degenerate"`` is the single-point weight at ``point``;
    tabulated weights also accept their two end nodes.
    """

    support: tuple[float, float]
    func: Callable[[float], float]
    kind: str = "analytic"
    label: str = ""
    point: float | None = None
    nodes: tuple[float, ...] = ()

    def __post_init__(self):
        A, B = self.support
        if self.kind not in _PSI_KINDS:
            raise ValueError(f"unknown psi kind {self.kind!r}")
        if self.kind == "degenerate":
            if self.point is None or not self.point >= 1:
                raise ValueError("degenerate psi needs a point r >= 1")
        elif not (1.0 <= A < B):
            raise ValueError(f"psi support must satisfy 1 <= A < B, got ({A!r}, {B!r})")

    def inside(self, p: float) -> bool:
        if self.kind == "degenerate":
            return p == self.point
        A, B = self.support
        if self.kind == "tabulated":
            return A <= p <= B
        return A < p < B

    def __call__(self, p: float) -> float:
        if not self.inside(p):
            return math.inf
        val = float(self.func(p))
        if not val > 0:
            raise ValueError(f"psi({p!r}) = {val!r} is not positive")
        return val

    def scaled(self, factor: float) -> "PsiFunction":
        if not factor > 0:
            raise ValueError("scale factor must be positive")
        return PsiFunction(self.support, lambda p: factor * self.func(p), self.kind,
                           f"{factor:g}*{self.label}", self.point, self.nodes)

    @property
    def approximate(self) -> bool:
        return self.kind == "tabulated"

    # -- constructors ------------------------------------------------------
    @classmethod
    def const(cls, c: float, A: float, B: float) -> "PsiFunction":
        if not c > 0:
            raise ValueError("constant psi must be positive")
        return cls((float(A), float(B)), lambda p: c, "analytic", f"const {c:g}")

    @classmethod
    def power(cls, a: float, A: float, B: float) -> "PsiFunction":
        return cls((float(A), float(B)), lambda p: p ** a, "analytic", f"power {a:g}")

    @classmethod
    def degenerate(cls, r: float) -> "PsiFunction":
        r = float(r)
        return cls((r, r), lambda p: 1.0, "degenerate", f"degenerate {r:g}", point=r)

    @classmethod
    def tabulated(cls, ps: Sequence[float], values: Sequence[float], label: str = "tabulated") -> "PsiFunction":
        """Log-linear interpolation through ``(p_i, psi_i)``; marked approximate."""
        ps = np.asarray(ps, dtype=float)
        vals = np.asarray(values, dtype=float)
        if ps.size < 1 or ps.size != vals.size:
            raise ValueError("tabulated psi needs matching, non-empty node and value lists")
        if np.any(np.diff(ps) <= 0):
            raise ValueError("tabulated nodes must be strictly increasing")
        if np.any(~(vals > 0)) or np.any(~np.isfinite(vals)):
            raise ValueError("tabulated values must be positive and finite")
        if ps.size == 1:
            return cls((ps[0], ps[0]), lambda p: float(vals[0]), "degenerate", label, point=float(ps[0]))
        logs = np.log(vals)

        def func(p):
            return float(np.exp(np.interp(p, ps, logs)))

        return cls((float(ps[0]), float(ps[-1])), func, "tabulated", label, nodes=tuple(ps.tolist()))


def natural_psi(f: TestFunction, support: tuple[float, float], probes: int = 9) -> PsiFunction:
    """``psi(p) = |f|_p`` on ``support``; rejects supports where the norm is infinite."""
    A, B = float(support[0]), float(support[1])
    upper = B if math.isfinite(B) else A + 64.0
    for t in np.linspace(0.0, 1.0, probes + 2)[1:-1]:
        p = A + (upper - A) * t
        res = lp_norm(f, p)
        if res.is_infinite or res.value == 0:
            raise ValueError(f"|f|_p is not finite and positive at p={p:g}; cannot use it as psi")

    def func(p):
        return lp_norm(f, p).value

    return PsiFunction((A, B), func, "natural", f"natural {f.name}")


@dataclass(frozen=True)
class SweepGrid:
    """Interior sweep of an open interval ``(lo, hi)`` plus endpoint probes.

    Points sit at ``t = i/(count+1)`` of the interval (``hi = inf`` is mapped
    through ``p = lo + width*t/(1-t)``).  Probes at ``t = eps`` and
    ``t = 1 - eps`` follow ``eps_schedule``.
    """

    lo: float
    hi: float
    count: int = 24
    eps_schedule: tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4)
    refine_passes: int = 3
    width: float = 1.0

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"grid needs lo < hi, got ({self.lo!r}, {self.hi!r})")
        if self.count < 1:
            raise ValueError("grid count must be >= 1")
        if any(not 0 < e < 0.5 for e in self.eps_schedule):
            raise ValueError("eps values must lie in (0, 1/2)")
        if list(self.eps_schedule) != sorted(self.eps_schedule, reverse=True):
            raise ValueError("eps schedule must be decreasing")

    def at(self, t: float) -> float:
        if math.isinf(self.hi):
            return self.lo + self.width * t / (1.0 - t)
        return self.lo + (self.hi - self.lo) * t

    def ts(self) -> list[float]:
        return [i / (self.count + 1) for i in range(1, self.count + 1)]

    def points(self) -> list[float]:
        return [self.at(t) for t in self.ts()]

    def probes(self) -> list[tuple[float, str, float]]:
        """``(eps, side, p)`` for both endpoints and every eps."""
        out = []
        for eps in self.eps_schedule:
            out.append((eps, "lower", self.at(eps)))
            out.append((eps, "upper", self.at(1.0 - eps)))
        return out

    def doubled(self) -> "SweepGrid":
        return SweepGrid(self.lo, self.hi, 2 * self.count + 1, self.eps_schedule,
                         self.refine_passes, self.width)

    @classmethod
    def for_support(cls, support: tuple[float, float], **kw) -> "SweepGrid":
        A, B = support
        kw.setdefault("width", max(1.0, A))
        return cls(A, B, **kw)


@dataclass(frozen=True)
class GNormResult:
    """Outcome of a sup-type sweep.

    ``trend`` lists ``(eps, sup including probes at distance >= eps)``; it is
    non-decreasing by construction.  ``endpoint`` names the side whose
    closest probe realized the supremum, if any, and ``possibly_infinite``
    is set when the supremum still grows by more than 1% at the last probe.
    """

    value: float
    error_estimate: float
    argsup: float | tuple[float, float] | None
    trend: tuple[tuple[float, float], ...] = ()
    endpoint: str | None = None
    possibly_infinite: bool = False
    evaluations: int = 0
    samples: tuple[tuple, ...] = field(default=(), repr=False)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)


def _as_norm(x) -> NormResult:
    if isinstance(x, NormResult):
        return x
    v = float(x)
    return NormResult(v, 0.0, "closed-form") if not math.isinf(v) else NormResult.infinite("closed-form")


def golden_section(f: Callable[[float], float], a: float, b: float, iterations: int,
                   maximize: bool = True) -> tuple[float, float]:
    """Golden-section search on ``[a, b]``; returns ``(x_best, f(x_best))`` over all visited points."""
    sign = 1.0 if maximize else -1.0
    best_x, best_v = None, -math.inf
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = sign * f(c), sign * f(d)
    for x, v in ((c, fc), (d, fd)):
        if v > best_v:
            best_x, best_v = x, v
    for _ in range(iterations):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = sign * f(c)
            x, v = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = sign * f(d)
            x, v = d, fd
        if v > best_v:
            best_x, best_v = x, v
    return best_x, sign * best_v


def _diverging(running: Sequence[float]) -> bool:
    """Heuristic on the running sup per endpoint decade.

    A finite limit approached with finite slope gains ~10x less per decade;
    log or power growth does not.  Flag when the last gain is not small and
    is more than half the previous one.
    """
    if not running:
        return False
    last = running[-1]
    if math.isinf(last):
        return True
    if len(running) < 3:
        return len(running) == 2 and running[0] > 0 and last > 1.01 * running[0]
    d1 = running[-2] - running[-3]
    d2 = last - running[-2]
    return d2 > 1e-3 * abs(last) and d2 > 0.5 * d1


def _sweep(ratio: Callable[[float], tuple[float, float]], grid: SweepGrid,
           maximize: bool = True) -> GNormResult:
    """Extremum of ``ratio(p) -> (value, error)`` over a sweep grid."""
    sign = 1.0 if maximize else -1.0
    cache: dict[float, tuple[float, float]] = {}

    def ev(p):
        if p not in cache:
            cache[p] = ratio(p)
        return cache[p]

    ts = grid.ts()
    vals = [ev(grid.at(t))[0] for t in ts]
    scored = [sign * v for v in vals]
    i_best = int(np.argmax(scored))
    best_p, best_v = grid.at(ts[i_best]), vals[i_best]

    # refine between the neighbours of the best grid point
    if grid.refine_passes > 0 and math.isfinite(best_v) and len(ts) >= 1:
        t_lo = ts[i_best - 1] if i_best > 0 else ts[0] / 2.0
        t_hi = ts[i_best + 1] if i_best + 1 < len(ts) else (1.0 + ts[-1]) / 2.0
        tx, tv = golden_section(lambda t: ev(grid.at(t))[0], t_lo, t_hi,
                                6 * grid.refine_passes, maximize)
        if sign * tv > sign * best_v:
            best_p, best_v = grid.at(tx), tv

    trend = []
    running = best_v
    endpoint = None
    arg = best_p
    for eps in grid.eps_schedule:
        for side, t in (("lower", eps), ("upper", 1.0 - eps)):
            p = grid.at(t)
            v = ev(p)[0]
            if sign * v > sign * running:
                running, arg, endpoint = v, p, (side, eps)
        trend.append((eps, running))

    possibly_infinite = _diverging([v for _, v in trend]) if maximize else False
    at_edge = None
    if endpoint is not None and endpoint[1] == grid.eps_schedule[-1]:
        at_edge = endpoint[0]
    err = ev(arg)[1] if arg in cache else 0.0
    samples = tuple(sorted((p, v, e) for p, (v, e) in cache.items()))
    return GNormResult(running, err, arg, tuple(trend), at_edge, possibly_infinite,
                       len(cache), samples)


def _ratio_fn(pmap: Callable, psi: PsiFunction) -> Callable[[float], tuple[float, float]]:
    def ratio(p):
        w = psi(p)
        if math.isinf(w):
            return (0.0, 0.0)
        r = _as_norm(pmap(p))
        if r.is_infinite:
            return (math.inf, 0.0)
        return (r.value / w, r.error_estimate / w)
    return ratio


def gls_norm(pmap: Callable[[float], NormResult], psi: PsiFunction,
             grid: SweepGrid | None = None) -> GNormResult:
    """``sup_p pmap(p) / psi(p)`` over the support of ``psi``."""
    if psi.kind == "degenerate":
        r = _as_norm(pmap(psi.point))
        w = psi(psi.point)
        return GNormResult(r.value / w, r.error_estimate / w, psi.point, evaluations=1)
    if grid is None:
        grid = SweepGrid.for_support(psi.support)
    A, B = psi.support
    if grid.lo < A or grid.hi > B:
        raise ValueError(f"grid ({grid.lo}, {grid.hi}) leaves the psi support ({A}, {B})")
    if psi.kind == "tabulated":
        # tabulated weights: sweep the nodes themselves plus interior grid points
        ratio = _ratio_fn(pmap, psi)
        base = _sweep(ratio, grid)
        best = (base.value, base.argsup, base.error_estimate)
        for p in psi.nodes:
            v, e = ratio(p)
            if v > best[0]:
                best = (v, p, e)
        return GNormResult(best[0], best[2], best[1], base.trend, base.endpoint,
                           base.possibly_infinite, base.evaluations + len(psi.nodes), base.samples)
    return _sweep(_ratio_fn(pmap, psi), grid)


def _check_sobolev_support(psi: PsiFunction, n: int, s: float):
    A, B = psi.support
    limit = n / s
    ok = (psi.point is not None and 1 < psi.point < limit) if psi.kind == "degenerate" \
        else (A >= 1 and B <= limit)
    if not ok:
        raise ValueError(f"psi support ({A:g}, {B:g}) must lie inside (1, n/s) = (1, {limit:g})")


def sgl_norm(u: TestFunction, psi: PsiFunction, s: float, grid: SweepGrid | None = None) -> GNormResult:
    """``sup_p ||u||_{W_p^s} / psi(p)``."""
    _check_sobolev_support(psi, u.n, s)
    return gls_norm(lambda p: frac_sobolev_norm(u, s, p), psi, grid)


def nu_transform(psi: PsiFunction, n: int, s: float) -> PsiFunction:
    """``nu(q) = psi(q n / (n + q s))`` on the image of psi's support under ``p -> q``."""
    _check_sobolev_support(psi, n, s)
    if psi.kind == "degenerate":
        q0 = sobolev_q(psi.point, n, s)
        return PsiFunction((q0, q0), lambda q: psi(psi.point), "degenerate", f"nu[{psi.label}]", point=q0)
    A, B = psi.support
    lo = n / (n - s) if A <= 1 else sobolev_q(A, n, s)
    hi = math.inf if B >= n / s else sobolev_q(B, n, s)

    def func(q):
        return psi(inverse_p(q, n, s))

    nodes = tuple(sobolev_q(p, n, s) for p in psi.nodes)
    kind = "tabulated" if psi.kind == "tabulated" else "analytic"
    return PsiFunction((lo, hi), func, kind, f"nu[{psi.label}]", nodes=nodes)


def theta_transform(psi: PsiFunction, alpha: float, n: int) -> PsiFunction:
    """``theta(p) = g_{alpha,n}(p) psi(p)``; psi must live on ``(alpha, inf)``."""
    if psi.kind == "degenerate":
        r = psi.point
        if not r > alpha:
            raise ValueError(f"degenerate point {r:g} must exceed alpha = {alpha:g}")
        return PsiFunction((r, r), lambda p: g_alpha_n(alpha, n, p) * psi(p), "degenerate",
                           f"theta[{psi.label}]", point=r)
    A, B = psi.support
    if A < alpha:
        raise ValueError(f"psi support ({A:g}, {B:g}) must lie inside (alpha, inf) = ({alpha:g}, inf)")
    return PsiFunction((A, B), lambda p: g_alpha_n(alpha, n, p) * psi(p), psi.kind,
                       f"theta[{psi.label}]", nodes=psi.nodes)


# ---------------------------------------------------------------------------
# Two-parameter weights

class TauFunction:
    """Weight ``tau(p, s)`` on ``(1, inf) x (s_lo, s_hi)``, normalized so its grid infimum is 1.

    ``normalization`` is the factor divided out.  A singleton s-range
    (``s_lo == s_hi``) is allowed and collapses the s-direction.
    """

    def __init__(self, func: Callable[[float, float], float], s_range: tuple[float, float],
                 p_range: tuple[float, float] = (1.0, math.inf),
                 p_grid: SweepGrid | None = None, s_points: Sequence[float] | None = None,
                 label: str = "tau"):
        s_lo, s_hi = float(s_range[0]), float(s_range[1])
        if not 0 < s_lo <= s_hi:
            raise ValueError(f"s-range must satisfy 0 < s_lo <= s_hi, got ({s_lo}, {s_hi})")
        self.s_range = (s_lo, s_hi)
        self.p_range = (float(p_range[0]), float(p_range[1]))
        self.label = label
        self._func = func
        pg = p_grid or SweepGrid.for_support(self.p_range, count=12)
        ss = list(s_points) if s_points is not None else _s_points(self.s_range, 9)
        vals = [func(p, s) for p in pg.points() for s in ss]
        finite = [v for v in vals if math.isfinite(v)]
        if not finite or min(finite) <= 0:
            raise ValueError("tau must be positive and finite somewhere on its grid")
        self.normalization = float(min(finite))

    def inside(self, p: float, s: float) -> bool:
        s_lo, s_hi = self.s_range
        in_s = (s == s_lo) if s_lo == s_hi else (s_lo < s < s_hi)
        return self.p_range[0] < p < self.p_range[1] and in_s

    def __call__(self, p: float, s: float) -> float:
        if not self.inside(p, s):
            return math.inf
        return float(self._func(p, s)) / self.normalization

    @classmethod
    def const(cls, s_range, p_range=(1.0, math.inf)) -> "TauFunction":
        return cls(lambda p, s: 1.0, s_range, p_range, label="const")


def _s_points(s_range: tuple[float, float], count: int) -> list[float]:
    s_lo, s_hi = s_range
    if s_lo == s_hi:
        return [s_lo]
    return [s_lo + (s_hi - s_lo) * i / (count + 1) for i in range(1, count + 1)]


@dataclass(frozen=True)
class InfResult:
    """Outcome of an inf-type sweep over the order s."""

    value: float
    argmin: float | None
    error_estimate: float = 0.0
    evaluations: int = 0


def _inf_over_s(fn: Callable[[float], tuple[float, float]], s_range: tuple[float, float],
                count: int, refine_passes: int) -> InfResult:
    s_lo, s_hi = s_range
    if s_lo == s_hi:
        v, e = fn(s_lo)
        return InfResult(v, s_lo if math.isfinite(v) else None, e, 1)
    grid = SweepGrid(s_lo, s_hi, count=count, eps_schedule=(1e-1, 1e-2, 1e-3, 1e-4),
                     refine_passes=refine_passes)
    res = _sweep(fn, grid, maximize=False)
    return InfResult(res.value, res.argsup if math.isfinite(res.value) else None,
                     res.error_estimate, res.evaluations)


def dgl_norm(u: TestFunction, tau: TauFunction, p_grid: SweepGrid | None = None,
             s_points: Sequence[float] | None = None) -> GNormResult:
    """``sup_{p, s} ||u||_{W_p^s} / tau(p, s)`` with refinement in both coordinates."""
    s_vals = list(s_points) if s_points is not None else _s_points(tau.s_range, 6)
    if not s_vals:
        raise ValueError("empty s-grid")
    best: GNormResult | None = None
    best_s = None
    evaluations = 0
    for s in s_vals:
        grid = p_grid or _default_p_grid(u.n, s, tau)
        if grid.hi > u.n / s:
            grid = SweepGrid(grid.lo, u.n / s, grid.count, grid.eps_schedule, grid.refine_passes, grid.width)

        def ratio(p, s=s):
            t = tau(p, s)
            if math.isinf(t):
                return (0.0, 0.0)
            r = frac_sobolev_norm(u, s, p)
            if r.is_infinite:
                return (math.inf, 0.0)
            return (r.value / t, r.error_estimate / t)

        res = _sweep(ratio, grid)
        evaluations += res.evaluations
        if best is None or res.value > best.value:
            best, best_s = res, s
    assert best is not None
    # refine in s around the best column at the best p
    s_lo, s_hi = tau.s_range
    value, err, arg = best.value, best.error_estimate, (best.argsup, best_s)
    if s_lo < s_hi and math.isfinite(value) and value > 0 and best.argsup is not None:
        p_star = best.argsup
        idx = s_vals.index(best_s)
        a = s_vals[idx - 1] if idx > 0 else s_lo + 0.5 * (s_vals[0] - s_lo)
        b = s_vals[idx + 1] if idx + 1 < len(s_vals) else s_hi - 0.5 * (s_hi - s_vals[-1])

        def col(s):
            if p_star * s >= u.n:
                return 0.0
            t = tau(p_star, s)
            return 0.0 if math.isinf(t) else frac_sobolev_norm(u, s, p_star).value / t

        sx, sv = golden_section(col, a, b, 12)
        evaluations += 14
        if sv > value:
            value, arg = sv, (p_star, sx)
            err = frac_sobolev_norm(u, sx, p_star).error_estimate / tau(p_star, sx)
    return GNormResult(value, err, arg, best.trend, best.endpoint, best.possibly_infinite,
                       evaluations, best.samples)


def _default_p_grid(n: int, s: float, tau: TauFunction) -> SweepGrid:
    lo = max(1.0, tau.p_range[0])
    hi = min(tau.p_range[1], n / s)
    return SweepGrid(lo, hi, count=16)


def lambda_transform(tau: TauFunction, n: int, q_points: Sequence[float],
                     s_count: int = 16, refine_passes: int = 3) -> tuple[PsiFunction, dict[float, float]]:
    """Tabulated ``lambda(q) = inf_s K(n, s) tau(q n/(n + q s), s)``.

    Returns the weight and the minimizing order for each retained q; q
    values with no admissible order are dropped from the support.
    """
    kept, values, where = [], [], {}
    for q in sorted(float(x) for x in q_points):
        def fn(s, q=q):
            if not q > n / (n - s):
                return (math.inf, 0.0)
            return (sharp_constant_K(n, s) * tau(inverse_p(q, n, s), s), 0.0)

        res = _inf_over_s(fn, tau.s_range, s_count, refine_passes)
        if math.isfinite(res.value):
            kept.append(q)
            values.append(res.value)
            where[q] = res.argmin
    if not kept:
        raise ValueError("no q in the request admits an order s in the tau range")
    return PsiFunction.tabulated(kept, values, label=f"lambda[{tau.label}]"), where


def zeta_of_u(u: TestFunction, q: float, n: int, s_range: tuple[float, float],
              s_count: int = 12, refine_passes: int = 3) -> InfResult:
    """``inf_s K(n, s) ||u||_{W^s_{qn/(n+qs)}}`` over the order range."""
    if u.is_zero:
        return InfResult(0.0, s_range[0])

    def fn(s):
        if not q > n / (n - s):
            return (math.inf, 0.0)
        p = inverse_p(q, n, s)
        r = frac_sobolev_norm(u, s, p)
        k = sharp_constant_K(n, s)
        return (k * r.value, k * r.error_estimate)

    return _inf_over_s(fn, s_range, s_count, refine_passes)
