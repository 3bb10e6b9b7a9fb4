"""Batch front-end: constant tables, norms, verification sweeps and probes.

Every run writes one or more CSV tables plus a JSON manifest into the output
directory (``--out``, else ``$FRACGLS_OUT``, else ``./fracgls-out``).

Exit codes: 0 when every asserted check passed, 1 when some record is
violated (tables are written anyway), 2 for configuration errors.

CSV columns per subcommand::

    constants --K : n,s,K,K_asymptote,ratio
    constants --L : alpha,p,L,L_error,case_A,case_B,case_C_upper,lower_shape,D,g
    constants --Z : n,s,p,lower,upper,attainment
    norms         : family,n,params,s,p,q,lp_q,lp_q_error,sobolev,sobolev_error,slobodetskii,slobodetskii_error
    verify        : inequality,family,n,s,p,q,alpha,dilation,extra,lhs,rhs,constant,slack,
                    relative_slack,confidence,asserted,status,note
    probe         : family,n,s,p,q,max_ratio,argmax,K,ratio_over_K,ratio_over_sharp,
                    confidence,recheck_ratio,dilation_ratio,excluded
    probe samples : family,parameter,ratio
    report        : file,rows,asserted,violated,measured
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import platform
import sys
import time
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .constants import (
    D_alpha_n,
    K_asymptote,
    L_alpha,
    Z_bounds,
    case_A_asymptote,
    case_B_asymptote,
    case_C_bounds,
    conformal_pair,
    g_alpha_n,
    sharp_constant_K,
    sobolev_q,
    z_attainment_quadrature,
)
from .glspaces import PsiFunction, TauFunction
from .norms import HALF_LINE, frac_sobolev_norm, lp_norm, slobodetskii_norm
from .testfuncs import make
from .verify import (
    SlackRecord,
    check_sobolev,
    check_gl_sobolev,
    check_dgl_sobolev,
    check_gl_weighted,
    check_weighted,
    dilation_covariance,
    sharpness_probe,
    sort_records,
)

__all__ = ["run", "main", "ConfigError", "parse_grid", "format_number", "write_csv", "emit_plot"]

# smallest endpoint offset of the default sweep schedule
GRID_MARGIN = 1e-4


class ConfigError(ValueError):
    """Invalid command line; ``field`` names the offending option."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


# ---------------------------------------------------------------------------
# parsing helpers

def parse_grid(text: str, field: str, lo: float | None = None, hi: float | None = None,
               strict: bool = True) -> list[float]:
    """``start:stop:count``, a comma list, or a single number.

    Endpoints that sit exactly on an open bound ``lo``/``hi`` are pulled
    inward by ``GRID_MARGIN`` times the grid width (or times 1 for a single point).
    """
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            a, b, c = float(parts[0]), float(parts[1]), int(parts[2])
            if c < 1:
                raise ValueError
            vals = [a] if c == 1 else list(np.linspace(a, b, c))
            width = abs(b - a) or 1.0
        else:
            vals = [float(v) for v in text.split(",") if v.strip()]
            width = (max(vals) - min(vals)) or 1.0 if vals else 1.0
    except ValueError:
        raise ConfigError(field, f"cannot parse grid {text!r} (use start:stop:count or a,b,c)") from None
    if not vals:
        raise ConfigError(field, "empty grid")
    out = []
    for v in vals:
        v = float(v)
        if lo is not None and v == lo:
            v = lo + GRID_MARGIN * width
        if hi is not None and v == hi:
            v = hi - GRID_MARGIN * width
        if not math.isfinite(v):
            raise ConfigError(field, f"non-finite grid value {v!r}")
        if strict and ((lo is not None and v <= lo) or (hi is not None and v >= hi)):
            raise ConfigError(field, f"value {v:g} outside ({lo}, {hi})")
        out.append(v)
    return out


def _int_list(text: str, field: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(field, f"expected integers, got {text!r}") from None
    if not vals or any(v < 1 for v in vals):
        raise ConfigError(field, "dimensions must be positive integers")
    return vals


def _params(items: Sequence[str] | None, field: str = "--param") -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(field, f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise ConfigError(field, f"non-numeric value in {item!r}") from None
    return out


def parse_psi(text: str) -> PsiFunction:
    """``const:c:A:B``, ``power:a:A:B`` or ``degenerate:r``."""
    parts = text.split(":")
    try:
        if parts[0] == "const" and len(parts) == 4:
            return PsiFunction.const(float(parts[1]), float(parts[2]), _float_or_inf(parts[3]))
        if parts[0] == "power" and len(parts) == 4:
            return PsiFunction.power(float(parts[1]), float(parts[2]), _float_or_inf(parts[3]))
        if parts[0] == "degenerate" and len(parts) == 2:
            return PsiFunction.degenerate(float(parts[1]))
    except ValueError as exc:
        raise ConfigError("--psi", str(exc)) from None
    raise ConfigError("--psi", f"cannot parse {text!r} (const:c:A:B, power:a:A:B, degenerate:r)")


def _float_or_inf(t: str) -> float:
    return math.inf if t.strip().lower() in ("inf", "infinity") else float(t)


def _interval(text: str, field: str) -> tuple[float, float]:
    try:
        a, b = (_float_or_inf(v) for v in text.split(":"))
    except ValueError:
        raise ConfigError(field, f"expected lo:hi, got {text!r}") from None
    if not a < b:
        raise ConfigError(field, f"empty interval {text!r}")
    return a, b


def _x_exp(x):
    x = np.asarray(x, dtype=float)
    return x * np.exp(-x)


_x_exp.__name__ = "x-exp"
NAMED_FUNCTIONS = {"x-exp": _x_exp}


# ---------------------------------------------------------------------------
# output

def format_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    if x is None:
        return ""
    return str(x)


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Write a CSV table; returns its SHA-256."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_number(v) for v in row])
    data = buf.getvalue().encode()
    path.write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def _versions() -> dict:
    import matplotlib
    import scipy

    return {"fracgls": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "matplotlib": matplotlib.__version__}


PLOT_KINDS = ("slack-vs-p", "K-vs-s", "L-vs-p", "ratio-vs-epsilon")


def emit_plot(rows: Sequence[dict], kind: str, path: Path) -> Path:
    """Line/scatter SVG for one of :data:`PLOT_KINDS`.

    ``rows`` are dicts with the columns of the matching CSV table.
    """
    if kind not in PLOT_KINDS:
        raise ConfigError("--plot", f"unknown plot kind {kind!r}")
    if not rows:
        raise ConfigError("--plot", "nothing to plot")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "fracgls"
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if kind == "K-vs-s":
        for n in sorted({r["n"] for r in rows}):
            sel = sorted((r for r in rows if r["n"] == n), key=lambda r: r["s"])
            s = [r["s"] for r in sel]
            ax.plot(s, [r["K"] for r in sel], "o-", ms=3, label=f"K, n={n}")
            ax.plot(s, [r["K_asymptote"] for r in sel], "--", label=f"asymptote, n={n}")
        ax.set_xlabel("s")
        ax.set_ylabel("K(n, s)")
        ax.set_yscale("log")
    elif kind == "L-vs-p":
        for a in sorted({r["alpha"] for r in rows}):
            sel = sorted((r for r in rows if r["alpha"] == a), key=lambda r: r["p"])
            p = [r["p"] for r in sel]
            ax.plot(p, [r["L"] for r in sel], "o-", ms=3, label=f"L, alpha={a:g}")
            ax.plot(p, [r["case_C_upper"] for r in sel], "--", label=f"upper bound, alpha={a:g}")
        ax.set_xlabel("p")
        ax.set_ylabel("L_alpha(p)")
        ax.set_yscale("log")
    elif kind == "slack-vs-p":
        sel = sorted(rows, key=lambda r: (r["p"] if r["p"] is not None else 0.0))
        p = [r["p"] for r in sel]
        ax.plot(p, [r["relative_slack"] for r in sel], "o-", ms=4, label="relative slack")
        hi = [r for r in sel if r.get("asserted")]
        if hi:
            ax.plot([r["p"] for r in hi], [r["relative_slack"] for r in hi], "s", ms=9,
                    mfc="none", color="C3", label="asserted (conformal)")
        ax.axhline(0.0, color="k", lw=0.8)
        ax.set_xlabel("p")
        ax.set_ylabel("(rhs - lhs) / rhs")
    else:
        sel = sorted(rows, key=lambda r: r["epsilon"], reverse=True)
        ax.plot([r["epsilon"] for r in sel], [r["ratio"] for r in sel], "o-", ms=4, label="sup ratio")
        ax.set_xscale("log")
        ax.set_xlabel("endpoint offset epsilon")
        ax.set_ylabel("running sup")
    ax.legend(fontsize=7)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


# ---------------------------------------------------------------------------
# subcommands; each returns (tables, plots, exit_status, extra manifest info)

class Table:
    def __init__(self, name: str, columns: Sequence[str]):
        self.name = name
        self.columns = list(columns)
        self.rows: list[list] = []

    def add(self, *row):
        self.rows.append(list(row))

    def dicts(self) -> list[dict]:
        return [dict(zip(self.columns, r)) for r in self.rows]


def _cmd_constants(args) -> tuple[list[Table], list, int, dict]:
    tables, plots = [], []
    want_K = args.K or not (args.L or args.Z)
    if want_K:
        ns = _int_list(args.n, "--n")
        s_vals = parse_grid(args.s_grid, "--s-grid", lo=0.0)
        for n in ns:
            for s in s_vals:
                if not s < n:
                    raise ConfigError("--s-grid", f"s={s:g} is not below n={n}")
        t = Table("constants-K", ["n", "s", "K", "K_asymptote", "ratio"])
        for n in ns:
            for s in s_vals:
                K, A = sharp_constant_K(n, s), K_asymptote(n, s)
                t.add(n, s, K, A, K / A)
        tables.append(t)
        plots.append(("K-vs-s", t))
    if args.L:
        alphas = parse_grid(args.alpha_grid, "--alpha-grid", lo=1.0)
        offsets = parse_grid(args.p_offsets, "--p-offsets", lo=0.0)
        if not 0 < args.delta < 1:
            raise ConfigError("--delta", "split point must lie in (0, 1)")
        t = Table("constants-L", ["alpha", "p", "L", "L_error", "case_A", "case_B", "case_C_upper",
                                  "lower_shape", "D", "g"])
        for a in alphas:
            for off in offsets:
                p = a + off
                L = L_alpha(a, p, args.tol)
                c = case_C_bounds(a, p, args.delta)
                t.add(a, p, L.value, L.error_estimate, case_A_asymptote(a, p), case_B_asymptote(a, p),
                      c.upper, c.lower_shape, D_alpha_n(a, 1, p), g_alpha_n(a, 1, p))
        tables.append(t)
        plots.append(("L-vs-p", t))
    if args.Z:
        ns = _int_list(args.n, "--n")
        s_vals = parse_grid(args.s_grid_z, "--s-grid-z", lo=0.0, hi=1.0)
        p_vals = parse_grid(args.p_grid, "--p-grid", lo=1.0, strict=False)
        if any(p < 1 for p in p_vals):
            raise ConfigError("--p-grid", "need p >= 1")
        t = Table("constants-Z", ["n", "s", "p", "lower", "upper", "attainment"])
        for n in ns:
            for s in s_vals:
                for p in p_vals:
                    lo, up = Z_bounds(n, s, p)
                    t.add(n, s, p, lo, up, z_attainment_quadrature(n, s, p).value)
        tables.append(t)
    return tables, plots, 0, {}


def _cmd_norms(args):
    ns = _int_list(args.n, "--n")
    params = _params(args.param)
    s_vals = parse_grid(args.s_grid, "--s-grid", lo=0.0)
    p_text = args.p_grid
    t = Table("norms", ["family", "n", "params", "s", "p", "q", "lp_q", "lp_q_error", "sobolev",
                        "sobolev_error", "slobodetskii", "slobodetskii_error"])
    jobs = []
    for n in ns:
        if n not in (1, 2, 3):
            raise ConfigError("--n", "norm engines support n in {1, 2, 3}")
        for fam in args.family.split(","):
            try:
                u = make(fam, n, **params)
            except ValueError as exc:
                raise ConfigError("--family", str(exc)) from None
            for s in s_vals:
                if not s < n:
                    raise ConfigError("--s-grid", f"s={s:g} not below n={n}")
                if p_text == "conformal":
                    p_vals = [conformal_pair(n, s)[0]]
                else:
                    p_vals = parse_grid(p_text, "--p-grid", lo=1.0, hi=n / s)
                for p in p_vals:
                    jobs.append((fam, n, u, s, p))
    ptxt = ";".join(f"{k}={format_number(v)}" for k, v in sorted(params.items()))
    for fam, n, u, s, p in jobs:
        q = sobolev_q(p, n, s)
        a = lp_norm(u, q)
        b = frac_sobolev_norm(u, s, p)
        if s < 1 and args.slobodetskii:
            c = slobodetskii_norm(u, s, p, budget=args.budget, seed=args.seed)
            cv, ce = c.value, c.error_estimate
        else:
            cv = ce = None
        t.add(fam, n, ptxt, s, p, q, a.value, a.error_estimate, b.value, b.error_estimate, cv, ce)
    return [t], [], 0, {}


VERIFY_COLUMNS = ["inequality", "family", "n", "s", "p", "q", "alpha", "dilation", "extra", "lhs", "rhs",
                  "constant", "slack", "relative_slack", "confidence", "asserted", "status", "note"]


def _record_row(r: SlackRecord) -> list:
    c = r.coords
    known = {"family", "n", "s", "p", "q", "alpha", "dilation"}
    extra = ";".join(f"{k}={format_number(v)}" for k, v in sorted(c.items()) if k not in known)
    return [r.inequality, c.get("family"), c.get("n"), c.get("s"), c.get("p"), c.get("q"), c.get("alpha"),
            c.get("dilation"), extra, r.lhs, r.rhs, r.constant, r.slack, r.relative_slack, r.confidence,
            r.asserted, r.status, r.note]


def _function_arg(args, n: int):
    if args.function:
        if args.function not in NAMED_FUNCTIONS:
            raise ConfigError("--function", f"unknown function {args.function!r}; known: {sorted(NAMED_FUNCTIONS)}")
        return NAMED_FUNCTIONS[args.function]
    try:
        return make(args.family, n, **_params(args.param))
    except ValueError as exc:
        raise ConfigError("--family", str(exc)) from None


def _cmd_verify(args):
    ineq = args.ineq
    records: list[SlackRecord] = []
    n_vals = _int_list(args.n, "--n")
    for n in n_vals:
        if n not in (1, 2, 3):
            raise ConfigError("--n", "verification supports n in {1, 2, 3}")
    if ineq in ("sobolev", "dilation", "gl-sobolev", "dgl-sobolev"):
        families = args.family.split(",")
        params = _params(args.param)
        for n in n_vals:
            for fam in families:
                try:
                    u = make(fam, n, **params)
                except ValueError as exc:
                    raise ConfigError("--family", str(exc)) from None
                if ineq == "dgl-sobolev":
                    s_range = _interval(args.s_range, "--s-range")
                    p_range = _interval(args.p_range, "--p-range")
                    tau = TauFunction.const(s_range, p_range)
                    for q in parse_grid(args.q, "--q", lo=1.0):
                        try:
                            records.append(check_dgl_sobolev(u, tau, n, q))
                        except ValueError as exc:
                            raise ConfigError("--q", str(exc)) from None
                    continue
                for s in parse_grid(args.s, "--s", lo=0.0, hi=float(n)):
                    if ineq == "gl-sobolev":
                        psi = parse_psi(args.psi)
                        q_pts = parse_grid(args.q_grid, "--q-grid", lo=n / (n - s)) if args.q_grid else []
                        try:
                            records.extend(check_gl_sobolev(u, psi, n, s, q_pts))
                        except ValueError as exc:
                            raise ConfigError("--psi", str(exc)) from None
                        continue
                    if args.p == "conformal":
                        p_vals = ["conformal"]
                    else:
                        p_vals = parse_grid(args.p, "--p", lo=1.0, hi=n / s)
                    for p in p_vals:
                        if ineq == "sobolev":
                            records.append(check_sobolev(u, n, s, p))
                        else:
                            lams = parse_grid(args.lambdas, "--lambdas", lo=0.0)
                            records.extend(dilation_covariance(u, n, s, p, lams, args.q_mismatch))
    elif ineq in ("weighted", "gl-weighted"):
        alpha = args.alpha
        if not alpha > 1:
            raise ConfigError("--alpha", "need alpha > 1")
        if args.domain != "half-line":
            raise ConfigError("--domain", "only the half-line is exposed on the command line")
        f = _function_arg(args, 1)
        if ineq == "weighted":
            for p in parse_grid(args.p, "--p", lo=alpha):
                records.append(check_weighted(f, HALF_LINE, alpha, p, seed=args.seed))
        else:
            psi = parse_psi(args.psi)
            if psi.support[0] < alpha:
                raise ConfigError("--psi", f"support must lie in (alpha, inf), alpha={alpha:g}")
            records.append(check_gl_weighted(f, psi, HALF_LINE, alpha, seed=args.seed))
    else:
        raise ConfigError("--ineq", f"unknown inequality {ineq!r}")
    records = sort_records(records)
    t = Table(f"verify-{ineq}", VERIFY_COLUMNS)
    for r in records:
        t.add(*_record_row(r))
    violated = [r for r in records if r.asserted and r.violated]
    plots = [("slack-vs-p", t)] if any(r.coords.get("p") is not None for r in records) else []
    return [t], plots, (1 if violated else 0), {"violations": len(violated), "records": len(records)}


def _cmd_probe(args):
    n_vals = _int_list(args.n, "--n")
    fams = ["conformal-bubble", "gaussian-scale-family"] if args.family == "both" else args.family.split(",")
    t = Table("probe", ["family", "n", "s", "p", "q", "max_ratio", "argmax", "K", "ratio_over_K",
                        "ratio_over_sharp", "confidence", "recheck_ratio", "dilation_ratio", "excluded"])
    samples = Table("probe-samples", ["family", "parameter", "ratio"])
    status = 0
    findings = []
    for n in n_vals:
        for s in parse_grid(args.s, "--s", lo=0.0, hi=float(n)):
            p = "conformal" if args.p == "conformal" else parse_grid(args.p, "--p", lo=1.0, hi=n / s)[0]
            for fam in fams:
                try:
                    rep = sharpness_probe(n, s, fam, p)
                except ValueError as exc:
                    raise ConfigError("--family", str(exc)) from None
                argmax = ";".join(f"{k}={format_number(v)}" for k, v in sorted(rep.argmax.items()))
                t.add(fam, n, s, rep.p, rep.q, rep.max_ratio, argmax, rep.K, rep.ratio_over_K,
                      rep.ratio_over_sharp, rep.confidence, rep.recheck_ratio, rep.dilation_ratio,
                      ";".join(format_number(b) for b in rep.excluded))
                for x, r in rep.samples:
                    samples.add(fam, x, r)
                if not rep.within_K:
                    status = 1
                findings.append({"family": fam, "n": n, "s": s, "ratio_over_K": rep.ratio_over_K,
                                 "ratio_over_sharp": rep.ratio_over_sharp, "within_K": rep.within_K})
    return [t, samples], [], status, {"findings": findings}


def _read_csv(path: Path) -> list[dict]:
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))


def _cmd_report(args):
    src = Path(args.source or args.out)
    if not src.is_dir():
        raise ConfigError("--source", f"{src} is not a directory")
    t = Table("report", ["file", "rows", "asserted", "violated", "measured"])
    status = 0
    for path in sorted(src.glob("*.csv")):
        if path.name.startswith("report"):
            continue
        rows = _read_csv(path)
        asserted = sum(1 for r in rows if r.get("asserted") == "true")
        violated = sum(1 for r in rows if r.get("status") == "violated")
        measured = sum(1 for r in rows if r.get("status") == "measured")
        if violated:
            status = 1
        t.add(path.name, len(rows), asserted, violated, measured)
    if not t.rows:
        raise ConfigError("--source", f"no CSV tables in {src}")
    return [t], [], status, {"source": str(src)}


COMMANDS = {"constants": _cmd_constants, "norms": _cmd_norms, "verify": _cmd_verify,
            "probe": _cmd_probe, "report": _cmd_report}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracgls", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=os.environ.get("FRACGLS_OUT", "fracgls-out"),
                        help="output directory (default $FRACGLS_OUT or ./fracgls-out)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-11)
    common.add_argument("--budget", type=int, default=2**18, help="QMC points for n >= 2 double integrals")
    common.add_argument("--no-plot", action="store_true", help="skip SVG output")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", parents=[common], help="tables of K, L_alpha and Z bounds")
    c.add_argument("--K", action="store_true")
    c.add_argument("--L", action="store_true")
    c.add_argument("--Z", action="store_true")
    c.add_argument("--n", default="1,2,3")
    c.add_argument("--s-grid", default="0.1:0.9:9")
    c.add_argument("--s-grid-z", default="0.25,0.5,0.75")
    c.add_argument("--p-grid", default="1,2,4")
    c.add_argument("--alpha-grid", default="1.2,1.5,2")
    c.add_argument("--p-offsets", default="0.5,1,2,4,8")
    c.add_argument("--delta", type=float, default=0.5)

    nm = sub.add_parser("norms", parents=[common], help="L_q and fractional Sobolev norms")
    nm.add_argument("--family", default="gaussian")
    nm.add_argument("--param", action="append", help="family parameter key=value (repeatable)")
    nm.add_argument("--n", default="1")
    nm.add_argument("--s-grid", default="0.5")
    nm.add_argument("--p-grid", default="conformal")
    nm.add_argument("--slobodetskii", action="store_true", help="also the double-integral seminorm (s < 1)")

    v = sub.add_parser("verify", parents=[common], help="inequality checks with slack records")
    v.add_argument("--ineq", required=True,
                   choices=["sobolev", "dilation", "gl-sobolev", "dgl-sobolev", "weighted", "gl-weighted"])
    v.add_argument("--family", default="gaussian")
    v.add_argument("--param", action="append")
    v.add_argument("--function", help=f"named function instead of a family: {sorted(NAMED_FUNCTIONS)}")
    v.add_argument("--n", default="1")
    v.add_argument("--s", default="0.5")
    v.add_argument("--p", default="conformal")
    v.add_argument("--q", default="5")
    v.add_argument("--q-grid", default="")
    v.add_argument("--q-mismatch", type=float, default=None, help="negative control: use this q instead")
    v.add_argument("--lambdas", default="0.5,2,4")
    v.add_argument("--psi", default="const:1:1:2")
    v.add_argument("--s-range", default="0.3:0.7")
    v.add_argument("--p-range", default="1.05:3")
    v.add_argument("--alpha", type=float, default=1.5)
    v.add_argument("--domain", default="half-line")

    pr = sub.add_parser("probe", parents=[common], help="sharpness probe of the Sobolev constant")
    pr.add_argument("--n", default="1")
    pr.add_argument("--s", default="0.5")
    pr.add_argument("--p", default="conformal")
    pr.add_argument("--family", default="conformal-bubble",
                    help="conformal-bubble, gaussian-scale-family or both")

    rp = sub.add_parser("report", parents=[common], help="summarize the CSV tables of an output directory")
    rp.add_argument("--source", default=None, help="directory to summarize (default --out)")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    start = time.perf_counter()
    out = Path(args.out)
    try:
        tables, plots, status, info = COMMANDS[args.command](args)
        out.mkdir(parents=True, exist_ok=True)
        files = {}
        for t in tables:
            files[f"{t.name}.csv"] = write_csv(out / f"{t.name}.csv", t.columns, t.rows)
        svgs = []
        if not args.no_plot:
            for kind, t in plots:
                if t.rows:
                    svgs.append(emit_plot(t.dicts(), kind, out / f"{t.name}-{kind}.svg").name)
    except ConfigError as exc:
        print(f"fracgls: configuration error: {exc}", file=sys.stderr)
        return 2
    config = {k: v for k, v in vars(args).items()}
    manifest = {
        "command": args.command,
        "argv": list(argv) if argv is not None else sys.argv[1:],
        "config": config,
        "seed": args.seed,
        "versions": _versions(),
        "wall_time_s": time.perf_counter() - start,
        "exit_status": status,
        "tables": files,
        "plots": svgs,
        **info,
    }
    (out / f"{args.command}.manifest.json").write_text(json.dumps(manifest, indent=2, default=str) + "\n")
    for name in files:
        print(out / name)
    if status:
        print(f"fracgls: {args.command} found violations", file=sys.stderr)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
