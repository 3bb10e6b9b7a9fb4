import math

import numpy as np
import pytest

from fracgls.constants import conformal_pair, sharp_constant_K, sobolev_q
from fracgls.glspaces import PsiFunction, SweepGrid, TauFunction
from fracgls.norms import HALF_LINE, frac_sobolev_norm, lp_norm
from fracgls.testfuncs import bubble, bump, dilate, gaussian, scaled, translated
from fracgls.verify import (
    SlackRecord,
    check_dgl_lambda,
    check_sobolev,
    check_gl_sobolev,
    check_dgl_sobolev,
    check_gl_weighted,
    check_weighted,
    dilation_covariance,
    relative_slack_drift,
    sharpness_probe,
    sort_records,
)


def x_exp(x):
    x = np.asarray(x, dtype=float)
    return x * np.exp(-x)


# -- records -----------------------------------------------------------------

def test_slack_record_arithmetic():
    r = SlackRecord("t", {}, 1.0, 3.0, 1.0, 0.1)
    assert r.slack == 2.0 and r.relative_slack == pytest.approx(2 / 3)
    assert r.status == "ok"
    bad = SlackRecord("t", {}, 3.0, 2.5, 1.0, 0.1)
    assert bad.violated and bad.status == "violated"
    close = SlackRecord("t", {}, 3.0, 2.8, 1.0, 0.1)
    assert not close.violated
    assert SlackRecord("t", {}, 0.0, 0.0, 1.0, 0.0).relative_slack == 0.0
    assert SlackRecord("t", {}, math.inf, math.inf, 1.0, 0.0).slack == 0.0
    assert SlackRecord("t", {}, 1.0, 0.5, 1.0, 0.0, asserted=False).status == "measured"


def test_sort_records_is_deterministic():
    recs = [SlackRecord("b", {"n": 1}, 0, 1, 1, 0), SlackRecord("a", {"n": 3}, 0, 1, 1, 0),
            SlackRecord("a", {"n": 1}, 0, 1, 1, 0)]
    out = sort_records(recs)
    assert [(r.inequality, r.coords["n"]) for r in out] == [("a", 1), ("a", 3), ("b", 1)]


# -- Sobolev -----------------------------------------------------------------

def test_sobolev_zero_function():
    r = check_sobolev(scaled(gaussian(1), 0.0), 1, 0.5, "conformal")
    assert r.lhs == 0 and r.rhs == 0 and r.slack == 0


@pytest.mark.parametrize("u", [gaussian(1), bump(1)], ids=["gaussian", "bump"])
def test_sobolev_conformal_holds(u):
    r = check_sobolev(u, 1, 0.5, "conformal")
    assert r.coords["q"] == 4.0 and r.coords["p"] == pytest.approx(4 / 3)
    assert r.asserted and r.status == "ok"
    assert r.slack >= 0
    assert r.confidence <= 1e-6 * r.rhs


@pytest.mark.parametrize("n,s", [(3, 1.0), (1, 0.5), (2, 0.6)])
def test_conformal_bubble_relative_slack(n, s):
    # bubbles attain K (2 pi)^-s under the unweighted transform, so lhs/rhs = (2 pi)^-s
    r = check_sobolev(bubble(n, n - s), n, s, "conformal")
    assert r.relative_slack == pytest.approx(1 - (2 * math.pi) ** -s, abs=1e-8)


def test_sobolev_off_conformal_is_measured_only():
    r = check_sobolev(gaussian(1), 1, 0.5, 1.6)
    assert r.status == "measured"
    assert r.coords["q"] == pytest.approx(sobolev_q(1.6, 1, 0.5))


@pytest.mark.parametrize("n,s,p", [(1, 0.5, 2.0), (1, 1.2, 1.5), (3, 1.0, 1.0), (2, 0.0, 1.5)])
def test_sobolev_conditions(n, s, p):
    with pytest.raises(ValueError):
        check_sobolev(gaussian(n), n, s, p)


def test_sobolev_dimension_mismatch():
    with pytest.raises(ValueError):
        check_sobolev(gaussian(2), 1, 0.5, "conformal")


def test_dilation_covariance_drift():
    recs = dilation_covariance(gaussian(1), 1, 0.5, "conformal")
    assert len(recs) == 4
    assert recs[0].relative_slack == check_sobolev(gaussian(1), 1, 0.5, "conformal").relative_slack
    assert relative_slack_drift(recs) < 1e-9


def test_dilation_negative_control():
    # with the wrong q the ratio lhs/rhs picks up lam^(n/q_true - n/q)
    n, s = 1, 0.5
    p, q_true = conformal_pair(n, s)
    q = 6.0
    recs = dilation_covariance(bump(1), n, s, "conformal", lambdas=(2.0, 4.0), q=q)
    base = recs[0].lhs / recs[0].rhs
    for lam, r in zip((2.0, 4.0), recs[1:]):
        assert r.status == "measured"
        assert (r.lhs / r.rhs) / base == pytest.approx(lam ** (n / q_true - n / q), rel=1e-7)
    # the drift is far above the quadrature-level drift of the matched pair
    assert relative_slack_drift(recs) > 1e-2


# -- Grand Lebesgue forms ----------------------------------------------------

def test_gl_sobolev_degenerate_matches_sobolev():
    u, n, s = bump(1), 1, 0.5
    p0 = 4 / 3
    recs = check_gl_sobolev(u, PsiFunction.degenerate(p0), n, s)
    base = check_sobolev(u, n, s, p0)
    assert recs[0].lhs == pytest.approx(base.lhs, rel=1e-12)
    assert recs[0].rhs == pytest.approx(base.rhs, rel=1e-12)


def test_gl_sobolev_zero_function():
    recs = check_gl_sobolev(scaled(bump(1), 0.0), PsiFunction.const(1.0, 1.0, 2.0), 1, 0.5, q_points=(3.0, 5.0))
    assert all(r.slack == 0 for r in recs)


def test_gl_sobolev_chain_constant_psi():
    u, n, s = gaussian(1), 1, 0.5
    recs = check_gl_sobolev(u, PsiFunction.const(1.0, 1.0, 2.0), n, s, q_points=(2.5, 4.0, 8.0),
                           p_grid=SweepGrid(1.0, 2.0, count=8), q_grid=SweepGrid(2.0, math.inf, count=8, width=2.0))
    assert len(recs) == 4
    assert all(r.status == "ok" for r in recs)
    for r in recs[1:]:
        assert r.lhs == pytest.approx(lp_norm(u, r.coords["q"]).value)


def test_gl_sobolev_support_violation():
    with pytest.raises(ValueError):
        check_gl_sobolev(bump(1), PsiFunction.const(1.0, 1.0, 3.0), 1, 0.5)


def test_dgl_sobolev_singleton_reduces_to_sobolev():
    u, n, s = gaussian(1), 1, 0.5
    p0, q = 4 / 3, 4.0
    tau = TauFunction.const((s, s), (p0 - 1e-6, p0 + 1e-6))
    r = check_dgl_sobolev(u, tau, n, q)
    base = check_sobolev(u, n, s, "conformal")
    assert r.lhs == pytest.approx(base.lhs, rel=1e-12)
    assert r.rhs == pytest.approx(base.rhs, rel=1e-5)


def test_dgl_sobolev_zero_and_range():
    tau = TauFunction.const((0.3, 0.7))
    r = check_dgl_sobolev(scaled(gaussian(1), 0.0), tau, 1, 5.0)
    assert r.slack == 0
    ok = check_dgl_sobolev(gaussian(1), tau, 1, 5.0)
    assert ok.status == "ok" and ok.slack > 0
    assert 0.3 < ok.coords["s"] < 0.7


def test_dgl_lambda_holds():
    r = check_dgl_lambda(gaussian(1), TauFunction.const((0.3, 0.7)), 1, [3.0, 5.0, 8.0])
    assert r.status == "ok"
    assert "approximate" in r.note


# -- weighted ----------------------------------------------------------------

def test_weighted_zero_and_domain():
    r = check_weighted(lambda x: 0 * np.asarray(x), HALF_LINE, 1.5, 2.0)
    assert r.slack == 0
    with pytest.raises(ValueError):
        check_weighted(x_exp, HALF_LINE, 2.0, 1.8)


@pytest.mark.parametrize("alpha,p", [(1.5, 2.0), (1.2, 2.0)])
def test_weighted_x_exp(alpha, p):
    r = check_weighted(x_exp, HALF_LINE, alpha, p)
    assert r.status == "ok"
    assert r.confidence < 1e-6 * r.rhs


def test_weighted_translated_bump():
    r = check_weighted(translated(bump(1, 0.5), 1.5), HALF_LINE, 1.2, 2.0)
    assert r.lhs == pytest.approx(0.20400828252198985, rel=1e-9)
    assert r.status == "ok"


def test_gl_weighted_degenerate_matches_weighted():
    a = check_gl_weighted(x_exp, PsiFunction.degenerate(2.0), HALF_LINE, 1.5)
    b = check_weighted(x_exp, HALF_LINE, 1.5, 2.0)
    # the G-level form divides the left side by theta = g psi instead of multiplying the right by g
    assert a.lhs * b.constant == pytest.approx(b.lhs, rel=1e-12)
    assert a.rhs * b.constant == pytest.approx(b.rhs, rel=1e-12)
    assert a.relative_slack == pytest.approx(b.relative_slack, rel=1e-9)


# -- sharpness ---------------------------------------------------------------

@pytest.fixture(scope="module")
def bubble_probe():
    return sharpness_probe(1, 0.5, "conformal-bubble")


def test_probe_bubble_reaches_attainable_constant(bubble_probe):
    rep = bubble_probe
    assert rep.within_K
    assert rep.ratio_over_sharp == pytest.approx(1.0, abs=1e-6)
    assert rep.ratio_over_K == pytest.approx((2 * math.pi) ** -0.5, rel=1e-6)
    assert rep.argmax["beta"] == pytest.approx(0.5, abs=1e-3)
    assert rep.dilation_ratio == pytest.approx(rep.max_ratio, rel=1e-8)
    assert all(abs((1 - b) / 2 - round((1 - b) / 2)) < 0.02 for b in rep.excluded)


def test_probe_gaussian_is_not_extremal(bubble_probe):
    g = sharpness_probe(1, 0.5, "gaussian-scale-family")
    assert g.within_K
    assert g.max_ratio < bubble_probe.max_ratio


def test_probe_argmax_stable_under_refinement(bubble_probe):
    fine = sharpness_probe(1, 0.5, "conformal-bubble", count=31)
    cell = (3.0 - 0.5) / 15
    assert abs(fine.argmax["beta"] - bubble_probe.argmax["beta"]) < cell


def test_probe_rejects_unknown_family():
    with pytest.raises(ValueError):
        sharpness_probe(1, 0.5, "sinc")
