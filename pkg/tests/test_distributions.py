# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest
from scipy import integrate, stats

from data.distributions import (
    Deterministic,
    DistributionSpecError,
    Exponential,
    ShiftedPareto,
    TruncatedA,
    TruncatedB,
    Uniform,
    moments,
    parse_distribution,
    quad_partial_moment,
    sample,
    survival,
    tail_stats,
    thm1_condition,
)

INF = math.inf

ALL_DISTS = [
    ShiftedPareto(3.0),
    ShiftedPareto(2.5, scale=2.0),
    Exponential(1.0),
    Exponential(0.5),
    Uniform(0.0, 1.0),
    Uniform(0.5, 3.0),
    Deterministic(2.0),
    TruncatedA(ShiftedPareto(3.0), 4.0),
    TruncatedB(ShiftedPareto(3.0), 4.0),
    TruncatedA(Exponential(1.0), 1.5),
    TruncatedB(Uniform(0.0, 2.0), 1.0),
]


# ---------------- survival / moments ----------------

def test_pareto_survival_values(pareto3):
    assert survival(pareto3, 1.0) == pytest.approx(1 / 8)
    assert survival(pareto3, 0.0) == 1.0
    assert survival(Exponential(2.0), 0.0) == 1.0


def test_truncated_a_survival_below_and_above_s(pareto3):
    ta = TruncatedA(pareto3, 1.0)
    assert survival(ta, 0.5) == pytest.approx(1.5 ** -3)
    assert survival(ta, 1.0) == 0.0
    assert survival(ta, 3.0) == 0.0


def test_truncated_b_survival_is_conditional_survival(pareto3):
    s = 2.0
    tb = TruncatedB(pareto3, s)
    F_s = pareto3.cdf(s)
    for x in (0.0, 0.3, 1.0, 1.9):
        expected = (pareto3.survival(x) - pareto3.survival(s)) / F_s
        assert tb.survival(x) == pytest.approx(expected, rel=1e-12)
    assert tb.survival(s) == 0.0
    assert tb.survival(5.0) == 0.0


def test_survival_rejects_negative_x(pareto3):
    with pytest.raises(ValueError):
        survival(pareto3, -1.0)


def test_moments_closed_forms(pareto3):
    assert moments(pareto3) == pytest.approx((0.5, 1.0))
    assert moments(Deterministic(3.0)) == (3.0, 9.0)
    assert moments(Exponential(2.0)) == pytest.approx((0.5, 0.5))
    assert moments(Uniform(0.0, 1.0)) == pytest.approx((0.5, 1 / 3))


def test_pareto_infinite_second_moment(pareto15):
    mean, second = moments(pareto15)
    assert mean == pytest.approx(2.0)
    assert second == INF
    # quadrature oracle for the mean
    oracle, _ = integrate.quad(pareto15.survival, 0.0, INF, limit=400)
    assert mean == pytest.approx(oracle, rel=1e-6)
    # truncated second moments keep growing (divergence)
    grow = [pareto15.partial_moment(2, -INF, s) for s in (1e2, 1e4, 1e6)]
    assert grow[0] < grow[1] < grow[2]
    assert grow[2] > 50 * grow[0]


def test_mean_infinite_for_alpha_at_most_one():
    assert ShiftedPareto(1.0).mean() == INF
    assert ShiftedPareto(0.8).partial_moment(1) == INF


# ---------------- tail statistics ----------------

def test_tail_stats_pareto3_at_one(pareto3):
    t = tail_stats(pareto3, 1.0)
    assert t.p_tail == pytest.approx(0.125)
    assert t.m1_tail == pytest.approx(0.25)
    assert t.m2_tail == pytest.approx(7 / 8)
    assert t.cond_m1 == pytest.approx(2.0)
    assert t.resid_m1 == pytest.approx(1.0)


@pytest.mark.parametrize("s", [0.5, 2.0, 4.0, 8.0, 30.0])
def test_tail_stats_pareto3_formulas(pareto3, s):
    t = tail_stats(pareto3, s)
    assert t.m1_tail == pytest.approx((3 * s + 1) / (2 * (s + 1) ** 3), rel=1e-12)
    assert t.m2_tail == pytest.approx((3 * s ** 2 + 3 * s + 1) / (s + 1) ** 3, rel=1e-12)


def test_tail_stats_pareto15_closed_form_and_quadrature(pareto15):
    t = tail_stats(pareto15, 4.0)
    assert t.m1_tail == pytest.approx(3 * 5 ** -0.5 - 5 ** -1.5, rel=1e-12)
    assert t.m1_tail == pytest.approx(quad_partial_moment(pareto15, 1, 4.0, INF), rel=1e-7)
    assert t.m2_tail == INF
    assert math.isfinite(t.m2_trunc)


@pytest.mark.parametrize("d", ALL_DISTS, ids=str)
@pytest.mark.parametrize("s", [0.3, 1.0, 2.5, 6.0])
def test_partition_identities(d, s):
    t = tail_stats(d, s)
    assert t.m1_tail + d.partial_moment(1, -INF, s) == pytest.approx(d.mean(), rel=1e-9)
    assert t.m2_tail + d.partial_moment(2, -INF, s) == pytest.approx(d.second_moment(), rel=1e-9)


@pytest.mark.parametrize("d", [ShiftedPareto(3.0), ShiftedPareto(1.5), Exponential(1.0), Uniform(0.5, 3.0)], ids=str)
@pytest.mark.parametrize("k", [1, 2])
def test_closed_forms_match_quadrature(d, k):
    for lo, hi in [(0.0, 1.0), (0.5, 2.0), (1.0, 10.0)]:
        assert d.partial_moment(k, lo, hi) == pytest.approx(quad_partial_moment(d, k, lo, hi), rel=1e-7)
        oracle, _ = integrate.quad(d.survival, lo, hi, epsrel=1e-10, limit=200)
        assert d.integrated_survival(lo, hi) == pytest.approx(oracle, rel=1e-7)


def test_m1_trunc_accounts_for_atom(pareto3):
    s = 1.0
    t = tail_stats(pareto3, s)
    assert t.m1_trunc == pytest.approx(t.m1_below + s * t.p_tail, rel=1e-12)
    # E(min(X, s)) = ∫_0^s P(X > x) dx
    assert t.m1_trunc == pytest.approx(0.375, rel=1e-12)
    assert t.m1_trunc <= min(pareto3.mean(), s + t.m1_below)
    ta = TruncatedA(pareto3, s)
    assert ta.mean() == pytest.approx(t.m1_trunc, rel=1e-12)
    assert ta.second_moment() == pytest.approx(t.m2_trunc, rel=1e-12)


def test_tail_stats_monotone_in_s(pareto3):
    grid = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
    stats_ = [tail_stats(pareto3, s) for s in grid]
    m1_trunc = [t.m1_trunc for t in stats_]
    assert all(b >= a for a, b in zip(m1_trunc, m1_trunc[1:]))
    assert max(m1_trunc) <= pareto3.mean()
    for name in ("m1_tail", "m2_tail", "p_tail"):
        values = [getattr(t, name) for t in stats_]
        assert all(b <= a for a, b in zip(values, values[1:]))


def test_tail_stats_beyond_support_is_flagged():
    t = tail_stats(Deterministic(2.0), 3.0)
    assert t.degenerate
    assert t.p_tail == 0.0
    assert t.cond_m1 == 0.0 and t.resid_m1 == 0.0


def test_tail_stats_rejects_nonpositive_s(pareto3):
    with pytest.raises(ValueError):
        tail_stats(pareto3, 0.0)


# ---------------- truncation consistency ----------------

def test_truncated_a_cdf_and_atom(pareto3):
    s = 4.0
    ta = TruncatedA(pareto3, s)
    for x in np.linspace(0.0, s, 9, endpoint=False):
        assert ta.cdf(x) == pytest.approx(pareto3.cdf(x), rel=1e-12)
    assert ta.atom(s) == pytest.approx(pareto3.survival(s), rel=1e-12)
    continuous = pareto3.cdf_left(s)
    assert continuous + ta.atom(s) == pytest.approx(1.0, rel=1e-12)
    assert ta.cdf(s) == 1.0


def test_truncated_a_atom_uses_greater_or_equal_mass():
    # base atom at s: P(X >= s) differs from P(X > s)
    ta = TruncatedA(Deterministic(2.0), 2.0)
    assert ta.atom_mass == 1.0
    assert ta.mean() == pytest.approx(2.0)


def test_truncated_b_requires_mass_below_s():
    with pytest.raises(DistributionSpecError):
        TruncatedB(Uniform(1.0, 2.0), 0.5)


def test_truncated_b_cdf_formula(pareto3):
    s = 2.0
    tb = TruncatedB(pareto3, s)
    for a in (0.1, 0.7, 1.5, 2.0, 5.0):
        assert tb.cdf(a) == pytest.approx(pareto3.cdf(min(a, s)) / pareto3.cdf(s), rel=1e-12)


# ---------------- sampling ----------------

def test_deterministic_sample_constant(rng):
    d = Deterministic(1.7)
    assert all(sample(d, rng) == 1.7 for _ in range(10))


def test_truncated_a_quantile_hits_atom(pareto3):
    ta = TruncatedA(pareto3, 1.0)
    f_left = pareto3.cdf_left(1.0)
    assert f_left == pytest.approx(0.875)
    assert ta.quantile(0.9) == 1.0
    assert ta.quantile(f_left) == 1.0
    assert ta.quantile(0.5) < 1.0


def test_same_seed_same_stream(pareto3):
    first, second = np.random.default_rng(7), np.random.default_rng(7)
    a = [sample(pareto3, first) for _ in range(100)]
    b = [sample(pareto3, second) for _ in range(100)]
    assert a == b


def test_pareto_sample_mean(pareto3):
    rng = np.random.default_rng(2024)
    n = 10 ** 6
    draws = np.fromiter((pareto3.sample(rng) for _ in range(n)), dtype=float, count=n)
    sigma = math.sqrt(1.0 - 0.25)
    assert abs(draws.mean() - 0.5) <= 4 * sigma / math.sqrt(n)


@pytest.mark.parametrize("d", [ShiftedPareto(3.0), Exponential(1.0), Uniform(0.5, 3.0),
                               TruncatedB(ShiftedPareto(3.0), 4.0)], ids=str)
def test_sampling_law_kolmogorov_smirnov(d):
    rng = np.random.default_rng(99)
    n = 10 ** 5
    draws = np.fromiter((d.sample(rng) for _ in range(n)), dtype=float, count=n)
    result = stats.kstest(draws, np.vectorize(d.cdf))
    assert result.pvalue > 0.01


# ---------------- thm1_condition ----------------

@pytest.mark.parametrize("alpha", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("s", [1.0, 5.0, 20.0, 100.0])
def test_thm1_condition_bounded(alpha, s):
    assert thm1_condition(ShiftedPareto(alpha), s) <= alpha * s / (s + 1) ** alpha


def test_thm1_condition_empty_tail():
    assert thm1_condition(Deterministic(2.0), 3.0) == 0.0


def test_thm1_condition_decreasing(pareto15):
    assert thm1_condition(pareto15, 100.0) < thm1_condition(pareto15, 10.0)


# ---------------- 명세 문자열 ----------------

@pytest.mark.parametrize("text, expected", [
    ("pareto:alpha=3", ShiftedPareto(3.0)),
    ("pareto:alpha=2.5,scale=2", ShiftedPareto(2.5, 2.0)),
    ("exp:rate=1", Exponential(1.0)),
    ("det:c=2", Deterministic(2.0)),
    ("unif:a=0,b=1", Uniform(0.0, 1.0)),
    ("truncA(pareto:alpha=3,s=4)", TruncatedA(ShiftedPareto(3.0), 4.0)),
    ("truncB(unif:a=0,b=1,s=0.5)", TruncatedB(Uniform(0.0, 1.0), 0.5)),
    ("truncA(truncB(exp:rate=2,s=3),s=1)", TruncatedA(TruncatedB(Exponential(2.0), 3.0), 1.0)),
])
def test_parse_distribution(text, expected):
    d = parse_distribution(text)
    assert d == expected
    assert parse_distribution(d.spec()) == expected


@pytest.mark.parametrize("text", [
    "weibull:k=2", "pareto", "pareto:alpha=x", "pareto:alpha=3,beta=1", "exp:rate=-1",
    "unif:a=2,b=1", "truncA(pareto:alpha=3)", "truncA(pareto:alpha=3,s=0)",
])
def test_parse_distribution_rejects(text):
    with pytest.raises(DistributionSpecError):
        parse_distribution(text)
