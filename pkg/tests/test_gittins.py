# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest

from data.distributions import Exponential, ShiftedPareto, TruncatedA, TruncatedB, Uniform
from simulation.gittins import (
    GittinsConfig,
    build_table,
    efficiency,
    gittins_index,
    gittins_table_frame,
)


def hazard3(a):
    return 3.0 / (a + 1.0)


# ---------------- efficiency ----------------

@pytest.mark.parametrize("a", [0.0, 0.7, 5.0])
@pytest.mark.parametrize("delta", [1e-4, 0.5, 3.0])
def test_efficiency_exponential_is_rate(a, delta):
    assert efficiency(Exponential(2.5), a, delta) == pytest.approx(2.5, rel=1e-12)


def test_efficiency_small_delta_is_hazard(pareto3):
    assert efficiency(pareto3, 0.0, 1e-6) == pytest.approx(3.0, rel=1e-5)


def test_efficiency_reaching_atom(pareto3):
    s, a = 4.0, 1.5
    ta = TruncatedA(pareto3, s)
    expected = pareto3.survival(a) / pareto3.integrated_survival(a, s)
    assert efficiency(ta, a, s - a) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("delta", [0.0, -1.0])
def test_efficiency_rejects_nonpositive_delta(pareto3, delta):
    with pytest.raises(ValueError):
        efficiency(pareto3, 0.0, delta)


# ---------------- gittins_index ----------------

@pytest.mark.parametrize("a", [0.0, 1.0, 10.0])
def test_index_exponential_constant(a):
    assert gittins_index(Exponential(1.0), a) == pytest.approx(1.0, rel=1e-9)


@pytest.mark.parametrize("a", np.linspace(0.0, 10.0, 21))
def test_index_pareto_matches_hazard(pareto3, a):
    assert gittins_index(pareto3, a) == pytest.approx(hazard3(a), rel=0.01)


def test_index_blows_up_near_type_a_atom(pareto3):
    ta = TruncatedA(pareto3, 4.0)
    assert gittins_index(ta, 3.99) >= 10 * hazard3(3.99)
    assert gittins_index(ta, 0.99 * 4.0) >= 5 * gittins_index(pareto3, 0.99 * 4.0)


def test_index_sentinel_at_support_edge(pareto3):
    assert gittins_index(TruncatedA(pareto3, 2.0), 2.0) == math.inf
    assert gittins_index(Uniform(0.0, 1.0), 1.0) == math.inf


def test_index_time_rescaling():
    c = 2.0
    base, scaled = ShiftedPareto(3.0), ShiftedPareto(3.0, scale=c)
    for a in (0.0, 0.5, 3.0):
        assert gittins_index(scaled, c * a) == pytest.approx(gittins_index(base, a) / c, rel=1e-9)
    assert gittins_index(Exponential(0.5), 1.0) == pytest.approx(gittins_index(Exponential(1.0), 0.5) / 2, rel=1e-9)


# ---------------- build_table ----------------

def test_table_exponential_small_grid():
    table = build_table(Exponential(1.0), GittinsConfig(grid_step=0.5, a_max=1.0))
    assert list(table.grid) == [0.0, 0.5, 1.0]
    assert table.index == pytest.approx([1.0, 1.0, 1.0], rel=1e-9)


def test_table_exponential_default_constant():
    table = build_table(Exponential(1.0))
    assert np.ptp(table.index) <= 1e-9
    assert table.a_max == pytest.approx(Exponential(1.0).quantile(0.9999))


def test_table_pareto_decreasing(pareto3):
    table = build_table(pareto3, GittinsConfig(grid_step=0.25, a_max=10.0))
    assert np.all(np.diff(table.index) < 0)
    assert table.index == pytest.approx(hazard3(table.grid), rel=0.01)


def test_table_truncated_a_increases_toward_sentinel(pareto3):
    s = 4.0
    table = build_table(TruncatedA(pareto3, s))
    assert table.a_max == s
    assert len(table.grid) == 513
    near = table.index[(table.grid >= 0.9 * s) & (table.grid < s)]
    assert np.all(np.diff(near) > 0)
    assert table.index[-1] == math.inf


def test_table_truncated_b_default_grid(pareto3):
    table = build_table(TruncatedB(pareto3, 2.0))
    assert table.a_max == 2.0
    assert table.grid[1] == pytest.approx(2.0 / 512)


def test_table_refinement_stability(pareto3):
    coarse = build_table(pareto3, GittinsConfig(grid_step=0.1, a_max=10.0))
    fine = build_table(pareto3, GittinsConfig(grid_step=0.05, a_max=10.0, n_delta=128))
    for a in np.linspace(0.0, 10.0, 41):
        assert coarse.lookup(a) == pytest.approx(fine.lookup(a), rel=0.005)


def test_table_rejects_a_max_beyond_support():
    with pytest.raises(ValueError):
        build_table(Uniform(0.0, 1.0), GittinsConfig(a_max=2.0))


def test_lookup_interpolates_and_clamps():
    table = build_table(Uniform(0.0, 4.0), GittinsConfig(grid_step=1.0, a_max=3.0))
    left, right = table.index[1], table.index[2]
    assert table.lookup(1.5) == pytest.approx(0.5 * (left + right))
    assert table.lookup(10.0) == table.index[-1]


def test_table_frame_columns():
    table = build_table(Exponential(1.0), GittinsConfig(grid_step=0.5, a_max=1.0))
    df = gittins_table_frame(table)
    assert list(df.columns) == ["a", "G(a)"]
    assert len(df) == 3
