# -*- coding: utf-8 -*-
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from data.distributions import Exponential, ShiftedPareto  # noqa: E402


@pytest.fixture
def pareto3():
    return ShiftedPareto(3.0)


@pytest.fixture
def pareto15():
    return ShiftedPareto(1.5)


@pytest.fixture
def exp1():
    return Exponential(1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
