import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ecrelay.model import InvalidParameterError
from ecrelay.waterfill import capped_waterfill_two, waterfill_two

floors = st.floats(min_value=1e-3, max_value=1e3)
budgets = st.floats(min_value=0, max_value=500)
caps = st.one_of(st.just(math.inf), st.floats(min_value=0, max_value=15))


def grid_best(N1, N2, budget, cap1=math.inf, cap2=math.inf, n=10_001):
    """Best sum rate over a uniform grid of full-budget splits."""
    e1 = np.linspace(0, budget, n)
    r = np.minimum(np.log2(1 + e1 / N1), cap1) + np.minimum(np.log2(1 + (budget - e1) / N2), cap2)
    return r.max()


def test_symmetric_split():
    r = waterfill_two(1, 1, 2)
    assert (r.e1, r.e2, r.water_level) == (1, 1, 2)
    assert r.sum_rate == pytest.approx(2.0)


def test_single_active_channel():
    # a dense grid over e1 puts the whole budget on channel 1
    r = waterfill_two(1, 2, 1)
    assert (r.e1, r.e2) == (1.0, 0.0)
    assert r.water_level == 2.0
    assert r.sum_rate == pytest.approx(grid_best(1, 2, 1))


def test_empty_budget():
    r = waterfill_two(1, 1, 0)
    assert (r.e1, r.e2, r.sum_rate) == (0, 0, 0)


def test_dead_channel():
    r = waterfill_two(math.inf, 0.5, 3)
    assert (r.e1, r.e2) == (0.0, 3.0)
    r = waterfill_two(math.inf, math.inf, 3)
    assert (r.e1, r.e2, r.sum_rate) == (0.0, 0.0, 0.0)


@pytest.mark.parametrize("args", [(1, 1, -1), (0, 1, 1), (1, -2, 1)])
def test_invalid(args):
    with pytest.raises(InvalidParameterError):
        waterfill_two(*args)


def test_capped_caps_bind_and_energy_is_saved():
    e1, e2, r = capped_waterfill_two(1, 1, 10, 1, 1)
    assert (e1, e2) == pytest.approx((1, 1), abs=1e-12)
    assert r == pytest.approx(2.0)


def test_capped_without_caps_is_plain_waterfill():
    e1, e2, r = capped_waterfill_two(1, 1, 2, math.inf, math.inf)
    assert (e1, e2, r) == (1, 1, 2)


def test_capped_mixed():
    # 1e-5 grid over e1: e1 = 0.41421, e2 = 0.58579, sum rate 0.870601...
    e1, e2, r = capped_waterfill_two(1, 2, 1, 0.5, math.inf)
    assert e1 == pytest.approx(2 ** 0.5 - 1, abs=1e-12)
    assert e2 == pytest.approx(2 - 2 ** 0.5, abs=1e-12)
    assert r == pytest.approx(0.5 + math.log2(1 + (2 - 2 ** 0.5) / 2), abs=1e-12)
    assert r == pytest.approx(0.8706014800592753, abs=2e-5)


@settings(max_examples=200, deadline=None)
@given(floors, floors, budgets)
def test_waterfill_beats_grid(N1, N2, budget):
    r = waterfill_two(N1, N2, budget)
    assert r.e1 >= 0 and r.e2 >= 0
    assert r.e1 + r.e2 == pytest.approx(budget, abs=1e-9)
    assert r.sum_rate >= grid_best(N1, N2, budget) - 1e-9
    if r.e1 > 0 and r.e2 > 0:
        assert r.water_level - N1 == pytest.approx(r.e1, abs=1e-9)
        assert r.water_level - N2 == pytest.approx(r.e2, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(floors, floors, budgets, caps, caps)
def test_capped_beats_grid(N1, N2, budget, cap1, cap2):
    e1, e2, r = capped_waterfill_two(N1, N2, budget, cap1, cap2)
    assert e1 >= 0 and e2 >= 0 and e1 + e2 <= budget + 1e-9
    # spending less than the full budget is allowed, so grid every total too
    best = max(grid_best(N1, N2, b, cap1, cap2, 2001) for b in np.linspace(0, budget, 21))
    assert r >= best - 1e-9


@settings(max_examples=200, deadline=None)
@given(floors, floors, budgets)
def test_capped_infinite_caps_equal_waterfill(N1, N2, budget):
    w = waterfill_two(N1, N2, budget)
    assert capped_waterfill_two(N1, N2, budget, math.inf, math.inf) == (w.e1, w.e2, w.sum_rate)


@settings(max_examples=200, deadline=None)
@given(floors, floors, budgets, caps, caps)
def test_capped_minimal_energy(N1, N2, budget, cap1, cap2):
    """Each channel is either at its cap or at the uncapped water level."""
    e1, e2, _ = capped_waterfill_two(N1, N2, budget, cap1, cap2)
    at_cap = [math.log2(1 + e1 / N1) >= cap1 - 1e-9, math.log2(1 + e2 / N2) >= cap2 - 1e-9]
    assert math.log2(1 + e1 / N1) <= cap1 + 1e-9
    assert math.log2(1 + e2 / N2) <= cap2 + 1e-9
    if not any(at_cap):
        # neither binds: the plain water-fill split
        w = waterfill_two(N1, N2, budget)
        assert (e1, e2) == pytest.approx((w.e1, w.e2), abs=1e-9)
    elif not all(at_cap):
        # the free channel takes everything left (or is dead)
        assert e1 + e2 == pytest.approx(budget, abs=1e-9)
