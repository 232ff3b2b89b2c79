import numpy as np
import pytest

from ecrelay import ChannelRealization as Ch, EnergyState as E, SystemParams, solve_cycle_no_ec
from ecrelay.model import CaseLabel, InvalidParameterError
from ecrelay.oracle import oracle_solve
from ecrelay.sim import random_instances

P = SystemParams()
UNIT = Ch(1, 1, 1, 1)


def test_zero_instance():
    sol = oracle_solve(E(0, 0, 0), UNIT, P, 64)
    assert sol.c_total == 0
    assert sol.case_label is CaseLabel.DEGENERATE


def test_a2_instance():
    assert oracle_solve(E(2, 3, 0.5), UNIT, P, 4096).c_total == pytest.approx(2.0, abs=5e-3)


def test_rejects_small_grid():
    with pytest.raises(InvalidParameterError):
        oracle_solve(E(1, 1, 1), UNIT, P, 32)


def _instances(seed, n=40):
    energy, gains = random_instances(np.random.default_rng(seed), n, P)
    return [(E(*e), Ch(*g)) for e, g in zip(energy, gains)]


@pytest.mark.parametrize("e, ch", _instances(3))
def test_grid_refinement_never_hurts(e, ch):
    coarse = oracle_solve(e, ch, P, 256).c_total
    fine = oracle_solve(e, ch, P, 512).c_total
    assert fine >= coarse - 1e-12


@pytest.mark.parametrize("e, ch", _instances(4))
def test_oracle_covers_no_transfer(e, ch):
    assert oracle_solve(e, ch, P, 4096).c_total >= solve_cycle_no_ec(e, ch, P).c_total - 1e-9


def test_ec_off_is_no_ec_baseline():
    params = SystemParams(ec_enabled=False)
    for e, ch in _instances(5, 10):
        assert oracle_solve(e, ch, params, 256).c_total == pytest.approx(
            solve_cycle_no_ec(e, ch, P).c_total, abs=1e-9)
