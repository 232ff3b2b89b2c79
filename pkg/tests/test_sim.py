import dataclasses

import numpy as np
import pytest

from ecrelay import SimConfig, SystemParams, draw_cycle, run_sweep, run_trial
from ecrelay.model import CASE_ORDER, InvalidParameterError
from ecrelay.sim import OUTAGE_ARMS, params_for_snr, trial_rng

P = SystemParams()


def test_zero_spread_gives_mean_energies():
    params = SystemParams(sd_S=0, sd_R1=0, sd_R2=0, mu_S=30, mu_R1=40, mu_R2=50)
    rng = trial_rng(0, 0)
    for _ in range(20):
        _, e = draw_cycle(rng, params)
        assert (e.E_S, e.E_R1, e.E_R2) == (30, 40, 50)


def test_zero_variance_gives_dead_channel():
    rng = trial_rng(1, 0)
    for _ in range(20):
        ch, _ = draw_cycle(rng, SystemParams(sigma_h1_sq=0))
        assert ch.h1_sq == 0


def test_harvests_are_never_negative():
    rng = trial_rng(2, 0)
    draws = [draw_cycle(rng, SystemParams(mu_S=10, sd_S=50))[1].E_S for _ in range(500)]
    assert min(draws) == 0 and max(draws) > 0


def test_exponential_gain_mean():
    rng = np.random.default_rng(123)
    # the same unit-exponential draws scaled by the variance
    sample = rng.standard_exponential(10 ** 6) * 2.5
    assert sample.mean() == pytest.approx(2.5, abs=3 * 2.5 / 1e3)


def test_params_for_snr():
    p = params_for_snr(P, 20.0)
    assert p.sigma_g1_sq == pytest.approx(1.0) and p.sigma_g2_sq == pytest.approx(1.0)
    assert p.sigma_h1_sq == 1.0
    with pytest.raises(InvalidParameterError):
        params_for_snr(SystemParams(mu_R1=0, mu_R2=0), 10.0)


@pytest.mark.parametrize("mode", ["capacity", "outage"])
def test_first_cycle_ignores_ess(mode):
    on = SimConfig(params=P, mode=mode, cycles_per_trial=1, seed=5)
    off = dataclasses.replace(on, params=SystemParams(ess_enabled=False))
    a, b = run_trial(on, 3), run_trial(off, 3)
    for k in a:
        assert np.array_equal(a[k], b[k])


def test_static_input_gives_identical_cycles():
    params = SystemParams(sd_S=0, sd_R1=0, sd_R2=0, sigma_h1_sq=0, sigma_h2_sq=0,
                          sigma_g1_sq=0, sigma_g2_sq=0, ess_enabled=False)
    rec = run_trial(SimConfig(params=params, cycles_per_trial=6), 0)
    for k, v in rec.items():
        assert np.all(v == v[0]), k


def test_ess_battery_dominates():
    config = SimConfig(params=params_for_snr(P, 6.0), mode="outage", cycles_per_trial=10, seed=11)
    for t in range(30):
        rec = run_trial(config, t)
        for ec in ("ec", "noec"):
            assert np.all(rec[f"battery_{ec}"] >= rec[f"battery_{ec}_noess"])


def test_capacity_records_are_consistent():
    rec = run_trial(SimConfig(params=params_for_snr(P, 10.0), cycles_per_trial=8, seed=2), 0)
    assert np.allclose(rec["c_ec"], rec["r1_ec"] + rec["r2_ec"])
    assert np.all(rec["c_ec"] >= rec["c_noec"] - 1e-9)
    assert np.all((rec["case"] >= 0) & (rec["case"] < len(CASE_ORDER)))


def test_trials_are_order_independent():
    config = SimConfig(params=P, cycles_per_trial=3, seed=9)
    first = run_trial(config, 7)
    run_trial(config, 2)
    again = run_trial(config, 7)
    for k in first:
        assert np.array_equal(first[k], again[k])


def _small(mode="capacity", **kw):
    return SimConfig(params=P, mode=mode, trials=40, cycles_per_trial=4, seed=3, **kw)


def test_sweep_rows():
    rows = run_sweep(_small(snr_points_db=(0, 10, 10)))
    assert [r.snr_db for r in rows] == [0.0, 10.0, 10.0]
    assert rows[1] == rows[2]
    for r in rows:
        assert r.gain == pytest.approx(r.avg_c_ec - r.avg_c_noec)
        assert r.avg_c_ec >= r.avg_c_noec
        assert sum(r.case_pct.values()) == pytest.approx(100, abs=0.01)
        assert all(isinstance(v, float) for v in r.case_pct.values())


def test_outage_sweep_probabilities():
    (row,) = run_sweep(_small("outage", snr_points_db=(4,)))
    for _, _, tag in OUTAGE_ARMS:
        for d in (1, 2):
            assert 0 <= getattr(row, f"outage_d{d}_{tag}") <= 1
    assert np.isnan(row.avg_c_ec)


def test_sweep_is_deterministic_across_workers():
    config = SimConfig(params=P, trials=1200, cycles_per_trial=2, seed=4, snr_points_db=(0, 20))
    one = run_sweep(config)
    two = run_sweep(dataclasses.replace(config, workers=2))
    assert repr(one) == repr(two)


def test_oracle_gap_column():
    (row,) = run_sweep(_small(snr_points_db=(10,), grid_n_oracle=256))
    assert 0 <= row.oracle_gap < 5e-2


@pytest.mark.parametrize("kw", [{"trials": 0}, {"cycles_per_trial": 0}, {"snr_points_db": ()},
                                {"mode": "bogus"}, {"grid_n_oracle": 10}])
def test_config_validation(kw):
    with pytest.raises(InvalidParameterError):
        SimConfig(**kw)
