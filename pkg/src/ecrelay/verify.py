"""Invariant batteries used by ``ecrelay --mode verify``."""

from __future__ import annotations

import logging

import numpy as np

from .model import CASE_ORDER, CaseLabel, ChannelRealization, Direction, EnergyState, SystemParams
from .optimizer import Network, second_hop_sum_rate, solve_batch, solve_batch_no_ec
from .oracle import oracle_solve
from .sim import random_instances

log = logging.getLogger(__name__)

ORACLE_TOL = 5e-3
FEAS_TOL = 1e-9
MATCH_TOL = 1e-6
DOMINANCE_TOL = 1e-9
STATIONARITY_STEP = 1e-4
STATIONARITY_TOL = 1e-4


def budget_violation(net: Network, sol) -> np.ndarray:
    """Largest amount (mJ) by which any energy constraint is exceeded, per cycle."""
    g12, g21 = net.gamma12, net.gamma21
    parts = [
        sol.e_s1 + sol.e_s2 - net.E_S,
        sol.e_R1 - (net.E_R1 - sol.delta12 + g21 * sol.delta21),
        sol.e_R2 - (net.E_R2 - sol.delta21 + g12 * sol.delta12),
        sol.delta12 - net.E_R1,
        sol.delta21 - net.E_R2,
        -sol.e_s1, -sol.e_s2, -sol.e_R1, -sol.e_R2, -sol.delta12, -sol.delta21,
        np.minimum(sol.delta12, sol.delta21),
    ]
    return np.max(np.stack(parts), axis=0)


def hop_gaps(net: Network, sol) -> np.ndarray:
    """|first-hop rate - second-hop rate| per link, shape (2, n)."""
    def rate(e, N):
        with np.errstate(invalid="ignore"):
            return np.where(e > 0, np.log2(1 + e / N), 0.0)

    g1 = np.abs(rate(sol.e_s1, net.Ns1) - rate(sol.e_R1, net.Nr1))
    g2 = np.abs(rate(sol.e_s2, net.Ns2) - rate(sol.e_R2, net.Nr2))
    return np.stack([g1, g2])


def interior_stationarity(net: Network, sol) -> np.ndarray:
    """Central-difference slope of the second-hop sum rate at interior B1/B3 transfers.

    Returns NaN for cycles that are not interior B1/B3 solutions.
    """
    out = np.full(len(sol), np.nan)
    h = STATIONARITY_STEP
    for label, direction, d, donor in (
        (CaseLabel.B1, Direction.R1toR2, sol.delta12, net.E_R1),
        (CaseLabel.B3, Direction.R2toR1, sol.delta21, net.E_R2),
    ):
        code = CASE_ORDER.index(label)
        slack = net.E_S - sol.e_s1 - sol.e_s2
        mask = (sol.case == code) & (d > h) & (d < donor - h) & (slack > 0)
        if np.any(mask):
            sub = net.take(np.flatnonzero(mask))
            dd = d[mask]
            fd = (second_hop_sum_rate(sub, direction, dd + h)
                  - second_hop_sum_rate(sub, direction, dd - h)) / (2 * h)
            out[mask] = fd
    return out


def run_verification(instances: int = 1000, grid: int = 4096, seed: int = 1,
                     params: SystemParams | None = None) -> dict:
    """Solver vs oracle plus the feasibility, matching and dominance batteries.

    Returns a dict of named checks, each ``(passed, worst_value)``.
    """
    params = params or SystemParams()
    rng = np.random.default_rng(seed)
    energy, gains = random_instances(rng, instances, params)
    net = Network.from_arrays(*energy.T, *gains.T, params)
    sol = solve_batch(net, params.ec_enabled)
    base = solve_batch_no_ec(net)

    gaps = np.empty(instances)
    for i in range(instances):
        ref = oracle_solve(EnergyState(*energy[i]), ChannelRealization(*gains[i]), params, grid)
        gaps[i] = sol.c_total[i] - ref.c_total
    worst_gap = float(np.max(np.abs(gaps))) if instances else 0.0
    below = float(-np.min(gaps)) if instances else 0.0

    viol = float(np.max(budget_violation(net, sol), initial=-np.inf))
    viol_base = float(np.max(budget_violation(net, base), initial=-np.inf))
    match = float(np.max(hop_gaps(net, sol), initial=0.0))
    dom = float(np.max(base.c_total - sol.c_total, initial=-np.inf))
    stat = interior_stationarity(net, sol)
    stat_worst = float(np.nanmax(np.abs(stat))) if np.any(~np.isnan(stat)) else 0.0

    report = {
        "oracle_agreement": (worst_gap <= ORACLE_TOL, worst_gap),
        "not_below_oracle": (below <= DOMINANCE_TOL, below),
        "feasibility": (viol <= FEAS_TOL, viol),
        "feasibility_no_ec": (viol_base <= FEAS_TOL, viol_base),
        "rate_matching": (match <= MATCH_TOL, match),
        "ec_dominance": (dom <= DOMINANCE_TOL, dom),
        "stationarity": (stat_worst <= STATIONARITY_TOL, stat_worst),
    }
    for name, (ok, val) in report.items():
        log.info("%-20s %s  worst=%.3g", name, "ok" if ok else "FAIL", val)
    return report
