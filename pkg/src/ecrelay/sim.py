"""Seeded Monte Carlo sweeps over the average destination SNR.

Random numbers
--------------
Trial ``t`` owns the stream ``default_rng(SeedSequence(seed, spawn_key=(t,)))``
and draws, for all its cycles at once, a ``(cycles, 4)`` block of unit-mean
exponentials (|h1|^2, |h2|^2, |g1|^2, |g2|^2 before scaling) followed by a
``(cycles, 3)`` block of standard normals (harvests at S, R1, R2).  The
stream does not depend on the SNR point, so every point of a sweep sees the
same underlying draws and the arms compared at a point share them exactly.
Trials are processed in fixed blocks, which keeps results bit-identical no
matter how many worker processes are used.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .model import CASE_ORDER, ChannelRealization, EnergyState, InvalidParameterError, SystemParams
from .optimizer import Network, saved_batch, solve_batch, solve_batch_no_ec
from .oracle import oracle_solve
from .outage import TargetRates, classify_batch, required_energies

__all__ = [
    "SimConfig",
    "SweepRow",
    "draw_cycle",
    "trial_rng",
    "params_for_snr",
    "random_instances",
    "run_trial",
    "run_sweep",
    "OUTAGE_ARMS",
]

MODES = ("capacity", "outage")
BLOCK_TRIALS = 500

#: (ec_enabled, ess_enabled, column suffix) of the four outage arms
OUTAGE_ARMS = (
    (True, True, "ec"),
    (False, True, "noec"),
    (True, False, "ec_noess"),
    (False, False, "noec_noess"),
)


@dataclass(frozen=True)
class SimConfig:
    params: SystemParams = SystemParams()
    mode: str = "capacity"
    targets: TargetRates = TargetRates()
    snr_points_db: tuple = tuple(float(x) for x in range(0, 31, 2))
    trials: int = 10_000
    cycles_per_trial: int = 10
    seed: int = 0
    grid_n_oracle: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidParameterError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.trials < 1 or self.cycles_per_trial < 1:
            raise InvalidParameterError("trials and cycles_per_trial must be >= 1")
        if len(self.snr_points_db) == 0:
            raise InvalidParameterError("snr_points_db must not be empty")
        if self.grid_n_oracle and self.grid_n_oracle < 64:
            raise InvalidParameterError("grid_n_oracle must be 0 or >= 64")
        object.__setattr__(self, "snr_points_db", tuple(float(x) for x in self.snr_points_db))


@dataclass
class SweepRow:
    snr_db: float
    avg_c_ec: float = np.nan
    avg_c_noec: float = np.nan
    gain: float = np.nan
    avg_r1_ec: float = np.nan
    avg_r2_ec: float = np.nan
    avg_r1_noec: float = np.nan
    avg_r2_noec: float = np.nan
    outage_d1_ec: float = np.nan
    outage_d2_ec: float = np.nan
    outage_d1_noec: float = np.nan
    outage_d2_noec: float = np.nan
    outage_d1_ec_noess: float = np.nan
    outage_d2_ec_noess: float = np.nan
    outage_d1_noec_noess: float = np.nan
    outage_d2_noec_noess: float = np.nan
    oracle_gap: float = np.nan
    case_pct: dict = field(default_factory=dict)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def _unit_draws(rng, cycles):
    return rng.standard_exponential((cycles, 4)), rng.standard_normal((cycles, 3))


def _scale(expo, norm, p: SystemParams):
    gains = expo * np.array([p.sigma_h1_sq, p.sigma_h2_sq, p.sigma_g1_sq, p.sigma_g2_sq])
    mu = np.array([p.mu_S, p.mu_R1, p.mu_R2])
    sd = np.array([p.sd_S, p.sd_R1, p.sd_R2])
    # harvests below zero are clipped to an empty harvest
    energy = np.maximum(mu + sd * norm, 0.0)
    return gains, energy


def draw_cycle(rng: np.random.Generator, params: SystemParams):
    """One cycle of Rayleigh channel gains and Gaussian energy harvests."""
    gains, energy = _scale(*_unit_draws(rng, 1), params)
    return ChannelRealization(*gains[0]), EnergyState(*energy[0])


def params_for_snr(params: SystemParams, snr_db: float) -> SystemParams:
    """Set equal second-hop variances so the average destination SNR is ``snr_db``."""
    denom = params.mu_R1 / params.sigma_wb1_sq + params.mu_R2 / params.sigma_wb2_sq
    if denom <= 0:
        raise InvalidParameterError("mu_R1 + mu_R2 must be > 0 to reach a target SNR")
    var = 2.0 * 10.0 ** (snr_db / 10.0) / denom
    return dataclasses.replace(params, sigma_g1_sq=var, sigma_g2_sq=var)


def random_instances(rng: np.random.Generator, n: int, params: SystemParams,
                     snr_db_range=(0.0, 30.0)):
    """``n`` independent single-cycle instances for verification batteries.

    The second-hop variance is drawn per instance from the SNR range, the rest
    follows ``params``.  Returns ``(energy, gains)`` arrays of shape (n, 3), (n, 4).
    """
    snr = rng.uniform(*snr_db_range, size=n)
    expo, norm = _unit_draws(rng, n)
    gains, energy = _scale(expo, norm, params)
    denom = params.mu_R1 / params.sigma_wb1_sq + params.mu_R2 / params.sigma_wb2_sq
    var = 2.0 * 10.0 ** (snr / 10.0) / denom
    gains[:, 2] = expo[:, 2] * var
    gains[:, 3] = expo[:, 3] * var
    return energy, gains


def _block_draws(seed, trials, cycles):
    expo = np.empty((len(trials), cycles, 4))
    norm = np.empty((len(trials), cycles, 3))
    for i, t in enumerate(trials):
        expo[i], norm[i] = _unit_draws(trial_rng(seed, t), cycles)
    return expo, norm


def _capacity_block(p: SystemParams, expo, norm):
    n, cycles = expo.shape[:2]
    keys = ("c_ec", "c_noec", "r1_ec", "r2_ec", "r1_noec", "r2_noec", "case")
    rec = {k: np.empty((n, cycles)) for k in keys}
    rec["case"] = np.empty((n, cycles), np.int8)
    bank_ec = np.zeros((3, n))
    bank_no = np.zeros((3, n))
    for c in range(cycles):
        gains, harvest = _scale(expo[:, c], norm[:, c], p)
        harvest = harvest.T
        arms = []
        for bank, solver in ((bank_ec, lambda net: solve_batch(net, p.ec_enabled)),
                             (bank_no, solve_batch_no_ec)):
            avail = harvest + bank
            net = Network.from_arrays(*avail, *gains.T, p)
            sol = solver(net)
            if p.ess_enabled:
                bank[:] = saved_batch(net, sol)
            arms.append(sol)
        ec, no = arms
        rec["c_ec"][:, c], rec["c_noec"][:, c] = ec.c_total, no.c_total
        rec["r1_ec"][:, c], rec["r2_ec"][:, c] = ec.rate1, ec.rate2
        rec["r1_noec"][:, c], rec["r2_noec"][:, c] = no.rate1, no.rate2
        rec["case"][:, c] = ec.case
    return rec


class _Gains:
    def __init__(self, g):
        self.h1_sq, self.h2_sq, self.g1_sq, self.g2_sq = g


def _outage_block(p: SystemParams, targets: TargetRates, expo, norm):
    n, cycles = expo.shape[:2]
    rec = {}
    banks = {}
    for ec, ess, tag in OUTAGE_ARMS:
        rec[f"out1_{tag}"] = np.empty((n, cycles), bool)
        rec[f"out2_{tag}"] = np.empty((n, cycles), bool)
        rec[f"battery_{tag}"] = np.empty((n, cycles, 3))
        banks[tag] = np.zeros((3, n))
    for c in range(cycles):
        gains, harvest = _scale(expo[:, c], norm[:, c], p)
        req = required_energies(targets, _Gains(gains.T), p)
        for ec, ess, tag in OUTAGE_ARMS:
            avail = harvest.T + banks[tag]
            rec[f"battery_{tag}"][:, c] = avail.T
            out = classify_batch(*avail, req, p.gamma12, p.gamma21, ec)
            rec[f"out1_{tag}"][:, c] = out.out_link1
            rec[f"out2_{tag}"][:, c] = out.out_link2
            if ess:
                banks[tag] = np.array(out.leftover(*avail, p.gamma12, p.gamma21))
    return rec


def _run_block(args):
    config, params, trials = args
    expo, norm = _block_draws(config.seed, trials, config.cycles_per_trial)
    if config.mode == "capacity":
        return _capacity_block(params, expo, norm)
    return _outage_block(params, config.targets, expo, norm)


def run_trial(config: SimConfig, trial_index: int) -> dict:
    """Per-cycle records of one trial, using ``config.params`` as given.

    Capacity mode records total and per-link rates of both arms plus the
    case code of the energy-cooperation arm.  Outage mode records the link
    outage flags and the start-of-cycle batteries of the four EC x ESS arms.
    """
    rec = _run_block((config, config.params, [trial_index]))
    return {k: v[0] for k, v in rec.items()}


def _oracle_gap(config, params):
    n = min(config.trials, 16)
    expo, norm = _block_draws(config.seed, range(n), 1)
    gap = 0.0
    for i in range(n):
        gains, energy = _scale(expo[i, 0], norm[i, 0], params)
        e, ch = EnergyState(*energy), ChannelRealization(*gains)
        sol = solve_batch(Network.single(e, ch, params), params.ec_enabled).solution()
        ref = oracle_solve(e, ch, params, config.grid_n_oracle)
        gap = max(gap, abs(sol.c_total - ref.c_total))
    return gap


def _aggregate(config, snr_db, recs):
    cat = {k: np.concatenate([r[k] for r in recs]) for k in recs[0]}
    row = SweepRow(snr_db=snr_db)
    if config.mode == "capacity":
        row.avg_c_ec = float(np.mean(cat["c_ec"]))
        row.avg_c_noec = float(np.mean(cat["c_noec"]))
        row.gain = row.avg_c_ec - row.avg_c_noec
        for k in ("r1_ec", "r2_ec", "r1_noec", "r2_noec"):
            setattr(row, f"avg_{k}", float(np.mean(cat[k])))
        counts = np.bincount(cat["case"].ravel(), minlength=len(CASE_ORDER))
        total = int(counts.sum())
        row.case_pct = {lab: 100.0 * int(c) / total for lab, c in zip(CASE_ORDER, counts)}
    else:
        for _, _, tag in OUTAGE_ARMS:
            setattr(row, f"outage_d1_{tag}", float(np.mean(cat[f"out1_{tag}"])))
            setattr(row, f"outage_d2_{tag}", float(np.mean(cat[f"out2_{tag}"])))
        row.case_pct = {lab: np.nan for lab in CASE_ORDER}
    return row


def run_sweep(config: SimConfig) -> list:
    """One ``SweepRow`` per entry of ``config.snr_points_db``, in that order."""
    point_params = [params_for_snr(config.params, s) for s in config.snr_points_db]
    blocks = [list(range(a, min(a + BLOCK_TRIALS, config.trials)))
              for a in range(0, config.trials, BLOCK_TRIALS)]
    tasks = [(config, pp, b) for pp in point_params for b in blocks]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_run_block, tasks))
    else:
        results = [_run_block(t) for t in tasks]

    rows = []
    nb = len(blocks)
    for i, (snr, pp) in enumerate(zip(config.snr_points_db, point_params)):
        row = _aggregate(config, snr, results[i * nb:(i + 1) * nb])
        if config.grid_n_oracle and config.mode == "capacity":
            row.oracle_gap = _oracle_gap(config, pp)
        rows.append(row)
    return rows
