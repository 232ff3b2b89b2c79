"""Rate-maximizing allocation for a two-hop network with energy-conferencing relays."""

from .model import (
    TOL,
    CaseLabel,
    ChannelRealization,
    CycleSolution,
    Direction,
    EnergyState,
    InvalidParameterError,
    SavedEnergy,
    SystemParams,
    avg_dest_snr,
    link_rate,
    total_rate,
)
from .optimizer import (
    CycleBatch,
    Network,
    delta_unconstrained,
    energy_saved,
    required_relay_energy,
    required_source_energy,
    search_delta,
    solve_batch,
    solve_batch_no_ec,
    solve_cycle,
    solve_cycle_no_ec,
)
from .oracle import oracle_solve
from .outage import OutageOutcome, Scenario, TargetRates, classify_outage, required_energies
from .sim import SimConfig, SweepRow, draw_cycle, run_sweep, run_trial
from .waterfill import WaterfillResult, capped_waterfill_two, waterfill_two

__version__ = "0.1.0"
