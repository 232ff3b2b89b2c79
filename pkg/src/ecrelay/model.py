"""Domain types for the two-hop energy-conferencing relay network.

Energies are per-symbol quantities in mJ and rates are in bits/s/Hz.
Only energy-to-noise ratios enter the rate formulas, so the unit of
energy is arbitrary as long as it is used consistently.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields

import numpy as np

__all__ = [
    "TOL",
    "InvalidParameterError",
    "SystemParams",
    "ChannelRealization",
    "EnergyState",
    "CaseLabel",
    "Direction",
    "CycleSolution",
    "SavedEnergy",
    "link_rate",
    "total_rate",
    "avg_dest_snr",
]

#: Slack used for every energy-budget comparison (mJ).
TOL = 1e-9


class InvalidParameterError(ValueError):
    """Raised when an input violates an operation's precondition."""


class CaseLabel(str, enum.Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    B1 = "B1"
    B2 = "B2"
    B3 = "B3"
    B4 = "B4"
    DEGENERATE = "DEG"


#: Fixed ordering used for integer case codes in batch results and CSV columns.
CASE_ORDER = tuple(CaseLabel)


class Direction(str, enum.Enum):
    R1toR2 = "R1toR2"
    R2toR1 = "R2toR1"
    NONE = "None"


@dataclass(frozen=True)
class SystemParams:
    """Static system parameters.

    Noise variances are split into the relay side (``sigma_w*``) and the
    destination side (``sigma_wb*``).  The transfer efficiencies must be
    strictly positive; switch energy cooperation off with ``ec_enabled``.
    """

    sigma_w1_sq: float = 1.0
    sigma_w2_sq: float = 1.0
    sigma_wb1_sq: float = 1.0
    sigma_wb2_sq: float = 1.0
    gamma12: float = 0.9
    gamma21: float = 0.9
    sigma_h1_sq: float = 1.0
    sigma_h2_sq: float = 1.0
    sigma_g1_sq: float = 1.0
    sigma_g2_sq: float = 1.0
    mu_S: float = 100.0
    sd_S: float = 50.0
    mu_R1: float = 100.0
    sd_R1: float = 50.0
    mu_R2: float = 100.0
    sd_R2: float = 50.0
    ess_enabled: bool = True
    ec_enabled: bool = True

    def __post_init__(self):
        for f in fields(self):
            if f.type in ("bool", bool):
                continue
            value = getattr(self, f.name)
            if not math.isfinite(value) or value < 0:
                raise InvalidParameterError(f"{f.name} must be finite and >= 0, got {value!r}")
        for name in ("sigma_w1_sq", "sigma_w2_sq", "sigma_wb1_sq", "sigma_wb2_sq"):
            if getattr(self, name) <= 0:
                raise InvalidParameterError(f"{name} must be > 0")
        for name in ("gamma12", "gamma21"):
            g = getattr(self, name)
            if not 0 < g <= 1:
                raise InvalidParameterError(f"{name} must lie in (0, 1], got {g!r}")


@dataclass(frozen=True)
class ChannelRealization:
    """Channel power gains |h1|^2, |h2|^2, |g1|^2, |g2|^2 for one cycle."""

    h1_sq: float
    h2_sq: float
    g1_sq: float
    g2_sq: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not v >= 0:
                raise InvalidParameterError(f"{f.name} must be >= 0, got {v!r}")


@dataclass(frozen=True)
class EnergyState:
    """Energy available per symbol at S, R1 and R2 at the start of a cycle."""

    E_S: float
    E_R1: float
    E_R2: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not v >= 0:
                raise InvalidParameterError(f"{f.name} must be >= 0, got {v!r}")


@dataclass(frozen=True)
class CycleSolution:
    e_s1: float
    e_s2: float
    e_R1: float
    e_R2: float
    delta12: float
    delta21: float
    case_label: CaseLabel
    rate1: float
    rate2: float
    c_total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "c_total", self.rate1 + self.rate2)

    @property
    def direction(self) -> Direction:
        if self.delta12 > 0:
            return Direction.R1toR2
        if self.delta21 > 0:
            return Direction.R2toR1
        return Direction.NONE


@dataclass(frozen=True)
class SavedEnergy:
    saved_S: float
    saved_R1: float
    saved_R2: float


def link_rate(gain_sq, energy, noise_var):
    """Shannon rate ``log2(1 + gain_sq * energy / noise_var)`` of one hop.

    Works elementwise on numpy arrays as well as on scalars.
    """
    if np.any(np.asarray(noise_var) <= 0):
        raise InvalidParameterError("noise variance must be > 0")
    out = np.log2(1.0 + np.asarray(gain_sq) * np.asarray(energy) / noise_var)
    return float(out) if np.ndim(out) == 0 else out


def total_rate(rate_sr1, rate_r1d1, rate_sr2, rate_r2d2):
    """Sum of the two decode-and-forward end-to-end rates."""
    return min(rate_sr1, rate_r1d1) + min(rate_sr2, rate_r2d2)


def avg_dest_snr(params: SystemParams) -> float:
    """Average destination SNR (linear): mean of the two per-destination SNRs."""
    if params.sigma_wb1_sq <= 0 or params.sigma_wb2_sq <= 0:
        raise InvalidParameterError("destination noise variances must be > 0")
    return 0.5 * (
        params.sigma_g1_sq * params.mu_R1 / params.sigma_wb1_sq
        + params.sigma_g2_sq * params.mu_R2 / params.sigma_wb2_sq
    )
