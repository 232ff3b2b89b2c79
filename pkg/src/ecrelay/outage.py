"""Fixed-target-rate operation and per-link outage.

With fixed target rates each node needs a known energy.  A cycle serves both
links when the source and the relays (helped by at most one transfer) can
cover the requirements, otherwise it serves one link, otherwise none.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .model import TOL, ChannelRealization, EnergyState, InvalidParameterError, SystemParams

__all__ = [
    "TargetRates",
    "Scenario",
    "OutageOutcome",
    "OutageBatch",
    "required_energies",
    "classify_outage",
    "classify_batch",
]


@dataclass(frozen=True)
class TargetRates:
    r1_star: float = 1.5
    r2_star: float = 1.5

    def __post_init__(self):
        for v in (self.r1_star, self.r2_star):
            if not (np.isfinite(v) and v >= 0):
                raise InvalidParameterError(f"target rates must be finite and >= 0, got {v!r}")


class Scenario(str, enum.Enum):
    A = "A"  # both links served
    B = "B"  # only link 1 served
    C = "C"  # only link 2 served
    D = "D"  # nothing served


_SCENARIOS = tuple(Scenario)


@dataclass(frozen=True)
class OutageOutcome:
    out_link1: bool
    out_link2: bool
    delta12: float
    delta21: float
    consumed: tuple
    scenario: Scenario


@dataclass
class OutageBatch:
    out_link1: np.ndarray
    out_link2: np.ndarray
    delta12: np.ndarray
    delta21: np.ndarray
    e_s1: np.ndarray
    e_s2: np.ndarray
    e_R1: np.ndarray
    e_R2: np.ndarray
    scenario: np.ndarray

    def outcome(self, i=0) -> OutageOutcome:
        return OutageOutcome(
            bool(self.out_link1[i]), bool(self.out_link2[i]),
            float(self.delta12[i]), float(self.delta21[i]),
            (float(self.e_s1[i]), float(self.e_s2[i]), float(self.e_R1[i]), float(self.e_R2[i])),
            _SCENARIOS[int(self.scenario[i])],
        )

    def leftover(self, E_S, E_R1, E_R2, gamma12, gamma21):
        """Battery contents after the cycle's consumption and transfers."""
        S = E_S - self.e_s1 - self.e_s2
        R1 = E_R1 - self.e_R1 - self.delta12 + gamma21 * self.delta21
        R2 = E_R2 - self.e_R2 - self.delta21 + gamma12 * self.delta12
        return np.maximum(S, 0.0), np.maximum(R1, 0.0), np.maximum(R2, 0.0)


def _need(noise, rate, gain):
    gain = np.asarray(gain, float)
    num = noise * np.expm1(rate * np.log(2.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        e = np.where(gain > 0, num / np.where(gain > 0, gain, 1.0), np.inf)
    return np.where(num == 0, 0.0, e)


def required_energies(targets: TargetRates, ch, params: SystemParams):
    """Energies ``(e_s1, e_s2, e_R1, e_R2)`` that exactly meet the target rates.

    A dead channel needs infinite energy.  Accepts a ``ChannelRealization`` or
    any object with array-valued ``h1_sq ... g2_sq`` attributes.
    """
    p = params
    out = (
        _need(p.sigma_w1_sq, targets.r1_star, ch.h1_sq),
        _need(p.sigma_w2_sq, targets.r2_star, ch.h2_sq),
        _need(p.sigma_wb1_sq, targets.r1_star, ch.g1_sq),
        _need(p.sigma_wb2_sq, targets.r2_star, ch.g2_sq),
    )
    if isinstance(ch, ChannelRealization):
        return tuple(float(x) for x in out)
    return out


def classify_batch(E_S, E_R1, E_R2, req, gamma12, gamma21, ec_enabled=True) -> OutageBatch:
    """Decide which links each cycle serves and how energy moves between relays.

    Both links are tried first, then a single link.  When either single link
    would work but not both, a link that needs no transfer is preferred, then
    the one cheaper in source energy, then link 1.
    """
    s1, s2, r1, r2 = (np.asarray(x, float) for x in req)
    E_S, E_R1, E_R2 = (np.asarray(x, float) for x in (E_S, E_R1, E_R2))
    E_S, E_R1, E_R2, s1, s2, r1, r2 = np.broadcast_arrays(E_S, E_R1, E_R2, s1, s2, r1, r2)
    ec = bool(ec_enabled)

    with np.errstate(invalid="ignore"):
        own1 = r1 <= E_R1 + TOL
        own2 = r2 <= E_R2 + TOL
        need21 = np.maximum(r1 - E_R1, 0.0) / gamma21  # R2 -> R1 transfer covering link 1
        need12 = np.maximum(r2 - E_R2, 0.0) / gamma12  # R1 -> R2 transfer covering link 2

        # both links, at most one transfer from the other relay's surplus
        src_both = s1 + s2 <= E_S + TOL
        both_own = own1 & own2
        both_21 = ec & ~own1 & own2 & (need21 <= E_R2 - r2 + TOL)
        both_12 = ec & own1 & ~own2 & (need12 <= E_R1 - r1 + TOL)
        serve_both = src_both & (both_own | both_21 | both_12)

        # one link; the other relay is off and lends its whole battery
        via1 = ec & ~own1 & (need21 <= E_R2 + TOL)
        via2 = ec & ~own2 & (need12 <= E_R1 + TOL)
        ok1 = (s1 <= E_S + TOL) & (own1 | via1)
        ok2 = (s2 <= E_S + TOL) & (own2 | via2)

    pref1 = np.where(
        own1 != own2, own1,
        np.where(s1 != s2, s1 < s2, True),
    )
    only1 = ~serve_both & ok1 & (~ok2 | pref1)
    only2 = ~serve_both & ok2 & ~only1

    serve1 = serve_both | only1
    serve2 = serve_both | only2
    d21 = np.where(serve1 & ~own1, need21, 0.0)
    d12 = np.where(serve2 & ~own2, need12, 0.0)
    scenario = np.select([serve_both, only1, only2], [0, 1, 2], 3).astype(np.int8)
    return OutageBatch(
        ~serve1, ~serve2, d12, d21,
        np.where(serve1, s1, 0.0), np.where(serve2, s2, 0.0),
        np.where(serve1, r1, 0.0), np.where(serve2, r2, 0.0),
        scenario,
    )


def classify_outage(energy: EnergyState, req, params: SystemParams) -> OutageOutcome:
    one = lambda x: np.atleast_1d(np.asarray(x, float))
    b = classify_batch(one(energy.E_S), one(energy.E_R1), one(energy.E_R2),
                       [one(r) for r in req], params.gamma12, params.gamma21, params.ec_enabled)
    return b.outcome(0)
