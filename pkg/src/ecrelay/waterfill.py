"""Two-channel water-filling, with and without per-channel rate caps.

A channel is described by its inverse-SNR floor ``N = noise / gain``; a dead
channel (zero gain) has ``N = inf`` and never receives energy.  The array
functions ``fill`` and ``capped_fill`` broadcast over numpy inputs and are the
workhorses of the optimizer; ``waterfill_two`` and ``capped_waterfill_two``
are the scalar front ends.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import TOL, InvalidParameterError

__all__ = [
    "WaterfillResult",
    "waterfill_two",
    "capped_waterfill_two",
    "fill",
    "capped_fill",
    "cap_energy",
]


@dataclass(frozen=True)
class WaterfillResult:
    e1: float
    e2: float
    water_level: float
    sum_rate: float


def fill(N1, N2, budget):
    """Split ``budget`` over two parallel channels with floors ``N1``, ``N2``.

    Returns ``(e1, e2)`` with ``e1 + e2 == budget`` unless both channels are
    dead.  Closed form: only the better channel is active while the budget
    does not exceed the gap between the floors.
    """
    N1, N2, budget = np.broadcast_arrays(
        np.asarray(N1, float), np.asarray(N2, float), np.asarray(budget, float)
    )
    with np.errstate(invalid="ignore"):
        only1 = budget <= N2 - N1
        only2 = budget <= N1 - N2
        e1 = 0.5 * (budget + N2 - N1)
    e1 = np.where(only1, budget, np.where(only2, 0.0, e1))
    e2 = np.where(only2 & ~only1, budget, budget - e1)
    e2 = np.where(only1, 0.0, e2)
    both_dead = np.isinf(N1) & np.isinf(N2)
    e1 = np.where(both_dead, 0.0, e1)
    e2 = np.where(both_dead, 0.0, e2)
    return e1, e2


def capped_fill(N1, N2, budget, u1, u2):
    """Water-fill with per-channel energy ceilings ``u1``, ``u2``.

    A channel whose share exceeds its ceiling is pinned to it and the rest of
    the budget goes to the other channel, up to that channel's ceiling.  Energy
    beyond both ceilings is left unspent.
    """
    N1, N2, budget, u1, u2 = np.broadcast_arrays(
        *(np.asarray(a, float) for a in (N1, N2, budget, u1, u2))
    )
    e1, e2 = fill(N1, N2, budget)
    over1 = e1 > u1
    over2 = ~over1 & (e2 > u2)
    e1_new = np.where(over1, u1, np.where(over2, np.minimum(budget - u2, u1), e1))
    e2_new = np.where(over1, np.minimum(budget - u1, u2), np.where(over2, u2, e2))
    e1_new = np.where(np.isinf(N1), 0.0, np.maximum(e1_new, 0.0))
    e2_new = np.where(np.isinf(N2), 0.0, np.maximum(e2_new, 0.0))
    return e1_new, e2_new


def cap_energy(cap, N):
    """Energy at which a channel with floor ``N`` reaches rate ``cap``."""
    cap = np.asarray(cap, float)
    N = np.asarray(N, float)
    with np.errstate(invalid="ignore"):
        u = np.expm1(cap * np.log(2.0)) * N
    return np.where(cap <= 0, 0.0, u)


def _rate(e, N):
    with np.errstate(invalid="ignore"):
        r = np.log2(1.0 + e / N)
    return np.where(e > 0, r, 0.0)


def _check(N1, N2, budget):
    if budget < 0:
        raise InvalidParameterError(f"budget must be >= 0, got {budget!r}")
    if not (N1 > 0 and N2 > 0):
        raise InvalidParameterError("channel floors must be > 0 (inf for a dead channel)")


def waterfill_two(N1: float, N2: float, budget: float) -> WaterfillResult:
    """Rate-maximizing split of ``budget`` over two Gaussian channels.

    Examples
    --------
    >>> waterfill_two(1.0, 2.0, 1.0)
    WaterfillResult(e1=1.0, e2=0.0, water_level=2.0, sum_rate=1.0)
    """
    _check(N1, N2, budget)
    e1, e2 = (float(x) for x in fill(N1, N2, budget))
    if e1 > 0 and e2 > 0:
        nu = 0.5 * (budget + N1 + N2)
    elif e1 > 0 or (e2 == 0 and N1 <= N2):
        nu = N1 + e1
    else:
        nu = N2 + e2
    return WaterfillResult(e1, e2, float(nu), float(_rate(e1, N1) + _rate(e2, N2)))


def capped_waterfill_two(N1: float, N2: float, budget: float, cap1: float, cap2: float):
    """Maximize ``min(r1, cap1) + min(r2, cap2)`` with ``e1 + e2 <= budget``.

    Returns ``(e1, e2, sum_rate)``.  The allocation is the minimal-energy
    maximizer: no channel receives energy past the point where it hits its cap.
    """
    _check(N1, N2, budget)
    if cap1 < 0 or cap2 < 0:
        raise InvalidParameterError("rate caps must be >= 0")
    u1, u2 = cap_energy(cap1, N1), cap_energy(cap2, N2)
    e1, e2 = (float(x) for x in capped_fill(N1, N2, budget, u1, u2))
    # ceiling energies come from 2**cap - 1, clip the rounding back to the cap
    r = min(float(_rate(e1, N1)), cap1) + min(float(_rate(e2, N2)), cap2)
    assert e1 + e2 <= budget + TOL
    return e1, e2, r
