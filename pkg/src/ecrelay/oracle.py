"""Brute-force reference solver.

For each transfer direction the transfer is swept over a uniform grid and,
for every grid point, the source energy is split by the exact capped
water-fill with the relays' second-hop rates as caps.  Slow but simple; the
only approximation is the transfer grid.
"""

from __future__ import annotations

import numpy as np

from .model import (
    CaseLabel,
    ChannelRealization,
    CycleSolution,
    EnergyState,
    InvalidParameterError,
    SystemParams,
)
from .waterfill import cap_energy, capped_fill

__all__ = ["oracle_solve"]


def _hop_rate(gain, energy, noise):
    return np.log2(1.0 + gain * energy / noise)


def _floor(noise, gain):
    return noise / gain if gain > 0 else np.inf


def oracle_solve(energy: EnergyState, ch: ChannelRealization, params: SystemParams,
                 grid_n: int = 4096) -> CycleSolution:
    """Best allocation over transfers ``delta = E_donor * k / grid_n``, ``k = 0..grid_n``.

    Grids are nested when ``grid_n`` doubles, so refining never loses the
    previous optimum.  Ties go to R1->R2, then to the smaller transfer.
    """
    if grid_n < 64:
        raise InvalidParameterError("grid_n must be >= 64")
    p = params
    N1 = _floor(p.sigma_w1_sq, ch.h1_sq)
    N2 = _floor(p.sigma_w2_sq, ch.h2_sq)
    k = np.arange(grid_n + 1) / grid_n

    best = None
    directions = [(+1, energy.E_R1), (-1, energy.E_R2)] if p.ec_enabled else [(+1, 0.0)]
    for sign, donor in directions:
        d = donor * k
        if sign > 0:
            B1, B2 = np.maximum(energy.E_R1 - d, 0), energy.E_R2 + p.gamma12 * d
        else:
            B1, B2 = energy.E_R1 + p.gamma21 * d, np.maximum(energy.E_R2 - d, 0)
        cap1 = _hop_rate(ch.g1_sq, B1, p.sigma_wb1_sq)
        cap2 = _hop_rate(ch.g2_sq, B2, p.sigma_wb2_sq)
        e1, e2 = capped_fill(N1, N2, energy.E_S, cap_energy(cap1, N1), cap_energy(cap2, N2))
        r1 = np.minimum(_hop_rate(ch.h1_sq, e1, p.sigma_w1_sq), cap1)
        r2 = np.minimum(_hop_rate(ch.h2_sq, e2, p.sigma_w2_sq), cap2)
        total = r1 + r2
        i = int(np.argmax(total))
        if best is None or total[i] > best[0]:
            best = (total[i], sign, d[i], e1[i], e2[i], B1[i], B2[i], r1[i], r2[i])

    c, sign, d, e1, e2, B1, B2, r1, r2 = best
    if c <= 0:
        return CycleSolution(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, CaseLabel.DEGENERATE, 0.0, 0.0)

    def matched(rate, gain, noise, budget):
        if rate <= 0:
            return 0.0
        return min(noise * np.expm1(rate * np.log(2.0)) / gain, budget)

    eR1 = matched(r1, ch.g1_sq, p.sigma_wb1_sq, B1)
    eR2 = matched(r2, ch.g2_sq, p.sigma_wb2_sq, B2)
    d12, d21 = (d, 0.0) if sign > 0 else (0.0, d)
    label = CaseLabel.B4 if d21 > 0 else CaseLabel.B2
    return CycleSolution(float(e1), float(e2), float(eR1), float(eR2), float(d12), float(d21),
                         label, float(r1), float(r2))
