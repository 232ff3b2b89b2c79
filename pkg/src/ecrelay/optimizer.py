"""Per-cycle allocation for the two-relay network with energy conferencing.

The solver first assumes the source-to-relay hop is the bottleneck and
water-fills the source energy.  If the relays can match those rates, possibly
after a one-way transfer, the solution is closed form (cases A1-A3).
Otherwise each transfer direction is solved separately: the second-hop
optimal transfer is used when the source can feed it (B1/B3), and a
one-dimensional search over the transfer is run when it cannot (B2/B4).
The better direction wins.

Everything below works on numpy arrays of independent cycles; the scalar
functions at the bottom wrap single cycles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    CASE_ORDER,
    TOL,
    CaseLabel,
    ChannelRealization,
    CycleSolution,
    Direction,
    EnergyState,
    InvalidParameterError,
    SavedEnergy,
    SystemParams,
)
from .waterfill import capped_fill, fill

__all__ = [
    "CycleBatch",
    "Network",
    "solve_batch",
    "solve_batch_no_ec",
    "saved_batch",
    "second_hop_sum_rate",
    "required_relay_energy",
    "required_source_energy",
    "delta_unconstrained",
    "search_delta",
    "solve_cycle",
    "solve_cycle_no_ec",
    "energy_saved",
    "SEARCH_GRID",
]

SEARCH_GRID = 1024
_GOLDEN_ITERS = 60
_BISECT_ITERS = 64
_TIE_EPS = 1e-12
_CHUNK = 256
_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0

_CODE = {label: i for i, label in enumerate(CASE_ORDER)}


def _floor(noise, gain):
    gain = np.asarray(gain, float)
    with np.errstate(divide="ignore"):
        return np.where(gain > 0, noise / np.where(gain > 0, gain, 1.0), np.inf)


def _rate(e, N):
    with np.errstate(invalid="ignore"):
        r = np.log2(1.0 + e / N)
    return np.where(e > 0, r, 0.0)


def _relay_need(e_s, Ns, Nr):
    # relay energy whose second-hop rate equals the first-hop rate of e_s
    with np.errstate(invalid="ignore", divide="ignore"):
        q = e_s * (Nr / Ns)
    return np.where(e_s > 0, q, 0.0)


def _source_cap(B, Ns, Nr):
    # source energy whose first-hop rate equals the second-hop rate of B
    with np.errstate(invalid="ignore", divide="ignore"):
        u = B * (Ns / Nr)
    return np.where((B > 0) & np.isfinite(Nr), u, 0.0)


@dataclass
class Network:
    """A batch of cycles: available energies and inverse-SNR floors.

    ``Ns*`` are the source-to-relay floors ``sigma_w^2 / |h|^2`` and ``Nr*`` the
    relay-to-destination floors ``sigma_wb^2 / |g|^2`` (``inf`` for a dead hop).
    """

    E_S: np.ndarray
    E_R1: np.ndarray
    E_R2: np.ndarray
    Ns1: np.ndarray
    Ns2: np.ndarray
    Nr1: np.ndarray
    Nr2: np.ndarray
    gamma12: float
    gamma21: float

    @classmethod
    def from_arrays(cls, E_S, E_R1, E_R2, h1_sq, h2_sq, g1_sq, g2_sq, params: SystemParams):
        E = [np.atleast_1d(np.asarray(x, float)) for x in (E_S, E_R1, E_R2)]
        G = [np.atleast_1d(np.asarray(x, float)) for x in (h1_sq, h2_sq, g1_sq, g2_sq)]
        E = np.broadcast_arrays(*E, *G)
        E_S, E_R1, E_R2, h1, h2, g1, g2 = (np.ascontiguousarray(a) for a in E)
        if min(a.min(initial=0.0) for a in (E_S, E_R1, E_R2, h1, h2, g1, g2)) < 0:
            raise InvalidParameterError("energies and channel gains must be >= 0")
        return cls(
            E_S, E_R1, E_R2,
            _floor(params.sigma_w1_sq, h1), _floor(params.sigma_w2_sq, h2),
            _floor(params.sigma_wb1_sq, g1), _floor(params.sigma_wb2_sq, g2),
            params.gamma12, params.gamma21,
        )

    @classmethod
    def single(cls, energy: EnergyState, ch: ChannelRealization, params: SystemParams):
        return cls.from_arrays(
            energy.E_S, energy.E_R1, energy.E_R2,
            ch.h1_sq, ch.h2_sq, ch.g1_sq, ch.g2_sq, params,
        )

    def __len__(self):
        return self.E_S.shape[0]

    def take(self, idx):
        return Network(
            self.E_S[idx], self.E_R1[idx], self.E_R2[idx],
            self.Ns1[idx], self.Ns2[idx], self.Nr1[idx], self.Nr2[idx],
            self.gamma12, self.gamma21,
        )

    def column(self):
        """View with a trailing axis so per-cycle values broadcast over a grid."""
        return Network(
            *(a[:, None] for a in (self.E_S, self.E_R1, self.E_R2,
                                   self.Ns1, self.Ns2, self.Nr1, self.Nr2)),
            self.gamma12, self.gamma21,
        )

    def donor(self, direction):
        return self.E_R1 if direction is Direction.R1toR2 else self.E_R2

    def budgets(self, direction, delta):
        """Relay energies after transferring ``delta`` in ``direction``."""
        if direction is Direction.R1toR2:
            B1, B2 = self.E_R1 - delta, self.E_R2 + self.gamma12 * delta
        else:
            B1, B2 = self.E_R1 + self.gamma21 * delta, self.E_R2 - delta
        return np.maximum(B1, 0.0), np.maximum(B2, 0.0)


@dataclass
class CycleBatch:
    """Solutions for a batch of cycles, one array entry per cycle."""

    e_s1: np.ndarray
    e_s2: np.ndarray
    e_R1: np.ndarray
    e_R2: np.ndarray
    delta12: np.ndarray
    delta21: np.ndarray
    case: np.ndarray
    rate1: np.ndarray
    rate2: np.ndarray

    @property
    def c_total(self):
        return self.rate1 + self.rate2

    def __len__(self):
        return self.case.shape[0]

    def labels(self):
        return [CASE_ORDER[c] for c in self.case]

    def solution(self, i=0) -> CycleSolution:
        return CycleSolution(
            float(self.e_s1[i]), float(self.e_s2[i]),
            float(self.e_R1[i]), float(self.e_R2[i]),
            float(self.delta12[i]), float(self.delta21[i]),
            CASE_ORDER[int(self.case[i])],
            float(self.rate1[i]), float(self.rate2[i]),
        )


def _finish(net, e_s1, e_s2, e_R1, e_R2, d12, d21, case):
    r1 = np.minimum(_rate(e_s1, net.Ns1), _rate(e_R1, net.Nr1))
    r2 = np.minimum(_rate(e_s2, net.Ns2), _rate(e_R2, net.Nr2))
    # relay energy on a dead second hop buys nothing
    e_R1 = np.where(np.isinf(net.Nr1), 0.0, e_R1)
    e_R2 = np.where(np.isinf(net.Nr2), 0.0, e_R2)
    batch = CycleBatch(e_s1, e_s2, e_R1, e_R2, d12, d21, np.asarray(case, np.int8), r1, r2)
    dead = (r1 + r2) <= 0
    if np.any(dead):
        for name in ("e_s1", "e_s2", "e_R1", "e_R2", "delta12", "delta21", "rate1", "rate2"):
            arr = getattr(batch, name)
            setattr(batch, name, np.where(dead, 0.0, arr))
        batch.case = np.where(dead, _CODE[CaseLabel.DEGENERATE], batch.case).astype(np.int8)
    return batch


def second_hop_sum_rate(net: Network, direction: Direction, delta):
    """Relay-to-destination sum rate when both relays spend their whole budget."""
    B1, B2 = net.budgets(direction, delta)
    return _rate(B1, net.Nr1) + _rate(B2, net.Nr2)


def _delta_unc(net: Network, direction: Direction):
    """Stationary point of the second-hop sum rate, truncated to the donor range."""
    if direction is Direction.R1toR2:
        g, Nd, Ed, Nr, Er = net.gamma12, net.Nr1, net.E_R1, net.Nr2, net.E_R2
    else:
        g, Nd, Ed, Nr, Er = net.gamma21, net.Nr2, net.E_R2, net.Nr1, net.E_R1
    with np.errstate(invalid="ignore"):
        raw = (g * (Nd + Ed) - (Nr + Er)) / (2.0 * g)
    raw = np.where(np.isnan(raw), 0.0, raw)
    return np.clip(raw, 0.0, Ed)


def _objective(net: Network, direction: Direction, delta):
    """Best total rate for a fixed transfer: capped water-fill of the source."""
    B1, B2 = net.budgets(direction, delta)
    u1 = _source_cap(B1, net.Ns1, net.Nr1)
    u2 = _source_cap(B2, net.Ns2, net.Nr2)
    e1, e2 = capped_fill(net.Ns1, net.Ns2, net.E_S, u1, u2)
    return _rate(e1, net.Ns1) + _rate(e2, net.Ns2)


def _allocate(net: Network, direction: Direction, delta):
    """Energies for a fixed transfer; relays spend only what matches the source."""
    B1, B2 = net.budgets(direction, delta)
    u1 = _source_cap(B1, net.Ns1, net.Nr1)
    u2 = _source_cap(B2, net.Ns2, net.Nr2)
    e1, e2 = capped_fill(net.Ns1, net.Ns2, net.E_S, u1, u2)
    eR1 = np.minimum(_relay_need(e1, net.Ns1, net.Nr1), B1)
    eR2 = np.minimum(_relay_need(e2, net.Ns2, net.Nr2), B2)
    return e1, e2, eR1, eR2


def _source_feasible_delta(net: Network, direction: Direction, d_unc):
    """Nearest transfer to ``d_unc`` at which the source can match both relays.

    Source demand is linear in the transfer, so the feasible transfers form an
    interval; returns NaN where it is empty.
    """
    with np.errstate(invalid="ignore", divide="ignore"):
        k1 = np.where(np.isfinite(net.Nr1), net.Ns1 / net.Nr1, 0.0)
        k2 = np.where(np.isfinite(net.Nr2), net.Ns2 / net.Nr2, 0.0)
        if direction is Direction.R1toR2:
            slope = net.gamma12 * k2 - k1
            Ed = net.E_R1
        else:
            slope = net.gamma21 * k1 - k2
            Ed = net.E_R2
        D0 = k1 * net.E_R1 + k2 * net.E_R2
        bound = (net.E_S - D0) / slope
        lo = np.where(slope < 0, np.maximum(bound, 0.0), 0.0)
        hi = np.where(slope > 0, np.minimum(bound, Ed), Ed)
        flat_ok = D0 <= net.E_S
        lo = np.where(slope == 0, np.where(flat_ok, 0.0, np.nan), lo)
        hi = np.where(slope == 0, np.where(flat_ok, Ed, np.nan), hi)
        ok = np.isfinite(lo) & np.isfinite(hi) & (lo <= hi)
    return np.where(ok, np.clip(d_unc, np.where(ok, lo, 0), np.where(ok, hi, 0)), np.nan)


def _golden(f, lo, hi, iters=_GOLDEN_ITERS):
    """Vectorized golden-section maximization of a concave ``f`` on ``[lo, hi]``."""
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        right = f2 > f1
        lo = np.where(right, x1, lo)
        hi = np.where(right, hi, x2)
        xnew = np.where(right, lo + _INVPHI * (hi - lo), hi - _INVPHI * (hi - lo))
        fnew = f(xnew)
        x1, x2 = np.where(right, x2, xnew), np.where(right, xnew, x1)
        f1, f2 = np.where(right, f2, fnew), np.where(right, fnew, f1)
    take2 = f2 > f1
    return np.where(take2, x2, x1), np.where(take2, f2, f1)


def _search_chunk(net: Network, direction: Direction):
    Ed = net.donor(direction)
    col = net.column()
    steps = np.linspace(0.0, 1.0, SEARCH_GRID)
    grid = Ed[:, None] * steps[None, :]
    vals = _objective(col, direction, grid)
    k = np.argmax(vals, axis=1)
    rows = np.arange(len(net))
    best_d, best_v = grid[rows, k], vals[rows, k]

    spacing = Ed / (SEARCH_GRID - 1)
    lo = np.maximum(best_d - spacing, 0.0)
    hi = np.minimum(best_d + spacing, Ed)
    f = lambda d: _objective(net, direction, d)
    gd, gv = _golden(f, lo, hi)
    better = gv > best_v
    best_d, best_v = np.where(better, gd, best_d), np.where(better, gv, best_v)

    fs = _source_feasible_delta(net, direction, _delta_unc(net, direction))
    has_fs = ~np.isnan(fs)
    fs = np.where(has_fs, fs, 0.0)
    fv = np.where(has_fs, f(fs), -np.inf)
    better = fv > best_v
    best_d, best_v = np.where(better, fs, best_d), np.where(better, fv, best_v)

    # smallest transfer reaching the optimum; the superlevel set of a concave
    # function is an interval, so bisect on [0, best_d]
    target = best_v - _TIE_EPS
    lo = np.zeros_like(best_d)
    hi = best_d.copy()
    at_zero = f(lo) >= target
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        up = f(mid) >= target
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    return np.where(at_zero, 0.0, hi)


def _search(net: Network, direction: Direction):
    n = len(net)
    out = np.empty(n)
    for start in range(0, n, _CHUNK):
        sl = slice(start, min(start + _CHUNK, n))
        out[sl] = _search_chunk(net.take(sl), direction)
    return out


def _solve_direction(net: Network, direction: Direction):
    """Solve one transfer direction; returns energies, transfer and case codes."""
    d = _delta_unc(net, direction)
    B1, B2 = net.budgets(direction, d)
    u1 = _source_cap(B1, net.Ns1, net.Nr1)
    u2 = _source_cap(B2, net.Ns2, net.Nr2)
    closed = (u1 + u2) <= net.E_S + TOL
    e_s1, e_s2, e_R1, e_R2 = u1, u2, B1.copy(), B2.copy()
    if direction is Direction.R1toR2:
        case = np.where(closed, _CODE[CaseLabel.B1], _CODE[CaseLabel.B2])
    else:
        case = np.where(closed, _CODE[CaseLabel.B3], _CODE[CaseLabel.B4])

    idx = np.flatnonzero(~closed)
    if idx.size:
        sub = net.take(idx)
        ds = _search(sub, direction)
        a1, a2, r1, r2 = _allocate(sub, direction, ds)
        d = d.copy()
        d[idx] = ds
        e_s1, e_s2 = e_s1.copy(), e_s2.copy()
        e_s1[idx], e_s2[idx], e_R1[idx], e_R2[idx] = a1, a2, r1, r2
    return e_s1, e_s2, e_R1, e_R2, d, case


def solve_batch_no_ec(net: Network) -> CycleBatch:
    """Baseline without transfers: capped water-fill of the source only."""
    zero = np.zeros(len(net))
    e_s1, e_s2, e_R1, e_R2 = _allocate(net, Direction.R1toR2, zero)
    w1, w2 = fill(net.Ns1, net.Ns2, net.E_S)
    a1 = (_relay_need(w1, net.Ns1, net.Nr1) <= net.E_R1 + TOL) & (
        _relay_need(w2, net.Ns2, net.Nr2) <= net.E_R2 + TOL
    )
    demand = _source_cap(net.E_R1, net.Ns1, net.Nr1) + _source_cap(net.E_R2, net.Ns2, net.Nr2)
    case = np.where(
        a1, _CODE[CaseLabel.A1],
        np.where(demand <= net.E_S + TOL, _CODE[CaseLabel.B1], _CODE[CaseLabel.B2]),
    )
    return _finish(net, e_s1, e_s2, e_R1, e_R2, zero, zero.copy(), case)


def solve_batch(net: Network, ec_enabled: bool = True) -> CycleBatch:
    """Rate-maximizing, energy-conserving allocation for every cycle in ``net``."""
    if not ec_enabled:
        return solve_batch_no_ec(net)
    n = len(net)
    g12, g21 = net.gamma12, net.gamma21

    # first hop as the bottleneck
    e_s1, e_s2 = fill(net.Ns1, net.Ns2, net.E_S)
    q1 = _relay_need(e_s1, net.Ns1, net.Nr1)
    q2 = _relay_need(e_s2, net.Ns2, net.Nr2)
    fit1 = q1 <= net.E_R1 + TOL
    fit2 = q2 <= net.E_R2 + TOL
    with np.errstate(invalid="ignore"):
        A1 = fit1 & fit2
        A2 = fit1 & ~fit2 & (q2 <= net.E_R2 + g12 * (net.E_R1 - q1) + TOL)
        A3 = fit2 & ~fit1 & (q1 <= net.E_R1 + g21 * (net.E_R2 - q2) + TOL)
        surplus1 = np.maximum(net.E_R1 - q1, 0.0)
        surplus2 = np.maximum(net.E_R2 - q2, 0.0)
        d12 = np.where(A2, np.minimum(np.maximum((q2 - net.E_R2) / g12, 0.0), surplus1), 0.0)
        d21 = np.where(A3, np.minimum(np.maximum((q1 - net.E_R1) / g21, 0.0), surplus2), 0.0)
    e_R1 = np.minimum(q1, net.E_R1 - d12 + g21 * d21)
    e_R2 = np.minimum(q2, net.E_R2 + g12 * d12 - d21)
    case = np.select([A1, A2, A3], [_CODE[CaseLabel.A1], _CODE[CaseLabel.A2], _CODE[CaseLabel.A3]], -1)

    idx = np.flatnonzero(~(A1 | A2 | A3))
    if idx.size:
        sub = net.take(idx)
        s12 = _solve_direction(sub, Direction.R1toR2)
        s21 = _solve_direction(sub, Direction.R2toR1)
        c12 = _finish(sub, *s12[:4], s12[4], 0 * s12[4], s12[5]).c_total
        c21 = _finish(sub, *s21[:4], 0 * s21[4], s21[4], s21[5]).c_total
        tie = np.abs(c12 - c21) <= TOL
        pick21 = (c21 > c12 + TOL) | (tie & (s12[4] > 0) & (s21[4] == 0))
        e_s1, e_s2, e_R1, e_R2 = (np.array(x, float) for x in (e_s1, e_s2, e_R1, e_R2))
        e_s1[idx] = np.where(pick21, s21[0], s12[0])
        e_s2[idx] = np.where(pick21, s21[1], s12[1])
        e_R1[idx] = np.where(pick21, s21[2], s12[2])
        e_R2[idx] = np.where(pick21, s21[3], s12[3])
        d12[idx] = np.where(pick21, 0.0, s12[4])
        d21[idx] = np.where(pick21, s21[4], 0.0)
        case[idx] = np.where(pick21, s21[5], s12[5])
    assert n == 0 or case.min() >= 0
    return _finish(net, e_s1, e_s2, e_R1, e_R2, d12, d21, case)


def saved_batch(net: Network, sol: CycleBatch):
    """Energy left in each battery after the cycle, ``(S, R1, R2)``.

    The donor loses the transferred amount and the recipient gains the
    efficiency-scaled amount.
    """
    sS = net.E_S - sol.e_s1 - sol.e_s2
    s1 = net.E_R1 - sol.delta12 + net.gamma21 * sol.delta21 - sol.e_R1
    s2 = net.E_R2 - sol.delta21 + net.gamma12 * sol.delta12 - sol.e_R2
    worst = min(sS.min(initial=0.0), s1.min(initial=0.0), s2.min(initial=0.0))
    if worst < -TOL * 10:
        raise RuntimeError(f"allocation overspends a battery by {-worst:.3g} mJ")
    return np.maximum(sS, 0.0), np.maximum(s1, 0.0), np.maximum(s2, 0.0)


# ---------------------------------------------------------------------------
# single-cycle API


def required_relay_energy(e_s, h_sq, g_sq, sigma_w_sq, sigma_wb_sq):
    """Relay energy whose second-hop rate equals the first-hop rate of ``e_s``."""
    if e_s == 0 or h_sq == 0:
        return 0.0
    if g_sq == 0:
        raise InvalidParameterError("second hop is dead: no relay energy matches a positive rate")
    return h_sq * sigma_wb_sq / (g_sq * sigma_w_sq) * e_s


def required_source_energy(e_R, h_sq, g_sq, sigma_w_sq, sigma_wb_sq):
    """Source energy whose first-hop rate equals the second-hop rate of ``e_R``."""
    if e_R == 0 or g_sq == 0:
        return 0.0
    if h_sq == 0:
        raise InvalidParameterError("first hop is dead: no source energy matches a positive rate")
    return g_sq * sigma_w_sq / (h_sq * sigma_wb_sq) * e_R


def _check_direction(direction):
    if direction not in (Direction.R1toR2, Direction.R2toR1):
        raise InvalidParameterError("a transfer direction (R1toR2 or R2toR1) is required")


def delta_unconstrained(direction: Direction, energy: EnergyState,
                        ch: ChannelRealization, params: SystemParams) -> float:
    _check_direction(direction)
    return float(_delta_unc(Network.single(energy, ch, params), direction)[0])


def search_delta(direction: Direction, energy: EnergyState,
                 ch: ChannelRealization, params: SystemParams):
    """One-dimensional search over the transfer in ``direction``.

    Returns ``(delta, solution)`` where ``delta`` is the smallest transfer
    achieving the best total rate.
    """
    _check_direction(direction)
    net = Network.single(energy, ch, params)
    d = _search(net, direction)
    e1, e2, r1, r2 = _allocate(net, direction, d)
    zero = np.zeros(1)
    if direction is Direction.R1toR2:
        sol = _finish(net, e1, e2, r1, r2, d, zero, [_CODE[CaseLabel.B2]])
    else:
        sol = _finish(net, e1, e2, r1, r2, zero, d, [_CODE[CaseLabel.B4]])
    return float(d[0]), sol.solution()


def solve_cycle(energy: EnergyState, ch: ChannelRealization, params: SystemParams) -> CycleSolution:
    return solve_batch(Network.single(energy, ch, params), params.ec_enabled).solution()


def solve_cycle_no_ec(energy: EnergyState, ch: ChannelRealization, params: SystemParams) -> CycleSolution:
    return solve_batch_no_ec(Network.single(energy, ch, params)).solution()


def energy_saved(energy: EnergyState, sol: CycleSolution, params: SystemParams) -> SavedEnergy:
    sS = energy.E_S - sol.e_s1 - sol.e_s2
    s1 = energy.E_R1 - sol.delta12 + params.gamma21 * sol.delta21 - sol.e_R1
    s2 = energy.E_R2 - sol.delta21 + params.gamma12 * sol.delta12 - sol.e_R2
    if min(sS, s1, s2) < -TOL * 10:
        raise RuntimeError("allocation overspends a battery")
    return SavedEnergy(max(sS, 0.0), max(s1, 0.0), max(s2, 0.0))
