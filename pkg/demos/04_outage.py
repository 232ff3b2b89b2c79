"""Outage at fixed target rates of 1.5 bits/s/Hz on both links.

Four arms share the same draws: energy cooperation on or off, and energy
saving between cycles on or off.
"""

import sys

from ecrelay import SimConfig, SystemParams, TargetRates, run_sweep

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
config = SimConfig(params=SystemParams(), mode="outage", targets=TargetRates(1.5, 1.5),
                   trials=trials, snr_points_db=range(0, 31, 5), seed=1)
arms = ("ec", "noec", "ec_noess", "noec_noess")
print(" SNR  " + "  ".join(f"{a:>10s}" for a in arms) + "   (link-1 outage)")
for row in run_sweep(config):
    print(f"{row.snr_db:4.0f}  " + "  ".join(f"{getattr(row, 'outage_d1_' + a):10.4f}" for a in arms))
