"""Average capacity against destination SNR, with and without cooperation.

Harvests are Gaussian (mean 100 mJ, sd 50 mJ) and channels Rayleigh.  Each
trial runs ten cycles with leftover energy carried forward.  A smaller trial
count than the acceptance suite keeps this quick; pass a number to change it.
"""

import sys

from ecrelay import SimConfig, SystemParams, run_sweep

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
for mu_S in (100.0, 300.0):
    config = SimConfig(params=SystemParams(mu_S=mu_S), trials=trials,
                       snr_points_db=range(0, 31, 5), seed=1)
    print(f"mu_S = {mu_S:g} mJ, {trials} trials")
    print(" SNR    EC      no EC   gain    A-cases")
    for row in run_sweep(config):
        a = sum(v for k, v in row.case_pct.items() if k.value.startswith("A"))
        print(f"{row.snr_db:4.0f} {row.avg_c_ec:7.3f} {row.avg_c_noec:7.3f} {row.gain:7.4f} {a:6.1f}%")
    print()
