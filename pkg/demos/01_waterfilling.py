"""Splitting a source budget across two relay links.

The source splits its energy between the links to R1 and R2 to maximize
the sum of the two first-hop rates.  The weaker link only gets energy once
the budget covers the gap between the two noise floors.
"""

import math

from ecrelay import capped_waterfill_two, waterfill_two

# noise floors sigma^2 / |h|^2 in mJ: link 1 is the stronger one
N1, N2 = 1.0, 2.0

print("budget   e1      e2      level   sum rate")
for budget in (0.5, 1.0, 2.0, 5.0, 20.0):
    r = waterfill_two(N1, N2, budget)
    print(f"{budget:6.1f} {r.e1:7.3f} {r.e2:7.3f} {r.water_level:7.3f} {r.sum_rate:8.4f}")

# A relay that can only forward 0.5 bits caps link 1.  Energy the cap makes
# useless moves to link 2 instead.
e1, e2, rate = capped_waterfill_two(N1, N2, 1.0, 0.5, math.inf)
print(f"\nlink 1 capped at 0.5 bits: e1={e1:.4f} e2={e2:.4f} sum rate={rate:.4f}")
