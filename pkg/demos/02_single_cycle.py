"""One transmission cycle, with and without energy cooperation.

Each instance below lands in a different case of the solver.  The printout
shows the allocation, any transfer between the relays, and what each node
banks for the next cycle.
"""

from ecrelay import ChannelRealization, EnergyState, SystemParams, energy_saved
from ecrelay import solve_cycle, solve_cycle_no_ec

params = SystemParams()  # unit noise, 90% efficient relay-to-relay wires

instances = {
    "relays rich, source poor": (EnergyState(10, 20, 20), ChannelRealization(1, 1, 2, 2)),
    "R2 short of energy": (EnergyState(2, 3, 0.5), ChannelRealization(1, 1, 1, 1)),
    "weak second hops": (EnergyState(500, 30, 10), ChannelRealization(1, 1, 0.2, 0.2)),
    "scarce source, lopsided relays": (EnergyState(20, 150, 5), ChannelRealization(1, 1, 0.05, 0.3)),
}

for name, (energy, ch) in instances.items():
    ec = solve_cycle(energy, ch, params)
    no = solve_cycle_no_ec(energy, ch, params)
    saved = energy_saved(energy, ec, params)
    print(f"{name}  [{ec.case_label.value}]")
    print(f"  source split  e_s1={ec.e_s1:8.3f}  e_s2={ec.e_s2:8.3f}")
    print(f"  relay energy  e_R1={ec.e_R1:8.3f}  e_R2={ec.e_R2:8.3f}")
    print(f"  transfer      R1->R2={ec.delta12:8.3f}  R2->R1={ec.delta21:8.3f}")
    print(f"  rates         R1={ec.rate1:.3f}  R2={ec.rate2:.3f}  total={ec.c_total:.3f} "
          f"(no EC {no.c_total:.3f})")
    print(f"  banked        S={saved.saved_S:.3f}  R1={saved.saved_R1:.3f}  R2={saved.saved_R2:.3f}\n")
