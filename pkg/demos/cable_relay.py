"""Electrons relayed down a four-cell chain.

Only the first cell sees the donor; everything downstream runs on the
high-potential carriers its upstream neighbour hands over. Every electron
that enters is accounted for at every sample: still in some cell, exited
through the aerobic route, or delivered out the far end.

Run: python3 demos/cable_relay.py
"""

import numpy as np

from microq.cable import CableParams, ledger_balance, simulate_cable
from microq.electron import CellParams, donor_staircase

params = CableParams(
    n_cells=4,
    cell=CellParams(rho=0.15, zeta=0.12, beta=0.1, m_ch_cap=8, n_atp_cap=8),
    sigma_d=[donor_staircase(peak=6.0, t_on=5.0, t_off=300.0, steps=5),
             0.0, 0.0, 0.0],  # donor reaches the first cell only
    sigma_a=0.7, zeta_a=0.3, zeta_u=0.25, q_cap=6)

traj = simulate_cable(params, horizon=400.0, period=50.0, seed=23)

imbalance = ledger_balance(traj)
print(f"{traj.event_count} events; ledger imbalance at every sample: "
      f"{int(np.abs(imbalance).max())}")
print()
print(f"{'t [s]':>6} {'in-flight':>9} {'aerobic':>8} {'delivered':>9}")
for i, t in enumerate(traj.times):
    in_flight = sum(traj.component(f"cell{c}.m")[i]
                    + traj.component(f"cell{c}.qH")[i]
                    for c in range(1, 5))
    print(f"{t:6.0f} {in_flight:9d} "
          f"{traj.component('aerobic_exits')[i]:8d} "
          f"{traj.component('throughput')[i]:9d}")

delivered = traj.component("throughput")[-1]
injected = traj.component("injected")[-1]
print()
print(f"{delivered} of {injected} injected electrons made it out the far end "
      f"({100.0 * delivered / max(injected, 1):.1f}%)")
