"""Open versus closed colonies racing to quorum.

A colony grows from a single cell while its members emit a signaling
molecule. In a closed vessel the signal accumulates in a fixed volume; in
an open environment each newcomer brings fresh medium along and signal
leaks away, yet activation still tends to come EARLIER, because the
per-cell signal concentration tracks the colony itself rather than being
diluted by an oversized vessel at small population sizes.

Each seed pair shares the colony growth realization, so the comparison
isolates the chemistry.

Run: python3 demos/colony_activation.py
"""

import numpy as np

from microq.quorum import QuorumParams, activation_time, simulate_colony

closed_p = QuorumParams.reference_closed(quanta=100)
open_p = QuorumParams.reference_open(quanta=100)


def first_crossing(params, seed, horizon):
    run = simulate_colony(params, horizon=horizon, sample_period=1 / 6,
                          seed=seed, stop_on_activation=True)
    t = activation_time(run)
    return np.inf if t is None else t


print("threshold-crossing times [h], coarse-grained at 100 molecules/token")
print(f"{'seed':>4} {'closed':>8} {'open':>8} {'open first?':>11}")
closed_times, open_times = [], []
for seed in range(12):
    tc = first_crossing(closed_p, seed, 16.0)
    to = first_crossing(open_p, seed, 13.0)
    closed_times.append(tc)
    open_times.append(to)
    print(f"{seed:4d} {tc:8.2f} {to:8.2f} {'yes' if to < tc else 'no':>11}")

print()
print(f"medians: closed {np.median(closed_times):.2f} h, "
      f"open {np.median(open_times):.2f} h")
print(f"open activated first in "
      f"{100.0 * np.mean(np.array(open_times) < np.array(closed_times)):.0f}% "
      "of pairs")
print()
print("the open sub-hour outliers are a coarse-graining effect: while the")
print("colony is a handful of cells, its share of medium is so small that")
print("a single 100-molecule token already clears the threshold. the")
print("medians are insensitive to it; rerun at quanta=1 to see them gone.")
