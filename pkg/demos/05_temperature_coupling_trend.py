#!/usr/bin/env python3
"""How the steady state approaches the Gibbs state: hotter baths and weaker
coupling both shrink the deviation.

Writes sweep.csv with one row per (temperature, coupling) cell.
"""

from ule import sweep_monotonicity, three_level_baseline, trend_sweep
from ule.io import write_csv

temperatures = [2.0, 4.0, 8.0]
couplings = [0.1, 0.05, 0.01]

result = trend_sweep(three_level_baseline(), temperatures, couplings)

print("trace distance to the Gibbs state:")
header = "  T \\ gamma " + "".join(f"{g:>12g}" for g in couplings)
print(header)
rows = []
for t in temperatures:
    line = f"  {t:<10g}"
    for g in couplings:
        cell = result.cells[(t, g)]
        line += f"{cell.trace_distance:12.3e}"
        rows.append((t, g, cell.trace_distance, cell.max_abs_diag_deviation,
                     cell.observable_gap if cell.observable_gap is not None else 0.0))
    print(line)

write_csv("sweep.csv", ["T", "gamma", "trace_distance", "max_diag_dev", "obs_gap"], rows)
print("wrote sweep.csv")

ok, violations = sweep_monotonicity(result)
print(f"\nmonotone along both axes: {ok}")
for v in violations:
    print(" ", v)
print(f"most thermal corner (T = {max(temperatures)}, gamma = {min(couplings)}): "
      f"trace distance {result.cells[(max(temperatures), min(couplings))].trace_distance:.3e}")
