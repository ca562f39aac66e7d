"""Trace the trade-off between success probability and entanglement.

Optimizes fusion matrices along two frontiers with a reduced search budget
(the full budget sharpens the curves but takes minutes):

  expectation mode  max <S> subject to p_total = p_target
  threshold mode    max P(S >= s) for a grid of entropy cutoffs

The printed expectation curve should hug <S> ~= 1 - p; the threshold curve
should step down from 1 at s = 0 to 1/2 at s = 1.
"""

import numpy as np

from fusionlab.optimize import OptimizerConfig, sweep

config = OptimizerConfig(restarts=6, init_samples=40, iterations=400,
                         master_seed=1)

print("expectation frontier (reduced budget):")
print("  p_target   <S> best   1 - p   states")
for row in sweep("expectation", np.arange(0.5, 1.01, 0.1), config=config):
    p = row["target"]
    print(f"  {p:8.2f}   {row['hard_value']:8.4f}   {1 - p:5.2f}   "
          f"{row['states_used']:6d}")

print()
print("threshold curve (reduced budget):")
print("  s_target   P best    states")
for row in sweep("threshold", np.arange(0.0, 1.01, 0.2), config=config):
    print(f"  {row['target']:8.2f}   {row['hard_value']:7.4f}   "
          f"{row['states_used']:6d}")
