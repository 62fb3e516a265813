"""Leakage out of a two-dimensional subspace of a three-level system.

The state starts in level 0 with levels {0, 1} as the good subspace. A
constant coupling to level 2 makes the leaked population J(t) grow to a
first maximum at t_f; the costate's switching function M(t) keeps one sign
on [0, t_f], which certifies the constant sign as the worst case.

Run: python3 demos/03_three_level_worst_case.py
"""
import numpy as np

from qsmc.period import three_level_period, three_level_worst_case

w = three_level_worst_case(0.1)
print(f"worst sign {w.sign:+d}, t_f = {w.t_f:.4f}, x3 = {w.x3:.4f}, y3 = {w.y3:.4f}, J = {w.J_tf:.5f}")

tr = w.trajectory
for k in np.linspace(0, tr.times.size - 1, 8).astype(int):
    print(f"  t = {tr.times[k]:.3f}   J = {tr.J[k]:.6f}   M = {w.costate.M[k]:+.3e}")

for p0 in (0.001, 0.0025, 0.005, 0.01):
    print(f"p0 = {p0:<7} T = {three_level_period(0.1, p0, w):.4f}")
