"""Measurement period for a spin-1/2 held in |0> against a bit-flip uncertainty.

Run: python3 demos/01_two_level_period.py
"""
import numpy as np

from qsmc.period import failure_threshold, two_level_failure, two_level_period, worst_case_bloch
from qsmc.quantum import I_X, I_Z, gate_error, unitary

eps = 0.1
omega = np.sqrt(1 + eps**2)

# The worst admissible uncertainty is a constant +eps on I_x. From the north
# pole the Bloch vector precesses and z dips lowest after half a turn.
for t in np.linspace(0, np.pi / omega, 6):
    x, y, z = worst_case_bloch(eps, 1, t)
    print(f"t = {t:5.3f}   r = ({x:+.4f}, {y:+.4f}, {z:.4f})   failure = {(1 - z) / 2:.5f}")

# Below the threshold the period is the first time failure reaches p0; above
# it, the whole half turn is safe.
print(f"\nthreshold eps^2/(1+eps^2) = {failure_threshold(eps):.6f}")
for p0 in (0.001, 0.005, 0.01, 0.05):
    T = two_level_period(eps, p0)
    print(f"p0 = {p0:<6} T = {T:.4f}   worst failure at T = {two_level_failure(eps, T):.6f}")

# How far the perturbed evolution drifts from the nominal one as a gate.
t = np.pi / omega
print(f"\ngate error at t = pi/omega: {gate_error(unitary(I_Z, t), unitary(I_Z + eps * I_X, t)):.4%}")
