"""Returning a collapsed three-level state to the good subspace {0, 1}.

After a failed measurement the system sits in level 2. A unitary prepares
amplitudes (0.06, 0.08, 0.995) and repeated amplification rotates weight
into the good subspace until the failure budget is met.

Run: python3 demos/04_amplitude_amplification.py
"""
import numpy as np

from qsmc.amplification import (AmplitudeAmplifier, good_probability, grover_good_probability,
                                recovery_state, select_iteration_count)

amp = AmplitudeAmplifier.from_amplitudes([0.06, 0.08, 0.995], {0, 1}, reference=2)
g = good_probability(amp.prepared_state, amp.good)
print(f"good weight of the prepared state: {g:.5f}")

for L in range(10):
    psi = recovery_state(amp, L)
    bad = 1 - good_probability(psi, amp.good)
    print(f"L = {L}  |c| = {np.round(np.abs(psi), 4)}  bad = {bad:.5f}  "
          f"(closed form {1 - grover_good_probability(g, L):.5f})")

L0 = select_iteration_count(amp, 0.005)
print(f"\nsmallest L with failure <= 0.5%: {L0}")
