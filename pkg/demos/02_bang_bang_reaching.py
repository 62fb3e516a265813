"""Driving |1> back to |0> with a bounded, single-switch control.

Run: python3 demos/02_bang_bang_reaching.py
"""
from qsmc.bangbang import design_single_switch
from qsmc.models import two_level_model
from qsmc.quantum import basis_state, fidelity

nominal = two_level_model(0.0)
one, zero = basis_state(2, 1), basis_state(2, 0)

for V in (1.0, 3.0, 10.0):
    for tol in (1e-3, 1e-12):
        s = design_single_switch(V, one, zero, tol)
        err = 1 - fidelity(s.replay(nominal, one), zero)
        pulses = ", ".join(f"{u:+g} for {dt:.5f}" for u, dt in s.segments)
        print(f"V = {V:4}  tol = {tol:g}:  {pulses}  (total {s.total_time:.5f}, infidelity {err:.1e})")

# Schedules serialize to plain JSON for replay elsewhere.
print("\n" + design_single_switch(10.0, one, zero).to_json())
