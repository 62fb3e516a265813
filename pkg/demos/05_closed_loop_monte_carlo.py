"""Closed-loop simulation: hold, measure, recover, repeat.

Both scenarios run 2000 trials of 20 measurement epochs under the constant
worst-case uncertainty and report the per-measurement failure rate with a
95% Wilson interval.

Run: python3 demos/05_closed_loop_monte_carlo.py
"""
from pathlib import Path

from qsmc.models import UncertaintyRealization
from qsmc.scenario import load_scenario, run_scenario

here = Path(__file__).resolve().parents[1] / "scenarios"
for name in ("qcp1.json", "qcp2.json"):
    sc = load_scenario(here / name).replace(trials=2000)
    r = run_scenario(sc)
    lo, hi = r.interval
    print(f"{name}: {sc.model}, good {sorted(sc.good)}, T = {r.period:.4f}, p0 = {sc.p0}")
    print(f"  failure rate {r.p_hat:.5f}  [{lo:.5f}, {hi:.5f}]  "
          f"recoveries {r.recoveries}  accepted {r.accepted}")
    print(f"  post-recovery surface values {r.post_recovery_surface}")

# A randomized uncertainty stays below the constant worst case.
sc = load_scenario(here / "qcp1.json").replace(trials=500)
r = run_scenario(sc.replace(uncertainty=UncertaintyRealization("piecewise-constant-random",
                                                               direction=(1.0, 0.0))))
print(f"\nqcp1 with random bit-flip noise: failure rate {r.p_hat:.5f}")
