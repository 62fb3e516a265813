"""An invariant subspace of a five-level system under arbitrary control.

Levels {0, 3, 4} only couple among themselves, so their total population is
conserved whatever the control amplitude does.

Run: python3 demos/06_five_level_invariance.py
"""
import numpy as np

from qsmc.bangbang import ControlSchedule
from qsmc.models import five_level_model_I
from qsmc.sliding import SlidingMode, verify_invariance

model = five_level_model_I()
rng = np.random.default_rng(0)

for good in ({0, 3, 4}, {0, 3}, {1, 2}):
    mode = SlidingMode(good, 0.01)
    control = ControlSchedule(tuple((float(u), 0.5) for u in rng.uniform(-2, 2, 20)))
    rep = verify_invariance(model, mode, control, 10.0)
    print(f"good {sorted(good)}: max surface drift {rep.max_drift:.2e}  invariant {not rep.violated}")
