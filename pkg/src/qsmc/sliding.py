"""Sliding surfaces, sliding-mode domains and invariance checks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .models import HamiltonianModel, UncertaintyRealization, sample_coefficients
from .quantum import propagate


@dataclass(frozen=True)
class SlidingMode:
    """Sliding surface spanned by the eigenstates in ``good`` (0-based).

    A single index is an eigenstate mode; more indices define a subspace
    mode. ``p0`` is the per-measurement failure budget that sets the domain.
    """

    good: frozenset
    p0: float = 0.01

    def __post_init__(self):
        good = frozenset(int(j) for j in self.good)
        if not good:
            raise ValueError("sliding mode needs at least one good eigenstate")
        if min(good) < 0:
            raise ValueError("eigenstate labels are non-negative integers")
        if not 0 < self.p0 < 1:
            raise ValueError("p0 must lie in (0, 1)")
        object.__setattr__(self, "good", good)

    @property
    def is_eigenstate(self) -> bool:
        return len(self.good) == 1

    def indices(self, dim: int) -> np.ndarray:
        if max(self.good) >= dim:
            raise ValueError(f"good index {max(self.good)} outside dimension {dim}")
        return np.array(sorted(self.good))

    def bad_indices(self, dim: int) -> list:
        return [j for j in range(dim) if j not in self.good]


def surface_value(state: np.ndarray, mode: SlidingMode) -> float:
    """``S = 1 - sum_{j in good} |c_j|^2`` for the normalized state.

    Computed as the bad weight over the total weight, so rounded amplitudes
    that are not exactly normalized still give the intended value.
    """
    p = np.abs(np.asarray(state)) ** 2
    good = float(np.sum(p[mode.indices(p.size)]))
    total = float(np.sum(p))
    if total == 0:
        raise ValueError("zero state vector")
    return float(min(1.0, max(0.0, (total - good) / total)))


def in_domain(state: np.ndarray, mode: SlidingMode) -> bool:
    # Projection weight onto the good subspace equals the best overlap with
    # any normalized state inside it.
    return surface_value(state, mode) <= mode.p0


@dataclass(frozen=True)
class InvarianceReport:
    max_drift: float
    violated: bool
    n_states: int


def _haar_in_subspace(dim, idx, rng):
    psi = np.zeros(dim, dtype=complex)
    z = rng.normal(size=idx.size) + 1j * rng.normal(size=idx.size)
    psi[idx] = z / np.linalg.norm(z)
    return psi


def verify_invariance(model: HamiltonianModel, mode: SlidingMode, control, horizon: float,
                      tol: float = 1e-9, *, n_states: int = 16, seed: int = 0,
                      uncertainty: Optional[UncertaintyRealization] = None,
                      sample_dt: float = 0.05) -> InvarianceReport:
    """Largest surface value reached from random states inside the surface.

    ``control`` is a :class:`~qsmc.bangbang.ControlSchedule` driving the first
    control Hamiltonian; past its end the model's nominal controls apply.
    Trajectories are sampled every ``sample_dt`` and at all segment edges.
    Without ``uncertainty`` the dynamics are nominal.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    rng = np.random.default_rng(seed)
    idx = mode.indices(model.dim)
    segments = _control_segments(model, control, horizon, uncertainty)

    worst = 0.0
    for _ in range(n_states):
        psi = _haar_in_subspace(model.dim, idx, rng)
        for H, dt in segments:
            n_sub = max(1, int(np.ceil(dt / sample_dt)))
            for _ in range(n_sub):
                psi = propagate(psi, H, dt / n_sub)
                worst = max(worst, surface_value(psi, mode))
    return InvarianceReport(worst, worst > tol, n_states)


def _control_segments(model, control, horizon, uncertainty):
    """Merge the control schedule and uncertainty realization into one segment list."""
    ctrl = []
    t = 0.0
    if control is not None:
        for u, dt in control.segments:
            if t >= horizon:
                break
            dt = min(dt, horizon - t)
            ctrl.append((t, t + dt, float(u)))
            t += dt
    if t < horizon:
        ctrl.append((t, horizon, None))

    if uncertainty is None:
        unc = [(0.0, horizon, None)]
    else:
        unc, s = [], 0.0
        for eps, dt in sample_coefficients(model, uncertainty, horizon):
            unc.append((s, s + dt, eps))
            s += dt

    edges = sorted({e for a, b, _ in ctrl + unc for e in (a, b)})
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= 0:
            continue
        m = 0.5 * (a + b)
        u = next(v for s, e, v in ctrl if s <= m < e)
        eps = next(v for s, e, v in unc if s <= m < e)
        out.append((model.hamiltonian(u, eps), b - a))
    return out
