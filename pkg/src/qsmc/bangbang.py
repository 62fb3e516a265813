"""Time-optimal bang-bang reaching controls for the two-level system.

The drive is ``H = I_z + u(t) I_x`` with ``|u| <= V``. A schedule switches
once, from ``-V`` to ``+V``; the search finds the shortest such schedule whose
final infidelity with the target is within ``tol``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .errors import InfeasibleSchedule
from .models import HamiltonianModel, two_level_model
from .quantum import basis_state, check_unitary, fidelity, unitary
from .sliding import SlidingMode


@dataclass(frozen=True)
class ControlSchedule:
    """Piecewise-constant amplitude of the first control Hamiltonian.

    ``segments`` holds ``(u, duration)`` pairs. An instantaneous schedule
    carries a unitary instead of segments and takes zero time (the
    unbounded-control limit).
    """

    segments: tuple = ()
    bound: Optional[float] = None
    unitary: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        segs = tuple((float(u), float(dt)) for u, dt in self.segments)
        for u, dt in segs:
            if dt <= 0:
                raise ValueError("segment durations must be positive")
            if self.bound is not None and abs(u) > self.bound + 1e-12:
                raise ValueError(f"amplitude {u} exceeds bound {self.bound}")
        if self.unitary is not None:
            if segs:
                raise ValueError("an instantaneous schedule has no segments")
            object.__setattr__(self, "unitary", check_unitary(self.unitary))
        object.__setattr__(self, "segments", segs)

    @classmethod
    def constant(cls, u: float, duration: float) -> "ControlSchedule":
        return cls(((u, duration),))

    @classmethod
    def instantaneous(cls, U: np.ndarray) -> "ControlSchedule":
        return cls((), None, np.asarray(U, dtype=complex))

    @property
    def is_instantaneous(self) -> bool:
        return self.unitary is not None

    @property
    def total_time(self) -> float:
        return float(sum(dt for _, dt in self.segments))

    @property
    def switch_times(self) -> list:
        return list(np.cumsum([dt for _, dt in self.segments])[:-1])

    def hamiltonian_segments(self, model: HamiltonianModel) -> list:
        return [(model.hamiltonian(u), dt) for u, dt in self.segments]

    def propagator(self, model: HamiltonianModel) -> np.ndarray:
        if self.is_instantaneous:
            return self.unitary
        U = np.eye(model.dim, dtype=complex)
        for H, dt in self.hamiltonian_segments(model):
            U = unitary(H, dt) @ U
        return U

    def replay(self, model: HamiltonianModel, state: np.ndarray) -> np.ndarray:
        return self.propagator(model) @ state

    def to_dict(self) -> dict:
        d = {"segments": [{"u": u, "dt": dt} for u, dt in self.segments]}
        if self.bound is not None:
            d["bound"] = self.bound
        if self.is_instantaneous:
            d["instantaneous"] = True
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "ControlSchedule":
        if d.get("instantaneous"):
            raise ValueError("instantaneous schedules carry a unitary and are not serializable")
        return cls(tuple((s["u"], s["dt"]) for s in d["segments"]), d.get("bound"))

    @classmethod
    def from_json(cls, text: str) -> "ControlSchedule":
        return cls.from_dict(json.loads(text))


class _TwoPulse:
    """Evaluator of ``<target| U_+(t2) U_-(t1) |source>``."""

    def __init__(self, model, V, source, target):
        self.minus = np.linalg.eigh(model.hamiltonian(-V))
        self.plus = np.linalg.eigh(model.hamiltonian(V))
        self.source = source
        self.target = target

    def first(self, t1):
        w, v = self.minus
        c = v.conj().T @ self.source
        return (v[None, :, :] * np.exp(-1j * np.multiply.outer(t1, w))[:, None, :]) @ c

    def last(self, t2):
        """Rows ``<target| U_+(t2)`` for every ``t2``."""
        w, v = self.plus
        row = self.target.conj() @ v
        return (row[None, :] * np.exp(-1j * np.multiply.outer(t2, w))) @ v.conj().T

    def infidelity(self, t1, t2):
        a = self.first(np.atleast_1d(t1))
        b = self.last(np.atleast_1d(t2))
        amp = np.sum(a * b, axis=-1)
        return 1.0 - np.abs(amp) ** 2


def design_single_switch(V: float, source: np.ndarray, target: np.ndarray, tol: float = 1e-3,
                         *, model: Optional[HamiltonianModel] = None,
                         budget: float = 10 * np.pi) -> ControlSchedule:
    """Shortest ``[(-V, t1), (+V, t2)]`` schedule with infidelity at most ``tol``.

    The total time is scanned on a grid of step ``pi / (200 V)`` in order of
    increasing length. Each grid diagonal that comes within a Lipschitz margin
    of ``tol`` is refined locally: a bisection on the total time, each probe
    minimizing the infidelity over the switch time with a bounded scalar
    search. The first diagonal whose refinement meets ``tol`` wins. Zero-length segments are dropped,
    so a single pulse is reported when it suffices.
    """
    if V <= 0:
        raise ValueError("control bound V must be positive")
    if model is None:
        model = two_level_model(0.0)
    source = np.asarray(source, dtype=complex)
    target = np.asarray(target, dtype=complex)
    if 1 - fidelity(source, target) <= tol:
        return ControlSchedule((), V)

    ev = _TwoPulse(model, V, source, target)
    h = np.pi / (200 * V)
    n = int(np.ceil(budget / h))
    grid = h * np.arange(n + 1)
    A = ev.first(grid)
    B = ev.last(grid)
    # |amp|^2 moves by at most 2 ||H|| per unit time in t1 or t2, so a grid
    # point within 2h of a feasible one is at most this far above tol
    slack = 8 * h * max(np.abs(ev.minus[0]).max(), np.abs(ev.plus[0]).max())

    def split_near(T, t1c):
        lo, hi = max(0.0, t1c - 2 * h), min(T, t1c + 2 * h)
        if hi <= lo:
            return lo, float(ev.infidelity(lo, T - lo)[0])
        res = minimize_scalar(lambda t1: float(ev.infidelity(t1, T - t1)[0]),
                              bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        # endpoints matter when the optimum is a single pulse
        cands = [(t, float(ev.infidelity(t, T - t)[0])) for t in (lo, hi, min(max(t1c, lo), hi))]
        cands.append((res.x, res.fun))
        return min(cands, key=lambda c: c[1])

    def refine(k, j):
        """Shortest feasible total time near grid point ``(grid[j], grid[k - j])``, or None."""
        if 1.0 - abs(A[j] @ B[k - j]) ** 2 <= tol:
            t1c, T_hi = grid[j], grid[k]
            best = (t1c, float(ev.infidelity(t1c, T_hi - t1c)[0]))
        else:
            hit = []

            def objective(x):
                f = float(ev.infidelity(abs(x[0]), abs(x[1]))[0])
                if f <= tol:
                    hit.append((abs(x[0]), abs(x[1]), f))
                    raise StopIteration
                return f

            x0 = [grid[j], grid[k - j]]
            try:
                minimize(objective, x0, method="Nelder-Mead",
                         options={"xatol": 1e-14, "fatol": 1e-3 * tol, "maxiter": 2000,
                                  "initial_simplex": [x0, [x0[0] + h, x0[1]], [x0[0], x0[1] + h]]})
            except StopIteration:
                pass
            if not hit or abs(hit[0][0] + hit[0][1] - grid[k]) > 2 * h:
                return None
            t1c, T_hi = hit[0][0], hit[0][0] + hit[0][1]
            best = (t1c, hit[0][2])
        T_lo = max(0.0, T_hi - 4 * h)
        sp = split_near(T_lo, t1c)
        if sp[1] <= tol:
            T_hi, best, T_lo = T_lo, sp, 0.0
        for _ in range(80):
            T_mid = 0.5 * (T_lo + T_hi)
            sp = split_near(T_mid, t1c)
            if sp[1] <= tol:
                T_hi, best = T_mid, sp
            else:
                T_lo = T_mid
            if T_hi - T_lo < 1e-13:
                break
        return T_hi, best[0]

    found = None
    mins = []
    for k in range(n + 1):
        i = np.arange(k + 1)
        inf = 1.0 - np.abs(np.sum(A[i] * B[k - i], axis=-1)) ** 2
        j = int(np.argmin(inf))
        mins.append((inf[j], j))
        if inf[j] <= tol:
            found = refine(k, j)
        elif k >= 2 and mins[k - 2][0] > mins[k - 1][0] <= inf[j] and mins[k - 1][0] <= tol + slack:
            # a dip between grid diagonals may hide a narrow feasible pocket
            found = refine(k - 1, mins[k - 1][1])
        if found is not None:
            break
    if found is None:
        raise InfeasibleSchedule(f"no single-switch schedule within total time {budget:.4g}")

    T, t1 = found
    t1 = float(t1)
    t2 = float(T - t1)
    segs = [(-V, t1), (V, t2)]
    return ControlSchedule(tuple(s for s in segs if s[1] > 1e-15), V)


def schedule_library(model: HamiltonianModel, mode: SlidingMode, V: float = 10.0,
                     tol: float = 1e-3) -> dict:
    """Reaching schedule for every eigenstate outside an eigenstate sliding mode."""
    if model.dim != 2:
        raise ValueError("bang-bang schedule libraries are only built for two-level models")
    if not mode.is_eigenstate and len(mode.good) < model.dim:
        raise ValueError("two-level sliding modes are single eigenstates")
    library = {}
    if len(mode.good) == model.dim:
        return library
    (j,) = mode.good
    target = basis_state(model.dim, j)
    nominal = model.with_epsilon(0.0)
    for k in mode.bad_indices(model.dim):
        sched = design_single_switch(V, basis_state(model.dim, k), target, tol, model=nominal)
        reached = sched.replay(nominal, basis_state(model.dim, k))
        assert 1 - fidelity(reached, target) <= tol + 1e-12
        library[k] = sched
    return library
