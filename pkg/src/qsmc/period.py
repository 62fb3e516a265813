"""Measurement-period design.

Two-level system: closed-form worst-case Bloch trajectory under a constant
bit-flip uncertainty and the resulting period formula, plus a Monte Carlo
check that no admissible ``eps(t)`` does worse than the constant bound.

Three-level system: the real 6-dimensional form ``eta' = F(eps) eta`` of the
leakage model, integrated with fixed-step RK4, its costate and switching
function, and the period obtained from the leakage curve ``J(t)``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import expm

from .errors import ConsistencyError
from .models import HamiltonianModel, UncertaintyRealization, sample_coefficients, three_level_model, two_level_model


class UnboundedPeriod(float):
    """Period returned when no uncertainty can leave the sliding mode.

    Compares equal to ``math.inf`` but is a distinct singleton, so callers can
    test ``period is UNBOUNDED`` and serializers can write a marker string.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls, "inf")
        return cls._instance

    def __repr__(self):
        return "UNBOUNDED"

    __str__ = __repr__


UNBOUNDED = UnboundedPeriod()


def _check_p0(p0):
    if not 0 < p0 < 1:
        raise ValueError("p0 must lie in (0, 1)")


# --------------------------------------------------------------------------
# two-level system

def bloch_generator(eps: float) -> np.ndarray:
    """Generator of ``r' = G r`` for ``H = I_z + eps I_x``."""
    return np.array([[0.0, -1.0, 0.0], [1.0, 0.0, -eps], [0.0, eps, 0.0]])


def worst_case_bloch(eps_bar: float, sign: int, t):
    """Closed-form Bloch vector from ``(0, 0, 1)`` under constant ``sign * eps_bar``."""
    t = np.asarray(t, dtype=float)
    eps = sign * eps_bar
    w2 = 1.0 + eps_bar**2
    w = np.sqrt(w2)
    c, s = np.cos(w * t), np.sin(w * t)
    x = eps * (1.0 - c) / w2
    y = -eps * s / w
    z = (eps_bar**2 * c + 1.0) / w2
    return x, y, z


def failure_threshold(eps_bar: float) -> float:
    """Worst-case failure probability after half a precession, ``eps^2/(1+eps^2)``."""
    return eps_bar**2 / (1.0 + eps_bar**2)


def two_level_period(eps_bar: float, p0: float) -> float:
    _check_p0(p0)
    if eps_bar < 0:
        raise ValueError("eps_bar must be non-negative")
    if eps_bar == 0:
        return UNBOUNDED
    w = np.sqrt(1.0 + eps_bar**2)
    if p0 <= failure_threshold(eps_bar):
        arg = 1.0 - 2.0 * p0 * (1.0 + eps_bar**2) / eps_bar**2
        return float(np.arccos(np.clip(arg, -1.0, 1.0)) / w)
    return float(np.pi / w)


def two_level_failure(eps_bar: float, T: float) -> float:
    """Worst-case per-measurement failure probability ``(1 - z_T)/2``."""
    return float((1.0 - worst_case_bloch(eps_bar, 1, T)[2]) / 2.0)


def integrate_bloch(eps_segments: Sequence[tuple], times: np.ndarray,
                    r0=(0.0, 0.0, 1.0)) -> np.ndarray:
    """Bloch vectors at ``times`` under piecewise-constant ``eps(t)``.

    ``eps_segments`` is a list of ``(eps, duration)``; each constant piece is
    applied through the exact rotation ``expm(G t)``.
    """
    times = np.asarray(times, dtype=float)
    out = np.empty((times.size, 3))
    r = np.array(r0, dtype=float)
    t0 = 0.0
    k = 0
    for eps, dt in eps_segments:
        G = bloch_generator(float(eps))
        t1 = t0 + dt
        while k < times.size and times[k] <= t1 + 1e-12:
            out[k] = expm(G * (times[k] - t0)) @ r
            k += 1
        r = expm(G * dt) @ r
        t0 = t1
    if k < times.size:
        raise ValueError("time grid extends past the uncertainty realization")
    return out


@dataclass(frozen=True)
class DominanceReport:
    min_margin: float
    n_realizations: int
    eps_bar: float
    t_max: float


def dominance_margin(eps_bar: float, eps_segments, n_grid: int = 400) -> float:
    """``min_t z(eps) - z(constant eps_bar)`` over ``(0, pi/sqrt(1+eps_bar^2)]``.

    ``t = 0`` is excluded; both trajectories start at the north pole.
    """
    t_max = np.pi / np.sqrt(1.0 + eps_bar**2)
    times = np.linspace(0.0, t_max, n_grid + 1)[1:]
    z = integrate_bloch(eps_segments, times)[:, 2]
    z_bound = worst_case_bloch(eps_bar, 1, times)[2]
    return float(np.min(z - z_bound))


def bloch_dominance_check(eps_bar: float, realizations: int = 200, seed: int = 0, *,
                          segment_width: float = 0.05, n_grid: int = 400) -> DominanceReport:
    """Sample admissible piecewise-constant bit-flip uncertainties and compare to the bound."""
    if eps_bar <= 0:
        raise ValueError("eps_bar must be positive")
    model = two_level_model(eps_bar)
    t_max = np.pi / np.sqrt(1.0 + eps_bar**2)
    rz = UncertaintyRealization("piecewise-constant-random", direction=(1.0, 0.0),
                                segment_width=segment_width)
    children = np.random.SeedSequence(seed).spawn(realizations)
    margin = np.inf
    for child in children:
        coeffs = sample_coefficients(model, rz, t_max, np.random.default_rng(child))
        segs = [(eps[0], dt) for eps, dt in coeffs]
        margin = min(margin, dominance_margin(eps_bar, segs, n_grid))
    return DominanceReport(float(margin), realizations, eps_bar, float(t_max))


# --------------------------------------------------------------------------
# three-level system

def real_generator(H: np.ndarray) -> np.ndarray:
    """Matrix ``F`` with ``eta' = F eta`` for ``i c' = H c``, ``eta = (x1, y1, x2, y2, ...)``."""
    H = np.asarray(H, dtype=complex)
    R, I = H.real, H.imag
    n = H.shape[0]
    F = np.zeros((2 * n, 2 * n))
    F[0::2, 0::2] = I
    F[0::2, 1::2] = R
    F[1::2, 0::2] = -R
    F[1::2, 1::2] = I
    return F


def three_level_F(eps: float, model: Optional[HamiltonianModel] = None) -> np.ndarray:
    if model is None:
        model = three_level_model(abs(eps))
    return real_generator(model.hamiltonian(None, (eps,)))


def rk4(F: np.ndarray, y0: np.ndarray, dt: float, n: int) -> np.ndarray:
    """``n`` fixed RK4 steps of ``y' = F y``; returns all ``n + 1`` states."""
    ys = np.empty((n + 1, y0.size))
    ys[0] = y0
    y = np.array(y0, dtype=float)
    for k in range(n):
        k1 = F @ y
        k2 = F @ (y + 0.5 * dt * k1)
        k3 = F @ (y + 0.5 * dt * k2)
        k4 = F @ (y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        ys[k + 1] = y
    return ys


@dataclass(frozen=True)
class WorstCaseTrajectory:
    times: np.ndarray
    eta: np.ndarray
    J: np.ndarray
    M: np.ndarray

    @property
    def x3(self):
        return self.eta[:, 4]

    @property
    def y3(self):
        return self.eta[:, 5]


@dataclass(frozen=True)
class CostateTrajectory:
    times: np.ndarray
    lam: np.ndarray
    M: np.ndarray


@dataclass(frozen=True)
class ThreeLevelWorstCase:
    eps_bar: float
    sign: int
    t_f: float
    x3: float
    y3: float
    J_tf: float
    trajectory: WorstCaseTrajectory
    costate: CostateTrajectory
    step: float
    F: np.ndarray

    def J_at(self, t: float) -> float:
        """Leakage ``J(t)`` on ``[0, t_f]``, one RK4 step from the nearest stored node."""
        times = self.trajectory.times
        k = int(np.clip(np.searchsorted(times, t, side="right") - 1, 0, times.size - 1))
        dt = t - times[k]
        eta = self.trajectory.eta[k]
        if dt > 0:
            eta = rk4(self.F, eta, dt, 1)[-1]
        return float(eta[4] ** 2 + eta[5] ** 2)


def switching_function(lam: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """``M = lam5 y1 - lam6 x1 - lam2 x3 + lam1 y3`` (1-based component names)."""
    x1, y1, x3, y3 = eta[..., 0], eta[..., 1], eta[..., 4], eta[..., 5]
    return lam[..., 4] * y1 - lam[..., 5] * x1 - lam[..., 1] * x3 + lam[..., 0] * y3


def _first_maximum(J, step):
    d = np.diff(J)
    idx = np.flatnonzero((d[:-1] > 0) & (d[1:] <= 0))
    if idx.size == 0:
        return None
    k = int(idx[0]) + 1
    # vertex of the parabola through the three nodes around the maximum
    jm, j0, jp = J[k - 1], J[k], J[k + 1]
    denom = jm - 2 * j0 + jp
    shift = 0.5 * (jm - jp) / denom if denom != 0 else 0.0
    return (k + float(np.clip(shift, -1.0, 1.0))) * step


def _worst_case_for_sign(eps_bar, sign, step, t_max):
    model = three_level_model(eps_bar)
    F = three_level_F(sign * eps_bar, model)
    eta0 = np.zeros(6)
    eta0[0] = 1.0

    n_max = int(np.ceil(t_max / step))
    chunk = 1024
    coarse = eta0[None, :]
    t_f = None
    while t_f is None and coarse.shape[0] <= n_max:
        more = rk4(F, coarse[-1], step, chunk)[1:]
        coarse = np.vstack([coarse, more])
        J = coarse[:, 4] ** 2 + coarse[:, 5] ** 2
        t_f = _first_maximum(J, step)
    if t_f is None or t_f > t_max:
        raise ConsistencyError(f"J(t) has no local maximum before t = {t_max}")

    n = max(1, int(np.ceil(t_f / step)))
    h = t_f / n
    eta = rk4(F, eta0, h, n)
    times = h * np.arange(n + 1)
    x3, y3 = eta[-1, 4], eta[-1, 5]

    lam_tf = np.array([0.0, 0.0, 0.0, 0.0, 2 * x3, 2 * y3])
    # lam' = -F^T lam, integrated backward from t_f
    lam_rev = rk4(F.T, lam_tf, h, n)
    lam = lam_rev[::-1]
    M = switching_function(lam, eta)
    J_traj = eta[:, 4] ** 2 + eta[:, 5] ** 2
    return ThreeLevelWorstCase(
        eps_bar=eps_bar, sign=sign, t_f=float(t_f), x3=float(x3), y3=float(y3),
        J_tf=float(x3**2 + y3**2),
        trajectory=WorstCaseTrajectory(times, eta, J_traj, M),
        costate=CostateTrajectory(times, lam, M),
        step=h, F=F,
    )


def _single_signed(M, rel_tol=1e-6):
    scale = np.max(np.abs(M))
    if scale == 0:
        return True
    m = M[np.abs(M) > rel_tol * scale]
    return bool(np.all(m > 0) or np.all(m < 0))


def three_level_worst_case(eps_bar: float, step: float = 1e-3,
                           t_max: float = 20.0) -> ThreeLevelWorstCase:
    """Worst-case leakage trajectory, costate and ``t_f`` for the three-level model.

    Both constant signs are integrated and the one with the larger ``J(t_f)``
    is returned. Raises :class:`ConsistencyError` if the switching function
    changes sign on ``[0, t_f]`` (values within 1e-6 of its peak magnitude are
    treated as zero, since ``M`` vanishes at ``t_f`` itself).
    """
    if eps_bar <= 0:
        raise ValueError("eps_bar must be positive")
    results = [_worst_case_for_sign(eps_bar, s, step, t_max) for s in (1, -1)]
    best = max(results, key=lambda r: r.J_tf)
    if not _single_signed(best.costate.M):
        raise ConsistencyError(
            f"switching function changes sign on [0, t_f] for eps_bar={eps_bar}; "
            "the constant worst case is not justified")
    return best


def three_level_period(eps_bar: float, p0: float,
                       worst: Optional[ThreeLevelWorstCase] = None) -> float:
    """Largest period keeping the worst-case leakage at or below ``p0``."""
    _check_p0(p0)
    if eps_bar < 0:
        raise ValueError("eps_bar must be non-negative")
    if eps_bar == 0:
        return UNBOUNDED
    if worst is None:
        worst = three_level_worst_case(eps_bar)
    if p0 >= worst.J_tf:
        return worst.t_f
    lo, hi = 0.0, worst.t_f
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if worst.J_at(mid) < p0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# curve export

def _csv(header, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*columns):
        w.writerow([f"{v:.12g}" for v in row])
    return buf.getvalue()


def bloch_bound_csv(eps_bar: float, n: int = 501, sign: int = 1) -> str:
    t = np.linspace(0.0, np.pi / np.sqrt(1.0 + eps_bar**2), n)
    x, y, z = worst_case_bloch(eps_bar, sign, t)
    return _csv(["t", "x", "y", "z"], [t, x, y, z])


def J_csv(worst: ThreeLevelWorstCase) -> str:
    tr = worst.trajectory
    return _csv(["t", "J"], [tr.times, tr.J])


def M_csv(worst: ThreeLevelWorstCase) -> str:
    tr = worst.trajectory
    return _csv(["t", "M"], [tr.times, tr.M])


def JM_csv(worst: ThreeLevelWorstCase) -> str:
    tr = worst.trajectory
    return _csv(["t", "J", "M"], [tr.times, tr.J, tr.M])
