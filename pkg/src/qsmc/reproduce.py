"""Published worked examples recomputed from the library, with their tolerances.

Each target returns a :class:`Target` holding one :class:`Check` per reported
number and any CSV artifacts that go with it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np
from scipy.optimize import minimize_scalar

from .amplification import AmplitudeAmplifier, good_probability, recovery_state, select_iteration_count
from .bangbang import ControlSchedule, design_single_switch
from .models import five_level_model_I, two_level_model
from .period import (J_csv, M_csv, failure_threshold, three_level_period, three_level_worst_case,
                     two_level_period)
from .quantum import I_X, I_Z, basis_state, fidelity, gate_fidelity, unitary
from .scenario import parse_scenario, run_qcp1, run_qcp2
from .sliding import SlidingMode, verify_invariance


@dataclass
class Check:
    quantity: str
    computed: float
    expected: float
    tol: float
    kind: str = "abs"  # "abs": |computed - expected| <= tol; "ge"/"le": one-sided with slack tol

    @property
    def passed(self) -> bool:
        if self.kind == "ge":
            return bool(self.computed >= self.expected - self.tol)
        if self.kind == "le":
            return bool(self.computed <= self.expected + self.tol)
        return bool(abs(self.computed - self.expected) <= self.tol)

    def line(self) -> str:
        rel = {"abs": "+/-", "ge": ">= ... -", "le": "<= ... +"}[self.kind]
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}  {self.quantity}: computed {self.computed:.6g} "
                f"(expected {self.expected:.6g}, tol {rel} {self.tol:.3g})")

    def to_dict(self) -> dict:
        return {"quantity": self.quantity, "computed": float(self.computed),
                "expected": float(self.expected), "tol": float(self.tol), "kind": self.kind,
                "pass": bool(self.passed)}


@dataclass
class Target:
    name: str
    checks: list
    artifacts: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"target": self.name, "pass": self.passed,
                "checks": [c.to_dict() for c in self.checks], "notes": self.notes}


def two_level_period_target(**_) -> Target:
    T = two_level_period(0.1, 0.01)
    thr = failure_threshold(0.1)
    return Target("two-level-period", [
        Check("T (eps=0.1, p0=0.01)", T, 3.1260, 5e-4),
        Check("branch threshold eps^2/(1+eps^2)", thr, 0.009901, 1e-6),
    ])


PUBLISHED_SCHEDULE = ControlSchedule(((-10.0, 0.1573), (10.0, 0.1573)), 10.0)


def two_level_bangbang_target(**_) -> Target:
    sched = design_single_switch(10.0, basis_state(2, 1), basis_state(2, 0), 1e-3)
    model = two_level_model(0.0)
    infid = 1 - fidelity(sched.replay(model, basis_state(2, 1)), basis_state(2, 0))
    published_infid = 1 - fidelity(PUBLISHED_SCHEDULE.replay(model, basis_state(2, 1)), basis_state(2, 0))
    switch = sched.switch_times[0] if len(sched.segments) > 1 else 0.0
    return Target("two-level-bangbang", [
        Check("switch time (V=10)", switch, 0.1573, 1e-3),
        Check("total time (V=10)", sched.total_time, 0.3146, 1e-3),
        Check("replayed infidelity of designed schedule", infid, 1e-3, 0.0, "le"),
        Check("replayed infidelity of the published schedule", published_infid, 1e-3, 0.0, "le"),
    ], notes=[f"designed schedule: {sched.to_json()}"])


def worst_gate_fidelity(eps_bar: float = 0.1, n_grid: int = 2001) -> tuple:
    """Minimum over ``t`` in ``[0, pi/omega]`` of the gate fidelity, and its argmin."""
    t_max = np.pi / np.sqrt(1 + eps_bar**2)

    def F(t):
        return gate_fidelity(unitary(I_Z, t), unitary(I_Z + eps_bar * I_X, t))

    ts = np.linspace(0.0, t_max, n_grid)
    vals = np.array([F(t) for t in ts])
    k = int(np.argmin(vals))
    lo, hi = ts[max(k - 1, 0)], ts[min(k + 1, n_grid - 1)]
    res = minimize_scalar(F, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    if res.fun < vals[k]:
        return float(res.fun), float(res.x)
    return float(vals[k]), float(ts[k])


def gate_error_target(**_) -> Target:
    F, t = worst_gate_fidelity(0.1)
    bound = 1 / np.sqrt(1.01)
    state_F = min(abs(unitary(I_Z, s).conj().T @ unitary(I_Z + 0.1 * I_X, s))[0, 0]
                  for s in np.linspace(0, np.pi / np.sqrt(1.01), 2001))
    return Target("gate-error", [
        Check("min gate fidelity over t", F, bound, 1e-6, "ge"),
        Check("gate error", 1 - F, 0.0050, 0.0, "le"),
        Check("sliding-state fidelity |<0|U0^dag U|0>|", float(state_F), bound, 1e-6, "ge"),
    ], notes=[f"minimizing t = {t:.6f}"])


def three_level_worstcase_target(**_) -> Target:
    w = three_level_worst_case(0.1)
    M = w.costate.M
    scale = np.max(np.abs(M))
    signed = np.all(M[np.abs(M) > 1e-6 * scale] > 0) or np.all(M[np.abs(M) > 1e-6 * scale] < 0)
    return Target("three-level-worstcase", [
        Check("t_f", w.t_f, 1.1160, 5e-3),
        Check("x3(t_f)", w.x3, -0.0055, 1e-3),
        Check("y3(t_f)", w.y3, -0.0705, 1e-3),
        Check("J(t_f)", w.J_tf, 0.0050, 5e-4),
        Check("M(t) single-signed on [0, t_f]", float(signed), 1.0, 0.0),
    ], artifacts={"J.csv": J_csv(w), "M.csv": M_csv(w)})


def three_level_period_target(**_) -> Target:
    return Target("three-level-period", [Check("T (eps=0.1, p0=0.005)",
                                               three_level_period(0.1, 0.005), 1.1160, 5e-3)])


def amplification_target(**_) -> Target:
    amp = AmplitudeAmplifier.from_amplitudes([0.0600, 0.0800, 0.9950], {0, 1})
    L0 = select_iteration_count(amp, 0.005)
    psi = recovery_state(amp, L0)
    mags = np.abs(psi)
    return Target("amplification", [
        Check("L0", L0, 7, 0),
        Check("|c1|", mags[0], 0.5986, 1e-3),
        Check("|c2|", mags[1], 0.7981, 1e-3),
        Check("|c3|", mags[2], 0.0682, 1e-3),
        Check("failure probability", 1 - good_probability(psi, {0, 1}), 0.0047, 2e-4),
    ])


QCP1_DOC = {
    "model": "two-level", "epsilon": 0.1, "mode": {"good": [0], "p0": 0.01},
    "period": 3.1260, "epochs": 20, "trials": 10000, "seed": 0, "initial_state": 1,
    "reach": {"policy": "bang-bang", "bound": 10.0, "tol": 1e-3},
    "uncertainty": {"kind": "constant-worst-case", "sign": 1, "direction": [1.0, 0.0]},
}

QCP2_DOC = {
    "model": "three-level", "epsilon": 0.1, "mode": {"good": [0, 1], "p0": 0.005},
    "period": 1.1160, "epochs": 20, "trials": 10000, "seed": 0, "initial_state": 0,
    "reach": {"policy": "amplifier", "amplifiers": [
        {"from": 2, "prepared_amplitudes": [0.06, 0.08, 0.995], "phi1": "pi", "phi2": "pi"}]},
    "uncertainty": {"kind": "constant-worst-case", "sign": 1},
}


def qcp1_target(seed: int = 0, trials: int = 10000, **_) -> Target:
    sc = parse_scenario(dict(QCP1_DOC, seed=seed, trials=trials))
    r = run_qcp1(sc)
    hw = r.half_width
    return Target("qcp1-montecarlo", [
        Check("p_hat upper", r.p_hat, 0.0099, 3 * hw, "le"),
        Check("p_hat lower", r.p_hat, 0.008, 0.0, "ge"),
    ], notes=[r.to_json()])


def qcp2_target(seed: int = 0, trials: int = 10000, **_) -> Target:
    sc = parse_scenario(dict(QCP2_DOC, seed=seed, trials=trials))
    r = run_qcp2(sc)
    return Target("qcp2-montecarlo", [
        Check("p_hat", r.p_hat, 0.005, 3 * r.half_width, "le"),
        Check("post-recovery states in domain", float(r.post_recovery_in_domain), 1.0, 0.0),
    ], notes=[r.to_json()])


def random_control(horizon: float, rng, width: float = 0.5, amplitude: float = 2.0) -> ControlSchedule:
    n = int(np.ceil(horizon / width))
    return ControlSchedule(tuple((float(u), horizon / n) for u in rng.uniform(-amplitude, amplitude, n)))


def five_level_target(seed: int = 0, **_) -> Target:
    model = five_level_model_I()
    mode = SlidingMode(frozenset({0, 3, 4}), 0.01)
    rng = np.random.default_rng(seed)
    drift = 0.0
    for k in range(10):
        rep = verify_invariance(model, mode, random_control(10.0, rng), 10.0, 1e-9, seed=seed + k)
        drift = max(drift, rep.max_drift)
    return Target("five-level-invariance", [Check("max surface drift", drift, 0.0, 1e-9, "le")])


TARGETS: dict = {
    "two-level-period": two_level_period_target,
    "two-level-bangbang": two_level_bangbang_target,
    "gate-error": gate_error_target,
    "three-level-worstcase": three_level_worstcase_target,
    "three-level-period": three_level_period_target,
    "amplification": amplification_target,
    "qcp1-montecarlo": qcp1_target,
    "qcp2-montecarlo": qcp2_target,
    "five-level-invariance": five_level_target,
}
