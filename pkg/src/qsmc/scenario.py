"""Closed-loop Monte Carlo of the sliding-mode control loop.

Each trial drives its initial eigenstate into the sliding-mode domain, then
alternates between one measurement period of uncertain free evolution and a
projective measurement. A collapse outside the good set triggers the
recovery law for that eigenstate: a bang-bang schedule (or an instantaneous
unitary) for eigenstate modes, amplitude amplification for subspace modes.
Control phases are uncertainty-free unless the scenario says otherwise.

Every trial owns two random streams derived from ``(seed, trial)``, one for
measurements and one for uncertainty sampling, so results do not depend on
how trials are split across workers.
"""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import jsonschema
import numpy as np
from scipy.stats import binomtest

from .amplification import (AmplitudeAmplifier, DEFAULT_L_MAX,
                            recovery_state, select_iteration_count)
from .bangbang import ControlSchedule, schedule_library
from .errors import ConfigError
from .models import UncertaintyRealization, get_model, realize_uncertainty, sample_coefficients
from .period import UNBOUNDED, three_level_period, two_level_period
from .quantum import basis_state, measure_projective, segments_unitary
from .sliding import SlidingMode, in_domain, surface_value


@dataclass(frozen=True)
class AmplifierSpec:
    """Recovery of bad eigenstate ``source``: prepare ``prepared_amplitudes`` then amplify."""

    source: int
    prepared_amplitudes: tuple
    phi1: float = np.pi
    phi2: float = np.pi
    L_max: int = DEFAULT_L_MAX


@dataclass(frozen=True)
class Scenario:
    model: str
    epsilon: float
    good: tuple
    p0: float
    period: object = "design"
    epochs: int = 20
    trials: int = 1000
    seed: int = 0
    initial_state: int = 0
    reach: str = "bang-bang"
    control_bound: float = 10.0
    reach_tol: float = 1e-3
    amplifiers: tuple = ()
    uncertainty: UncertaintyRealization = UncertaintyRealization("constant-worst-case")
    uncertainty_during_control: bool = False
    acceptance_bound: Optional[float] = None

    def __post_init__(self):
        if self.trials < 1 or self.epochs < 1:
            raise ConfigError("trials and epochs must be at least 1")
        if self.period != "design" and not float(self.period) > 0:
            raise ConfigError("an explicit period must be positive")
        if self.reach not in ("bang-bang", "instantaneous", "amplifier"):
            raise ConfigError(f"unknown reach policy {self.reach!r}")

    @property
    def mode(self) -> SlidingMode:
        return SlidingMode(frozenset(self.good), self.p0)

    def replace(self, **changes) -> "Scenario":
        from dataclasses import replace
        return replace(self, **changes)


def _trial_streams(seed: int, trial: int):
    ss = np.random.SeedSequence(seed, spawn_key=(trial,))
    meas, noise = ss.spawn(2)
    return np.random.default_rng(meas), np.random.default_rng(noise)


def wilson_interval(failures: int, total: int, confidence: float = 0.95):
    ci = binomtest(int(failures), int(total)).proportion_ci(confidence, method="wilson")
    return float(ci.low), float(ci.high)


def estimate_failure(outcome_log) -> tuple:
    """``(p_hat, (low, high))`` with a 95% Wilson interval.

    ``outcome_log`` is a boolean array-like of failures (``True`` = collapse
    outside the good set), one entry per measurement.
    """
    bad = np.asarray(outcome_log, dtype=bool).ravel()
    if bad.size == 0:
        raise ValueError("no measurements recorded")
    k = int(bad.sum())
    return k / bad.size, wilson_interval(k, bad.size)


@dataclass(eq=False)
class ScenarioReport:
    scenario: Scenario
    period: float
    outcomes: np.ndarray
    failures: np.ndarray
    recoveries: int
    recovery_iterations: dict
    post_recovery_surface: dict
    post_recovery_in_domain: bool
    max_norm_deviation: float
    wall_time: float = field(default=0.0, compare=False)

    @property
    def n_measurements(self) -> int:
        return int(self.failures.size)

    @property
    def n_failures(self) -> int:
        return int(self.failures.sum())

    @property
    def p_hat(self) -> float:
        return self.n_failures / self.n_measurements

    @property
    def interval(self) -> tuple:
        return wilson_interval(self.n_failures, self.n_measurements)

    @property
    def half_width(self) -> float:
        lo, hi = self.interval
        return 0.5 * (hi - lo)

    @property
    def trials_with_failure(self) -> int:
        return int(np.any(self.failures, axis=1).sum())

    @property
    def acceptance_bound(self) -> float:
        bound = self.scenario.acceptance_bound
        return (self.scenario.p0 if bound is None else bound) + 3 * self.half_width

    @property
    def accepted(self) -> bool:
        return self.p_hat <= self.acceptance_bound

    def summary(self) -> dict:
        lo, hi = self.interval
        return {
            "model": self.scenario.model,
            "epsilon": self.scenario.epsilon,
            "good": sorted(self.scenario.good),
            "p0": self.scenario.p0,
            "period": "unbounded" if self.period is UNBOUNDED else self.period,
            "epochs": self.scenario.epochs,
            "trials": self.scenario.trials,
            "seed": self.scenario.seed,
            "uncertainty": self.scenario.uncertainty.kind,
            "measurements": self.n_measurements,
            "failures": self.n_failures,
            "p_hat": self.p_hat,
            "wilson95": [lo, hi],
            "half_width": self.half_width,
            "acceptance_bound": self.acceptance_bound,
            "accepted": self.accepted,
            "recoveries": self.recoveries,
            "recovery_iterations": {str(k): v for k, v in sorted(self.recovery_iterations.items())},
            "post_recovery_surface": {str(k): v for k, v in sorted(self.post_recovery_surface.items())},
            "post_recovery_in_domain": self.post_recovery_in_domain,
            "trials_with_failure": self.trials_with_failure,
            "max_norm_deviation": self.max_norm_deviation,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)

    def log_csv(self) -> str:
        good = self.scenario.good
        lines = ["trial,epoch,outcome,in_domain"]
        for i, row in enumerate(self.outcomes):
            for e, k in enumerate(row):
                lines.append(f"{i},{e},{int(k)},{int(int(k) in good)}")
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# compilation of the control laws

def design_period(scenario: Scenario) -> float:
    if scenario.period != "design":
        return float(scenario.period)
    if scenario.model == "two-level":
        T = two_level_period(scenario.epsilon, scenario.p0)
    elif scenario.model == "three-level":
        T = three_level_period(scenario.epsilon, scenario.p0)
    else:
        raise ConfigError(f"no period design is available for model {scenario.model!r}")
    if T is UNBOUNDED:
        raise ConfigError("the designed period is unbounded (epsilon = 0); give an explicit period")
    return T


@dataclass
class _Compiled:
    model: object
    nominal: object
    mode: SlidingMode
    period: float
    recovery_schedules: dict
    recovered: dict
    iterations: dict


def _compile(scenario: Scenario) -> _Compiled:
    model = get_model(scenario.model, scenario.epsilon)
    nominal = model.with_epsilon(0.0)
    mode = scenario.mode
    mode.indices(model.dim)
    if not 0 <= scenario.initial_state < model.dim:
        raise ConfigError("initial_state outside the model's basis")
    T = design_period(scenario)
    bad = mode.bad_indices(model.dim)
    schedules, recovered, iterations = {}, {}, {}

    if scenario.reach == "bang-bang":
        schedules = schedule_library(nominal, mode, scenario.control_bound, scenario.reach_tol)
        for k, sched in schedules.items():
            recovered[k] = sched.replay(nominal, basis_state(model.dim, k))
    elif scenario.reach == "instantaneous":
        target = basis_state(model.dim, min(mode.good))
        for k in bad:
            U = np.eye(model.dim, dtype=complex)
            U[:, [k, min(mode.good)]] = U[:, [min(mode.good), k]]
            schedules[k] = ControlSchedule.instantaneous(U)
            recovered[k] = target
    else:
        specs = {a.source: a for a in scenario.amplifiers}
        for k in bad:
            if k not in specs:
                raise ConfigError(f"no amplifier configured for bad eigenstate {k}")
            a = specs[k]
            amp = AmplitudeAmplifier.from_amplitudes(a.prepared_amplitudes, mode.good,
                                                     a.phi1, a.phi2, reference=k)
            L = select_iteration_count(amp, mode.p0, a.L_max)
            iterations[k] = L
            recovered[k] = recovery_state(amp, L)
    return _Compiled(model, nominal, mode, T, schedules, recovered, iterations)


def _hold_segments(c: _Compiled, scenario: Scenario, rng):
    return realize_uncertainty(c.model, scenario.uncertainty, c.period, rng)


def _recover(c: _Compiled, scenario: Scenario, k: int, rng):
    if scenario.uncertainty_during_control and k in c.recovery_schedules:
        sched = c.recovery_schedules[k]
        if not sched.is_instantaneous and sched.segments:
            segs = []
            for (u, dt) in sched.segments:
                for eps, w in sample_coefficients(c.model, scenario.uncertainty, dt, rng):
                    segs.append((c.model.hamiltonian(u, eps), w))
            return segments_unitary(segs, c.model.dim) @ basis_state(c.model.dim, k)
    return c.recovered[k]


def _run_trials(c: _Compiled, scenario: Scenario, trial_ids, U_hold):
    dim = c.model.dim
    good = c.mode.good
    out = np.empty((len(trial_ids), scenario.epochs), dtype=np.int16)
    recoveries = 0
    worst_norm = 0.0
    for row, trial in enumerate(trial_ids):
        meas_rng, noise_rng = _trial_streams(scenario.seed, trial)
        k0 = scenario.initial_state
        psi = basis_state(dim, k0) if k0 in good else _recover(c, scenario, k0, noise_rng)
        audit = trial % 100 == 0
        for epoch in range(scenario.epochs):
            if U_hold is not None:
                psi = U_hold @ psi
            else:
                psi = segments_unitary(_hold_segments(c, scenario, noise_rng), dim) @ psi
            if audit:
                worst_norm = max(worst_norm, abs(np.linalg.norm(psi) - 1.0))
            outcome = measure_projective(psi, meas_rng)
            out[row, epoch] = outcome.index
            if outcome.index in good:
                psi = outcome.collapsed
            else:
                recoveries += 1
                psi = _recover(c, scenario, outcome.index, noise_rng)
    return out, recoveries, worst_norm


def _workers(workers):
    if workers is None:
        workers = int(os.environ.get("QSMC_THREADS", "1") or 1)
    return max(1, workers)


def run_scenario(scenario: Scenario, workers: Optional[int] = None) -> ScenarioReport:
    start = time.perf_counter()
    c = _compile(scenario)

    post_surface = {k: surface_value(psi, c.mode) for k, psi in c.recovered.items()}
    post_ok = all(in_domain(psi, c.mode) for psi in c.recovered.values())

    U_hold = None
    if scenario.uncertainty.kind in ("none", "constant-worst-case", "sinusoidal"):
        U_hold = segments_unitary(_hold_segments(c, scenario, None), c.model.dim)

    ids = np.arange(scenario.trials)
    n = _workers(workers)
    chunks = [chunk for chunk in np.array_split(ids, n) if chunk.size]
    if len(chunks) == 1:
        parts = [_run_trials(c, scenario, chunks[0], U_hold)]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(lambda ch: _run_trials(c, scenario, ch, U_hold), chunks))

    outcomes = np.vstack([p[0] for p in parts])
    failures = ~np.isin(outcomes, sorted(c.mode.good))
    return ScenarioReport(
        scenario=scenario,
        period=c.period,
        outcomes=outcomes,
        failures=failures,
        recoveries=sum(p[1] for p in parts),
        recovery_iterations=c.iterations,
        post_recovery_surface=post_surface,
        post_recovery_in_domain=post_ok,
        max_norm_deviation=max(p[2] for p in parts),
        wall_time=time.perf_counter() - start,
    )


def run_qcp1(scenario: Scenario, workers: Optional[int] = None) -> ScenarioReport:
    """Eigenstate sliding mode held by bang-bang reaching and periodic measurement."""
    if len(scenario.good) != 1:
        raise ConfigError("QCP1 needs a single good eigenstate")
    if scenario.reach not in ("bang-bang", "instantaneous"):
        raise ConfigError("QCP1 recovers with bang-bang or instantaneous control")
    return run_scenario(scenario, workers)


def run_qcp2(scenario: Scenario, workers: Optional[int] = None) -> ScenarioReport:
    """Subspace sliding mode held by amplitude amplification and periodic measurement."""
    if len(scenario.good) < 2:
        raise ConfigError("QCP2 needs a good subspace of at least two eigenstates")
    if scenario.reach != "amplifier":
        raise ConfigError("QCP2 recovers with amplitude amplification")
    return run_scenario(scenario, workers)


# --------------------------------------------------------------------------
# JSON configuration

def scenario_schema() -> dict:
    text = resources.files("qsmc").joinpath("scenario.schema.json").read_text()
    return json.loads(text)


def _angle(v):
    return float(np.pi) if v == "pi" else float(v)


def parse_scenario(doc: dict) -> Scenario:
    """Validate a scenario document against the schema and build a :class:`Scenario`."""
    validator = jsonschema.Draft7Validator(scenario_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        msgs = []
        for e in errors:
            where = "/".join(str(p) for p in e.absolute_path) or "<root>"
            msgs.append(f"{where}: {e.message}")
        raise ConfigError("invalid scenario:\n  " + "\n  ".join(msgs))

    mode = doc["mode"]
    reach = doc.get("reach", {"policy": "bang-bang"})
    amps = []
    for a in reach.get("amplifiers", []):
        if "good" in a and sorted(a["good"]) != sorted(mode["good"]):
            raise ConfigError("reach/amplifiers: amplifier good set differs from mode/good")
        amps.append(AmplifierSpec(int(a["from"]), tuple(a["prepared_amplitudes"]),
                                  _angle(a.get("phi1", np.pi)), _angle(a.get("phi2", np.pi)),
                                  int(a.get("L_max", DEFAULT_L_MAX))))
    u = doc.get("uncertainty", {"kind": "constant-worst-case"})
    unc = UncertaintyRealization(
        kind=u["kind"], sign=int(u.get("sign", 1)),
        direction=tuple(u["direction"]) if "direction" in u else None,
        segment_width=u.get("segment_width"), frequency=float(u.get("frequency", 1.0)),
        phase=float(u.get("phase", 0.0)), seed=int(u.get("seed", 0)))
    try:
        return Scenario(
            model=doc["model"], epsilon=float(doc["epsilon"]), good=tuple(mode["good"]),
            p0=float(mode["p0"]), period=doc["period"], epochs=int(doc["epochs"]),
            trials=int(doc["trials"]), seed=int(doc.get("seed", 0)),
            initial_state=int(doc.get("initial_state", 0)),
            reach=reach.get("policy", "bang-bang"),
            control_bound=float(reach.get("bound", 10.0)), reach_tol=float(reach.get("tol", 1e-3)),
            amplifiers=tuple(amps), uncertainty=unc,
            uncertainty_during_control=bool(doc.get("uncertainty_during_control", False)),
            acceptance_bound=doc.get("acceptance_bound"))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_scenario(doc)
