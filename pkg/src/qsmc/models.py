"""Hamiltonian models and bounded-uncertainty realizations.

Every model is written in the eigenbasis of its free Hamiltonian, so ``H0``
is diagonal and amplitude index ``j`` is eigenstate ``j`` (0-based).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidModel
from .quantum import I_X, I_Y, I_Z

HERMITIAN_TOL = 1e-12

UNCERTAINTY_KINDS = ("none", "constant-worst-case", "piecewise-constant-random", "sinusoidal")


def _hermitian(M, name):
    M = np.array(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidModel(f"{name} must be a square matrix")
    if np.max(np.abs(M - M.conj().T)) > HERMITIAN_TOL:
        raise InvalidModel(f"{name} is not Hermitian")
    M.setflags(write=False)
    return M


@dataclass(frozen=True)
class HamiltonianModel:
    """``H = H0 + sum_k u_k H_k + sum_l eps_l H_l`` with ``||eps|| <= epsilon_bound``.

    ``nominal_controls`` are the control amplitudes used when a caller does
    not supply any (the three-level example runs with a fixed ``u = 1``).
    """

    name: str
    H0: np.ndarray
    controls: tuple = ()
    uncertainty_generators: tuple = ()
    epsilon_bound: float = 0.0
    nominal_controls: tuple = ()
    uncertainty_labels: tuple = ()

    def __post_init__(self):
        if self.epsilon_bound < 0:
            raise InvalidModel("epsilon_bound must be non-negative")
        H0 = _hermitian(self.H0, "H0")
        if H0.shape[0] < 2:
            raise InvalidModel("models need at least two levels")
        if np.max(np.abs(H0 - np.diag(np.diag(H0)))) > HERMITIAN_TOL:
            raise InvalidModel("H0 must be diagonal (amplitudes live in its eigenbasis)")
        controls = tuple(_hermitian(H, f"control {k}") for k, H in enumerate(self.controls))
        gens = tuple(_hermitian(H, f"uncertainty generator {k}")
                     for k, H in enumerate(self.uncertainty_generators))
        for M in controls + gens:
            if M.shape != H0.shape:
                raise InvalidModel("all matrices must share the dimension of H0")
        nominal = tuple(float(u) for u in self.nominal_controls) or (0.0,) * len(controls)
        if len(nominal) != len(controls):
            raise InvalidModel("nominal_controls must match the number of controls")
        object.__setattr__(self, "H0", H0)
        object.__setattr__(self, "controls", controls)
        object.__setattr__(self, "uncertainty_generators", gens)
        object.__setattr__(self, "nominal_controls", nominal)
        object.__setattr__(self, "epsilon_bound", float(self.epsilon_bound))

    @property
    def dim(self) -> int:
        return self.H0.shape[0]

    def hamiltonian(self, u: Optional[Sequence[float]] = None,
                    eps: Optional[Sequence[float]] = None) -> np.ndarray:
        """Total Hamiltonian for control amplitudes ``u`` and uncertainty ``eps``.

        A scalar ``u`` drives the first control only.
        """
        if u is None:
            u = self.nominal_controls
        elif np.isscalar(u):
            u = (float(u),) + (0.0,) * (len(self.controls) - 1)
        H = np.array(self.H0)
        for uk, Hk in zip(u, self.controls):
            if uk:
                H = H + uk * Hk
        if eps is not None:
            for el, Hl in zip(eps, self.uncertainty_generators):
                if el:
                    H = H + el * Hl
        return H

    def with_epsilon(self, epsilon_bound: float) -> "HamiltonianModel":
        return HamiltonianModel(self.name, self.H0, self.controls, self.uncertainty_generators,
                                epsilon_bound, self.nominal_controls, self.uncertainty_labels)


def two_level_model(epsilon_bound: float) -> HamiltonianModel:
    """Spin-1/2 with ``H0 = I_z``, controls ``I_x, I_y``, uncertainty ``eps_x I_x + eps_z I_z``."""
    return HamiltonianModel(
        name="two-level",
        H0=I_Z,
        controls=(I_X, I_Y),
        uncertainty_generators=(I_X, I_Z),
        epsilon_bound=epsilon_bound,
        uncertainty_labels=("x", "z"),
    )


def three_level_model(epsilon_bound: float) -> HamiltonianModel:
    """Leakage model: ``A = diag(-1, 0, 1)``, ``B`` couples levels 0-1, uncertainty couples 0-2."""
    A = np.diag([-1.0, 0.0, 1.0])
    B = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=float)
    leak = np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=float)
    return HamiltonianModel(
        name="three-level",
        H0=A,
        controls=(B,),
        uncertainty_generators=(leak,),
        epsilon_bound=epsilon_bound,
        nominal_controls=(1.0,),
        uncertainty_labels=("leak",),
    )


def five_level_model_I() -> HamiltonianModel:
    """Five-level system whose control only couples levels {0, 3, 4}."""
    A = np.diag([1.0, 1.2, 1.3, 2.0, 2.15])
    B = np.zeros((5, 5))
    for i, j in [(0, 3), (0, 4), (3, 4)]:
        B[i, j] = B[j, i] = 1.0
    return HamiltonianModel(name="five-level-model-I", H0=A, controls=(B,))


MODELS = {
    "two-level": two_level_model,
    "three-level": three_level_model,
    "five-level-model-I": lambda epsilon_bound=0.0: five_level_model_I(),
}


def get_model(name: str, epsilon_bound: float = 0.0) -> HamiltonianModel:
    try:
        factory = MODELS[name]
    except KeyError:
        raise InvalidModel(f"unknown model {name!r}; choose from {sorted(MODELS)}") from None
    return factory(epsilon_bound)


@dataclass(frozen=True)
class UncertaintyRealization:
    """Recipe for an admissible uncertainty trajectory ``eps(t)``.

    ``direction`` is a vector over the model's uncertainty generators. For the
    constant and sinusoidal kinds it fixes the direction of ``eps`` (default:
    the first generator only); for the random kind its support selects which
    generators are sampled (default: all of them).
    """

    kind: str = "none"
    sign: int = 1
    direction: Optional[tuple] = None
    segment_width: Optional[float] = None
    frequency: float = 1.0
    phase: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in UNCERTAINTY_KINDS:
            raise ValueError(f"unknown uncertainty kind {self.kind!r}; choose from {UNCERTAINTY_KINDS}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.segment_width is not None and self.segment_width <= 0:
            raise ValueError("segment_width must be positive")

    @property
    def width(self) -> float:
        if self.segment_width is not None:
            return self.segment_width
        return 0.05 if self.kind == "piecewise-constant-random" else 1e-3

    def unit_direction(self, n_generators: int) -> np.ndarray:
        if self.direction is None:
            d = np.zeros(n_generators)
            d[0] = 1.0
            return d
        d = np.asarray(self.direction, dtype=float)
        if d.shape != (n_generators,) or not np.any(d):
            raise ValueError("direction must be a nonzero vector over the uncertainty generators")
        return d / np.linalg.norm(d)


def _split(horizon, width):
    n = max(1, int(np.ceil(horizon / width - 1e-9)))
    edges = np.linspace(0.0, horizon, n + 1)
    return edges[:-1], np.diff(edges)


def sample_coefficients(model: HamiltonianModel, realization: UncertaintyRealization,
                        horizon: float, rng: Optional[np.random.Generator] = None):
    """Uncertainty coefficient vectors as a list of ``(eps, duration)`` pairs.

    Every vector satisfies ``||eps|| <= model.epsilon_bound``.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    n_gen = len(model.uncertainty_generators)
    bound = model.epsilon_bound
    kind = realization.kind
    if kind == "none" or n_gen == 0 or bound == 0:
        return [(np.zeros(n_gen), float(horizon))]
    if kind == "constant-worst-case":
        return [(realization.sign * bound * realization.unit_direction(n_gen), float(horizon))]

    starts, widths = _split(horizon, realization.width)
    if kind == "sinusoidal":
        d = realization.sign * bound * realization.unit_direction(n_gen)
        mid = starts + widths / 2
        amp = np.sin(2 * np.pi * realization.frequency * mid + realization.phase)
        return [(a * d, float(w)) for a, w in zip(amp, widths)]

    # piecewise-constant-random: uniform on the admissible ball
    if rng is None:
        rng = np.random.default_rng(realization.seed)
    if realization.direction is None:
        support = np.arange(n_gen)
    else:
        support = np.flatnonzero(np.asarray(realization.direction, dtype=float))
    k = support.size
    m = widths.size
    g = rng.normal(size=(m, k))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = bound * rng.random(m) ** (1.0 / k)
    eps = np.zeros((m, n_gen))
    eps[:, support] = r[:, None] * g
    return list(zip(eps, widths.astype(float)))


def realize_uncertainty(model: HamiltonianModel, realization: UncertaintyRealization,
                        horizon: float, rng: Optional[np.random.Generator] = None,
                        u: Optional[Sequence[float]] = None):
    """Hamiltonian segments ``[(H, duration), ...]`` covering ``horizon``."""
    return [(model.hamiltonian(u, eps), dt)
            for eps, dt in sample_coefficients(model, realization, horizon, rng)]
