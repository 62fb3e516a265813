"""Amplitude amplification for re-entering a subspace sliding mode.

With ``|psi> = U|r>`` for a reference basis state ``|r>``,

    Q = -U P_r(phi1) U^dag P_good(phi2)

where ``P_r(phi) = I - (1 - e^{i phi})|r><r|`` and ``P_good(phi)`` applies the
same conditional phase to every good basis state. The conventional choice of
reference is ``r = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AmplificationError, IterationBudgetExceeded
from .quantum import as_state, check_unitary

DEFAULT_L_MAX = 10_000


def complete_unitary(column: Sequence[complex], index: int = 0) -> np.ndarray:
    """Unitary whose column ``index`` is ``column`` (normalized); other columns by QR."""
    psi = as_state(column, normalize=True)
    n = psi.size
    others = [k for k in range(n) if k != index]
    M = np.column_stack([psi] + [np.eye(n)[:, k] for k in others])
    Q, _ = np.linalg.qr(M)
    # QR fixes the first column only up to a phase
    Q[:, 0] *= np.vdot(Q[:, 0], psi) / abs(np.vdot(Q[:, 0], psi))
    U = np.empty_like(Q)
    U[:, index] = Q[:, 0]
    U[:, others] = Q[:, 1:]
    return U


@dataclass(frozen=True)
class AmplitudeAmplifier:
    U: np.ndarray
    good: frozenset
    phi1: float = np.pi
    phi2: float = np.pi
    reference: int = 0

    def __post_init__(self):
        U = check_unitary(self.U)
        good = frozenset(int(j) for j in self.good)
        n = U.shape[0]
        if not good or not good < frozenset(range(n)):
            raise ValueError("good set must be a nonempty proper subset of the basis")
        for phi in (self.phi1, self.phi2):
            if not 0 <= phi <= np.pi + 1e-12:
                raise ValueError("phases must lie in [0, pi]")
        if not 0 <= self.reference < n:
            raise ValueError("reference index outside the basis")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "good", good)

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex], good, phi1: float = np.pi,
                        phi2: float = np.pi, reference: int = 0) -> "AmplitudeAmplifier":
        """Amplifier whose prepared state ``U|reference>`` is the normalized ``amplitudes``."""
        return cls(complete_unitary(amplitudes, reference), good, phi1, phi2, reference)

    @property
    def dim(self) -> int:
        return self.U.shape[0]

    @property
    def good_projector(self) -> np.ndarray:
        P = np.zeros((self.dim, self.dim))
        idx = sorted(self.good)
        P[idx, idx] = 1.0
        return P

    @property
    def prepared_state(self) -> np.ndarray:
        return self.U[:, self.reference].copy()


def good_probability(state: np.ndarray, good) -> float:
    psi = np.asarray(state)
    return float(np.sum(np.abs(psi[sorted(good)]) ** 2))


def build_phase_operators(amp: AmplitudeAmplifier):
    n = amp.dim
    P0 = np.eye(n, dtype=complex)
    P0[amp.reference, amp.reference] -= 1 - np.exp(1j * amp.phi1)
    Pchi = np.eye(n, dtype=complex) - (1 - np.exp(1j * amp.phi2)) * amp.good_projector
    return P0, Pchi


def build_Q(amp: AmplitudeAmplifier) -> np.ndarray:
    P0, Pchi = build_phase_operators(amp)
    return -amp.U @ P0 @ amp.U.conj().T @ Pchi


def analytic_action(amp: AmplitudeAmplifier) -> np.ndarray:
    """``Q|psi>`` for ``|psi> = U|reference>`` from the two-coefficient formula."""
    psi = amp.prepared_state
    psi_g = amp.good_projector @ psi
    psi_b = psi - psi_g
    g = float(np.vdot(psi_g, psi_g).real)
    e1, e2 = np.exp(1j * amp.phi1), np.exp(1j * amp.phi2)
    cg = (1 - e1) * (1 - g + g * e2) - e2
    cb = g * (1 - e1) * (e2 - 1) - e1
    return cg * psi_g + cb * psi_b


def recovery_state(amp: AmplitudeAmplifier, L: int) -> np.ndarray:
    """``Q^L U|reference>``."""
    if L < 0:
        raise ValueError("iteration count must be non-negative")
    psi = np.linalg.matrix_power(build_Q(amp), L) @ amp.prepared_state
    return psi / np.linalg.norm(psi)


def select_iteration_count(amp: AmplitudeAmplifier, p0: float,
                           L_max: int = DEFAULT_L_MAX) -> int:
    """Smallest ``L <= L_max`` whose amplified state fails with probability at most ``p0``."""
    if L_max < 1:
        raise ValueError("L_max must be at least 1")
    psi = amp.prepared_state
    if good_probability(psi, amp.good) == 0:
        raise AmplificationError("prepared state has no weight on the good subspace")
    Q = build_Q(amp)
    best_L, best_bad = 0, np.inf
    for L in range(L_max + 1):
        bad = 1.0 - good_probability(psi, amp.good)
        if bad <= p0:
            return L
        if bad < best_bad:
            best_L, best_bad = L, bad
        psi = Q @ psi
    raise IterationBudgetExceeded(
        f"no iteration count up to {L_max} reaches failure probability {p0}; "
        f"best was {best_bad:.4g} at L={best_L}", best_L, float(best_bad))


def grover_good_probability(g: float, L: int) -> float:
    """``sin^2((2L + 1) asin sqrt(g))``, valid for ``phi1 = phi2 = pi``."""
    theta = np.arcsin(np.sqrt(g))
    return float(np.sin((2 * L + 1) * theta) ** 2)
