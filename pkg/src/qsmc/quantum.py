"""Finite-dimensional quantum kinematics.

State vectors are plain complex numpy arrays holding the amplitudes ``c_j``
over the eigenbasis of the free Hamiltonian. Basis labels are 0-based
everywhere in this package: index ``j`` is the eigenstate the physics
literature would usually write as ``|phi_{j+1}>`` (for the two-level system
index 0 is ``|0>``, the ``+1`` eigenstate of ``sigma_z``).

Propagation over a constant Hamiltonian segment is exact, through the
Hermitian eigendecomposition of the segment Hamiltonian.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, InvalidBlochVector, InvalidModel

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
I_X = SIGMA_X / 2
I_Y = SIGMA_Y / 2
I_Z = SIGMA_Z / 2


class BlochVector(NamedTuple):
    x: float
    y: float
    z: float

    @property
    def norm(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))


@dataclass(frozen=True)
class MeasurementOutcome:
    """Result of a projective measurement in the free-Hamiltonian eigenbasis."""

    index: int
    collapsed: np.ndarray
    probability: float


def as_state(amplitudes: Sequence[complex], normalize: bool = False) -> np.ndarray:
    """Return ``amplitudes`` as a complex state vector.

    With ``normalize=True`` the vector is rescaled to unit norm; otherwise the
    norm must already be 1 within 1e-9.
    """
    psi = np.array(amplitudes, dtype=complex).reshape(-1)
    if psi.size < 2:
        raise DimensionError("state dimension must be at least 2")
    norm = np.linalg.norm(psi)
    if normalize:
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return psi / norm
    if abs(norm - 1) > 1e-9:
        raise ValueError(f"state is not normalized (norm={norm!r})")
    return psi


def basis_state(dim: int, index: int) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return psi


def check_hermitian(H: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise InvalidModel(f"Hamiltonian must be square, got shape {H.shape}")
    if np.max(np.abs(H - H.conj().T), initial=0.0) > tol:
        raise InvalidModel("Hamiltonian is not Hermitian")
    return H


def check_unitary(U: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise DimensionError(f"operator must be square, got shape {U.shape}")
    if np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) > tol:
        raise ValueError("operator is not unitary")
    return U


def unitary(H: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i H t)`` via the eigendecomposition of ``H``."""
    H = check_hermitian(H)
    if t < 0:
        raise ValueError("duration must be non-negative")
    evals, evecs = np.linalg.eigh(H)
    return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T


def unitaries(H: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Stack of ``exp(-i H t)`` for every entry of ``times``, shape (len, N, N)."""
    H = check_hermitian(H)
    evals, evecs = np.linalg.eigh(H)
    phases = np.exp(-1j * np.multiply.outer(np.asarray(times, dtype=float), evals))
    return np.einsum("ij,tj,kj->tik", evecs, phases, evecs.conj())


def propagate(state: np.ndarray, H: np.ndarray, t: float) -> np.ndarray:
    """Evolve ``state`` for duration ``t`` under the constant Hamiltonian ``H``."""
    if t == 0:
        return np.array(state, dtype=complex)
    return unitary(H, t) @ state


def segments_unitary(segments: Sequence[tuple[np.ndarray, float]], dim: int) -> np.ndarray:
    """Total propagator of a piecewise-constant Hamiltonian sequence."""
    U = np.eye(dim, dtype=complex)
    if not segments:
        return U
    Hs = np.asarray([H for H, _ in segments], dtype=complex)
    dts = np.asarray([dt for _, dt in segments], dtype=float)
    if Hs.shape[1:] != (dim, dim):
        raise DimensionError(f"segment Hamiltonians must be {dim}x{dim}")
    if np.max(np.abs(Hs - Hs.conj().transpose(0, 2, 1))) > HERMITIAN_TOL:
        raise InvalidModel("Hamiltonian is not Hermitian")
    if np.any(dts < 0):
        raise ValueError("duration must be non-negative")
    evals, evecs = np.linalg.eigh(Hs)
    Us = (evecs * np.exp(-1j * evals * dts[:, None])[:, None, :]) @ evecs.conj().transpose(0, 2, 1)
    for V in Us:
        U = V @ U
    return U


def propagate_time_varying(
    state: np.ndarray, segments: Sequence[tuple[np.ndarray, float]]
) -> np.ndarray:
    psi = np.array(state, dtype=complex)
    for H, dt in segments:
        psi = propagate(psi, H, dt)
    return psi


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Squared overlap ``|<a|b>|^2``; insensitive to global phase."""
    return float(abs(np.vdot(a, b)) ** 2)


def density_matrix(state: np.ndarray) -> np.ndarray:
    psi = np.asarray(state, dtype=complex)
    return np.outer(psi, psi.conj())


def bloch_from_state(state: np.ndarray) -> BlochVector:
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (2,):
        raise DimensionError("Bloch representation needs a two-level state")
    rho = density_matrix(psi)
    return BlochVector(*(float(np.real(np.trace(rho @ s))) for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)))


def density_from_bloch(b: Sequence[float]) -> np.ndarray:
    """``rho = (I + r . sigma) / 2``."""
    x, y, z = (float(v) for v in b)
    if x * x + y * y + z * z > (1 + 1e-9) ** 2:
        raise InvalidBlochVector(f"|r| > 1 for r={(x, y, z)}")
    return 0.5 * (np.eye(2) + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z)


def state_from_bloch(b: Sequence[float]) -> np.ndarray:
    """Pure state on the Bloch sphere, with a real non-negative first amplitude."""
    x, y, z = (float(v) for v in b)
    r = np.sqrt(x * x + y * y + z * z)
    if r > 1 + 1e-9:
        raise InvalidBlochVector(f"|r| > 1 for r={(x, y, z)}")
    if abs(r - 1) > 1e-9:
        raise InvalidBlochVector("only unit Bloch vectors describe pure states")
    theta = np.arccos(np.clip(z / r, -1.0, 1.0))
    phi = np.arctan2(y, x)
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def state_or_density_from_bloch(b: Sequence[float]):
    """Pure state for unit vectors, density matrix for interior points."""
    r = np.sqrt(sum(float(v) ** 2 for v in b))
    if abs(r - 1) <= 1e-9:
        return state_from_bloch(b)
    return density_from_bloch(b)


def measure_projective(state: np.ndarray, rng: np.random.Generator) -> MeasurementOutcome:
    """Sample a projective measurement in the computational (H0) basis.

    Consumes exactly one uniform variate from ``rng``.
    """
    psi = np.asarray(state, dtype=complex)
    probs = np.abs(psi) ** 2
    cdf = np.cumsum(probs)
    u = rng.random() * cdf[-1]
    j = int(min(np.searchsorted(cdf, u, side="right"), psi.size - 1))
    return MeasurementOutcome(j, basis_state(psi.size, j), float(probs[j]))


def gate_fidelity(U0: np.ndarray, U: np.ndarray) -> float:
    """``min_psi |<psi| U0^dag U |psi>|``.

    ``<psi|V|psi>`` ranges over the convex hull of the eigenvalues of
    ``V = U0^dag U``, so the minimum modulus is the distance from the origin
    to that polygon. With all eigenphases inside an arc of length ``s`` this
    is ``cos(s/2)``, and zero once no arc shorter than pi covers them.
    """
    U0 = check_unitary(U0)
    U = check_unitary(U)
    if U0.shape != U.shape:
        raise DimensionError("gates have different dimensions")
    phases = np.sort(np.mod(np.angle(np.linalg.eigvals(U0.conj().T @ U)), 2 * np.pi))
    gaps = np.diff(np.append(phases, phases[0] + 2 * np.pi))
    spread = 2 * np.pi - gaps.max()
    return float(np.cos(spread / 2)) if spread < np.pi else 0.0


def gate_error(U0: np.ndarray, U: np.ndarray) -> float:
    return 1.0 - gate_fidelity(U0, U)
