import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from qsmc.errors import DimensionError, InvalidBlochVector, InvalidModel
from qsmc.quantum import (I_X, I_Z, SIGMA_X, basis_state, bloch_from_state, check_hermitian,
                          density_from_bloch, fidelity, gate_error, gate_fidelity,
                          measure_projective, propagate, segments_unitary, state_from_bloch,
                          state_or_density_from_bloch, unitaries, unitary)


def random_hermitian(rng, n):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (A + A.conj().T) / 2


def random_state(rng, n):
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    return psi / np.linalg.norm(psi)


def fibonacci_sphere(n):
    """Nearly uniform points on the unit sphere, as pure qubit states."""
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    phi = np.pi * (1 + 5**0.5) * k
    theta = np.arccos(z)
    return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=1)


class TestPropagation:
    def test_eigenstate_only_picks_up_phase(self):
        H0 = np.diag([-1.0, 0.0, 1.0])
        for j in range(3):
            psi = propagate(basis_state(3, j), H0, 2.7)
            assert fidelity(psi, basis_state(3, j)) == pytest.approx(1.0, abs=1e-14)
            assert abs(abs(psi[j]) - 1) < 1e-14

    def test_worst_case_bloch_z_at_half_period(self):
        t = np.pi / np.sqrt(1.01)
        psi = propagate(basis_state(2, 0), I_Z + 0.1 * I_X, t)
        assert bloch_from_state(psi).z == pytest.approx(0.99 / 1.01, abs=1e-12)
        assert bloch_from_state(psi).z == pytest.approx(0.9802, abs=5e-5)

    def test_zero_time_is_identity(self):
        rng = np.random.default_rng(1)
        psi = random_state(rng, 4)
        assert np.allclose(propagate(psi, random_hermitian(rng, 4), 0.0), psi, atol=0)

    def test_matches_scipy_expm(self):
        from scipy.linalg import expm
        rng = np.random.default_rng(2)
        H = random_hermitian(rng, 5)
        assert np.allclose(unitary(H, 0.83), expm(-1j * 0.83 * H), atol=1e-12)

    def test_unitaries_vectorized(self):
        rng = np.random.default_rng(3)
        H = random_hermitian(rng, 3)
        ts = np.linspace(0, 2, 7)
        Us = unitaries(H, ts)
        for t, U in zip(ts, Us):
            assert np.allclose(U, unitary(H, t), atol=1e-13)

    def test_five_segment_schedule_preserves_norm(self):
        rng = np.random.default_rng(4)
        segs = [(I_Z + u * I_X, dt) for u, dt in zip(rng.uniform(-10, 10, 5), rng.uniform(0, 1, 5))]
        psi = segments_unitary(segs, 2) @ random_state(rng, 2)
        assert abs(np.linalg.norm(psi) - 1) < 1e-9

    def test_segments_apply_in_time_order(self):
        A, B = I_Z + 3 * I_X, I_Z - 3 * I_X
        U = segments_unitary([(A, 0.2), (B, 0.5)], 2)
        assert np.allclose(U, unitary(B, 0.5) @ unitary(A, 0.2))

    def test_rejects_non_hermitian(self):
        with pytest.raises(InvalidModel):
            check_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))

    @settings(max_examples=50, deadline=None)
    @given(n=st.integers(2, 5), t=st.floats(0, 20), seed=st.integers(0, 2**32 - 1))
    def test_unitarity_property(self, n, t, seed):
        rng = np.random.default_rng(seed)
        U = unitary(random_hermitian(rng, n), t)
        assert np.max(np.abs(U.conj().T @ U - np.eye(n))) < 1e-9


class TestBloch:
    def test_basis_state(self):
        assert tuple(bloch_from_state(basis_state(2, 0))) == pytest.approx((0, 0, 1))

    def test_plus_state(self):
        b = bloch_from_state(np.array([1, 1]) / np.sqrt(2))
        assert tuple(b) == pytest.approx((1, 0, 0), abs=1e-15)
        assert b.norm == pytest.approx(1.0)

    def test_origin_is_maximally_mixed(self):
        assert np.allclose(state_or_density_from_bloch((0, 0, 0)), np.eye(2) / 2)

    def test_round_trip(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            psi = random_state(rng, 2)
            back = state_from_bloch(bloch_from_state(psi))
            assert fidelity(psi, back) == pytest.approx(1.0, abs=1e-12)

    def test_outside_ball_rejected(self):
        with pytest.raises(InvalidBlochVector):
            density_from_bloch((1, 1, 0))
        with pytest.raises(InvalidBlochVector):
            state_from_bloch((0.5, 0, 0))

    def test_needs_two_levels(self):
        with pytest.raises(DimensionError):
            bloch_from_state(basis_state(3, 0))


class TestMeasurement:
    def test_eigenstate_is_certain(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            out = measure_projective(basis_state(3, 2), rng)
            assert out.index == 2 and out.probability == 1.0

    def test_recovered_state_failure_weight(self):
        psi = np.array([0.5986, 0.7981, 0.0682])
        psi = psi / np.linalg.norm(psi)
        p = np.abs(psi) ** 2
        assert p[2] == pytest.approx(0.0047, abs=2e-4)

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_uniform_superposition_chi_square(self, n):
        rng = np.random.default_rng(100 + n)
        psi = np.ones(n) / np.sqrt(n)
        counts = np.bincount([measure_projective(psi, rng).index for _ in range(10_000)], minlength=n)
        assert stats.chisquare(counts).pvalue > 0.01

    def test_collapse(self):
        out = measure_projective(np.array([0, 1j, 0]), np.random.default_rng(0))
        assert out.index == 1
        assert np.array_equal(out.collapsed, basis_state(3, 1))

    def test_one_uniform_per_measurement(self):
        a, b = np.random.default_rng(9), np.random.default_rng(9)
        psi = np.ones(4) / 2
        for _ in range(10):
            measure_projective(psi, a)
        b.random(10)
        assert a.random() == b.random()


class TestGateFidelity:
    def test_identity(self):
        U = unitary(random_hermitian(np.random.default_rng(0), 3), 1.3)
        assert gate_fidelity(U, U) == pytest.approx(1.0)

    @pytest.mark.parametrize("theta", [0.05, 0.3, 0.9, 1.4])
    def test_symmetric_phases_against_sphere_grid(self, theta):
        V = np.diag([np.exp(1j * theta), np.exp(-1j * theta)])
        W = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        V = W @ V @ W.conj().T
        states = fibonacci_sphere(10_000)
        brute = np.min(np.abs(np.einsum("ni,ij,nj->n", states.conj(), V, states)))
        F = gate_fidelity(np.eye(2), V)
        assert F == pytest.approx(np.cos(theta), abs=1e-12)
        assert abs(F - brute) < 1e-4

    def test_three_level_against_random_search(self):
        rng = np.random.default_rng(7)
        U0 = unitary(random_hermitian(rng, 3), 0.4)
        U = unitary(random_hermitian(rng, 3), 0.4)
        V = U0.conj().T @ U
        psi = rng.normal(size=(200_000, 3)) + 1j * rng.normal(size=(200_000, 3))
        psi /= np.linalg.norm(psi, axis=1, keepdims=True)
        brute = np.min(np.abs(np.einsum("ni,ij,nj->n", psi.conj(), V, psi)))
        F = gate_fidelity(U0, U)
        assert F <= brute + 1e-12
        assert brute - F < 5e-3

    def test_spread_beyond_pi_gives_zero(self):
        V = np.diag(np.exp(1j * np.array([0.0, 2.1, 4.2])))
        assert gate_fidelity(np.eye(3), V) == 0.0

    def test_bit_flip_gate_error(self):
        t = np.pi / np.sqrt(1.01)
        err = gate_error(unitary(I_Z, t), unitary(I_Z + 0.1 * I_X, t))
        assert err <= 0.0050
        # frozen: exact minimum at t = pi/omega
        assert err == pytest.approx(0.0049930, abs=1e-7)

    def test_pauli_x_is_orthogonal_gate(self):
        assert gate_fidelity(np.eye(2), SIGMA_X) == pytest.approx(0.0, abs=1e-15)
