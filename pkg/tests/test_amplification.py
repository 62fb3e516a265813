import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsmc.amplification import (AmplitudeAmplifier, analytic_action, build_phase_operators,
                                build_Q, complete_unitary, good_probability,
                                grover_good_probability, recovery_state, select_iteration_count)
from qsmc.errors import AmplificationError, IterationBudgetExceeded

PREPARED = [0.0600, 0.0800, 0.9950]


@pytest.fixture
def example_amp():
    return AmplitudeAmplifier.from_amplitudes(PREPARED, {0, 1})


def test_complete_unitary():
    rng = np.random.default_rng(0)
    for n in (2, 3, 5):
        col = rng.normal(size=n) + 1j * rng.normal(size=n)
        for idx in range(n):
            U = complete_unitary(col, idx)
            assert np.allclose(U.conj().T @ U, np.eye(n), atol=1e-12)
            assert np.allclose(U[:, idx], col / np.linalg.norm(col), atol=1e-12)


class TestPhaseOperators:
    def test_zero_phase_is_identity(self):
        amp = AmplitudeAmplifier.from_amplitudes([0.6, 0.8], {0}, phi1=0.0, phi2=0.0)
        P0, Pchi = build_phase_operators(amp)
        assert np.allclose(P0, np.eye(2)) and np.allclose(Pchi, np.eye(2))

    def test_pi_is_reflection(self, example_amp):
        P0, Pchi = build_phase_operators(example_amp)
        assert np.allclose(P0, np.diag([-1, 1, 1]))
        assert np.allclose(Pchi, np.diag([-1, -1, 1]))

    def test_reference_index(self):
        amp = AmplitudeAmplifier.from_amplitudes(PREPARED, {0, 1}, reference=2)
        P0, _ = build_phase_operators(amp)
        assert np.allclose(P0, np.diag([1, 1, -1]))
        assert np.allclose(amp.prepared_state, np.array(PREPARED) / np.linalg.norm(PREPARED))

    def test_zero_phases_give_minus_identity(self):
        amp = AmplitudeAmplifier.from_amplitudes([0.2, 0.5, 0.3, 0.1], {1, 3}, 0.0, 0.0)
        assert np.allclose(build_Q(amp), -np.eye(4))


class TestAction:
    @settings(max_examples=100, deadline=None)
    @given(n=st.integers(2, 5), seed=st.integers(0, 2**32 - 1),
           phi1=st.floats(0, np.pi), phi2=st.floats(0, np.pi))
    def test_analytic_matches_matrix(self, n, seed, phi1, phi2):
        rng = np.random.default_rng(seed)
        good = set(rng.choice(n, size=int(rng.integers(1, n)), replace=False).tolist())
        amps = rng.normal(size=n) + 1j * rng.normal(size=n)
        amp = AmplitudeAmplifier.from_amplitudes(amps, good, phi1, phi2, reference=int(rng.integers(n)))
        assert np.max(np.abs(build_Q(amp) @ amp.prepared_state - analytic_action(amp))) < 1e-10

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), L=st.integers(0, 12))
    def test_grover_closed_form(self, seed, L):
        rng = np.random.default_rng(seed)
        amps = rng.normal(size=4)
        amp = AmplitudeAmplifier.from_amplitudes(amps, {0, 2})
        g = good_probability(amp.prepared_state, {0, 2})
        Q = build_Q(amp)
        psi = np.linalg.matrix_power(Q, L) @ amp.prepared_state
        assert good_probability(psi, {0, 2}) == pytest.approx(grover_good_probability(g, L), abs=1e-9)

    def test_Q_is_unitary(self, example_amp):
        Q = build_Q(example_amp)
        assert np.allclose(Q.conj().T @ Q, np.eye(3), atol=1e-12)


class TestIterationCount:
    def test_example(self, example_amp):
        assert select_iteration_count(example_amp, 0.005) == 7

    def test_example_recovered_state(self, example_amp):
        psi = recovery_state(example_amp, 7)
        assert np.allclose(np.abs(psi), [0.5986, 0.7981, 0.0682], atol=1e-3)
        assert 1 - good_probability(psi, {0, 1}) == pytest.approx(0.0047, abs=2e-4)
        # frozen
        assert np.allclose(np.abs(psi), [0.598601, 0.798135, 0.068251], atol=2e-6)

    def test_already_in_domain(self):
        amp = AmplitudeAmplifier.from_amplitudes([0.7, 0.7, 0.01], {0, 1})
        assert select_iteration_count(amp, 0.005) == 0

    def test_l_zero_is_prepared_state(self, example_amp):
        assert np.allclose(recovery_state(example_amp, 0), example_amp.prepared_state)

    def test_brute_force_oracle(self):
        for g, p0 in [(0.3, 0.01), (0.02, 0.01), (0.001, 0.05)]:
            amp = AmplitudeAmplifier.from_amplitudes([np.sqrt(g), np.sqrt(1 - g)], {0})
            Q = build_Q(amp)
            bads = [1 - good_probability(np.linalg.matrix_power(Q, L) @ amp.prepared_state, {0})
                    for L in range(51)]
            first = next(L for L, b in enumerate(bads) if b <= p0)
            assert select_iteration_count(amp, p0, 50) == first

    def test_half_weight_never_improves(self):
        # g = 1/2 with pi phases is a fixed point of the rotation: 3 theta = pi - theta
        amp = AmplitudeAmplifier.from_amplitudes([np.sqrt(0.5), np.sqrt(0.5)], {0})
        Q = build_Q(amp)
        bads = [1 - good_probability(np.linalg.matrix_power(Q, L) @ amp.prepared_state, {0})
                for L in range(51)]
        with pytest.raises(IterationBudgetExceeded) as exc:
            select_iteration_count(amp, 0.01, 50)
        assert exc.value.best_L == int(np.argmin(bads))
        assert exc.value.best_bad_probability == pytest.approx(min(bads), abs=1e-12)
        assert min(bads) == pytest.approx(0.5, abs=1e-12)

    def test_no_good_weight(self):
        amp = AmplitudeAmplifier.from_amplitudes([0, 0, 1], {0, 1})
        with pytest.raises(AmplificationError):
            select_iteration_count(amp, 0.005)

    def test_invalid_arguments(self, example_amp):
        with pytest.raises(ValueError):
            recovery_state(example_amp, -1)
        with pytest.raises(ValueError):
            AmplitudeAmplifier.from_amplitudes(PREPARED, {0, 1, 2})
        with pytest.raises(ValueError):
            AmplitudeAmplifier.from_amplitudes(PREPARED, {0}, phi1=4.0)
