import numpy as np
import pytest

from qsmc.errors import InvalidModel
from qsmc.models import (HamiltonianModel, UncertaintyRealization, five_level_model_I, get_model,
                         realize_uncertainty, sample_coefficients, three_level_model,
                         two_level_model)
from qsmc.quantum import I_X, I_Z, basis_state, propagate, segments_unitary
from qsmc.sliding import SlidingMode, surface_value


def test_two_level_spectrum():
    assert np.allclose(np.linalg.eigvalsh(two_level_model(0.1).H0), [-0.5, 0.5])


def test_z_uncertainty_keeps_sliding_mode():
    m = two_level_model(0.1)
    mode = SlidingMode({0}, 0.01)
    rz = UncertaintyRealization("constant-worst-case", direction=(0.0, 1.0))
    segs = realize_uncertainty(m, rz, 10.0)
    assert np.allclose(segs[0][0], I_Z + 0.1 * I_Z)
    for t in np.linspace(0, 10, 21):
        psi = propagate(basis_state(2, 0), segs[0][0], t)
        assert surface_value(psi, mode) == pytest.approx(0.0, abs=1e-15)


def test_zero_bound_is_nominal():
    m = two_level_model(0.0)
    rz = UncertaintyRealization("piecewise-constant-random")
    U = segments_unitary(realize_uncertainty(m, rz, 3.0, np.random.default_rng(0)), 2)
    assert np.allclose(U, segments_unitary([(m.H0, 3.0)], 2), atol=1e-12)


def test_three_level_decoupled_level():
    m = three_level_model(0.0)
    H = m.hamiltonian()
    for t in np.linspace(0, 5, 11):
        assert abs(propagate(basis_state(3, 1), H, t)[2]) ** 2 == 0.0


def test_three_level_nominal_control():
    m = three_level_model(0.1)
    assert m.nominal_controls == (1.0,)
    assert m.hamiltonian()[0, 1] == m.controls[0][0, 1]


def test_five_level_structure():
    m = five_level_model_I()
    assert m.dim == 5
    assert np.allclose(np.diag(m.H0), [1, 1.2, 1.3, 2, 2.15])
    B = m.controls[0]
    nz = {tuple(sorted(ij)) for ij in zip(*np.nonzero(B))}
    assert nz == {(0, 3), (0, 4), (3, 4)}


def test_get_model():
    assert get_model("two-level", 0.2).epsilon_bound == 0.2
    with pytest.raises(ValueError):
        get_model("four-level")


def test_non_diagonal_H0_rejected():
    with pytest.raises(InvalidModel):
        HamiltonianModel("bad", I_X, (I_X,))


def test_non_hermitian_control_rejected():
    with pytest.raises(InvalidModel):
        HamiltonianModel("bad", I_Z, (np.array([[0, 1], [0, 0]]),))


class TestRealizations:
    def test_none_is_nominal(self):
        m = two_level_model(0.1)
        segs = realize_uncertainty(m, UncertaintyRealization("none"), 2.0)
        assert all(np.array_equal(H, m.H0) for H, _ in segs)

    def test_constant_worst_case(self):
        m = two_level_model(0.1)
        for sign in (1, -1):
            segs = realize_uncertainty(m, UncertaintyRealization("constant-worst-case", sign=sign), 2.0)
            assert all(np.allclose(H, I_Z + sign * 0.1 * I_X) for H, _ in segs)

    def test_random_is_reproducible_and_admissible(self):
        m = three_level_model(0.1)
        rz = UncertaintyRealization("piecewise-constant-random", seed=4)
        a = sample_coefficients(m, rz, 3.0)
        b = sample_coefficients(m, rz, 3.0)
        assert all(np.array_equal(x[0], y[0]) for x, y in zip(a, b))
        assert all(np.linalg.norm(e) <= 0.1 + 1e-15 for e, _ in a)
        assert sum(dt for _, dt in a) == pytest.approx(3.0)

    def test_random_respects_direction_support(self):
        m = two_level_model(0.1)
        rz = UncertaintyRealization("piecewise-constant-random", direction=(1.0, 0.0))
        assert all(e[1] == 0 for e, _ in sample_coefficients(m, rz, 1.0))

    def test_sinusoidal(self):
        m = two_level_model(0.1)
        rz = UncertaintyRealization("sinusoidal", frequency=0.5, segment_width=0.01)
        coeffs = sample_coefficients(m, rz, 2.0)
        assert len(coeffs) == 200
        assert max(abs(e[0]) for e, _ in coeffs) <= 0.1
        assert coeffs[50][0][0] == pytest.approx(0.1 * np.sin(np.pi * 0.505))

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            UncertaintyRealization("gaussian")
