"""Two-qubit state construction and Bloch decomposition."""
import numpy as np
import pytest

from causaldet.linalg import det3, is_so3
from causaldet.rng import make_rng
from causaldet.states import (
    BlochForm,
    TwoQubitState,
    UnphysicalStateError,
    bell_state,
    bloch_compose,
    bloch_decompose,
    depolarize,
    diagonalize_correlation,
    fidelity_pure,
    random_correlation_blocks,
    random_state,
    werner_state,
)


class TestTwoQubitState:
    def test_rejects_trace(self):
        with pytest.raises(UnphysicalStateError, match="trace"):
            TwoQubitState(np.eye(4) / 2)

    def test_rejects_non_hermitian(self):
        m = np.eye(4, dtype=complex) / 4
        m[0, 1] = 0.1
        with pytest.raises(UnphysicalStateError, match="Hermitian"):
            TwoQubitState(m)

    def test_rejects_negative(self):
        with pytest.raises(UnphysicalStateError, match="eigenvalue"):
            TwoQubitState(np.diag([0.6, 0.6, -0.1, -0.1]).astype(complex))

    def test_density_matrix_spectrum_contract(self):
        # every constructor yields eigenvalues >= -1e-9 summing to 1
        rng = make_rng(5)
        states = [bell_state(k) for k in range(4)]
        states += [werner_state(w) for w in (-1 / 3, 0.0, 0.4, 1.0)]
        states += [random_state(rng) for _ in range(20)]
        states += [depolarize(bell_state(3), 0.3)]
        for st in states:
            evs = st.eigenvalues()
            assert evs[0] >= -1e-9
            assert abs(evs.sum() - 1.0) < 1e-10


class TestBlochDecompose:
    def test_maximally_mixed(self):
        form = bloch_decompose(TwoQubitState(np.eye(4) / 4))
        assert np.allclose(form.v_a, 0) and np.allclose(form.v_b, 0)
        assert np.allclose(form.m, 0)

    def test_product_zero_zero(self):
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = 1.0
        form = bloch_decompose(TwoQubitState(rho))
        assert np.allclose(form.v_a, [0, 0, 1], atol=1e-12)
        assert np.allclose(form.v_b, [0, 0, 1], atol=1e-12)
        assert np.allclose(form.m, np.diag([0, 0, 1]), atol=1e-12)

    def test_singlet(self):
        form = bloch_decompose(bell_state(3))
        assert np.allclose(form.v_a, 0, atol=1e-12)
        assert np.allclose(form.v_b, 0, atol=1e-12)
        assert np.allclose(form.m, -np.eye(3), atol=1e-12)


class TestBlochCompose:
    def test_zero_form(self):
        state = bloch_compose(BlochForm(np.zeros(3), np.zeros(3), np.zeros((3, 3))))
        assert np.allclose(state.rho, np.eye(4) / 4)

    def test_minus_identity_is_singlet(self):
        state = bloch_compose(BlochForm(np.zeros(3), np.zeros(3), -np.eye(3)))
        assert np.allclose(state.rho, bell_state(3).rho, atol=1e-12)

    def test_identity_block_unphysical(self):
        with pytest.raises(UnphysicalStateError, match="-0.5"):
            bloch_compose(BlochForm(np.zeros(3), np.zeros(3), np.eye(3)))

    def test_round_trip(self):
        rng = make_rng(7)
        for _ in range(1000):
            state = random_state(rng)
            back = bloch_compose(bloch_decompose(state))
            assert np.max(np.abs(back.rho - state.rho)) < 1e-12


class TestBellStates:
    _SIGNS = {0: (1, -1, 1), 1: (-1, 1, 1), 2: (1, 1, -1), 3: (-1, -1, -1)}

    @pytest.mark.parametrize("k", range(4))
    def test_correlation_block(self, k):
        m = bloch_decompose(bell_state(k)).m
        assert np.allclose(m, np.diag(self._SIGNS[k]), atol=1e-12)

    @pytest.mark.parametrize("k", range(4))
    def test_rank_one(self, k):
        evs = bell_state(k).eigenvalues()
        assert np.allclose(evs, [0, 0, 0, 1], atol=1e-12)

    def test_sign_patterns_distinct(self):
        assert len({self._SIGNS[k] for k in range(4)}) == 4

    def test_singlet_amplitudes(self):
        # (|01> - |10>)/sqrt(2): support only on the middle computational states
        rho = bell_state(3).rho
        assert rho[0, 0] == rho[3, 3] == 0
        assert rho[1, 1] == pytest.approx(0.5)
        assert rho[1, 2] == pytest.approx(-0.5)

    def test_bad_index(self):
        with pytest.raises(ValueError):
            bell_state(4)


class TestWernerState:
    def test_omega_one_is_singlet(self):
        assert np.allclose(werner_state(1.0).rho, bell_state(3).rho, atol=1e-12)

    def test_omega_zero_is_mixed(self):
        assert np.allclose(werner_state(0.0).rho, np.eye(4) / 4)

    def test_boundary_state(self):
        state = werner_state(-1 / 3)
        assert abs(state.eigenvalues()[0]) < 1e-12
        assert np.allclose(bloch_decompose(state).m, np.eye(3) / 3, atol=1e-12)

    @pytest.mark.parametrize("omega", np.linspace(-1 / 3, 1.0, 15))
    def test_spectrum_and_block(self, omega):
        state = werner_state(omega)
        expected = np.sort([(1 - omega) / 4] * 3 + [(1 + 3 * omega) / 4])
        assert np.allclose(state.eigenvalues(), expected, atol=1e-12)
        assert np.allclose(bloch_decompose(state).m, -omega * np.eye(3), atol=1e-12)

    @pytest.mark.parametrize("omega", [-0.4, 1.1])
    def test_out_of_range(self, omega):
        with pytest.raises(UnphysicalStateError):
            werner_state(omega)


class TestRandomState:
    def test_valid_density_matrix(self):
        rng = make_rng(1)
        for _ in range(100):
            state = random_state(rng)
            assert abs(np.trace(state.rho).real - 1.0) < 1e-10
            assert state.eigenvalues()[0] >= -1e-12

    def test_blocks_match_object_path(self):
        # the vectorised ensemble must agree with random_state + decompose
        blocks = random_correlation_blocks(25, make_rng(9))
        rng = make_rng(9)
        for i in range(25):
            m = bloch_decompose(random_state(rng)).m
            assert np.allclose(m, blocks[i], atol=1e-12)


class TestDepolarize:
    def test_zero_noop(self):
        state = bell_state(0)
        assert np.array_equal(depolarize(state, 0.0).rho, state.rho)

    def test_full_is_mixed(self):
        assert np.allclose(depolarize(bell_state(0), 1.0).rho, np.eye(4) / 4)

    def test_block_scaling(self):
        state = werner_state(0.8)
        noisy = depolarize(state, 0.25)
        assert np.allclose(
            bloch_decompose(noisy).m, 0.75 * bloch_decompose(state).m, atol=1e-12
        )

    def test_calibrated_fidelity(self):
        # F = (1 - eps) + eps/4; eps = 0.048 lands on 96.4%
        noisy = depolarize(bell_state(3), 0.048)
        assert fidelity_pure(bell_state(3), noisy) == pytest.approx(0.964, abs=1e-12)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            depolarize(bell_state(0), 1.5)


class TestFidelityPure:
    def test_self(self):
        assert fidelity_pure(bell_state(3), bell_state(3)) == pytest.approx(1.0)

    def test_against_mixed(self):
        mixed = TwoQubitState(np.eye(4) / 4)
        assert fidelity_pure(bell_state(3), mixed) == pytest.approx(0.25)

    @pytest.mark.parametrize("omega", [-1 / 3, 0.0, 0.5, 1.0])
    def test_against_werner(self, omega):
        f = fidelity_pure(bell_state(3), werner_state(omega))
        assert f == pytest.approx((1 + 3 * omega) / 4, abs=1e-12)

    def test_rejects_mixed_target(self):
        with pytest.raises(ValueError, match="rank one"):
            fidelity_pure(werner_state(0.5), bell_state(3))


class TestDiagonalizeCorrelation:
    def _check_contract(self, m):
        r_a, r_b, t = diagonalize_correlation(m)
        assert is_so3(r_a, 1e-10) and is_so3(r_b, 1e-10)
        assert np.max(np.abs(r_a @ np.diag(t) @ r_b.T - m)) < 1e-10
        assert det3(m) == pytest.approx(float(np.prod(t)), abs=1e-10)

    def test_minus_identity(self):
        self._check_contract(-np.eye(3))

    def test_already_diagonal(self):
        self._check_contract(np.diag([1.0, -1.0, 1.0]))

    def test_random_blocks(self):
        rng = make_rng(21)
        for block in random_correlation_blocks(1000, rng):
            self._check_contract(block)
