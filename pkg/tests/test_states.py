import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nosignal.exceptions import ContractError, DomainError, StructureError
from nosignal.matcore import I2, herm_eig, ket, partial_trace, projector
from nosignal.states import (
    BipartiteState,
    DensityMatrix,
    bloch_to_density,
    density_to_bloch,
    measure_alice,
    partially_entangled,
    random_density,
    random_unit_vectors,
    singlet,
)


def rotate_and_check_oracle(n):
    """Bob's conditional states for the singlet, from the anti-correlation property.

    For the singlet (U (x) U)|psi_s> = e^{i phi}|psi_s>, so Alice finding +n leaves
    Bob in -n.  Builds the spin states along n directly from spherical angles.
    """
    theta = np.arccos(np.clip(n[2], -1, 1))
    phi = np.arctan2(n[1], n[0])
    up = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
    down = np.array([-np.exp(-1j * phi) * np.sin(theta / 2), np.cos(theta / 2)])
    return projector(down), projector(up)


class TestBloch:
    def test_z(self):
        np.testing.assert_allclose(bloch_to_density([0, 0, 1]).mat, projector(ket(0)), atol=1e-15)

    def test_origin(self):
        np.testing.assert_allclose(bloch_to_density([0, 0, 0]).mat, I2 / 2, atol=1e-15)

    def test_x(self):
        np.testing.assert_allclose(bloch_to_density([1, 0, 0]).mat, np.full((2, 2), 0.5), atol=1e-15)

    def test_outside_ball(self):
        with pytest.raises(DomainError):
            bloch_to_density([1, 1, 0])

    def test_wrong_length(self):
        with pytest.raises(StructureError):
            bloch_to_density([1, 0])

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_roundtrip_from_density(self, seed):
        rho = random_density(2, np.random.default_rng(seed))
        back = bloch_to_density(density_to_bloch(rho)).mat
        assert np.max(np.abs(back - rho)) <= 1e-12

    @given(st.lists(st.floats(-1, 1), min_size=3, max_size=3))
    @settings(max_examples=50, deadline=None)
    def test_roundtrip_from_vector(self, s):
        s = np.array(s)
        if np.linalg.norm(s) > 1:
            s = s / np.linalg.norm(s)
        np.testing.assert_allclose(density_to_bloch(bloch_to_density(s)), s, atol=1e-12)


class TestDensityMatrix:
    def test_rejects_negative(self):
        with pytest.raises(ContractError):
            DensityMatrix(np.diag([1.5, -0.5]))

    def test_rejects_trace(self):
        with pytest.raises(ContractError):
            DensityMatrix(np.eye(2))

    def test_rejects_non_hermitian(self):
        with pytest.raises(ContractError):
            DensityMatrix(np.array([[0.5, 1], [0, 0.5]]))

    def test_read_only(self):
        rho = bloch_to_density([0, 0, 1])
        with pytest.raises(ValueError):
            rho.mat[0, 0] = 2

    def test_bipartite_needs_two_qubits(self):
        with pytest.raises(StructureError):
            BipartiteState(I2 / 2)


class TestSinglet:
    def test_marginals(self):
        s = singlet()
        np.testing.assert_allclose(s.bob_marginal(), I2 / 2, atol=1e-15)
        np.testing.assert_allclose(s.alice_marginal(), I2 / 2, atol=1e-15)

    def test_overlap_01(self):
        assert np.real(ket(0, 1).conj() @ singlet().mat @ ket(0, 1)) == pytest.approx(0.5, abs=1e-15)

    def test_pure(self):
        np.testing.assert_allclose(herm_eig(singlet().mat)[0], [1, 0, 0, 0], atol=1e-14)


class TestPartiallyEntangled:
    def test_quarter_pi_is_singlet(self):
        assert np.max(np.abs(partially_entangled(np.pi / 4).mat - singlet().mat)) <= 1e-12

    def test_zero_is_product(self):
        np.testing.assert_allclose(partially_entangled(0).mat, projector(ket(0, 1)), atol=1e-15)

    def test_pi_6_z_probabilities(self):
        ens = measure_alice(partially_entangled(np.pi / 6), [0, 0, 1])
        probs = [b.probability for b in ens.branches]
        np.testing.assert_allclose(probs, [np.cos(np.pi / 6) ** 2, np.sin(np.pi / 6) ** 2], atol=1e-12)
        np.testing.assert_allclose(probs, [0.75, 0.25], atol=1e-12)

    @pytest.mark.parametrize("theta", np.linspace(0, np.pi / 2, 7))
    def test_alice_marginal(self, theta):
        rho = partially_entangled(theta)
        expected = np.diag([np.cos(theta) ** 2, np.sin(theta) ** 2])
        assert np.max(np.abs(rho.alice_marginal() - expected)) <= 1e-12

    @pytest.mark.parametrize("theta", [-0.1, np.pi / 2 + 0.1, np.nan])
    def test_out_of_range(self, theta):
        with pytest.raises(DomainError):
            partially_entangled(theta)


class TestMeasureAlice:
    def test_singlet_z(self):
        ens = measure_alice(singlet(), [0, 0, 1])
        plus, minus = ens.branches
        assert plus.probability == pytest.approx(0.5, abs=1e-15)
        assert minus.probability == pytest.approx(0.5, abs=1e-15)
        np.testing.assert_allclose(plus.state, projector(ket(1)), atol=1e-15)
        np.testing.assert_allclose(minus.state, projector(ket(0)), atol=1e-15)

    def test_singlet_random_axes(self, rng):
        for n in random_unit_vectors(100, rng):
            ens = measure_alice(singlet(), n)
            want_plus, want_minus = rotate_and_check_oracle(n)
            assert [b.probability for b in ens.branches] == pytest.approx([0.5, 0.5], abs=1e-12)
            np.testing.assert_allclose(ens.branches[0].state, want_plus, atol=1e-12)
            np.testing.assert_allclose(ens.branches[1].state, want_minus, atol=1e-12)

    def test_non_unit_axis(self):
        with pytest.raises(DomainError):
            measure_alice(singlet(), [0, 0, 0.5])

    def test_zero_probability_branch_flagged(self):
        ens = measure_alice(partially_entangled(0), [0, 0, 1])
        assert not ens.branches[0].absent
        assert ens.branches[1].absent
        assert len(ens.present) == 1
        np.testing.assert_allclose(ens.average(), projector(ket(1)), atol=1e-15)

    def test_average_preserved(self, rng):
        states = [singlet(), partially_entangled(np.pi / 6), partially_entangled(np.pi / 3)]
        states += [random_density(4, rng) for _ in range(10)]
        for rho in states:
            m = rho.mat if hasattr(rho, "mat") else rho
            bob = partial_trace(m, [2, 2], 0)
            for n in random_unit_vectors(10, rng):
                assert np.max(np.abs(measure_alice(m, n).average() - bob)) <= 1e-12
