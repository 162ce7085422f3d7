import numpy as np
import pytest

import nonbiloc as nb
from nonbiloc import opbasis
from nonbiloc.errors import BadParameter, DimensionMismatch, NotHermitian, NotQubitSide

from conftest import random_hermitian

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


class TestBuildBasis:
    def test_qubit_basis_is_scaled_paulis(self):
        basis = nb.build_basis(2)
        s = 1 / np.sqrt(2)
        for op, ref in zip(basis.operators, (np.eye(2), SX, SY, SZ)):
            assert np.allclose(op, ref * s, atol=1e-15)

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_identity_first_exact(self, d):
        basis = nb.build_basis(d)
        assert np.array_equal(basis.operators[0], np.eye(d) / np.sqrt(d))
        assert len(basis) == d * d

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_gram_identity(self, d):
        basis = nb.build_basis(d)
        gram = np.einsum("iab,jab->ij", basis.operators.conj(), basis.operators)
        assert np.max(np.abs(gram - np.eye(d * d))) <= 1e-12

    def test_completeness_resolution(self):
        rng = np.random.default_rng(31)
        basis = nb.build_basis(4)
        m = random_hermitian(4, rng)
        coeffs = np.einsum("iab,ab->i", basis.operators.conj(), m)
        rebuilt = np.tensordot(coeffs, basis.operators, axes=1)
        assert np.max(np.abs(rebuilt - m)) <= 1e-12

    def test_rejects_small_dim(self):
        with pytest.raises(BadParameter):
            nb.build_basis(1)


class TestCorrelationMatrix:
    def test_classical_state(self):
        b2 = nb.build_basis(2)
        gamma = nb.correlation_matrix(nb.classical_correlated().sqrt(), b2, b2)
        expected = np.zeros((4, 4))
        expected[0, 0] = expected[3, 3] = 1 / np.sqrt(2)
        assert np.max(np.abs(gamma - expected)) <= 1e-12

    def test_beta_state(self):
        b2 = nb.build_basis(2)
        beta = nb.bell_diagonal((1 / 3, 1 / 3, 1 / 3, 0.0))
        gamma = nb.correlation_matrix(beta.sqrt(), b2, b2)
        expected = np.diag([np.sqrt(3) / 2, 1 / (2 * np.sqrt(3)), 1 / (2 * np.sqrt(3)), 1 / (2 * np.sqrt(3))])
        assert np.max(np.abs(gamma - expected)) <= 1e-12

    def test_projector_00(self):
        b2 = nb.build_basis(2)
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = 1.0  # |00><00| = (I+sz)/2 x (I+sz)/2
        gamma = nb.correlation_matrix(rho, b2, b2)
        vec = np.array([1 / np.sqrt(2), 0, 0, 1 / np.sqrt(2)])
        assert np.max(np.abs(gamma - np.outer(vec, vec))) <= 1e-12

    def test_rejects_non_hermitian(self):
        b2 = nb.build_basis(2)
        s = np.zeros((4, 4), dtype=complex)
        s[0, 1] = 1.0
        with pytest.raises(NotHermitian):
            nb.correlation_matrix(s, b2, b2)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            nb.correlation_matrix(np.eye(4) / 2, nb.build_basis(2), nb.build_basis(3))

    def test_parseval_and_reconstruction(self):
        for seed, dims in [(0, (2, 2)), (1, (2, 3)), (2, (3, 2))]:
            rho = nb.random_density(dims[0] * dims[1], dims[0] * dims[1], seed=seed, dims=dims)
            root = rho.sqrt()
            ba, bb = nb.build_basis(dims[0]), nb.build_basis(dims[1])
            gamma = nb.correlation_matrix(root, ba, bb)
            assert np.sum(gamma**2) == pytest.approx(nb.hs_norm_sq(root), abs=1e-9)
            rebuilt = opbasis.reconstruct(gamma, ba, bb)
            assert np.max(np.abs(rebuilt - root)) <= 1e-9


class TestGammaBcad:
    def test_classical_pair(self):
        b2 = nb.build_basis(2)
        gamma_cc = nb.correlation_matrix(nb.classical_correlated().sqrt(), b2, b2)
        big = nb.gamma_bcad(gamma_cc, gamma_cc)
        expected = np.zeros(16)
        expected[[0, 3, 12, 15]] = 0.5
        assert np.max(np.abs(big - np.diag(expected))) <= 1e-12

    def test_beta_pair(self):
        b2 = nb.build_basis(2)
        beta = nb.bell_diagonal((1 / 3, 1 / 3, 1 / 3, 0.0))
        gamma = nb.correlation_matrix(beta.sqrt(), b2, b2)
        big = nb.gamma_bcad(gamma.T, gamma)  # beta_BA x beta_AB
        expected = np.diag(
            [3 / 4]
            + [1 / 4] * 3
            + [1 / 4, 1 / 12, 1 / 12, 1 / 12] * 3
        )
        assert np.max(np.abs(big - expected)) <= 1e-12

    def test_maximally_mixed_single_entry(self):
        b2 = nb.build_basis(2)
        mm = nb.DensityOperator(np.eye(4, dtype=complex) / 4, (2, 2))
        gamma = nb.correlation_matrix(mm.sqrt(), b2, b2)
        big = nb.gamma_bcad(gamma, gamma)
        assert np.count_nonzero(np.abs(big) > 1e-12) == 1
        assert big[0, 0] == pytest.approx(1.0)

    def test_two_routes_agree(self):
        # kron of the per-state matrices vs the correlation matrix of the
        # permuted square root in product-pair bases
        b2 = nb.build_basis(2)
        basis_pair = opbasis.HermitianBasis(4, opbasis.product_stack(b2, b2))
        for seed in range(10):
            rho_ab = nb.random_density(4, 4, seed=seed + 40, dims=(2, 2))
            rho_cd = nb.random_density(4, 4, seed=seed + 80, dims=(2, 2))
            g_ab = nb.correlation_matrix(rho_ab.sqrt(), b2, b2)
            g_cd = nb.correlation_matrix(rho_cd.sqrt(), b2, b2)
            route1 = nb.gamma_bcad(g_ab, g_cd)
            s_full = nb.tensor(rho_ab.sqrt(), rho_cd.sqrt())
            s_perm = nb.permute_systems(s_full, (2, 2, 2, 2), (1, 2, 0, 3))
            route2 = nb.correlation_matrix(s_perm, basis_pair, basis_pair)
            assert np.max(np.abs(route1 - route2)) <= 1e-9


class TestSplitFirstRow:
    def test_bell_projector(self):
        b2 = nb.build_basis(2)
        gamma = nb.correlation_matrix(nb.bell_state().sqrt(), b2, b2)
        r, rest = nb.split_first_row(gamma)
        assert float(r @ r) == pytest.approx(0.25, abs=1e-12)
        assert np.max(np.abs(rest @ rest.T - np.eye(3) / 4)) <= 1e-12

    def test_classical_cd_side(self):
        b2 = nb.build_basis(2)
        gamma = nb.correlation_matrix(nb.classical_correlated().sqrt(), b2, b2)
        r, rest = nb.split_first_row(gamma)
        assert float(r @ r) == pytest.approx(0.5, abs=1e-12)
        assert np.linalg.eigvalsh(rest @ rest.T)[0] == pytest.approx(0.0, abs=1e-12)

    def test_zero(self):
        r, rest = nb.split_first_row(np.zeros((4, 6)))
        assert not r.any() and not rest.any()

    def test_norm_split(self):
        rng = np.random.default_rng(55)
        gamma = rng.standard_normal((4, 9))
        r, rest = nb.split_first_row(gamma)
        assert float(r @ r) + float(np.sum(rest**2)) == pytest.approx(float(np.sum(gamma**2)))

    def test_rejects_non_qubit(self):
        with pytest.raises(NotQubitSide):
            nb.split_first_row(np.zeros((9, 9)))
