import numpy as np
import pytest

import nonbiloc as nb
from nonbiloc.errors import DimensionMismatch, NotHermitian, NotPSD, NotSquare

from conftest import random_hermitian

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def beta_matrix() -> np.ndarray:
    """Rank-3 Bell-diagonal reference state, eigenvalues (0, 1/3, 1/3, 1/3)."""
    return np.array(
        [
            [1 / 3, 0, 0, 0],
            [0, 1 / 6, 1 / 6, 0],
            [0, 1 / 6, 1 / 6, 0],
            [0, 0, 0, 1 / 3],
        ],
        dtype=complex,
    )


class TestEigHermitian:
    def test_diagonal(self):
        spec = nb.eig_hermitian(np.diag([1.0, 2.0]))
        assert np.allclose(spec.values, [1.0, 2.0])
        assert np.allclose(np.abs(spec.vectors), np.eye(2))

    def test_pauli_x(self):
        spec = nb.eig_hermitian(SX)
        assert np.allclose(spec.values, [-1.0, 1.0])

    def test_beta_spectrum(self):
        spec = nb.eig_hermitian(beta_matrix())
        assert np.allclose(spec.values, [0.0, 1 / 3, 1 / 3, 1 / 3], atol=1e-12)

    def test_rejects_non_square(self):
        with pytest.raises(NotSquare):
            nb.eig_hermitian(np.zeros((2, 3)))

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            nb.eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_reconstruction_random(self):
        # 500 draws across dims 2..16
        rng = np.random.default_rng(101)
        for _ in range(500):
            d = int(rng.integers(2, 17))
            m = random_hermitian(d, rng)
            values, vectors = nb.eig_hermitian(m)
            rebuilt = (vectors * values) @ vectors.conj().T
            assert np.max(np.abs(rebuilt - m)) <= 1e-10
            assert np.max(np.abs(vectors.conj().T @ vectors - np.eye(d))) <= 1e-10
            assert np.all(np.diff(values) >= -1e-12)


class TestPsdSqrt:
    def test_scaled_identity(self):
        assert np.allclose(nb.psd_sqrt(np.eye(4) / 4), np.eye(4) / 2, atol=1e-14)

    def test_classical_state(self):
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = rho[3, 3] = 0.5
        expected = np.zeros((4, 4), dtype=complex)
        expected[0, 0] = expected[3, 3] = 1 / np.sqrt(2)
        assert np.allclose(nb.psd_sqrt(rho), expected, atol=1e-14)

    def test_beta_sqrt(self):
        expected = np.array(
            [
                [1, 0, 0, 0],
                [0, 0.5, 0.5, 0],
                [0, 0.5, 0.5, 0],
                [0, 0, 0, 1],
            ]
        ) / np.sqrt(3)
        assert np.allclose(nb.psd_sqrt(beta_matrix()), expected, atol=1e-12)

    def test_rejects_negative(self):
        with pytest.raises(NotPSD):
            nb.psd_sqrt(np.diag([1.0, -0.5]))

    def test_square_and_scaling_properties(self):
        rng = np.random.default_rng(202)
        for _ in range(50):
            d = int(rng.integers(2, 9))
            g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            m = g @ g.conj().T
            root = nb.psd_sqrt(m)
            assert np.max(np.abs(root @ root - m)) <= 1e-9 * max(1, np.max(np.abs(m)))
            c = float(rng.uniform(0.1, 4.0))
            assert np.max(np.abs(nb.psd_sqrt(c * m) - np.sqrt(c) * root)) <= 1e-10 * max(
                1, np.max(np.abs(root))
            )


class TestTensor:
    def test_identity(self):
        assert np.allclose(nb.tensor(np.eye(2), np.eye(2)), np.eye(4))

    def test_block_placement(self):
        ket0 = np.zeros((2, 2), dtype=complex)
        ket0[0, 0] = 1
        out = nb.tensor(ket0, SX)
        expected = np.zeros((4, 4), dtype=complex)
        expected[:2, :2] = SX
        assert np.allclose(out, expected)

    def test_sqrt_multiplicative(self):
        rng = np.random.default_rng(303)
        a = random_hermitian(2, rng)
        a = a @ a.conj().T
        b = random_hermitian(3, rng)
        b = b @ b.conj().T
        lhs = nb.tensor(nb.psd_sqrt(a), nb.psd_sqrt(b))
        rhs = nb.psd_sqrt(nb.tensor(a, b))
        assert np.max(np.abs(lhs - rhs)) <= 1e-9


class TestPartialTrace:
    def test_bell_pair_marginal(self):
        bell = nb.bell_state().matrix
        full = nb.tensor(bell, bell)
        out = nb.partial_trace(full, (2, 2, 2, 2), keep=(1, 2))
        assert np.allclose(out, np.eye(4) / 4, atol=1e-12)

    def test_product_marginal(self):
        rho_a = nb.random_density(2, 2, seed=1).matrix
        rho_b = nb.random_density(3, 3, seed=2).matrix
        out = nb.partial_trace(np.kron(rho_a, rho_b), (2, 3), keep=(0,))
        assert np.allclose(out, rho_a, atol=1e-12)

    def test_two_route_swap_marginal(self):
        # tr_AD(rho_AB x rho_CD) computed directly must match the tensor of
        # the per-factor partial traces
        for seed in range(20):
            rho_ab = nb.random_density(4, 4, seed=seed, dims=(2, 2)).matrix
            rho_cd = nb.random_density(6, 6, seed=seed + 500, dims=(2, 3)).matrix
            direct = nb.partial_trace(np.kron(rho_ab, rho_cd), (2, 2, 2, 3), keep=(1, 2))
            rho_b = nb.partial_trace(rho_ab, (2, 2), keep=(1,))
            rho_c = nb.partial_trace(rho_cd, (2, 3), keep=(0,))
            assert np.max(np.abs(direct - np.kron(rho_b, rho_c))) <= 1e-12

    def test_linearity_and_trace(self):
        rng = np.random.default_rng(404)
        for _ in range(30):
            a = random_hermitian(6, rng)
            b = random_hermitian(6, rng)
            c = float(rng.standard_normal())
            lhs = nb.partial_trace(a + c * b, (2, 3), keep=(1,))
            rhs = nb.partial_trace(a, (2, 3), (1,)) + c * nb.partial_trace(b, (2, 3), (1,))
            assert np.max(np.abs(lhs - rhs)) <= 1e-12
            assert abs(np.trace(lhs) - np.trace(a + c * b)) <= 1e-12

    def test_dimension_errors(self):
        with pytest.raises(DimensionMismatch):
            nb.partial_trace(np.eye(4), (2, 3), keep=(0,))
        with pytest.raises(DimensionMismatch):
            nb.partial_trace(np.eye(4), (2, 2), keep=(2,))


class TestHsInner:
    def test_identity(self):
        assert nb.hs_inner(np.eye(2), np.eye(2)) == pytest.approx(2.0)

    def test_pauli_orthogonality(self):
        assert abs(nb.hs_inner(SX, SY)) <= 1e-14

    def test_unit_trace_sqrt(self):
        root = nb.psd_sqrt(beta_matrix())
        assert nb.hs_inner(root, root).real == pytest.approx(1.0, abs=1e-12)

    def test_conjugate_symmetry(self):
        rng = np.random.default_rng(505)
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        assert nb.hs_inner(a, b) == pytest.approx(np.conj(nb.hs_inner(b, a)))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            nb.hs_inner(np.eye(2), np.eye(3))


class TestHsNormSq:
    def test_zero(self):
        assert nb.hs_norm_sq(np.zeros((3, 3))) == 0.0

    def test_rank_one_projector(self):
        v = np.array([1, 1j]) / np.sqrt(2)
        assert nb.hs_norm_sq(np.outer(v, v.conj())) == pytest.approx(1.0)

    def test_sqrt_of_state(self):
        rho = nb.random_density(5, 3, seed=9).matrix
        assert nb.hs_norm_sq(nb.psd_sqrt(rho)) == pytest.approx(1.0, abs=1e-10)


class TestPermuteSystems:
    def test_swap_product(self):
        rho_a = nb.random_density(2, 2, seed=3).matrix
        rho_b = nb.random_density(3, 3, seed=4).matrix
        out = nb.permute_systems(np.kron(rho_a, rho_b), (2, 3), (1, 0))
        assert np.allclose(out, np.kron(rho_b, rho_a), atol=1e-14)

    def test_bcad_marginal(self):
        rho_ab = nb.random_density(4, 4, seed=5, dims=(2, 2)).matrix
        rho_cd = nb.random_density(4, 4, seed=6, dims=(2, 2)).matrix
        swapped = nb.permute_systems(np.kron(rho_ab, rho_cd), (2, 2, 2, 2), (1, 2, 0, 3))
        first_two = nb.partial_trace(swapped, (2, 2, 2, 2), keep=(0, 1))
        rho_b = nb.partial_trace(rho_ab, (2, 2), keep=(1,))
        rho_c = nb.partial_trace(rho_cd, (2, 2), keep=(0,))
        assert np.max(np.abs(first_two - np.kron(rho_b, rho_c))) <= 1e-12

    def test_cycle_inverse(self):
        rng = np.random.default_rng(606)
        m = random_hermitian(16, rng)
        cycle = (1, 2, 3, 0)
        inverse = (3, 0, 1, 2)
        out = nb.permute_systems(
            nb.permute_systems(m, (2, 2, 2, 2), cycle), (2, 2, 2, 2), inverse
        )
        assert np.allclose(out, m, atol=1e-14)

    def test_spectrum_preserved(self):
        rng = np.random.default_rng(707)
        for _ in range(20):
            m = random_hermitian(12, rng)
            out = nb.permute_systems(m, (2, 3, 2), (2, 0, 1))
            lhs = np.linalg.eigvalsh(m)
            rhs = np.linalg.eigvalsh(out)
            assert np.max(np.abs(lhs - rhs)) <= 1e-10
