"""Orthonormal Hermitian operator bases and correlation matrices.

A basis for a d-dimensional subsystem holds d^2 Hermitian operators that are
orthonormal under the Hilbert-Schmidt inner product, with the normalized
identity first. The remaining elements follow the generalized Gell-Mann
construction in a fixed order: symmetric off-diagonal pairs, antisymmetric
pairs, then diagonal traceless operators, each in lexicographic index order.
Downstream index arithmetic (correlation matrices, G-matrices) relies on this
ordering, so it must never change.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BadParameter, DimensionMismatch, NotHermitian, NotQubitSide

GAMMA_IMAG_ATOL = 1e-10


@dataclass(frozen=True)
class HermitianBasis:
    """Orthonormal Hermitian operator basis, identity (normalized) first.

    ``operators`` is a (d^2, d, d) complex array; ``operators[0]`` equals
    I/sqrt(d) exactly.
    """

    dim: int
    operators: np.ndarray

    def __len__(self) -> int:
        return self.operators.shape[0]


@lru_cache(maxsize=None)
def build_basis(d: int) -> HermitianBasis:
    """Generalized Gell-Mann basis for a d-dimensional subsystem (d >= 2)."""
    if d < 2:
        raise BadParameter(f"basis dimension must be >= 2, got {d}")
    ops = [np.eye(d, dtype=complex) / np.sqrt(d)]
    inv_sqrt2 = 1 / np.sqrt(2)
    for a in range(d):
        for b in range(a + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[a, b] = inv_sqrt2
            sym[b, a] = inv_sqrt2
            ops.append(sym)
    for a in range(d):
        for b in range(a + 1, d):
            asym = np.zeros((d, d), dtype=complex)
            asym[a, b] = -1j * inv_sqrt2
            asym[b, a] = 1j * inv_sqrt2
            ops.append(asym)
    for l in range(1, d):
        diag = np.zeros(d, dtype=complex)
        diag[:l] = 1.0
        diag[l] = -l
        ops.append(np.diag(diag) / np.sqrt(l * (l + 1)))
    stack = np.array(ops)
    stack.setflags(write=False)
    return HermitianBasis(d, stack)


def product_stack(basis_a: HermitianBasis, basis_b: HermitianBasis) -> np.ndarray:
    """All products X_i ⊗ Y_j stacked with composite index (ij) = i*len_b + j."""
    da, db = basis_a.dim, basis_b.dim
    # kron on the operator axes, batched over both basis indices
    out = np.einsum("iab,jcd->ijacbd", basis_a.operators, basis_b.operators)
    return out.reshape(da * da * db * db, da * db, da * db)


def correlation_matrix(s, basis_a: HermitianBasis, basis_b: HermitianBasis) -> np.ndarray:
    """Expansion coefficients of a Hermitian operator in a product basis.

    Returns the real matrix with entries tr[S (X_i ⊗ Y_j)], rows over the
    first-subsystem basis. Intended for S = sqrt(rho); entries with imaginary
    residual above tolerance raise instead of being truncated, which catches
    non-Hermitian inputs early.
    """
    da, db = basis_a.dim, basis_b.dim
    s = np.asarray(s, dtype=complex)
    if s.shape != (da * db, da * db):
        raise DimensionMismatch(
            f"operator shape {s.shape} does not match basis dims ({da}, {db})"
        )
    s4 = s.reshape(da, db, da, db)
    gamma = np.einsum("iab,jcd,bdac->ij", basis_a.operators, basis_b.operators, s4)
    residual = float(np.max(np.abs(gamma.imag)))
    if residual > GAMMA_IMAG_ATOL:
        raise NotHermitian("correlation coefficients are not real", residual)
    return np.ascontiguousarray(gamma.real)


def reconstruct(gamma: np.ndarray, basis_a: HermitianBasis, basis_b: HermitianBasis) -> np.ndarray:
    """Rebuild the operator sum_ij gamma_ij X_i ⊗ Y_j from its coefficients."""
    ops = product_stack(basis_a, basis_b)
    return np.tensordot(gamma.reshape(-1), ops, axes=1)


def gamma_bcad(gamma_ab: np.ndarray, gamma_cd: np.ndarray) -> np.ndarray:
    """Correlation matrix of the swapped arrangement, Gamma_AB^t ⊗ Gamma_CD.

    Row index is (jk) = j*u^2 + k over the B and C bases, column index is
    (il) over the A and D bases.
    """
    return np.kron(np.asarray(gamma_ab).T, np.asarray(gamma_cd))


def split_first_row(gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a qubit-side correlation matrix into its identity row and rest.

    Requires the measured (row) side to be a qubit, i.e. exactly 4 rows:
    row 0 multiplies the normalized identity, rows 1..3 the Pauli directions.
    """
    g = np.asarray(gamma, dtype=float)
    if g.ndim != 2 or g.shape[0] != 4:
        raise NotQubitSide(f"expected 4 rows (qubit side), got shape {g.shape}")
    return g[0].copy(), g[1:4].copy()
