"""Quantum state model, validation, Schmidt decomposition, and fixtures.

The catalog constructors cover the worked reference states used throughout
the test suite: Bell projectors, Bell-diagonal mixtures, the classically
correlated two-qubit state, Werner states, and seeded random states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import linalg
from .errors import (
    BadParameter,
    DimensionMismatch,
    NotBipartite,
    NotPSD,
    TraceNotOne,
)

TRACE_ATOL = 1e-10
SCHMIDT_CUTOFF = 1e-12  # singular values below this are dropped from the list


@dataclass(frozen=True)
class DensityOperator:
    """Positive-semidefinite unit-trace operator with a subsystem split."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def marginal(self, *keep: int) -> "DensityOperator":
        """Reduced state on the given subsystem indices."""
        reduced = linalg.partial_trace(self.matrix, self.dims, keep)
        return DensityOperator(reduced, tuple(self.dims[k] for k in sorted(keep)))

    def sqrt(self) -> np.ndarray:
        return linalg.psd_sqrt(self.matrix)

    def permuted(self, perm: Sequence[int]) -> "DensityOperator":
        out = linalg.permute_systems(self.matrix, self.dims, perm)
        return DensityOperator(out, tuple(self.dims[p] for p in perm))

    def swapped(self) -> "DensityOperator":
        """Bipartite state with its two factors exchanged."""
        if len(self.dims) != 2:
            raise NotBipartite(f"state has {len(self.dims)} subsystems")
        return self.permuted((1, 0))


@dataclass(frozen=True)
class PureState:
    """Bipartite pure state as an amplitude vector with a dimension split."""

    amplitudes: np.ndarray
    dims: tuple[int, int]

    def to_density(self) -> DensityOperator:
        rho = np.outer(self.amplitudes, self.amplitudes.conj())
        return DensityOperator(rho, self.dims)


class SchmidtDecomposition(NamedTuple):
    """Schmidt form of a bipartite pure state.

    ``coefficients`` are the amplitudes lambda_i (descending, unit square
    sum), not the probabilities lambda_i^2. Column i of ``left_basis`` /
    ``right_basis`` is the i-th Schmidt vector on each side.
    """

    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray


def validate_density(matrix, dims: Sequence[int], atol: float = TRACE_ATOL) -> DensityOperator:
    """Validate and wrap a density matrix; raise a typed error otherwise."""
    dims = tuple(int(d) for d in dims)
    a = linalg.require_hermitian(matrix)
    total = int(np.prod(dims))
    if a.shape != (total, total):
        raise DimensionMismatch(
            f"matrix shape {a.shape} does not match dims {dims} (product {total})"
        )
    trace = complex(np.trace(a))
    residual = abs(trace - 1.0)
    if residual > atol:
        raise TraceNotOne("trace differs from 1", residual)
    lowest = float(np.linalg.eigvalsh(a)[0])
    if lowest < -linalg.PSD_ATOL:
        raise NotPSD("density matrix has a negative eigenvalue", -lowest)
    return DensityOperator(a, dims)


def pure_state(amplitudes, dims: Sequence[int]) -> PureState:
    """Validate amplitudes into a bipartite :class:`PureState`."""
    dims = tuple(int(d) for d in dims)
    if len(dims) != 2:
        raise NotBipartite(f"expected two subsystems, got dims {dims}")
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if v.size != dims[0] * dims[1]:
        raise DimensionMismatch(f"{v.size} amplitudes do not fit dims {dims}")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > 1e-12:
        raise BadParameter("state vector is not normalized", abs(norm - 1.0))
    return PureState(v, dims)  # type: ignore[arg-type]


def schmidt_decompose(psi: PureState) -> SchmidtDecomposition:
    """Schmidt decomposition via SVD of the reshaped amplitude matrix."""
    if len(psi.dims) != 2:
        raise NotBipartite(f"expected two subsystems, got dims {psi.dims}")
    m, n = psi.dims
    amat = psi.amplitudes.reshape(m, n)
    u, s, vh = np.linalg.svd(amat)
    k = int(np.sum(s > SCHMIDT_CUTOFF))
    return SchmidtDecomposition(s[:k], u[:, :k], vh[:k, :].conj().T)


def schmidt_reconstruct(dec: SchmidtDecomposition, dims: Sequence[int]) -> np.ndarray:
    """Rebuild the amplitude vector from a Schmidt decomposition."""
    m, n = dims
    amat = (dec.left_basis * dec.coefficients) @ dec.right_basis.conj().T
    return amat.reshape(m * n)


# --- fixture catalog ---------------------------------------------------------

_BELL_KINDS = ("phi_plus", "phi_minus", "psi_plus", "psi_minus")


def bell_vector(kind: str = "phi_plus") -> np.ndarray:
    """Two-qubit Bell state vector; phi_pm = (|00>±|11>)/√2, psi_pm = (|01>±|10>)/√2."""
    s = 1 / np.sqrt(2)
    table = {
        "phi_plus": [s, 0, 0, s],
        "phi_minus": [s, 0, 0, -s],
        "psi_plus": [0, s, s, 0],
        "psi_minus": [0, s, -s, 0],
    }
    if kind not in table:
        raise BadParameter(f"unknown Bell state {kind!r}, expected one of {_BELL_KINDS}")
    return np.array(table[kind], dtype=complex)


def bell_state(kind: str = "phi_plus") -> DensityOperator:
    v = bell_vector(kind)
    return DensityOperator(np.outer(v, v.conj()), (2, 2))


def bell_diagonal(weights: Sequence[float]) -> DensityOperator:
    """Mixture of the four Bell projectors, weight order (Φ⁺, Φ⁻, Ψ⁺, Ψ⁻)."""
    w = np.asarray(weights, dtype=float)
    if w.shape != (4,):
        raise BadParameter(f"need 4 weights, got {w.shape}")
    if np.any(w < 0):
        raise BadParameter("weights must be nonnegative")
    if abs(float(w.sum()) - 1.0) > 1e-12:
        raise BadParameter("weights must sum to 1", abs(float(w.sum()) - 1.0))
    rho = np.zeros((4, 4), dtype=complex)
    for weight, kind in zip(w, _BELL_KINDS):
        v = bell_vector(kind)
        rho += weight * np.outer(v, v.conj())
    return DensityOperator(rho, (2, 2))


def classical_correlated() -> DensityOperator:
    """The classically correlated two-qubit state (|00><00| + |11><11|)/2."""
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 0.5
    rho[3, 3] = 0.5
    return DensityOperator(rho, (2, 2))


def werner(visibility: float) -> DensityOperator:
    """Werner state: visibility * singlet + (1 - visibility) * I/4."""
    if not 0.0 <= visibility <= 1.0:
        raise BadParameter(f"visibility {visibility} outside [0, 1]")
    singlet = bell_state("psi_minus").matrix
    rho = visibility * singlet + (1.0 - visibility) * np.eye(4) / 4
    return DensityOperator(rho, (2, 2))


def random_density(dim: int, rank: int, seed: int, dims: Sequence[int] | None = None) -> DensityOperator:
    """Seed-deterministic random mixed state of the given rank (Ginibre)."""
    if rank < 1 or rank > dim:
        raise BadParameter(f"rank {rank} outside 1..{dim}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return DensityOperator(rho, tuple(dims) if dims is not None else (dim,))


def random_pure(dims: Sequence[int], seed: int) -> PureState:
    """Seed-deterministic Haar-random bipartite pure state."""
    dims = tuple(int(d) for d in dims)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(int(np.prod(dims))) + 1j * rng.standard_normal(int(np.prod(dims)))
    v /= np.linalg.norm(v)
    return pure_state(v, dims)
