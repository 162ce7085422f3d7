"""Projective measurements and the non-disturbance admissibility constraint.

"Von Neumann measurement" here always means a complete set of mutually
orthogonal rank-1 projectors. A measurement is admissible for a state when
it does not disturb it, sum_h P_h rho P_h = rho, equivalently when every
projector commutes with the state; both characterizations are checked and
must agree, since the equivalence is the backbone of the optimizer's search
space (block rotations inside exact eigenspaces).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg, opbasis
from .errors import DimensionMismatch, NotUnitary
from .states import DensityOperator

ADMISSIBLE_TOL = 1e-9
GROUPING_TOL = 1e-8  # relative eigenvalue gap that separates eigenspaces
PROJECTOR_ATOL = 1e-10


@dataclass(frozen=True)
class ProjectiveMeasurement:
    """Complete rank-1 projective measurement on one (sub)system.

    ``projectors`` is a (d, d, d) stack: ``projectors[h]`` is the h-th
    rank-1 projector on the d-dimensional measured space.
    """

    projectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    def __len__(self) -> int:
        return self.projectors.shape[0]


def measurement_from_vectors(vectors: np.ndarray) -> ProjectiveMeasurement:
    """Measurement projecting onto the columns of a unitary matrix."""
    v = np.asarray(vectors, dtype=complex)
    residual = float(np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1]))))
    if residual > PROJECTOR_ATOL:
        raise NotUnitary("measurement basis is not orthonormal", residual)
    projs = np.einsum("ih,jh->hij", v, v.conj())
    return ProjectiveMeasurement(projs)


def validate_measurement(pi: ProjectiveMeasurement, atol: float = PROJECTOR_ATOL) -> None:
    """Check idempotence, mutual orthogonality, completeness, and count."""
    p = pi.projectors
    d = pi.dim
    if len(pi) != d:
        raise DimensionMismatch(f"{len(pi)} projectors on a {d}-dimensional space")
    gram = np.einsum("hij,kji->hk", p, p)
    residual = float(np.max(np.abs(gram - np.eye(d))))
    if residual > atol:
        raise NotUnitary("projectors are not orthogonal rank-1", residual)
    completeness = float(np.max(np.abs(p.sum(axis=0) - np.eye(d))))
    if completeness > atol:
        raise NotUnitary("projectors do not sum to identity", completeness)


@dataclass(frozen=True)
class EigenspaceBlocks:
    """Eigenvalues of a state grouped into (near-)degenerate eigenspaces.

    ``bases[k]`` holds orthonormal columns spanning the k-th eigenspace;
    eigenvalues ascend across blocks.
    """

    eigenvalues: tuple[float, ...]
    multiplicities: tuple[int, ...]
    bases: tuple[np.ndarray, ...]

    @property
    def nondegenerate(self) -> bool:
        return all(m == 1 for m in self.multiplicities)

    @property
    def dim(self) -> int:
        return sum(self.multiplicities)


def eigenspace_blocks(rho: DensityOperator, tol: float = GROUPING_TOL) -> EigenspaceBlocks:
    """Group the spectrum of ``rho`` by relative eigenvalue gaps.

    Consecutive eigenvalues whose gap is at most ``tol * max(1, lambda_max)``
    fall into one block; admissible measurements may only rotate within
    blocks.
    """
    values, vectors = linalg.eig_hermitian(rho.matrix)
    scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
    cut = tol * scale
    starts = [0]
    for i in range(1, len(values)):
        if values[i] - values[i - 1] > cut:
            starts.append(i)
    starts.append(len(values))
    evs, mults, bases = [], [], []
    for a, b in zip(starts[:-1], starts[1:]):
        evs.append(float(np.mean(values[a:b])))
        mults.append(b - a)
        bases.append(vectors[:, a:b].copy())
    return EigenspaceBlocks(tuple(evs), tuple(mults), tuple(bases))


@dataclass(frozen=True)
class AdmissibilityCheck:
    admissible: bool
    nondisturbance_residual: float
    commutator_residual: float

    def __bool__(self) -> bool:
        return self.admissible


def is_admissible(
    pi: ProjectiveMeasurement, rho: DensityOperator, tol: float = ADMISSIBLE_TOL
) -> AdmissibilityCheck:
    """Decide whether ``pi`` leaves ``rho`` invariant.

    Runs both equivalent checks, the non-disturbance residual
    ||sum_h P_h rho P_h - rho|| and the worst per-projector commutator
    ||[P_h, rho]||, in the Hilbert-Schmidt norm. The commutator check gets a
    factor-2 slack since the two residuals agree only up to a small constant.
    """
    if pi.dim != rho.matrix.shape[0]:
        raise DimensionMismatch(
            f"measurement dim {pi.dim} does not match state dim {rho.matrix.shape[0]}"
        )
    p = pi.projectors
    dephased = np.einsum("hij,jk,hkl->il", p, rho.matrix, p)
    r_nd = float(np.sqrt(linalg.hs_norm_sq(dephased - rho.matrix)))
    comms = np.einsum("hij,jk->hik", p, rho.matrix) - np.einsum("ij,hjk->hik", rho.matrix, p)
    r_comm = float(np.sqrt(np.max(np.sum(np.abs(comms) ** 2, axis=(1, 2)))))
    ok = r_nd <= tol and r_comm <= 2 * tol
    return AdmissibilityCheck(ok, r_nd, r_comm)


def admissible_from_unitaries(
    blocks: EigenspaceBlocks, rotations
) -> ProjectiveMeasurement:
    """Rank-1 measurement from per-eigenspace basis rotations.

    ``rotations[k]`` must be an m_k x m_k unitary for block multiplicity
    m_k; the resulting measurement is admissible by construction.
    """
    rotations = list(rotations)
    if len(rotations) != len(blocks.multiplicities):
        raise DimensionMismatch(
            f"{len(rotations)} rotations for {len(blocks.multiplicities)} blocks"
        )
    cols = []
    for base, mult, u in zip(blocks.bases, blocks.multiplicities, rotations):
        u = np.asarray(u, dtype=complex)
        if u.shape != (mult, mult):
            raise DimensionMismatch(f"rotation shape {u.shape} for block of size {mult}")
        residual = float(np.max(np.abs(u.conj().T @ u - np.eye(mult))))
        if residual > PROJECTOR_ATOL:
            raise NotUnitary("block rotation is not unitary", residual)
        cols.append(base @ u)
    return measurement_from_vectors(np.hstack(cols))


def spectral_measurement(rho: DensityOperator, tol: float = GROUPING_TOL) -> ProjectiveMeasurement:
    """The measurement onto an eigenbasis of ``rho`` (identity rotations)."""
    blocks = eigenspace_blocks(rho, tol)
    return admissible_from_unitaries(blocks, [np.eye(m) for m in blocks.multiplicities])


def random_admissible(
    rho: DensityOperator, rng: np.random.Generator, tol: float = GROUPING_TOL
) -> ProjectiveMeasurement:
    """Admissible measurement with Haar-random rotations in each eigenspace."""
    from .search import haar_unitary  # local import to avoid a cycle

    blocks = eigenspace_blocks(rho, tol)
    return admissible_from_unitaries(
        blocks, [haar_unitary(m, rng) for m in blocks.multiplicities]
    )


def g_matrix(
    pi: ProjectiveMeasurement,
    basis_b: opbasis.HermitianBasis,
    basis_c: opbasis.HermitianBasis,
) -> np.ndarray:
    """Measurement expansion coefficients tr[P_h (Y_j ⊗ Z_k)].

    Rows run over outcomes, columns over the composite basis index
    (jk) = j*u^2 + k. Satisfies G G^t = I because the projectors are
    orthonormal rank-1 operators.
    """
    nu = basis_b.dim * basis_c.dim
    if pi.dim != nu:
        raise DimensionMismatch(f"measurement dim {pi.dim} does not match bases ({nu})")
    ops = opbasis.product_stack(basis_b, basis_c)
    return np.einsum("hij,kji->hk", pi.projectors, ops).real


def apply_measurement(
    pi: ProjectiveMeasurement, s, dims, factors: tuple[int, ...] = (1, 2)
) -> np.ndarray:
    """Dephase ``s`` by ``pi`` acting on a contiguous span of tensor factors.

    Computes sum_h (I ⊗ P_h ⊗ I) S (I ⊗ P_h ⊗ I) with the identity padding
    determined by ``dims`` and ``factors``.
    """
    a = np.asarray(s, dtype=complex)
    dims = tuple(int(d) for d in dims)
    total = int(np.prod(dims))
    if a.shape != (total, total):
        raise DimensionMismatch(f"operator shape {a.shape} does not match dims {dims}")
    factors = tuple(sorted(int(f) for f in factors))
    if factors != tuple(range(factors[0], factors[-1] + 1)):
        raise DimensionMismatch(f"measured factors {factors} must be contiguous")
    if factors[0] < 0 or factors[-1] >= len(dims):
        raise DimensionMismatch(f"factors {factors} out of range for dims {dims}")
    d_meas = int(np.prod([dims[f] for f in factors]))
    if pi.dim != d_meas:
        raise DimensionMismatch(
            f"measurement dim {pi.dim} does not match measured factors ({d_meas})"
        )
    d_pre = int(np.prod(dims[: factors[0]], dtype=int))
    d_post = int(np.prod(dims[factors[-1] + 1 :], dtype=int))
    out = np.zeros_like(a)
    eye_pre = np.eye(d_pre)
    eye_post = np.eye(d_post)
    for proj in pi.projectors:
        p_full = linalg.tensor(eye_pre, proj, eye_post)
        out += p_full @ a @ p_full
    return out
