"""Dense complex matrix primitives for finite-dimensional quantum operators.

All functions are pure: they never mutate their arguments and return fresh
arrays. Operators are plain complex numpy arrays in row-major order;
composite systems use mixed-radix indexing over the declared dimension list,
so subsystem k of ``dims = (d0, ..., dn)`` corresponds to tensor factor k.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotPSD, NotSquare

# Max-entry Hermiticity tolerance and eigenvalue clamp threshold. Eigenvalue
# jitter from finite precision must not poison downstream square roots.
HERMITIAN_ATOL = 1e-10
PSD_ATOL = 1e-10


class Spectrum(NamedTuple):
    """Eigendecomposition of a Hermitian matrix.

    ``values`` are ascending; column k of ``vectors`` is the eigenvector of
    ``values[k]``, so ``vectors @ diag(values) @ vectors.conj().T``
    reconstructs the input.
    """

    values: np.ndarray
    vectors: np.ndarray


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d array, got shape {a.shape}")
    return a


def require_hermitian(m, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Return ``m`` as a complex array, raising unless it is square Hermitian."""
    a = _as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NotSquare(f"matrix is {a.shape[0]}x{a.shape[1]}")
    residual = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if residual > atol:
        raise NotHermitian("||M - M^dag||_max exceeds tolerance", residual)
    return a


def eig_hermitian(m) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    a = require_hermitian(m)
    values, vectors = np.linalg.eigh(a)
    return Spectrum(values, vectors)


def psd_sqrt(m, atol: float = PSD_ATOL) -> np.ndarray:
    """Principal square root of a PSD Hermitian matrix.

    Anything below ``-atol`` raises :class:`NotPSD`. Eigenvalues within
    ``atol`` of zero are treated as exact zeros: sqrt amplifies eigenvalue
    jitter (sqrt(1e-16) = 1e-8), so rank-deficient inputs would otherwise
    poison every downstream correlation matrix.
    """
    values, vectors = eig_hermitian(m)
    lowest = float(values[0])
    if lowest < -atol:
        raise NotPSD("matrix has a negative eigenvalue", -lowest)
    clamped = np.where(values < atol, 0.0, values)
    root = (vectors * np.sqrt(clamped)) @ vectors.conj().T
    # Re-symmetrize to keep the result Hermitian to machine precision.
    return (root + root.conj().T) / 2


def tensor(*factors) -> np.ndarray:
    """Kronecker product of one or more matrices, left to right."""
    if not factors:
        raise DimensionMismatch("tensor() needs at least one factor")
    out = _as_matrix(factors[0])
    for f in factors[1:]:
        out = np.kron(out, _as_matrix(f))
    return out


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise DimensionMismatch(f"dimensions must be positive, got {dims}")
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise DimensionMismatch(
            f"matrix shape {m.shape} does not match dims {dims} (product {total})"
        )
    return dims


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out all subsystems not listed in ``keep``.

    ``keep`` is a set of subsystem indices into ``dims``; the output acts on
    the kept factors in their original order.
    """
    a = _as_matrix(m)
    dims = _check_dims(a, dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionMismatch(f"keep indices {keep} out of range for {n} subsystems")
    traced = [k for k in range(n) if k not in keep]
    t = a.reshape(dims + dims)
    # Contract row/column axes of each traced factor pairwise.
    for offset, k in enumerate(traced):
        ax = k - offset  # earlier contractions removed axis pairs
        t = np.trace(t, axis1=ax, axis2=ax + (n - offset))
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def permute_systems(m, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Relabel tensor factors: output factor i is input factor ``perm[i]``."""
    a = _as_matrix(m)
    dims = _check_dims(a, dims)
    n = len(dims)
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(n)):
        raise DimensionMismatch(f"perm {perm} is not a permutation of 0..{n - 1}")
    t = a.reshape(dims + dims)
    t = t.transpose(perm + tuple(p + n for p in perm))
    total = int(np.prod(dims))
    return t.reshape(total, total)


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product tr(A^dag B)."""
    x = _as_matrix(a)
    y = _as_matrix(b)
    if x.shape != y.shape:
        raise DimensionMismatch(f"shapes {x.shape} and {y.shape} differ")
    return complex(np.sum(x.conj() * y))


def hs_norm_sq(a) -> float:
    """Squared Hilbert-Schmidt norm tr(A^dag A)."""
    x = _as_matrix(a)
    return float(np.sum(np.abs(x) ** 2))
