"""Shared seeded generators for the test suite.

Every random object is derived from an explicit seed so the whole suite is
reproducible run to run.
"""

from __future__ import annotations

import numpy as np

import nonbiloc as nb
from nonbiloc.search import haar_unitary


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def random_two_qubit(seed: int, rank: int = 4) -> nb.DensityOperator:
    return nb.random_density(4, rank, seed=seed, dims=(2, 2))


def random_product_state(seed: int, d_a: int = 2, d_b: int = 2) -> nb.DensityOperator:
    """rho_A x rho_B with seed-deterministic full-rank factors."""
    rho_a = nb.random_density(d_a, d_a, seed=seed)
    rho_b = nb.random_density(d_b, d_b, seed=seed + 7_000_000)
    return nb.DensityOperator(np.kron(rho_a.matrix, rho_b.matrix), (d_a, d_b))


def random_entangled_pure(seed: int, min_weight: float = 0.01) -> nb.PureState:
    """Haar two-qubit pure state, resampled until clearly entangled."""
    for attempt in range(200):
        psi = nb.random_pure((2, 2), seed=seed + 13_000_000 * attempt)
        coeffs = nb.schmidt_decompose(psi).coefficients
        if len(coeffs) == 2 and float(coeffs[-1] ** 2) >= min_weight:
            return psi
    raise AssertionError("failed to sample an entangled pure state")


def rotate_locally(
    rho: nb.DensityOperator, unitaries: list[np.ndarray]
) -> nb.DensityOperator:
    u_full = unitaries[0]
    for u in unitaries[1:]:
        u_full = np.kron(u_full, u)
    return nb.DensityOperator(u_full @ rho.matrix @ u_full.conj().T, rho.dims)


def random_local_unitaries(dims, rng: np.random.Generator) -> list[np.ndarray]:
    return [haar_unitary(d, rng) for d in dims]
