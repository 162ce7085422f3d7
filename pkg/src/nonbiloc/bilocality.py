"""Binary-input bilocality inequality for the two-source swapping network.

Alice and Charles hold dichotomic observables on the outer systems; Bob's
fixed four-outcome measurement on the middle pair is reported as two bits.
The inequality value is S = sqrt|I| + sqrt|J| with I built from Bob's first
bit against the observable sums and J from the second bit against the
differences; S <= 2 for bilocal models.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg, states
from .errors import BadParameter, DimensionMismatch
from .measurements import ProjectiveMeasurement, measurement_from_vectors, validate_measurement
from .states import DensityOperator

OBSERVABLE_ATOL = 1e-9
VIOLATION_ATOL = 1e-9

# Bob's bit convention for the standard Bell-basis measurement, outcome order
# (phi+, phi-, psi+, psi-): bit 0 is the parity (phi vs psi) distinction,
# bit 1 the relative phase.
STANDARD_BITS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True)
class DichotomicObservable:
    """Hermitian observable with outcomes ±1 (M^2 = I)."""

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def dichotomic(matrix, atol: float = OBSERVABLE_ATOL) -> DichotomicObservable:
    """Validate a ±1-valued observable."""
    a = linalg.require_hermitian(matrix)
    residual = float(np.max(np.abs(a @ a - np.eye(a.shape[0]))))
    if residual > atol:
        raise BadParameter("observable eigenvalues must be ±1 (M^2 != I)", residual)
    return DichotomicObservable(a)


@dataclass(frozen=True)
class BsmAssignment:
    """Four-outcome middle measurement with a two-bit outcome encoding."""

    measurement: ProjectiveMeasurement
    bit_values: tuple[tuple[int, int], ...]

    def bit_observable(self, bit: int) -> np.ndarray:
        """Bob's ±1 observable for the requested outcome bit."""
        signs = np.array([bv[bit] for bv in self.bit_values], dtype=float)
        return np.tensordot(signs, self.measurement.projectors, axes=1)


def bsm_assignment(measurement: ProjectiveMeasurement, bit_values) -> BsmAssignment:
    """Validate a bit assignment: four distinct ±1 pairs on a complete BSM."""
    validate_measurement(measurement)
    bits = tuple(tuple(int(b) for b in pair) for pair in bit_values)
    if len(bits) != len(measurement) or any(len(p) != 2 for p in bits):
        raise BadParameter(f"need {len(measurement)} (b0, b1) pairs, got {bits}")
    if any(b not in (-1, 1) for pair in bits for b in pair):
        raise BadParameter(f"bit values must be ±1, got {bits}")
    if len(set(bits)) != len(bits):
        raise BadParameter(f"bit pairs must be distinct, got {bits}")
    return BsmAssignment(measurement, bits)


def standard_bsm(bit_values=STANDARD_BITS) -> BsmAssignment:
    """Bell state measurement in the order (phi+, phi-, psi+, psi-)."""
    vectors = np.column_stack(
        [states.bell_vector(k) for k in ("phi_plus", "phi_minus", "psi_plus", "psi_minus")]
    )
    return bsm_assignment(measurement_from_vectors(vectors), bit_values)


def _as_observable(obs) -> np.ndarray:
    if isinstance(obs, DichotomicObservable):
        return obs.matrix
    return dichotomic(obs).matrix


def _three_party_expectation(
    rho_ab: DensityOperator,
    rho_cd: DensityOperator,
    alice_op: np.ndarray,
    bob_op: np.ndarray,
    charlie_op: np.ndarray,
) -> float:
    m, n = rho_ab.dims
    u, v = rho_cd.dims
    if alice_op.shape != (m, m):
        raise DimensionMismatch(f"Alice observable shape {alice_op.shape}, H_A dim {m}")
    if charlie_op.shape != (v, v):
        raise DimensionMismatch(f"Charles observable shape {charlie_op.shape}, H_D dim {v}")
    if bob_op.shape != (n * u, n * u):
        raise DimensionMismatch(f"Bob observable shape {bob_op.shape}, H_B x H_C dim {n * u}")
    rho_full = linalg.tensor(rho_ab.matrix, rho_cd.matrix)
    op = linalg.tensor(alice_op, bob_op, charlie_op)
    val = linalg.hs_inner(rho_full, op)  # tr(rho op) since rho is Hermitian
    if abs(val.imag) > 1e-10:
        raise DimensionMismatch(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def correlator_I(
    rho_ab: DensityOperator,
    rho_cd: DensityOperator,
    a0,
    a1,
    bsm: BsmAssignment,
    c0,
    c1,
) -> float:
    """<(A0 + A1) B0 (C0 + C1)> on rho_AB x rho_CD."""
    alice = _as_observable(a0) + _as_observable(a1)
    charlie = _as_observable(c0) + _as_observable(c1)
    return _three_party_expectation(rho_ab, rho_cd, alice, bsm.bit_observable(0), charlie)


def correlator_J(
    rho_ab: DensityOperator,
    rho_cd: DensityOperator,
    a0,
    a1,
    bsm: BsmAssignment,
    c0,
    c1,
) -> float:
    """<(A0 - A1) B1 (C0 - C1)> on rho_AB x rho_CD."""
    alice = _as_observable(a0) - _as_observable(a1)
    charlie = _as_observable(c0) - _as_observable(c1)
    return _three_party_expectation(rho_ab, rho_cd, alice, bsm.bit_observable(1), charlie)


class SValue(NamedTuple):
    value: float
    violation: bool


def s_value(i: float, j: float) -> SValue:
    """Bilocality inequality value sqrt|I| + sqrt|J| and its violation flag."""
    s = float(np.sqrt(abs(i)) + np.sqrt(abs(j)))
    return SValue(s, s > 2.0 + VIOLATION_ATOL)


def sweep_settings(
    rho_ab: DensityOperator,
    rho_cd: DensityOperator,
    bsm: BsmAssignment | None = None,
    n_grid: int = 24,
) -> dict:
    """Grid sweep of S over qubit observables cos(t) sz + sin(t) sx.

    Utility only: scans all four setting angles on a uniform grid and
    returns the best combination found, not a certified optimum.
    """
    if rho_ab.dims != (2, 2) or rho_cd.dims != (2, 2):
        raise DimensionMismatch("settings sweep supports two-qubit inputs only")
    if bsm is None:
        bsm = standard_bsm()
    sz = np.diag([1.0, -1.0]).astype(complex)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    rho_full = linalg.tensor(rho_ab.matrix, rho_cd.matrix)

    def pair_matrix(bob_op: np.ndarray) -> np.ndarray:
        out = np.empty((2, 2))
        for x, ax in enumerate((sz, sx)):
            for z, cz in enumerate((sz, sx)):
                op = linalg.tensor(ax, bob_op, cz)
                out[x, z] = float(np.sum(rho_full.T * op).real)
        return out

    t0 = pair_matrix(bsm.bit_observable(0))
    t1 = pair_matrix(bsm.bit_observable(1))
    angles = np.linspace(0.0, 2 * np.pi, n_grid, endpoint=False)
    u = np.column_stack([np.cos(angles), np.sin(angles)])
    plus = u[:, None, :] + u[None, :, :]
    minus = u[:, None, :] - u[None, :, :]
    i_vals = np.einsum("ija,ab,klb->ijkl", plus, t0, plus)
    j_vals = np.einsum("ija,ab,klb->ijkl", minus, t1, minus)
    s = np.sqrt(np.abs(i_vals)) + np.sqrt(np.abs(j_vals))
    best = np.unravel_index(int(np.argmax(s)), s.shape)
    return {
        "s": float(s[best]),
        "I": float(i_vals[best]),
        "J": float(j_vals[best]),
        "angles": tuple(float(angles[b]) for b in best),
        "violation": bool(s[best] > 2.0 + VIOLATION_ATOL),
    }
