"""Correlation quantifiers over the entanglement-swapping network.

Everything here reduces to extremizing tr[S Pi(S)] over von Neumann
measurements Pi that leave a designated marginal invariant:

* the nonbilocality measure maximizes the disturbance of sqrt(rho_AB x
  rho_CD) by measurements on the middle pair (B, C),
* the measurement-induced nonlocality (MIN) does the same for one side of a
  bipartite state (modified variant uses sqrt(rho), original uses rho),
* geometric discord minimizes instead of maximizing, over the same family.

Closed forms cover pure inputs and nondegenerate or maximally-mixed-qubit
marginals; everything else goes through the seeded multistart search. The
dispatcher always reports which route produced the value.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg, measurements, opbasis, search
from .errors import (
    BadParameter,
    DegenerateMarginal,
    DimensionMismatch,
    InadmissibleMeasurement,
    NotBipartite,
    NotNormalized,
    PreconditionViolated,
)
from .measurements import ProjectiveMeasurement
from .states import DensityOperator, PureState, schmidt_decompose


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for the measurement search and the closed-form dispatch.

    ``tol`` governs dispatch decisions (purity, maximally mixed marginals)
    and the admissibility gate; ``grouping_tol`` is the relative eigenvalue
    gap defining eigenspace blocks. ``threads`` caps restart parallelism
    (``None`` defers to the NONBILOC_THREADS environment variable, default
    serial).
    """

    restarts: int = 16
    seed: int = 0
    tol: float = 1e-10
    max_sweeps: int = 500
    improvement_tol: float = 1e-12
    grouping_tol: float = 1e-8
    admissibility_tol: float = 1e-9
    force_optimizer: bool = False
    threads: int | None = None

    def resolved_threads(self) -> int:
        if self.threads is not None:
            return max(1, self.threads)
        return max(1, int(os.environ.get("NONBILOC_THREADS", "1")))


@dataclass(frozen=True)
class QuantifierResult:
    """Computed quantifier value plus how it was obtained.

    ``method`` is one of pure_closed_form, both_nondegenerate,
    qubit_closed_form, optimizer, bound_only. ``certificate`` is a
    measurement achieving the reported objective when one is available;
    ``bound`` is the eigenvalue upper bound (nonbilocality only).
    """

    value: float
    method: str
    certificate: ProjectiveMeasurement | None = None
    bound: float | None = None
    diagnostics: dict = field(default_factory=dict)


def _clamp01(x: float) -> float:
    return min(max(float(x), 0.0), 1.0)


def _require_bipartite(rho: DensityOperator, name: str) -> tuple[int, int]:
    if len(rho.dims) != 2:
        raise NotBipartite(f"{name} must be bipartite, got dims {rho.dims}")
    return rho.dims  # type: ignore[return-value]


def _correlation(s: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    return opbasis.correlation_matrix(
        s, opbasis.build_basis(dims[0]), opbasis.build_basis(dims[1])
    )


def _pure_schmidt(rho: DensityOperator, tol: float) -> np.ndarray | None:
    """Schmidt coefficients if ``rho`` is pure within tolerance, else None."""
    values, vectors = linalg.eig_hermitian(rho.matrix)
    if 1.0 - float(values[-1]) > tol:
        return None
    psi = PureState(vectors[:, -1], rho.dims)  # type: ignore[arg-type]
    return schmidt_decompose(psi).coefficients


def nb_pure(lambdas, mus) -> float:
    """Closed-form nonbilocality for pure inputs, 1 - (sum l^4)(sum m^4)."""
    lam = np.asarray(lambdas, dtype=float)
    mu = np.asarray(mus, dtype=float)
    for name, c in (("lambda", lam), ("mu", mu)):
        residual = abs(float(np.sum(c**2)) - 1.0)
        if residual > 1e-10:
            raise NotNormalized(f"{name} coefficients: sum of squares != 1", residual)
    return 1.0 - float(np.sum(lam**4)) * float(np.sum(mu**4))


def nb_bound(gamma_bcad: np.ndarray, nu: int) -> float:
    """Eigenvalue upper bound: 1 minus the nu smallest eigenvalues of GG^t."""
    g = np.asarray(gamma_bcad, dtype=float)
    if g.ndim != 2 or g.shape[0] != nu * nu:
        raise DimensionMismatch(
            f"gamma has {g.shape[0] if g.ndim == 2 else '?'} rows, expected nu^2 = {nu * nu}"
        )
    evals = np.linalg.eigvalsh(g @ g.T)
    return 1.0 - float(np.sum(evals[:nu]))


def _nb_gamma(rho_ab: DensityOperator, rho_cd: DensityOperator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    gamma_ab = _correlation(rho_ab.sqrt(), rho_ab.dims)
    gamma_cd = _correlation(rho_cd.sqrt(), rho_cd.dims)
    return gamma_ab, gamma_cd, opbasis.gamma_bcad(gamma_ab, gamma_cd)


def nb_bound_for_states(rho_ab: DensityOperator, rho_cd: DensityOperator) -> float:
    """Eq.-style upper bound computed straight from the two input states."""
    _require_bipartite(rho_ab, "rho_ab")
    _require_bipartite(rho_cd, "rho_cd")
    _, _, gamma = _nb_gamma(rho_ab, rho_cd)
    return nb_bound(gamma, rho_ab.dims[1] * rho_cd.dims[0])


# --- single-factor extremes (shared by all quantifiers) ----------------------


@dataclass(frozen=True)
class _FactorExtreme:
    value: float
    measurement: ProjectiveMeasurement
    method: str


def _is_maximally_mixed_qubit(rho: DensityOperator, tol: float) -> bool:
    return rho.dim == 2 and float(np.max(np.abs(rho.matrix - np.eye(2) / 2))) <= tol


def _factor_extreme(
    gamma_rows: np.ndarray,
    marginal: DensityOperator,
    mode: str,
    grouping_tol: float,
    tol: float,
) -> _FactorExtreme | None:
    """Closed-form extremum of tr[C Gamma Gamma^t C^t] over one factor.

    ``gamma_rows`` must have the measured factor on the row index. Returns
    None when no closed form applies (the caller should optimize).
    """
    blocks = measurements.eigenspace_blocks(marginal, grouping_tol)
    d = marginal.dim
    if blocks.nondegenerate:
        vecs = np.hstack(blocks.bases)
        ops = opbasis.build_basis(d).operators
        cmat = np.einsum("ae,kab,be->ek", vecs.conj(), ops, vecs).real
        value = float(np.sum((cmat @ gamma_rows) ** 2))
        return _FactorExtreme(
            value, measurements.measurement_from_vectors(vecs), "both_nondegenerate"
        )
    if _is_maximally_mixed_qubit(marginal, tol):
        r, rest = opbasis.split_first_row(gamma_rows)
        evals, evecs = np.linalg.eigh(rest @ rest.T)
        idx = 0 if mode == "min" else 2
        bloch = evecs[:, idx]
        value = float(r @ r) + float(evals[idx])
        paulis = opbasis.build_basis(2).operators[1:4] * np.sqrt(2)
        direction = np.tensordot(bloch, paulis, axes=1)
        projs = np.array([(np.eye(2) + direction) / 2, (np.eye(2) - direction) / 2])
        return _FactorExtreme(value, ProjectiveMeasurement(projs), "qubit_closed_form")
    return None


# --- nonbilocality closed forms ----------------------------------------------


def _product_certificate(
    meas_b: ProjectiveMeasurement, meas_c: ProjectiveMeasurement
) -> ProjectiveMeasurement:
    projs = np.array(
        [np.kron(pb, pc) for pb in meas_b.projectors for pc in meas_c.projectors]
    )
    return ProjectiveMeasurement(projs)


def nb_both_nondegenerate(
    rho_ab: DensityOperator,
    rho_cd: DensityOperator,
    *,
    grouping_tol: float = measurements.GROUPING_TOL,
) -> QuantifierResult:
    """Closed form when both middle marginals are nondegenerate.

    Evaluates 1 - tr[B G_AB^t G_AB B^t] * tr[C G_CD G_CD^t C^t], the value
    at the spectral product basis. That basis is the unique admissible
    measurement only when the joint marginal rho_B x rho_C is nondegenerate;
    if eigenvalue products of the two spectra coincide, larger admissible
    families exist and this value is merely a lower bound (the dispatcher
    sends such inputs to the optimizer instead).
    """
    _require_bipartite(rho_ab, "rho_ab")
    _require_bipartite(rho_cd, "rho_cd")
    gamma_ab, gamma_cd, gamma = _nb_gamma(rho_ab, rho_cd)
    rho_b = rho_ab.marginal(1)
    rho_c = rho_cd.marginal(0)
    for name, marginal in (("rho_B", rho_b), ("rho_C", rho_c)):
        if not measurements.eigenspace_blocks(marginal, grouping_tol).nondegenerate:
            raise DegenerateMarginal(f"{name} is degenerate; use the optimizer")
    ext_b = _factor_extreme(gamma_ab.T, rho_b, "min", grouping_tol, 0.0)
    ext_c = _factor_extreme(gamma_cd, rho_c, "min", grouping_tol, 0.0)
    assert ext_b is not None and ext_c is not None
    value = _clamp01(1.0 - ext_b.value * ext_c.value)
    return QuantifierResult(
        value=value,
        method="both_nondegenerate",
        certificate=_product_certificate(ext_b.measurement, ext_c.measurement),
        bound=nb_bound(gamma, rho_ab.dims[1] * rho_cd.dims[0]),
    )


def nb_qubit_free_side(
    rho_ab: DensityOperator,
    rho_cd: DensityOperator,
    *,
    grouping_tol: float = measurements.GROUPING_TOL,
    tol: float = 1e-10,
) -> QuantifierResult:
    """Closed form for nondegenerate rho_B and maximally mixed qubit rho_C.

    The C-side optimum is a Bloch direction, the minimal eigenvector of
    RR^t from the identity-row split of the CD correlation matrix.
    """
    _require_bipartite(rho_ab, "rho_ab")
    _require_bipartite(rho_cd, "rho_cd")
    gamma_ab, gamma_cd, gamma = _nb_gamma(rho_ab, rho_cd)
    rho_b = rho_ab.marginal(1)
    rho_c = rho_cd.marginal(0)
    if not measurements.eigenspace_blocks(rho_b, grouping_tol).nondegenerate:
        raise PreconditionViolated("rho_B must be nondegenerate")
    if not _is_maximally_mixed_qubit(rho_c, tol):
        raise PreconditionViolated("rho_C must be the maximally mixed qubit")
    ext_b = _factor_extreme(gamma_ab.T, rho_b, "min", grouping_tol, 0.0)
    assert ext_b is not None
    ext_c = _factor_extreme(gamma_cd, rho_c, "min", grouping_tol, tol)
    assert ext_c is not None and ext_c.method == "qubit_closed_form"
    value = _clamp01(1.0 - ext_b.value * ext_c.value)
    return QuantifierResult(
        value=value,
        method="qubit_closed_form",
        certificate=_product_certificate(ext_b.measurement, ext_c.measurement),
        bound=nb_bound(gamma, rho_ab.dims[1] * rho_cd.dims[0]),
    )


# --- measurement search -------------------------------------------------------


def _t_stack(s: np.ndarray, dims: Sequence[int], factors: Sequence[int]) -> np.ndarray:
    """Contraction stack T_k = <E_k, S> over an orthonormal environment basis.

    With the measured factors permuted to the front, S = sum_k T_k x E_k and
    tr[S Pi(S)] = sum_h sum_k <v_h|T_k|v_h>^2 for rank-1 projectors |v_h>.
    """
    dims = tuple(int(d) for d in dims)
    factors = tuple(factors)
    perm = factors + tuple(i for i in range(len(dims)) if i not in factors)
    s_perm = linalg.permute_systems(s, dims, perm)
    d_meas = int(np.prod([dims[f] for f in factors]))
    d_env = s_perm.shape[0] // d_meas
    if d_env == 1:
        return s_perm.reshape(1, d_meas, d_meas)
    env_ops = opbasis.build_basis(d_env).operators
    s4 = s_perm.reshape(d_meas, d_env, d_meas, d_env)
    return np.einsum("kxy,aybx->kab", env_ops, s4)


def _optimize(
    s: np.ndarray,
    dims: Sequence[int],
    factors: tuple[int, ...],
    marginal: DensityOperator,
    maximize: bool,
    cfg: OptimizerConfig,
) -> tuple[float, ProjectiveMeasurement, dict]:
    """Extremize tr[S Pi(S)] over measurements admissible for ``marginal``.

    Returns the direct-route objective of the best measurement found, the
    measurement itself, and search diagnostics (including the residual
    between the search's internal objective and the direct recomputation).
    """
    t_stack = _t_stack(s, dims, factors)
    blocks = measurements.eigenspace_blocks(marginal, cfg.grouping_tol)
    result = search.block_search(
        t_stack,
        blocks.bases,
        restarts=cfg.restarts,
        seed=cfg.seed,
        max_sweeps=cfg.max_sweeps,
        improvement_tol=cfg.improvement_tol,
        maximize=maximize,
        threads=cfg.resolved_threads(),
    )
    meas = measurements.measurement_from_vectors(result.vectors)
    direct = linalg.hs_inner(
        s, measurements.apply_measurement(meas, s, dims, factors)
    ).real
    diagnostics = {
        "restarts": result.restarts,
        "best_restart": result.best_restart,
        "sweeps": result.sweeps,
        "converged": result.converged,
        "last_improvement": float(result.last_improvement),
        "objective": float(direct),
        "objective_residual": abs(float(direct) - result.objective),
    }
    return float(direct), meas, diagnostics


def objective(sqrt_rho, dims: Sequence[int], pi: ProjectiveMeasurement, *, tol: float = measurements.ADMISSIBLE_TOL) -> float:
    """tr[S Pi(S)] for S = sqrt(rho_AB x rho_CD) and a middle measurement.

    The corresponding nonbilocality contribution is 1 - objective, since
    ||S - Pi(S)||^2 = tr S^2 - tr S Pi(S) and tr S^2 = 1. Raises
    :class:`InadmissibleMeasurement` when ``pi`` disturbs rho_BC.
    """
    s = np.asarray(sqrt_rho, dtype=complex)
    dims = tuple(int(d) for d in dims)
    if len(dims) != 4:
        raise DimensionMismatch(f"expected four subsystem dims, got {dims}")
    rho_full = s @ s
    rho_bc = DensityOperator(
        linalg.partial_trace(rho_full, dims, (1, 2)), (dims[1], dims[2])
    )
    check = measurements.is_admissible(pi, rho_bc, tol)
    if not check:
        raise InadmissibleMeasurement(
            "measurement disturbs rho_BC", check.nondisturbance_residual
        )
    return linalg.hs_inner(s, measurements.apply_measurement(pi, s, dims, (1, 2))).real


# --- the nonbilocality quantifier ---------------------------------------------


def nb_closed_form(
    rho_ab: DensityOperator,
    rho_cd: DensityOperator,
    config: OptimizerConfig | None = None,
) -> QuantifierResult | None:
    """Closed-form nonbilocality when a precondition holds, else None.

    Tried in order: pure inputs (Schmidt formula), both middle marginals
    nondegenerate, one nondegenerate with the other a maximally mixed qubit
    (in either orientation).
    """
    cfg = config or OptimizerConfig()
    m, n = _require_bipartite(rho_ab, "rho_ab")
    u, v = _require_bipartite(rho_cd, "rho_cd")
    rho_b = rho_ab.marginal(1)
    rho_c = rho_cd.marginal(0)

    lam = _pure_schmidt(rho_ab, cfg.tol)
    mu = _pure_schmidt(rho_cd, cfg.tol)
    if lam is not None and mu is not None:
        _, _, gamma = _nb_gamma(rho_ab, rho_cd)
        rho_bc = DensityOperator(np.kron(rho_b.matrix, rho_c.matrix), (n, u))
        return QuantifierResult(
            value=_clamp01(nb_pure(lam, mu)),
            method="pure_closed_form",
            certificate=measurements.spectral_measurement(rho_bc, cfg.grouping_tol),
            bound=nb_bound(gamma, n * u),
        )
    # Eq. 4.7 requires the joint middle marginal to be nondegenerate, not just
    # the two factors: when eigenvalue products coincide, admissible
    # measurements rotate across the straddling eigenspace and beat every
    # product measurement, so those inputs go to the optimizer.
    rho_bc = DensityOperator(np.kron(rho_b.matrix, rho_c.matrix), (n, u))
    if measurements.eigenspace_blocks(rho_bc, cfg.grouping_tol).nondegenerate:
        return nb_both_nondegenerate(rho_ab, rho_cd, grouping_tol=cfg.grouping_tol)
    b_nondeg = measurements.eigenspace_blocks(rho_b, cfg.grouping_tol).nondegenerate
    c_nondeg = measurements.eigenspace_blocks(rho_c, cfg.grouping_tol).nondegenerate
    if b_nondeg and _is_maximally_mixed_qubit(rho_c, cfg.tol):
        return nb_qubit_free_side(
            rho_ab, rho_cd, grouping_tol=cfg.grouping_tol, tol=cfg.tol
        )
    if c_nondeg and _is_maximally_mixed_qubit(rho_b, cfg.tol):
        mirrored = nb_qubit_free_side(
            rho_cd.swapped(),
            rho_ab.swapped(),
            grouping_tol=cfg.grouping_tol,
            tol=cfg.tol,
        )
        # certificate lives on H_C x H_B; swap it back to H_B x H_C
        assert mirrored.certificate is not None
        projs = np.array(
            [
                linalg.permute_systems(p, (u, n), (1, 0))
                for p in mirrored.certificate.projectors
            ]
        )
        return QuantifierResult(
            value=mirrored.value,
            method=mirrored.method,
            certificate=ProjectiveMeasurement(projs),
            bound=mirrored.bound,
        )
    return None


def nb_optimize(
    rho_ab: DensityOperator,
    rho_cd: DensityOperator,
    config: OptimizerConfig | None = None,
) -> QuantifierResult:
    """Nonbilocality of rho_AB x rho_CD, dispatching to closed forms.

    Dispatch order: pure inputs, both middle marginals nondegenerate, one
    nondegenerate with the other a maximally mixed qubit, otherwise the
    multistart search (whose value is a certified lower bound on the true
    supremum, capped by the eigenvalue upper bound).
    """
    cfg = config or OptimizerConfig()
    m, n = _require_bipartite(rho_ab, "rho_ab")
    u, v = _require_bipartite(rho_cd, "rho_cd")

    if not cfg.force_optimizer:
        closed = nb_closed_form(rho_ab, rho_cd, cfg)
        if closed is not None:
            return closed

    _, _, gamma = _nb_gamma(rho_ab, rho_cd)
    bound = nb_bound(gamma, n * u)
    rho_b = rho_ab.marginal(1)
    rho_c = rho_cd.marginal(0)
    s_full = linalg.tensor(rho_ab.sqrt(), rho_cd.sqrt())
    rho_bc = DensityOperator(np.kron(rho_b.matrix, rho_c.matrix), (n, u))
    best, meas, diagnostics = _optimize(
        s_full, (m, n, u, v), (1, 2), rho_bc, False, cfg
    )
    value = min(_clamp01(1.0 - best), bound)
    return QuantifierResult(
        value=value,
        method="optimizer",
        certificate=meas,
        bound=bound,
        diagnostics=diagnostics,
    )


# --- single-side quantifiers ---------------------------------------------------

_SIDES = {"A": 0, "B": 1}


def _single_side(
    rho_ab: DensityOperator,
    s: np.ndarray,
    side: int,
    mode: str,
    cfg: OptimizerConfig,
) -> tuple[float, ProjectiveMeasurement, str, dict]:
    """Extreme of tr[S Pi(S)] over measurements of one factor of a bipartite S."""
    dims = rho_ab.dims
    marginal = rho_ab.marginal(side)
    if not cfg.force_optimizer:
        gamma = _correlation(s, dims)
        gamma_rows = gamma if side == 0 else np.ascontiguousarray(gamma.T)
        ext = _factor_extreme(gamma_rows, marginal, mode, cfg.grouping_tol, cfg.tol)
        if ext is not None:
            return ext.value, ext.measurement, ext.method, {}
    value, meas, diagnostics = _optimize(
        s, dims, (side,), marginal, mode == "max", cfg
    )
    return value, meas, "optimizer", diagnostics


def min_modified(
    rho_ab: DensityOperator,
    measured_side: str = "A",
    config: OptimizerConfig | None = None,
) -> QuantifierResult:
    """Modified measurement-induced nonlocality, 1 - min tr[sqrt(rho) Pi(sqrt(rho))].

    The maximization of disturbance runs over von Neumann measurements of
    the chosen side that leave its marginal invariant; for a maximally
    mixed qubit marginal the optimum is the closed Bloch form.
    """
    cfg = config or OptimizerConfig()
    _require_bipartite(rho_ab, "rho_ab")
    if measured_side.upper() not in _SIDES:
        raise BadParameter(f"measured_side must be A or B, got {measured_side!r}")
    side = _SIDES[measured_side.upper()]
    extreme, meas, method, diagnostics = _single_side(
        rho_ab, rho_ab.sqrt(), side, "min", cfg
    )
    return QuantifierResult(
        value=_clamp01(1.0 - extreme),
        method=method,
        certificate=meas,
        diagnostics=diagnostics,
    )


def min_original(
    rho_ab: DensityOperator, config: OptimizerConfig | None = None
) -> QuantifierResult:
    """Original measurement-induced nonlocality on side A, using rho itself."""
    cfg = config or OptimizerConfig()
    _require_bipartite(rho_ab, "rho_ab")
    purity = linalg.hs_norm_sq(rho_ab.matrix)
    extreme, meas, method, diagnostics = _single_side(
        rho_ab, rho_ab.matrix.copy(), 0, "min", cfg
    )
    return QuantifierResult(
        value=_clamp01(purity - extreme),
        method=method,
        certificate=meas,
        diagnostics=diagnostics,
    )


def discord_geometric(
    rho_ab: DensityOperator,
    variant: str = "plain",
    config: OptimizerConfig | None = None,
) -> QuantifierResult:
    """Geometric discord (plain) or its square-root variant (modified).

    Minimizes the disturbance over the same non-disturbing measurement
    family the MIN quantifiers maximize over (the unconstrained-measurement
    convention found elsewhere is deliberately not used here), so the value
    never exceeds the corresponding MIN.
    """
    cfg = config or OptimizerConfig()
    _require_bipartite(rho_ab, "rho_ab")
    if variant not in ("plain", "modified"):
        raise BadParameter(f"variant must be plain or modified, got {variant!r}")
    s = rho_ab.sqrt() if variant == "modified" else rho_ab.matrix.copy()
    base = 1.0 if variant == "modified" else linalg.hs_norm_sq(rho_ab.matrix)
    extreme, meas, method, diagnostics = _single_side(rho_ab, s, 0, "max", cfg)
    return QuantifierResult(
        value=_clamp01(base - extreme),
        method=method,
        certificate=meas,
        diagnostics=diagnostics,
    )
