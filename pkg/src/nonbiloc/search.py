"""Seeded multistart coordinate descent over admissible measurement bases.

The objective has the form f(V) = sum_h sum_k <v_h|T_k|v_h>^2 for a stack of
Hermitian operators T_k, where the columns v_h of V form an orthonormal basis
constrained to rotate only inside prescribed eigenspace blocks. Restricted to
one Givens rotation of a column pair (angle theta, family phase phi), f is a
pure sinusoid in 4*theta, so each coordinate admits a cheap, robust line
search: coarse grid over one period, then golden-section refinement inside
the bracketing interval.

Restart 0 always starts from the identity rotations (the spectral
measurement); restarts >= 1 draw Haar per-block unitaries from
default_rng(seed + restart_index), so results are reproducible and
independent of scheduling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0
_GRID_POINTS = 9
_PERIOD = np.pi / 2  # period of the coordinate objective in theta


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed random unitary via phase-fixed QR of a Ginibre matrix."""
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _golden_section(f, lo: float, hi: float, tol: float = 1e-12) -> tuple[float, float]:
    a, b = lo, hi
    h = b - a
    c, d = b - _INVPHI * h, a + _INVPHI * h
    fc, fd = f(c), f(d)
    while h > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            h = b - a
            c = b - _INVPHI * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INVPHI * h
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def _line_min(f) -> tuple[float, float]:
    """Minimize a (pi/2)-periodic function of theta: grid, then golden section."""
    step = _PERIOD / _GRID_POINTS
    grid = -_PERIOD / 2 + step * np.arange(_GRID_POINTS)
    values = [f(t) for t in grid]
    i = int(np.argmin(values))
    x, fx = _golden_section(f, grid[i] - step, grid[i] + step)
    return (x, fx) if fx < values[i] else (float(grid[i]), values[i])


@dataclass(frozen=True)
class SearchResult:
    vectors: np.ndarray  # columns are the measurement basis vectors
    objective: float
    best_restart: int
    restarts: int
    sweeps: int
    converged: bool
    last_improvement: float


def _pairs_from_blocks(multiplicities: Sequence[int]) -> list[tuple[int, int]]:
    pairs = []
    off = 0
    for m in multiplicities:
        for p in range(off, off + m):
            for q in range(p + 1, off + m):
                pairs.append((p, q))
        off += m
    return pairs


def _row_data(t_stack: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.einsum("ih,kij,jh->hk", v.conj(), t_stack, v).real


def _objective(t_stack: np.ndarray, v: np.ndarray) -> float:
    rows = _row_data(t_stack, v)
    return float(np.sum(rows * rows))


def _orthonormalize_blocks(v: np.ndarray, multiplicities: Sequence[int]) -> np.ndarray:
    """Project drifted block columns back onto exact orthonormal frames."""
    out = v.copy()
    off = 0
    for m in multiplicities:
        if m > 1:
            q, _ = np.linalg.qr(out[:, off : off + m])
            out[:, off : off + m] = q
        else:
            col = out[:, off]
            out[:, off] = col / np.linalg.norm(col)
        off += m
    return out


def _descend(
    t_stack: np.ndarray,
    v0: np.ndarray,
    pairs: Sequence[tuple[int, int]],
    sign: float,
    max_sweeps: int,
    improvement_tol: float,
) -> tuple[np.ndarray, int, bool, float]:
    v = v0.copy()
    sweeps = 0
    converged = not pairs
    last_improvement = 0.0
    for _ in range(max_sweeps if pairs else 0):
        sweeps += 1
        sweep_improvement = 0.0
        for p, q in pairs:
            vp = v[:, p]
            vq = v[:, q]
            a = np.einsum("i,kij,j->k", vp.conj(), t_stack, vp).real
            b = np.einsum("i,kij,j->k", vq.conj(), t_stack, vq).real
            w = np.einsum("i,kij,j->k", vp.conj(), t_stack, vq)
            for phi in (0.0, np.pi / 2):
                omega = w.real if phi == 0.0 else -w.imag
                mean = 0.5 * (a + b)
                delta = 0.5 * (a - b)
                mm = float(mean @ mean)
                dd = float(delta @ delta)
                oo = float(omega @ omega)
                dw = float(delta @ omega)

                def f(theta: float) -> float:
                    u2 = 4.0 * theta
                    return sign * (
                        2 * mm + dd + oo + (dd - oo) * np.cos(u2) + 2 * dw * np.sin(u2)
                    )

                f0 = f(0.0)
                theta, f_best = _line_min(f)
                if f_best < f0:
                    c, s = np.cos(theta), np.sin(theta)
                    e = np.exp(1j * phi)
                    new_p = c * vp + s * e * vq
                    new_q = -s * np.conj(e) * vp + c * vq
                    v[:, p] = new_p
                    v[:, q] = new_q
                    vp, vq = new_p, new_q
                    sweep_improvement += f0 - f_best
                    # refresh the pair data for the second phase family
                    a = np.einsum("i,kij,j->k", vp.conj(), t_stack, vp).real
                    b = np.einsum("i,kij,j->k", vq.conj(), t_stack, vq).real
                    w = np.einsum("i,kij,j->k", vp.conj(), t_stack, vq)
        last_improvement = sweep_improvement
        if sweep_improvement < improvement_tol:
            converged = True
            break
    return v, sweeps, converged, last_improvement


def block_search(
    t_stack: np.ndarray,
    block_bases: Sequence[np.ndarray],
    *,
    restarts: int = 16,
    seed: int = 0,
    max_sweeps: int = 500,
    improvement_tol: float = 1e-12,
    maximize: bool = False,
    threads: int = 1,
) -> SearchResult:
    """Optimize f(V) over per-block rotations with seeded multistart.

    Returns the best basis found across restarts; ties break on the lowest
    restart index so the result is independent of execution order.
    """
    t_stack = np.asarray(t_stack, dtype=complex)
    multiplicities = [b.shape[1] for b in block_bases]
    identity_v = np.hstack([np.asarray(b, dtype=complex) for b in block_bases])
    pairs = _pairs_from_blocks(multiplicities)
    sign = -1.0 if maximize else 1.0
    if not pairs:
        restarts = 1  # the admissible basis is unique up to phases

    def run(index: int):
        if index == 0:
            v0 = identity_v
        else:
            rng = np.random.default_rng(seed + index)
            rotations = [haar_unitary(m, rng) for m in multiplicities]
            cols = [b @ u for b, u in zip(block_bases, rotations)]
            v0 = np.hstack(cols)
        v, sweeps, converged, last = _descend(
            t_stack, v0, pairs, sign, max_sweeps, improvement_tol
        )
        v = _orthonormalize_blocks(v, multiplicities)
        return _objective(t_stack, v), index, v, sweeps, converged, last

    indices = range(max(1, restarts))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run, indices))
    else:
        outcomes = [run(i) for i in indices]
    best = min(outcomes, key=lambda o: (sign * o[0], o[1]))
    objective, index, v, sweeps, converged, last = best
    return SearchResult(
        vectors=v,
        objective=objective,
        best_restart=index,
        restarts=max(1, restarts),
        sweeps=sweeps,
        converged=converged,
        last_improvement=last,
    )
