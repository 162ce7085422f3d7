"""Command-line front end: state file IO, quantifier commands, reports.

State files are JSON with explicit [re, im] entry pairs so they stay
unambiguous across ecosystems:

    {"label": "bell", "dims": [2, 2], "matrix": [[[re, im], ...], ...]}

Exit codes: 0 success, 1 example-regression failure, 2 invalid input,
3 dimension incompatibility.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, bilocality, measurements, quantifiers, states
from .errors import BadParameter, DimensionMismatch, NonbilocError, NotBipartite
from .states import DensityOperator

EXIT_OK = 0
EXIT_REGRESSION = 1
EXIT_INVALID_INPUT = 2
EXIT_DIMENSION = 3


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# --- JSON matrix encoding -----------------------------------------------------


def matrix_to_json(m: np.ndarray) -> list:
    return [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(m)]


def matrix_from_json(data, what: str) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[0] != arr.shape[1] or arr.shape[2] != 2:
        raise BadParameter(
            f"{what}: matrix must be a square nested array of [re, im] pairs, "
            f"got shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def load_state(path: str) -> tuple[DensityOperator, dict]:
    """Parse and validate a state file; returns the state and its input record."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise _CliError(EXIT_INVALID_INPUT, f"cannot read {path}: {exc}")
    try:
        obj = json.loads(raw)
        dims = obj["dims"]
        matrix = matrix_from_json(obj["matrix"], path)
        rho = states.validate_density(matrix, dims)
    except NonbilocError as exc:
        raise _CliError(EXIT_INVALID_INPUT, f"invalid state file {path}: {exc}")
    except (KeyError, TypeError, ValueError) as exc:
        raise _CliError(EXIT_INVALID_INPUT, f"malformed state file {path}: {exc}")
    record = {
        "path": path,
        "label": obj.get("label") or Path(path).stem,
        "sha256": hashlib.sha256(raw).hexdigest(),
    }
    return rho, record


def save_state(path: str, rho: DensityOperator, label: str | None = None) -> None:
    obj = {
        "label": label or Path(path).stem,
        "dims": list(rho.dims),
        "matrix": matrix_to_json(rho.matrix),
    }
    Path(path).write_text(json.dumps(obj, indent=1))


def _load_settings(path: str) -> tuple[list, bilocality.BsmAssignment]:
    try:
        obj = json.loads(Path(path).read_text())
        observables = [
            bilocality.dichotomic(matrix_from_json(obj[key], f"{path}:{key}"))
            for key in ("a0", "a1", "c0", "c1")
        ]
        bsm = bilocality.standard_bsm(obj.get("bsm_bits", bilocality.STANDARD_BITS))
    except NonbilocError as exc:
        raise _CliError(EXIT_INVALID_INPUT, f"invalid settings file {path}: {exc}")
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise _CliError(EXIT_INVALID_INPUT, f"malformed settings file {path}: {exc}")
    return observables, bsm


# --- report assembly -----------------------------------------------------------


def _config_dict(cfg: quantifiers.OptimizerConfig) -> dict:
    return {
        "restarts": cfg.restarts,
        "seed": cfg.seed,
        "tol": cfg.tol,
        "max_sweeps": cfg.max_sweeps,
    }


def _result_dict(res: quantifiers.QuantifierResult, with_certificate: bool) -> dict:
    out = {
        "value": res.value,
        "method": res.method,
        "bound": res.bound,
        "diagnostics": res.diagnostics,
    }
    if with_certificate and res.certificate is not None:
        out["certificate"] = [matrix_to_json(p) for p in res.certificate.projectors]
    return out


def _emit(report: dict, as_json: bool, text_lines: list[str]) -> None:
    if as_json:
        print(json.dumps(report, indent=2))
    else:
        for line in text_lines:
            print(line)


def _config_from_args(args) -> quantifiers.OptimizerConfig:
    return quantifiers.OptimizerConfig(
        restarts=args.restarts,
        seed=args.seed,
        tol=args.tol,
        max_sweeps=args.max_sweeps,
    )


# --- commands -------------------------------------------------------------------


def cmd_compute(args) -> int:
    cfg = _config_from_args(args)
    rho_a, rec_a = load_state(args.a)
    inputs = [rec_a]
    t0 = time.perf_counter()
    try:
        if args.kind == "nb":
            if args.b is None:
                raise _CliError(EXIT_INVALID_INPUT, "compute nb needs --b STATE")
            rho_b, rec_b = load_state(args.b)
            inputs.append(rec_b)
            res = quantifiers.nb_optimize(rho_a, rho_b, cfg)
        elif args.kind == "min":
            res = quantifiers.min_modified(rho_a, args.side, cfg)
        elif args.kind == "min_original":
            res = quantifiers.min_original(rho_a, cfg)
        elif args.kind == "discord":
            res = quantifiers.discord_geometric(rho_a, "plain", cfg)
        else:  # discord_modified
            res = quantifiers.discord_geometric(rho_a, "modified", cfg)
    except (NotBipartite, DimensionMismatch) as exc:
        raise _CliError(EXIT_DIMENSION, f"incompatible dimensions: {exc}")
    duration = time.perf_counter() - t0
    report = {
        "command": f"compute {args.kind}",
        "inputs": inputs,
        "config": _config_dict(cfg),
        "result": _result_dict(res, args.certificate),
        "duration_s": duration,
        "version": __version__,
    }
    lines = [
        f"{args.kind}: value = {res.value:.12g}  (method: {res.method})",
    ]
    if res.bound is not None:
        lines.append(f"upper bound = {res.bound:.12g}")
    if res.diagnostics:
        lines.append(f"diagnostics: {res.diagnostics}")
    _emit(report, args.json, lines)
    return EXIT_OK


def cmd_bound(args) -> int:
    cfg = _config_from_args(args)
    rho_a, rec_a = load_state(args.a)
    rho_b, rec_b = load_state(args.b)
    t0 = time.perf_counter()
    try:
        bound = quantifiers.nb_bound_for_states(rho_a, rho_b)
        closed = quantifiers.nb_closed_form(rho_a, rho_b, cfg)
    except (NotBipartite, DimensionMismatch) as exc:
        raise _CliError(EXIT_DIMENSION, f"incompatible dimensions: {exc}")
    if closed is None:
        res = quantifiers.QuantifierResult(value=bound, method="bound_only", bound=bound)
    else:
        res = closed
    duration = time.perf_counter() - t0
    report = {
        "command": "bound",
        "inputs": [rec_a, rec_b],
        "config": _config_dict(cfg),
        "result": _result_dict(res, args.certificate),
        "duration_s": duration,
        "version": __version__,
    }
    lines = [f"upper bound = {res.bound:.12g}"]
    if res.method != "bound_only":
        lines.append(f"exact value = {res.value:.12g}  (method: {res.method})")
    _emit(report, args.json, lines)
    return EXIT_OK


def cmd_bilocality(args) -> int:
    rho_a, rec_a = load_state(args.a)
    rho_b, rec_b = load_state(args.b)
    observables, bsm = _load_settings(args.settings)
    a0, a1, c0, c1 = observables
    t0 = time.perf_counter()
    try:
        i_val = bilocality.correlator_I(rho_a, rho_b, a0, a1, bsm, c0, c1)
        j_val = bilocality.correlator_J(rho_a, rho_b, a0, a1, bsm, c0, c1)
    except (NotBipartite, DimensionMismatch) as exc:
        raise _CliError(EXIT_DIMENSION, f"incompatible dimensions: {exc}")
    s = bilocality.s_value(i_val, j_val)
    duration = time.perf_counter() - t0
    report = {
        "command": "bilocality",
        "inputs": [rec_a, rec_b, {"path": args.settings}],
        "result": {"I": i_val, "J": j_val, "S": s.value, "violation": s.violation},
        "duration_s": duration,
        "version": __version__,
    }
    lines = [
        f"I = {i_val:.12g}",
        f"J = {j_val:.12g}",
        f"S = sqrt|I| + sqrt|J| = {s.value:.12g}",
        "bilocality inequality VIOLATED (S > 2)" if s.violation else "no violation (S <= 2)",
    ]
    _emit(report, args.json, lines)
    return EXIT_OK


def _example_checks(seed: int) -> list[dict]:
    """Recompute the three worked examples and compare to expected values."""
    checks: list[dict] = []

    def close(name: str, value: float, expected: float, tol: float) -> None:
        checks.append(
            {
                "name": name,
                "value": float(value),
                "expected": float(expected),
                "tolerance": tol,
                "kind": "abs",
                "pass": bool(abs(value - expected) <= tol),
            }
        )

    def at_least(name: str, value: float, threshold: float, tol: float) -> None:
        checks.append(
            {
                "name": name,
                "value": float(value),
                "expected": float(threshold),
                "tolerance": tol,
                "kind": "lower_bound",
                "pass": bool(value >= threshold - tol),
            }
        )

    cfg = quantifiers.OptimizerConfig(seed=seed)
    forced = quantifiers.OptimizerConfig(seed=seed, force_optimizer=True)

    # Example 1: two maximally entangled pure inputs
    bell = states.bell_state("phi_plus")
    res1 = quantifiers.nb_optimize(bell, bell, cfg)
    close("example1_closed_form", res1.value, 0.75, 1e-12)
    res1_opt = quantifiers.nb_optimize(bell, bell, forced)
    close("example1_optimizer", res1_opt.value, 0.75, 1e-9)

    # Example 2: classically correlated separable inputs
    rho_c = states.classical_correlated()
    res2 = quantifiers.nb_optimize(rho_c, rho_c, cfg)
    close("example2_optimizer", res2.value, 0.75, 1e-6)
    hadamard = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    had_meas = measurements.measurement_from_vectors(np.kron(hadamard, hadamard))
    s_cc = np.kron(rho_c.sqrt(), rho_c.sqrt())
    close(
        "example2_hadamard_objective",
        quantifiers.objective(s_cc, (2, 2, 2, 2), had_meas),
        0.25,
        1e-12,
    )
    close("example2_bound", quantifiers.nb_bound_for_states(rho_c, rho_c), 1.0, 1e-12)

    # Example 3: Bell-diagonal state of rank 3
    beta = states.bell_diagonal((1 / 3, 1 / 3, 1 / 3, 0.0))
    res3_min = quantifiers.min_modified(beta, "A", cfg)
    close("example3_min_closed_form", res3_min.value, 1 / 6, 1e-9)
    res3_min_opt = quantifiers.min_modified(beta, "A", forced)
    close("example3_min_optimizer", res3_min_opt.value, 1 / 6, 1e-9)
    min_obj = 1.0 - res3_min.value
    close("example3_squared_chain", 1.0 - min_obj**2, 11 / 36, 1e-9)
    beta_ba = beta.swapped()
    s_bb = np.kron(beta_ba.sqrt(), beta.sqrt())
    bsm = bilocality.standard_bsm().measurement
    bsm_obj = quantifiers.objective(s_bb, (2, 2, 2, 2), bsm)
    close("example3_bsm_objective", bsm_obj, 7 / 12, 1e-12)
    res3_nb = quantifiers.nb_optimize(beta_ba, beta, cfg)
    at_least("example3_nb_lower_bound", res3_nb.value, 5 / 12, 1e-6)
    at_least("example3_chain_middle", res3_nb.value, 11 / 36, 1e-9)
    at_least("example3_chain_last", 11 / 36, res3_min.value, 1e-9)
    return checks


def cmd_examples(args) -> int:
    checks = _example_checks(args.seed)
    ok = all(c["pass"] for c in checks)
    if args.json:
        report = {
            "command": "examples",
            "seed": args.seed,
            "version": __version__,
            "checks": checks,
            "pass": ok,
        }
        print(json.dumps(report, indent=2))
    else:
        for c in checks:
            rel = ">=" if c["kind"] == "lower_bound" else "=="
            status = "PASS" if c["pass"] else "FAIL"
            print(
                f"{status} {c['name']}: {c['value']:.12g} {rel} {c['expected']:.12g}"
                f" (tol {c['tolerance']:g})"
            )
        print("all examples passed" if ok else "EXAMPLE REGRESSION FAILURE")
    return EXIT_OK if ok else EXIT_REGRESSION


# --- argument parsing ------------------------------------------------------------


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--json", action="store_true", help="machine-readable report")
    group.add_argument("--text", dest="json", action="store_false", help="human summary")
    p.set_defaults(json=True)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-sweeps", type=int, default=500)
    p.add_argument(
        "--certificate", action="store_true", help="include certificate projectors"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonbiloc",
        description="Nonbilocality and related measurement-induced quantifiers.",
    )
    parser.add_argument("--version", action="version", version=f"nonbiloc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_compute = sub.add_parser("compute", help="evaluate a quantifier on state files")
    p_compute.add_argument(
        "kind", choices=["nb", "min", "min_original", "discord", "discord_modified"]
    )
    p_compute.add_argument("--a", required=True, help="first (or only) state file")
    p_compute.add_argument("--b", help="second state file (nb only)")
    p_compute.add_argument("--side", choices=["A", "B"], default="A")
    _add_config_flags(p_compute)
    _add_output_flags(p_compute)
    p_compute.set_defaults(func=cmd_compute)

    p_bound = sub.add_parser("bound", help="eigenvalue upper bound for nb")
    p_bound.add_argument("--a", required=True)
    p_bound.add_argument("--b", required=True)
    _add_config_flags(p_bound)
    _add_output_flags(p_bound)
    p_bound.set_defaults(func=cmd_bound)

    p_biloc = sub.add_parser("bilocality", help="evaluate the bilocality inequality")
    p_biloc.add_argument("--a", required=True)
    p_biloc.add_argument("--b", required=True)
    p_biloc.add_argument("--settings", required=True, help="observables + BSM bits file")
    _add_output_flags(p_biloc)
    p_biloc.set_defaults(func=cmd_bilocality)

    p_ex = sub.add_parser("examples", help="reproduce the three worked examples")
    p_ex.add_argument("--seed", type=int, default=0)
    _add_output_flags(p_ex)
    p_ex.set_defaults(func=cmd_examples)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NonbilocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
