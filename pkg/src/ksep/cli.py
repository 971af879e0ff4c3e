"""Command-line interface.

Exit codes are part of the contract: 0 for success or an inconclusive
evaluation, 1 for unreadable or invalid input files, 2 for dimension,
range, or usage errors, and 3 when a violation certificate was found.
Results go to standard output (JSON, or CSV for sweeps); diagnostics go to
standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .criterion import (
    DEFAULT_TOLERANCE,
    analytic_threshold,
    evaluate_all_k,
    evaluate_criterion,
    measurement_plan,
    numeric_threshold,
)
from .fcs import build_fcs_state, load_fcs_spec
from .optimizer import optimize_phi
from .states import (
    QUBIT_GHZ_W_FAMILY,
    QUTRIT_GHZ_XI_FAMILY,
    DensityMatrix,
    ProductState,
    ValidationError,
    computational_pair,
    family_state,
    ghz_w_qubit_family,
    ghz_xi_qutrit_family,
    isotropic_ghz_family,
    load_density_matrix,
    load_product_state,
    product_state_from_dict,
)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_SEMANTIC_ERROR = 2
EXIT_VIOLATION = 3

_FAMILY_POINTS = {
    QUBIT_GHZ_W_FAMILY: ghz_w_qubit_family,
    QUTRIT_GHZ_XI_FAMILY: ghz_xi_qutrit_family,
}
_FAMILY_DIMS = {
    QUBIT_GHZ_W_FAMILY: (2, 2, 2),
    QUTRIT_GHZ_XI_FAMILY: (3, 3, 3),
}


class _InputError(Exception):
    """A file could not be read, parsed, or validated."""


@dataclass(frozen=True)
class SweepCell:
    alpha: float
    beta: float
    k: int
    value: float
    violated: bool


@dataclass(frozen=True)
class SweepGrid:
    """Detection values over the admissible (alpha, beta) grid of a family."""

    family: str
    alpha_steps: int
    beta_steps: int
    alpha_range: tuple[float, float]
    beta_range: tuple[float, float]
    cells: tuple[SweepCell, ...]


def sweep_family(
    family: str,
    steps: int,
    ks: Sequence[int],
    phi1: ProductState | None = None,
    phi2: ProductState | None = None,
    optimize: bool = False,
    restarts: int = 8,
    iterations: int = 4,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
) -> SweepGrid:
    """Evaluate a two-parameter mixture family over its weight simplex.

    Rows are produced with alpha outermost, beta next, and the block count
    innermost; cells with alpha + beta > 1 are skipped.
    """
    if family not in _FAMILY_POINTS:
        raise ValueError(f"unknown family {family!r}")
    if steps < 2:
        raise ValueError("at least two steps per axis are required")
    if not ks:
        raise ValueError("at least one block count is required")
    point_of = _FAMILY_POINTS[family]
    dims = _FAMILY_DIMS[family]
    if phi1 is None or phi2 is None:
        phi1, phi2 = computational_pair(dims)
    axis = [float(x) for x in np.linspace(0.0, 1.0, steps)]
    cells = []
    for alpha in axis:
        for beta in axis:
            if alpha + beta > 1.0 + 1e-12:
                continue
            rho = family_state(point_of(alpha, beta))
            for k in ks:
                if optimize:
                    report = optimize_phi(
                        rho,
                        k,
                        phi1,
                        phi2,
                        restarts=restarts,
                        iterations=iterations,
                        seed=seed,
                        tolerance=tolerance,
                    )
                    value = report.best_value
                    violated = value > tolerance
                else:
                    result = evaluate_criterion(rho, phi1, phi2, k, tolerance=tolerance)
                    value = result.value
                    violated = result.violated
                cells.append(SweepCell(alpha, beta, int(k), float(value), violated))
    return SweepGrid(
        family=family,
        alpha_steps=steps,
        beta_steps=steps,
        alpha_range=(0.0, 1.0),
        beta_range=(0.0, 1.0),
        cells=tuple(cells),
    )


def write_sweep_csv(grid: SweepGrid, stream: TextIO) -> None:
    stream.write("alpha,beta,k,value,violated\n")
    for cell in grid.cells:
        flag = "true" if cell.violated else "false"
        stream.write(f"{cell.alpha!r},{cell.beta!r},{cell.k},{cell.value!r},{flag}\n")


def _load_state_file(path: str, check_psd: bool) -> DensityMatrix:
    try:
        return load_density_matrix(path, check_psd=check_psd)
    except (OSError, json.JSONDecodeError, ValidationError) as exc:
        raise _InputError(f"{path}: {exc}") from exc


def _load_product_file(path: str) -> ProductState:
    try:
        return load_product_state(path)
    except (OSError, json.JSONDecodeError, ValidationError) as exc:
        raise _InputError(f"{path}: {exc}") from exc


def _load_pair_file(path: str) -> tuple[ProductState, ProductState]:
    try:
        with open(path) as stream:
            obj = json.load(stream)
        return product_state_from_dict(obj["phi1"]), product_state_from_dict(obj["phi2"])
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValidationError) as exc:
        raise _InputError(f"{path}: {exc}") from exc


def _check_dims(rho: DensityMatrix, rho_path: str, phi: ProductState, phi_path: str) -> None:
    if rho.dims != phi.dims:
        raise ValueError(
            f"dimension mismatch: {rho_path} has dims {list(rho.dims)} but "
            f"{phi_path} has dims {list(phi.dims)}"
        )


def _resolve_pair(
    rho: DensityMatrix, state_path: str, phi1_path: str | None, phi2_path: str | None
) -> tuple[ProductState, ProductState]:
    if phi1_path is None and phi2_path is None:
        return computational_pair(rho.dims)
    if phi1_path is None or phi2_path is None:
        raise ValueError("--phi1 and --phi2 must be given together")
    phi1 = _load_product_file(phi1_path)
    phi2 = _load_product_file(phi2_path)
    _check_dims(rho, state_path, phi1, phi1_path)
    _check_dims(rho, state_path, phi2, phi2_path)
    return phi1, phi2


def _cmd_eval(args: argparse.Namespace) -> int:
    rho = _load_state_file(args.state, args.psd_check)
    phi1 = _load_product_file(args.phi1)
    phi2 = _load_product_file(args.phi2)
    _check_dims(rho, args.state, phi1, args.phi1)
    _check_dims(rho, args.state, phi2, args.phi2)
    if args.all_k:
        results = evaluate_all_k(rho, phi1, phi2, tolerance=args.tolerance)
        print(json.dumps([r.to_dict() for r in results]))
        return EXIT_VIOLATION if any(r.violated for r in results) else EXIT_OK
    result = evaluate_criterion(rho, phi1, phi2, args.k, tolerance=args.tolerance)
    print(json.dumps(result.to_dict()))
    return EXIT_VIOLATION if result.violated else EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    ks = _parse_k_list(args.k)
    if args.optimize and args.seed is None:
        raise ValueError("--optimize requires --seed for reproducible output")
    phi1 = phi2 = None
    if args.phi != "computational":
        phi1, phi2 = _load_pair_file(args.phi)
    grid = sweep_family(
        args.family,
        args.steps,
        ks,
        phi1=phi1,
        phi2=phi2,
        optimize=args.optimize,
        restarts=args.restarts,
        iterations=args.iters,
        seed=args.seed if args.seed is not None else 0,
        tolerance=args.tolerance,
    )
    write_sweep_csv(grid, sys.stdout)
    return EXIT_OK


def _cmd_threshold(args: argparse.Namespace) -> int:
    out = {"analytic": analytic_threshold(args.n, args.d, args.k)}
    if args.numeric:
        dims = (args.d,) * args.n
        phi1, phi2 = computational_pair(dims)

        def family(p: float) -> DensityMatrix:
            return family_state(isotropic_ghz_family(p, args.n, args.d))

        out["numeric"] = numeric_threshold(family, phi1, phi2, args.k)
    print(json.dumps(out))
    return EXIT_OK


def _cmd_optimize(args: argparse.Namespace) -> int:
    rho = _load_state_file(args.state, args.psd_check)
    phi1, phi2 = _resolve_pair(rho, args.state, args.phi1, args.phi2)
    report = optimize_phi(
        rho,
        args.k,
        phi1,
        phi2,
        restarts=args.restarts,
        iterations=args.iters,
        seed=args.seed,
        tolerance=args.tolerance,
    )
    print(json.dumps(report.to_dict()))
    return EXIT_VIOLATION if report.best_value > args.tolerance else EXIT_OK


def _cmd_chain(args: argparse.Namespace) -> int:
    try:
        spec = load_fcs_spec(args.spec)
    except (OSError, json.JSONDecodeError, ValidationError) as exc:
        raise _InputError(f"{args.spec}: {exc}") from exc
    if args.optimize and args.seed is None:
        raise ValueError("--optimize requires --seed for reproducible output")
    rho = build_fcs_state(spec)
    phi1, phi2 = _resolve_pair(rho, args.spec, args.phi1, args.phi2)
    ks = range(2, spec.n + 1) if args.all_k else [2]
    results = []
    for k in ks:
        if args.optimize:
            report = optimize_phi(
                rho,
                k,
                phi1,
                phi2,
                restarts=args.restarts,
                iterations=args.iters,
                seed=args.seed,
                tolerance=args.tolerance,
            )
            results.append(
                evaluate_criterion(
                    rho, report.best_phi1, report.best_phi2, k, args.tolerance
                )
            )
        else:
            results.append(evaluate_criterion(rho, phi1, phi2, k, args.tolerance))
    print(json.dumps([r.to_dict() for r in results]))
    return EXIT_VIOLATION if any(r.violated for r in results) else EXIT_OK


def _cmd_plan(args: argparse.Namespace) -> int:
    if args.phi1 is not None or args.phi2 is not None:
        if args.phi1 is None or args.phi2 is None:
            raise ValueError("--phi1 and --phi2 must be given together")
        phi1 = _load_product_file(args.phi1)
        phi2 = _load_product_file(args.phi2)
        if phi1.dims != phi2.dims:
            raise ValueError(
                f"dimension mismatch: {args.phi1} has dims {list(phi1.dims)} but "
                f"{args.phi2} has dims {list(phi2.dims)}"
            )
        if args.n is not None and args.n != phi1.n:
            raise ValueError(
                f"--n {args.n} contradicts the {phi1.n}-party states in the files"
            )
    else:
        if args.n is None:
            raise ValueError("either --n or a pair of state files is required")
        phi1, phi2 = computational_pair((args.d,) * args.n)
    plan = measurement_plan(phi1, phi2, args.k)
    print(json.dumps(plan.to_dict()))
    return EXIT_OK


def _parse_k_list(text: str) -> list[int]:
    try:
        ks = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ValueError(f"bad block count list {text!r}") from exc
    if not ks:
        raise ValueError(f"bad block count list {text!r}")
    return ks


def _add_optimize_args(parser: argparse.ArgumentParser, seed_required: bool) -> None:
    parser.add_argument("--restarts", type=int, default=8, help="random restarts (first restart is the unrotated pair)")
    parser.add_argument("--iters", type=int, default=4, help="coordinate sweeps per restart")
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        required=seed_required,
        help="random seed for the restart draws",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ksep",
        description="Detect k-nonseparability of multipartite qudit states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate the criterion for a state file")
    p_eval.add_argument("--state", required=True, help="density matrix JSON file")
    p_eval.add_argument("--phi1", required=True, help="product state JSON file")
    p_eval.add_argument("--phi2", required=True, help="product state JSON file")
    k_group = p_eval.add_mutually_exclusive_group(required=True)
    k_group.add_argument("--k", type=int, help="block count to test")
    k_group.add_argument("--all-k", action="store_true", help="test every k from 2 to n")
    p_eval.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p_eval.add_argument("--psd-check", action="store_true", help="also check the state is positive semidefinite")
    p_eval.set_defaults(handler=_cmd_eval)

    p_sweep = sub.add_parser("sweep", help="CSV grid of detection values for a mixture family")
    p_sweep.add_argument(
        "--family",
        required=True,
        choices=sorted(_FAMILY_POINTS),
    )
    p_sweep.add_argument("--steps", type=int, required=True, help="grid points per axis")
    p_sweep.add_argument("--k", required=True, help="comma-separated block counts, e.g. 2,3")
    p_sweep.add_argument(
        "--phi",
        default="computational",
        help="'computational' or a JSON file with phi1/phi2 product states",
    )
    p_sweep.add_argument("--optimize", action="store_true", help="optimize the pair per grid cell")
    p_sweep.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    _add_optimize_args(p_sweep, seed_required=False)
    p_sweep.set_defaults(handler=_cmd_sweep)

    p_thresh = sub.add_parser("threshold", help="isotropic-noise detection threshold")
    p_thresh.add_argument("--n", type=int, required=True, help="number of parties")
    p_thresh.add_argument("--d", type=int, required=True, help="local dimension")
    p_thresh.add_argument("--k", type=int, required=True, help="block count")
    p_thresh.add_argument("--numeric", action="store_true", help="also locate the threshold by bisection")
    p_thresh.set_defaults(handler=_cmd_threshold)

    p_opt = sub.add_parser("optimize", help="maximize the detection value over local rotations")
    p_opt.add_argument("--state", required=True, help="density matrix JSON file")
    p_opt.add_argument("--k", type=int, required=True)
    p_opt.add_argument("--phi1", help="product state JSON file (default |0..0>)")
    p_opt.add_argument("--phi2", help="product state JSON file (default |1..1>)")
    p_opt.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p_opt.add_argument("--psd-check", action="store_true")
    _add_optimize_args(p_opt, seed_required=True)
    p_opt.set_defaults(handler=_cmd_optimize)

    p_chain = sub.add_parser("chain", help="evaluate the reduced state of a chain spec")
    p_chain.add_argument("--spec", required=True, help="chain spec JSON file")
    p_chain.add_argument("--all-k", action="store_true", help="report every k from 2 to n (default: k=2 only)")
    p_chain.add_argument("--optimize", action="store_true")
    p_chain.add_argument("--phi1", help="product state JSON file (default |0..0>)")
    p_chain.add_argument("--phi2", help="product state JSON file (default |1..1>)")
    p_chain.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    _add_optimize_args(p_chain, seed_required=False)
    p_chain.set_defaults(handler=_cmd_chain)

    p_plan = sub.add_parser("plan", help="list the observables needed to measure the criterion")
    p_plan.add_argument("--phi1", help="product state JSON file")
    p_plan.add_argument("--phi2", help="product state JSON file")
    p_plan.add_argument("--n", type=int, help="number of parties (computational pair)")
    p_plan.add_argument("--d", type=int, default=2, help="local dimension for the computational pair")
    p_plan.add_argument("--k", type=int, required=True)
    p_plan.set_defaults(handler=_cmd_plan)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC_ERROR


if __name__ == "__main__":
    sys.exit(main())
