"""Reduced states of translationally invariant infinite qubit chains.

A chain is described by two transfer operators v0, v1 and an auxiliary
state rho_b, all of auxiliary dimension b. The n-site reduced state has
matrix elements

    rho[s, t] = Tr( v_s^dagger rho_b v_t ),   v_s = v_{s1} v_{s2} ... v_{sn},

normalized to unit trace. The auxiliary objects stand in for the rest of
the chain, so larger b gives a better approximation of the infinite system.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .criterion import DEFAULT_TOLERANCE, CriterionResult, evaluate_criterion
from .optimizer import optimize_phi
from .states import (
    HERMITICITY_TOL,
    TRACE_TOL,
    DensityMatrix,
    ProductState,
    ValidationError,
    computational_pair,
    make_density_matrix,
)

DEGENERATE_TRACE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FcsSpec:
    """Transfer operators and auxiliary state describing a chain."""

    v0: np.ndarray
    v1: np.ndarray
    rho_b: np.ndarray
    n: int

    def __post_init__(self) -> None:
        v0 = np.array(self.v0, dtype=np.complex128)
        v1 = np.array(self.v1, dtype=np.complex128)
        rho_b = np.array(self.rho_b, dtype=np.complex128)
        if v0.ndim != 2 or v0.shape[0] != v0.shape[1]:
            raise ValidationError("v0 must be a square matrix")
        b = v0.shape[0]
        if v1.shape != (b, b) or rho_b.shape != (b, b):
            raise ValidationError(
                f"v0, v1 and rho_b must all be {b}x{b}, got {v1.shape} and {rho_b.shape}"
            )
        herm_defect = float(np.max(np.abs(rho_b - rho_b.conj().T)))
        if not herm_defect <= HERMITICITY_TOL:
            raise ValidationError(f"rho_b is not Hermitian (defect {herm_defect:.3e})")
        trace_defect = abs(complex(np.trace(rho_b)) - 1.0)
        if not trace_defect <= TRACE_TOL:
            raise ValidationError(f"rho_b trace deviates from 1 by {trace_defect:.3e}")
        if self.n < 2:
            raise ValidationError("at least two chain sites are required")
        for arr in (v0, v1, rho_b):
            arr.setflags(write=False)
        object.__setattr__(self, "v0", v0)
        object.__setattr__(self, "v1", v1)
        object.__setattr__(self, "rho_b", rho_b)
        object.__setattr__(self, "n", int(self.n))

    @property
    def b(self) -> int:
        return self.v0.shape[0]


def fixed_point_residual(spec: FcsSpec) -> float:
    """Max-norm residual of the single-site fixed-point condition.

    Translationally invariant chains satisfy v0 rho_b v0^dag + v1 rho_b
    v1^dag = rho_b. The residual is reported for diagnostics and is not a
    validity requirement.
    """
    image = (
        spec.v0 @ spec.rho_b @ spec.v0.conj().T
        + spec.v1 @ spec.rho_b @ spec.v1.conj().T
    )
    return float(np.max(np.abs(image - spec.rho_b)))


def build_fcs_state(spec: FcsSpec, check_psd: bool = True) -> DensityMatrix:
    """Assemble the n-qubit reduced state of the chain.

    The raw matrix of transfer-operator traces is normalized by its trace,
    then validated like any other density matrix. A trace at or below
    1e-12 means the spec annihilates every site pattern and is rejected; a
    Hermiticity failure on the output signals inconsistent transfer
    operators.
    """
    n = spec.n
    operators = (spec.v0, spec.v1)
    # Ordered products v_{s1} ... v_{sn} for every bit string, built one
    # site at a time so each product is formed once.
    products = [np.eye(spec.b, dtype=np.complex128)]
    for _ in range(n):
        products = [prior @ op for prior in products for op in operators]
    stacked = np.array(products)
    flat = stacked.reshape(2**n, spec.b * spec.b)
    weighted = np.einsum("ab,sbc->sac", spec.rho_b, stacked).reshape(2**n, spec.b * spec.b)
    raw = flat.conj() @ weighted.T

    trace = float(np.real(np.trace(raw)))
    if trace <= DEGENERATE_TRACE_TOL:
        raise ValidationError(
            f"degenerate chain spec: the assembled matrix has trace {trace!r}"
        )
    return make_density_matrix((2,) * n, raw / trace, check_psd=check_psd)


def chain_separability_report(
    spec: FcsSpec,
    phi1: ProductState | None = None,
    phi2: ProductState | None = None,
    use_optimizer: bool = False,
    restarts: int = 8,
    iterations: int = 4,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
) -> list[CriterionResult]:
    """Build the chain state and evaluate the criterion for every k = 2..n.

    Without an explicit pair the computational pair |0..0>, |1..1> is used;
    with ``use_optimizer`` each k gets its own local-unitary search seeded
    from that pair.
    """
    rho = build_fcs_state(spec)
    if phi1 is None or phi2 is None:
        phi1, phi2 = computational_pair(rho.dims)
    results = []
    for k in range(2, spec.n + 1):
        if use_optimizer:
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
            results.append(
                evaluate_criterion(rho, report.best_phi1, report.best_phi2, k, tolerance)
            )
        else:
            results.append(evaluate_criterion(rho, phi1, phi2, k, tolerance))
    return results


# Spec files are JSON: {"b": 2, "n": 4, "v0": [[...]], "v1": [[...]],
# "rhoB": [[...]]}, matrices given row by row with [re, im] entries.


def _matrix_from_rows(rows: Sequence, b: int, name: str) -> np.ndarray:
    if len(rows) != b:
        raise ValidationError(f"{name} must have {b} rows")
    out = np.zeros((b, b), dtype=np.complex128)
    for i, row in enumerate(rows):
        if len(row) != b:
            raise ValidationError(f"{name} row {i} must have {b} entries")
        for j, entry in enumerate(row):
            try:
                re, im = entry
                out[i, j] = complex(float(re), float(im))
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"{name} entries must be [re, im] pairs") from exc
    return out


def _matrix_to_rows(matrix: np.ndarray) -> list:
    return [
        [[float(z.real), float(z.imag)] for z in row] for row in np.asarray(matrix)
    ]


def fcs_spec_from_dict(obj: dict) -> FcsSpec:
    try:
        b = int(obj["b"])
        n = int(obj["n"])
        v0_rows = obj["v0"]
        v1_rows = obj["v1"]
        rho_rows = obj["rhoB"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError("chain spec needs integer 'b', 'n' and matrices 'v0', 'v1', 'rhoB'") from exc
    return FcsSpec(
        v0=_matrix_from_rows(v0_rows, b, "v0"),
        v1=_matrix_from_rows(v1_rows, b, "v1"),
        rho_b=_matrix_from_rows(rho_rows, b, "rhoB"),
        n=n,
    )


def fcs_spec_to_dict(spec: FcsSpec) -> dict:
    return {
        "b": spec.b,
        "n": spec.n,
        "v0": _matrix_to_rows(spec.v0),
        "v1": _matrix_to_rows(spec.v1),
        "rhoB": _matrix_to_rows(spec.rho_b),
    }


def save_fcs_spec(path: str | Path, spec: FcsSpec) -> None:
    Path(path).write_text(json.dumps(fcs_spec_to_dict(spec)))


def load_fcs_spec(path: str | Path) -> FcsSpec:
    return fcs_spec_from_dict(json.loads(Path(path).read_text()))
