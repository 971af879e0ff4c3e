"""Evaluation of the k-nonseparability detection inequality.

Given a density matrix rho and a pair of product states (phi1, phi2), the
detection value for block count k is

    |<phi1|rho|phi2>|  -  sum over partitions alpha of {0..n-1} into k blocks
                          of  prod_i ( <chiA_i|rho|chiA_i> <chiB_i|rho|chiB_i> )^(1/(2k))

where (chiA_i, chiB_i) arise from phi1 and phi2 by exchanging their factors
on the i-th block. Every k-separable state has a nonpositive value for
every product pair, so a positive value certifies k-nonseparability. A
nonpositive value is inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .partitions import Partition, count_partitions, enumerate_partitions
from .states import (
    DensityMatrix,
    ProductState,
    pack_index,
    product_state_to_dict,
    unpack_index,
)

DEFAULT_TOLERANCE = 1e-9
DIAGONAL_FLOOR = 1e-15
NEGATIVE_DIAGONAL_TOL = -1e-9
OBSERVABLE_MATCH_TOL = 1e-12
ORACLE_MAX_SQUARED_DIM = 4096


@dataclass(frozen=True)
class CriterionResult:
    """Outcome of one detection-value evaluation.

    ``value == first_term - sum(term for _, term in partition_terms)`` and
    ``violated`` is the one-sided certificate ``value > tolerance``.
    """

    k: int
    first_term: float
    partition_terms: tuple[tuple[Partition, float], ...]
    value: float
    violated: bool
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "first_term": self.first_term,
            "terms": [
                {"partition": partition.label(), "value": term}
                for partition, term in self.partition_terms
            ],
            "value": self.value,
            "violated": self.violated,
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class MeasurementPlan:
    """Product observables needed to evaluate the criterion experimentally.

    One projector per distinct exchange state chi (diagonal matrix elements)
    plus the single off-diagonal element <phi1|rho|phi2>.
    """

    diagonal_observables: tuple[ProductState, ...]
    offdiagonal_pair: tuple[ProductState, ProductState]
    total_count: int

    def to_dict(self) -> dict:
        return {
            "total_count": self.total_count,
            "diagonal_observables": [
                product_state_to_dict(chi) for chi in self.diagonal_observables
            ],
            "offdiagonal_pair": {
                "phi1": product_state_to_dict(self.offdiagonal_pair[0]),
                "phi2": product_state_to_dict(self.offdiagonal_pair[1]),
            },
        }


def apply_block_swap(
    phi1: ProductState, phi2: ProductState, block: Iterable[int]
) -> tuple[ProductState, ProductState]:
    """Exchange the factors of phi1 and phi2 on the given subsystem indices."""
    if phi1.dims != phi2.dims:
        raise ValueError(f"product states have different dims {phi1.dims} and {phi2.dims}")
    n = phi1.n
    block_set = set(int(i) for i in block)
    if any(i < 0 or i >= n for i in block_set):
        raise ValueError(f"block {sorted(block_set)} has indices outside 0..{n - 1}")
    chi_a = tuple(
        phi2.factors[j] if j in block_set else phi1.factors[j] for j in range(n)
    )
    chi_b = tuple(
        phi1.factors[j] if j in block_set else phi2.factors[j] for j in range(n)
    )
    return ProductState(chi_a), ProductState(chi_b)


def _check_compatible(rho: DensityMatrix, phi1: ProductState, phi2: ProductState) -> None:
    if rho.dims != phi1.dims or rho.dims != phi2.dims:
        raise ValueError(
            f"dimension mismatch: state {rho.dims}, phi1 {phi1.dims}, phi2 {phi2.dims}"
        )


def _clamped_diagonal(raw: float) -> float:
    if raw < NEGATIVE_DIAGONAL_TOL:
        raise ValueError(
            f"diagonal expectation {raw!r} is negative beyond tolerance; "
            "the input matrix is not a valid state"
        )
    return max(raw, 0.0)


def _root_of_product(factors: Sequence[float], k: int) -> float:
    """2k-th root of a product of 2k nonnegative factors.

    Uses exp of the mean log to avoid underflow; any factor below the floor
    collapses the whole term to zero.
    """
    if min(factors) < DIAGONAL_FLOOR:
        return 0.0
    return math.exp(sum(math.log(f) for f in factors) / (2 * k))


def evaluate_criterion(
    rho: DensityMatrix,
    phi1: ProductState,
    phi2: ProductState,
    k: int,
    tolerance: float = DEFAULT_TOLERANCE,
) -> CriterionResult:
    """Evaluate the detection value of ``rho`` for block count ``k``.

    The partition sum runs over all partitions of the subsystems into
    exactly ``k`` blocks in canonical enumeration order. ``violated=True``
    (value above ``tolerance``) certifies that ``rho`` is not k-separable;
    anything else is inconclusive.

    Raises ``ValueError`` on dimension mismatch, k outside 2..n, or when a
    diagonal expectation is negative beyond -1e-9 (an invalid input state).
    """
    _check_compatible(rho, phi1, phi2)
    n = rho.n
    if not 2 <= k <= n:
        raise ValueError(f"block count k={k} must satisfy 2 <= k <= n={n}")

    matrix = rho.matrix
    phi1_vec = phi1.full_vector()
    phi2_vec = phi2.full_vector()
    first_term = float(abs(np.vdot(phi1_vec, matrix @ phi2_vec)))

    # <chi|rho|chi> depends only on the subset of slots carrying phi2
    # factors, so cache diagonals by that subset; partitions reuse them.
    diagonals: dict[frozenset[int], float] = {}

    def diagonal_for(swapped: frozenset[int]) -> float:
        if swapped not in diagonals:
            factors = tuple(
                phi2.factors[j] if j in swapped else phi1.factors[j] for j in range(n)
            )
            vec = factors[0]
            for f in factors[1:]:
                vec = np.kron(vec, f)
            raw = float(np.real(np.vdot(vec, matrix @ vec)))
            diagonals[swapped] = _clamped_diagonal(raw)
        return diagonals[swapped]

    everything = frozenset(range(n))
    partition_terms = []
    for partition in enumerate_partitions(n, k):
        factors = []
        for block in partition.blocks:
            swapped = frozenset(block)
            factors.append(diagonal_for(swapped))
            factors.append(diagonal_for(everything - swapped))
        partition_terms.append((partition, _root_of_product(factors, k)))

    value = first_term - sum(term for _, term in partition_terms)
    return CriterionResult(
        k=k,
        first_term=first_term,
        partition_terms=tuple(partition_terms),
        value=value,
        violated=value > tolerance,
        tolerance=tolerance,
    )


def evaluate_all_k(
    rho: DensityMatrix,
    phi1: ProductState,
    phi2: ProductState,
    tolerance: float = DEFAULT_TOLERANCE,
) -> list[CriterionResult]:
    """Evaluate the criterion for every block count k = 2..n."""
    return [
        evaluate_criterion(rho, phi1, phi2, k, tolerance=tolerance)
        for k in range(2, rho.n + 1)
    ]


def _block_swap_matrix(block: Iterable[int], dims: Sequence[int]) -> np.ndarray:
    """Permutation matrix exchanging the block's subsystems of two copies."""
    n = len(dims)
    doubled = tuple(dims) + tuple(dims)
    size = math.prod(doubled)
    block_set = set(block)
    perm = np.empty(size, dtype=np.intp)
    for idx in range(size):
        digits = list(unpack_index(idx, doubled))
        for j in block_set:
            digits[j], digits[n + j] = digits[n + j], digits[j]
        perm[idx] = pack_index(digits, doubled)
    mat = np.zeros((size, size))
    mat[perm, np.arange(size)] = 1.0
    return mat


def evaluate_criterion_oracle(
    rho: DensityMatrix,
    phi1: ProductState,
    phi2: ProductState,
    k: int,
    tolerance: float = DEFAULT_TOLERANCE,
) -> CriterionResult:
    """Evaluate the detection value on an explicit two-copy construction.

    Builds the full rho (x) rho matrix together with dense permutation
    matrices on the doubled space and computes every bracket as a quadratic
    form. Slow and memory hungry by design; intended as an independent
    cross-check of :func:`evaluate_criterion` at small dimensions.
    """
    _check_compatible(rho, phi1, phi2)
    n = rho.n
    if not 2 <= k <= n:
        raise ValueError(f"block count k={k} must satisfy 2 <= k <= n={n}")
    size = rho.dim * rho.dim
    if size > ORACLE_MAX_SQUARED_DIM:
        raise ValueError(
            f"two-copy dimension {size} exceeds the oracle guard frame "
            f"{ORACLE_MAX_SQUARED_DIM}"
        )

    two_copies = np.kron(rho.matrix, rho.matrix)
    phi_vec = np.kron(phi1.full_vector(), phi2.full_vector())

    total_swap = _block_swap_matrix(range(n), rho.dims)
    first_squared = float(np.real(np.vdot(phi_vec, two_copies @ (total_swap @ phi_vec))))
    first_term = math.sqrt(max(first_squared, 0.0))

    partition_terms = []
    for partition in enumerate_partitions(n, k):
        brackets = []
        for block in partition.blocks:
            swap = _block_swap_matrix(block, rho.dims)
            swapped_phi = swap @ phi_vec
            raw = float(np.real(np.vdot(swapped_phi, two_copies @ swapped_phi)))
            brackets.append(_clamped_diagonal(raw))
        if min(brackets) < DIAGONAL_FLOOR:
            term = 0.0
        else:
            term = math.exp(sum(math.log(b) for b in brackets) / (2 * k))
        partition_terms.append((partition, term))

    value = first_term - sum(term for _, term in partition_terms)
    return CriterionResult(
        k=k,
        first_term=first_term,
        partition_terms=tuple(partition_terms),
        value=value,
        violated=value > tolerance,
        tolerance=tolerance,
    )


def analytic_threshold(n: int, d: int, k: int) -> float:
    """Closed-form detection threshold for the isotropic GHZ family.

    The family p*GHZ + (1-p)*white noise is detected as not k-separable
    exactly for visibilities above gamma / (gamma + d^(n-1)), with gamma the
    number of partitions into k blocks.
    """
    if d < 2:
        raise ValueError(f"local dimension d={d} must be >= 2")
    gamma = count_partitions(n, k)
    return gamma / (gamma + d ** (n - 1))


def numeric_threshold(
    family: Callable[[float], DensityMatrix],
    phi1: ProductState,
    phi2: ProductState,
    k: int,
    tol: float = 1e-12,
) -> float:
    """Locate the detection threshold of a one-parameter family by bisection.

    ``family`` maps a parameter p in [0, 1] to a density matrix; the
    detection value must be nonpositive at p=0 and positive at p=1. The
    returned p* brackets the sign change to within ``tol``.
    """

    def value_at(p: float) -> float:
        return evaluate_criterion(family(p), phi1, phi2, k).value

    low, high = 0.0, 1.0
    if value_at(low) > 0.0 or value_at(high) <= 0.0:
        raise ValueError("no sign change of the detection value on [0, 1]")
    for _ in range(200):
        if high - low <= tol:
            break
        mid = 0.5 * (low + high)
        if value_at(mid) > 0.0:
            high = mid
        else:
            low = mid
    return 0.5 * (low + high)


def _same_product_state(a: ProductState, b: ProductState) -> bool:
    if a.dims != b.dims:
        return False
    return all(
        float(np.max(np.abs(fa - fb))) <= OBSERVABLE_MATCH_TOL
        for fa, fb in zip(a.factors, b.factors)
    )


def measurement_plan(phi1: ProductState, phi2: ProductState, k: int) -> MeasurementPlan:
    """Collect the deduplicated product observables behind the criterion.

    Walks every partition into k blocks, records the exchange states chi
    whose projectors supply the diagonal matrix elements, removes factor-wise
    duplicates, and appends the single off-diagonal pair (phi1, phi2).
    """
    if phi1.dims != phi2.dims:
        raise ValueError(f"product states have different dims {phi1.dims} and {phi2.dims}")
    n = phi1.n
    if not 2 <= k <= n:
        raise ValueError(f"block count k={k} must satisfy 2 <= k <= n={n}")
    observables: list[ProductState] = []
    for partition in enumerate_partitions(n, k):
        for block in partition.blocks:
            for chi in apply_block_swap(phi1, phi2, block):
                if not any(_same_product_state(chi, seen) for seen in observables):
                    observables.append(chi)
    return MeasurementPlan(
        diagonal_observables=tuple(observables),
        offdiagonal_pair=(phi1, phi2),
        total_count=len(observables) + 1,
    )
