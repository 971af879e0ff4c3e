"""Local-unitary search that maximizes the detection value.

States such as W that are invisible to the criterion in the computational
basis become detectable after rotating the reference pair (phi1, phi2) by
the same product unitary. The search is derivative free: seeded random
restarts followed by cyclic coordinate sweeps with a shrinking-window
golden-section line search, which copes with the kinks the absolute value
and the zero-clamped roots put into the objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .criterion import DEFAULT_TOLERANCE, evaluate_criterion
from .states import DensityMatrix, ProductState, product_state_to_dict

THETA_MAX = math.pi / 2.0
PHASE_MAX = 2.0 * math.pi
_ANGLE_SLACK = 1e-9
_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_LINE_SEARCH_EVALS = 16


@dataclass(frozen=True, eq=False)
class LocalUnitaryParams:
    """Angles defining one unitary per subsystem.

    The flat parameter vector of a d-dimensional subsystem has d*d entries:
    d(d-1)/2 mixing angles theta in [0, pi/2], then d(d-1)/2 relative phases
    lambda in [0, 2pi), then d diagonal phases. See :func:`build_unitary`.
    """

    dims: tuple[int, ...]
    site_params: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != len(self.site_params):
            raise ValueError("one parameter vector per subsystem is required")
        cleaned = []
        for d, params in zip(dims, self.site_params):
            arr = np.array(params, dtype=float).reshape(-1)
            if arr.size != d * d:
                raise ValueError(
                    f"subsystem of dimension {d} needs {d * d} parameters, got {arr.size}"
                )
            pairs = d * (d - 1) // 2
            thetas = arr[:pairs]
            rest = arr[pairs:]
            if np.any(thetas < -_ANGLE_SLACK) or np.any(thetas > THETA_MAX + _ANGLE_SLACK):
                raise ValueError("mixing angles must lie in [0, pi/2]")
            if np.any(rest < -_ANGLE_SLACK) or np.any(rest > PHASE_MAX + _ANGLE_SLACK):
                raise ValueError("phase angles must lie in [0, 2pi]")
            arr.setflags(write=False)
            cleaned.append(arr)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "site_params", tuple(cleaned))

    def unitaries(self) -> list[np.ndarray]:
        return [build_unitary(p, d) for p, d in zip(self.site_params, self.dims)]

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "site_params": [[float(x) for x in p] for p in self.site_params],
        }


@dataclass(frozen=True, eq=False)
class OptimizationReport:
    """Best point found by :func:`optimize_phi`, with enough context to replay it."""

    best_value: float
    best_params: LocalUnitaryParams
    best_phi1: ProductState
    best_phi2: ProductState
    restarts: int
    iterations: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "best_value": self.best_value,
            "best_params": self.best_params.to_dict(),
            "best_phi1": product_state_to_dict(self.best_phi1),
            "best_phi2": product_state_to_dict(self.best_phi2),
            "restarts": self.restarts,
            "iterations": self.iterations,
            "seed": self.seed,
        }


def build_unitary(params: np.ndarray, d: int) -> np.ndarray:
    """Compose a d x d unitary from a flat vector of d*d angles.

    The matrix is (diagonal phase matrix) times the ordered product of
    two-level rotations over index pairs (a, b) with a < b in lexicographic
    order. Each rotation acts on its plane as

        [[cos(theta),               exp(i*lambda) * sin(theta)],
         [-exp(-i*lambda)*sin(theta), cos(theta)             ]]

    and the parameter vector is packed as [thetas..., lambdas..., phases...].
    All angles zero gives the identity.
    """
    arr = np.asarray(params, dtype=float).reshape(-1)
    if arr.size != d * d:
        raise ValueError(f"expected {d * d} parameters for dimension {d}, got {arr.size}")
    pairs = d * (d - 1) // 2
    thetas = arr[:pairs]
    lambdas = arr[pairs : 2 * pairs]
    phases = arr[2 * pairs :]
    unitary = np.diag(np.exp(1j * phases))
    index = 0
    for a in range(d):
        for b in range(a + 1, d):
            rotation = np.eye(d, dtype=np.complex128)
            cos_t = math.cos(thetas[index])
            sin_t = math.sin(thetas[index])
            phase = np.exp(1j * lambdas[index])
            rotation[a, a] = cos_t
            rotation[b, b] = cos_t
            rotation[a, b] = phase * sin_t
            rotation[b, a] = -np.conj(phase) * sin_t
            unitary = unitary @ rotation
            index += 1
    return unitary


def _golden_max(func, low: float, high: float) -> tuple[float, float]:
    """Argmax of a scalar function on [low, high] by golden-section probing."""
    a, b = low, high
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = func(c), func(d)
    for _ in range(_LINE_SEARCH_EVALS):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = func(d)
    return (c, fc) if fc >= fd else (d, fd)


def _coordinate_search(objective, start, lower, upper, iterations):
    point = np.array(start, dtype=float)
    best = objective(point)
    window = (upper - lower) / 4.0
    for _ in range(iterations):
        for coord in range(point.size):
            low = max(lower[coord], point[coord] - window[coord])
            high = min(upper[coord], point[coord] + window[coord])
            if high <= low:
                continue

            def along(t: float) -> float:
                probe = point.copy()
                probe[coord] = t
                return objective(probe)

            candidate, candidate_value = _golden_max(along, low, high)
            if candidate_value > best:
                point[coord] = candidate
                best = candidate_value
        window *= 0.5
    return point, best


def optimize_phi(
    rho: DensityMatrix,
    k: int,
    base_phi1: ProductState,
    base_phi2: ProductState,
    restarts: int = 8,
    iterations: int = 4,
    seed: int = 0,
    tolerance: float = DEFAULT_TOLERANCE,
) -> OptimizationReport:
    """Maximize the detection value over product-unitary rotations of the pair.

    Restart 0 always starts from the identity rotation, so the result is
    never worse than the base pair. Remaining restarts draw their angles
    uniformly from a seeded generator; identical (seed, restarts,
    iterations) reproduce the report exactly. Ties between restarts keep the
    earliest one.
    """
    if restarts < 1 or iterations < 1:
        raise ValueError("restarts and iterations must both be >= 1")
    if rho.dims != base_phi1.dims or rho.dims != base_phi2.dims:
        raise ValueError(
            f"dimension mismatch: state {rho.dims}, phi1 {base_phi1.dims}, "
            f"phi2 {base_phi2.dims}"
        )
    dims = rho.dims
    sizes = [d * d for d in dims]
    offsets = np.cumsum([0] + sizes)
    total = int(offsets[-1])

    lower = np.zeros(total)
    upper = np.empty(total)
    for d, off in zip(dims, offsets[:-1]):
        pairs = d * (d - 1) // 2
        upper[off : off + pairs] = THETA_MAX
        upper[off + pairs : off + d * d] = PHASE_MAX

    def split(flat: np.ndarray) -> tuple[np.ndarray, ...]:
        return tuple(
            flat[offsets[j] : offsets[j + 1]].copy() for j in range(len(dims))
        )

    def rotated_pair(flat: np.ndarray) -> tuple[ProductState, ProductState]:
        gates = [build_unitary(p, d) for p, d in zip(split(flat), dims)]
        phi1 = ProductState(
            tuple(g @ f for g, f in zip(gates, base_phi1.factors))
        )
        phi2 = ProductState(
            tuple(g @ f for g, f in zip(gates, base_phi2.factors))
        )
        return phi1, phi2

    def objective(flat: np.ndarray) -> float:
        phi1, phi2 = rotated_pair(flat)
        return evaluate_criterion(rho, phi1, phi2, k, tolerance=tolerance).value

    rng = np.random.default_rng(seed)
    best_value = -math.inf
    best_point = np.zeros(total)
    for restart in range(restarts):
        start = np.zeros(total) if restart == 0 else rng.uniform(lower, upper)
        point, value = _coordinate_search(objective, start, lower, upper, iterations)
        if value > best_value:
            best_value = value
            best_point = point

    best_params = LocalUnitaryParams(dims, split(best_point))
    best_phi1, best_phi2 = rotated_pair(best_point)
    final = evaluate_criterion(rho, best_phi1, best_phi2, k, tolerance=tolerance)
    return OptimizationReport(
        best_value=final.value,
        best_params=best_params,
        best_phi1=best_phi1,
        best_phi2=best_phi2,
        restarts=restarts,
        iterations=iterations,
        seed=seed,
    )
