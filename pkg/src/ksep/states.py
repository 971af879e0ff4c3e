"""State types and constructors for multipartite qudit systems.

Everything here works in the computational basis with subsystem 0 as the
most significant digit: the basis string |s1 s2 ... sn> of a system with
dimensions (d1, ..., dn) maps to the flat index
s1*(d2*...*dn) + s2*(d3*...*dn) + ... + sn.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

HERMITICITY_TOL = 1e-9
TRACE_TOL = 1e-9
MIN_EIGENVALUE_TOL = -1e-8
FACTOR_NORM_TOL = 1e-12
UNITARY_TOL = 1e-9

QUBIT_GHZ_W_FAMILY = "ghz-w-qubit"
QUTRIT_GHZ_XI_FAMILY = "ghz-xi-qutrit"
ISOTROPIC_GHZ_FAMILY = "isotropic-ghz"


class ValidationError(ValueError):
    """A state, matrix, or input file failed structural validation."""


def pack_index(digits: Sequence[int], dims: Sequence[int]) -> int:
    """Flat index of the basis string |digits> (subsystem 0 most significant)."""
    idx = 0
    for s, d in zip(digits, dims):
        if not 0 <= s < d:
            raise ValidationError(f"digit {s} out of range for dimension {d}")
        idx = idx * d + s
    return idx


def unpack_index(index: int, dims: Sequence[int]) -> tuple[int, ...]:
    """Basis string of a flat index, inverse of :func:`pack_index`."""
    digits = []
    for d in reversed(dims):
        digits.append(index % d)
        index //= d
    return tuple(reversed(digits))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Dense Hermitian unit-trace matrix over subsystems of given dimensions.

    Hermiticity and trace are always checked on construction; positive
    semidefiniteness is an optional extra check done by
    :func:`make_density_matrix`.
    """

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 2 for d in dims):
            raise ValidationError(f"subsystem dimensions must all be >= 2, got {list(dims)}")
        size = math.prod(dims)
        mat = np.array(self.matrix, dtype=np.complex128)
        if mat.shape != (size, size):
            raise ValidationError(
                f"matrix shape {mat.shape} does not match dimensions {list(dims)} "
                f"(expected {size}x{size})"
            )
        herm_defect = float(np.max(np.abs(mat - mat.conj().T)))
        if not herm_defect <= HERMITICITY_TOL:
            raise ValidationError(f"matrix is not Hermitian (defect {herm_defect:.3e})")
        trace_defect = abs(complex(np.trace(mat)) - 1.0)
        if not trace_defect <= TRACE_TOL:
            raise ValidationError(f"matrix trace deviates from 1 by {trace_defect:.3e}")
        mat.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", mat)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class ProductState:
    """Tensor product of per-subsystem unit vectors."""

    factors: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        cleaned = []
        for j, factor in enumerate(self.factors):
            arr = np.array(factor, dtype=np.complex128).reshape(-1)
            if arr.size < 2:
                raise ValidationError(f"factor {j} must have dimension >= 2")
            norm = float(np.linalg.norm(arr))
            if not abs(norm - 1.0) <= FACTOR_NORM_TOL:
                raise ValidationError(f"factor {j} has norm {norm!r}, expected 1")
            arr.setflags(write=False)
            cleaned.append(arr)
        if not cleaned:
            raise ValidationError("a product state needs at least one factor")
        object.__setattr__(self, "factors", tuple(cleaned))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.size for f in self.factors)

    @property
    def n(self) -> int:
        return len(self.factors)

    def full_vector(self) -> np.ndarray:
        """The tensor product of all factors as one flat vector."""
        vec = self.factors[0]
        for factor in self.factors[1:]:
            vec = np.kron(vec, factor)
        return vec


def _lowest_eigenvalue(matrix: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian matrix.

    Runs power iteration on the Gershgorin-shifted matrix c*I - M, whose top
    eigenvalue is c - min_eig(M). Rayleigh quotients only ever underestimate
    the top eigenvalue, so the returned value can only overestimate the true
    minimum; two independent starting vectors guard against a start that is
    orthogonal to the extremal eigenspace.
    """
    dim = matrix.shape[0]
    diag = np.real(np.diag(matrix))
    radii = np.sum(np.abs(matrix), axis=1) - np.abs(np.diag(matrix))
    shift = float(np.max(diag + radii))
    shifted = shift * np.eye(dim) - matrix
    rng = np.random.default_rng(0x5EED)
    top = 0.0
    for _ in range(2):
        vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        vec /= np.linalg.norm(vec)
        estimate = 0.0
        for _ in range(5000):
            image = shifted @ vec
            estimate = float(np.real(np.vdot(vec, image)))
            residual = float(np.linalg.norm(image - estimate * vec))
            if residual <= 1e-11 * max(1.0, abs(shift)):
                break
            norm = float(np.linalg.norm(image))
            if norm < 1e-300:
                break
            vec = image / norm
        top = max(top, estimate)
    return shift - top


def make_density_matrix(
    dims: Sequence[int], matrix: np.ndarray, check_psd: bool = False
) -> DensityMatrix:
    """Validate and wrap a density matrix.

    Hermiticity and unit trace are always enforced. With ``check_psd`` the
    smallest eigenvalue is additionally required to be >= -1e-8.
    """
    state = DensityMatrix(tuple(int(d) for d in dims), matrix)
    if check_psd:
        lowest = _lowest_eigenvalue(state.matrix)
        if lowest < MIN_EIGENVALUE_TOL:
            raise ValidationError(
                f"matrix is not positive semidefinite (smallest eigenvalue {lowest:.3e})"
            )
    return state


def basis_product_state(dims: Sequence[int], digits: Sequence[int]) -> ProductState:
    """The computational basis string |digits> as a product state."""
    if len(digits) != len(dims):
        raise ValidationError("one digit per subsystem is required")
    factors = []
    for s, d in zip(digits, dims):
        if not 0 <= s < d:
            raise ValidationError(f"digit {s} out of range for dimension {d}")
        factor = np.zeros(d, dtype=np.complex128)
        factor[s] = 1.0
        factors.append(factor)
    return ProductState(tuple(factors))


def computational_pair(dims: Sequence[int]) -> tuple[ProductState, ProductState]:
    """The default detection pair |0...0>, |1...1>."""
    n = len(dims)
    return (
        basis_product_state(dims, [0] * n),
        basis_product_state(dims, [1] * n),
    )


def ghz_state(n: int, d: int) -> np.ndarray:
    """Normalized n-party qudit GHZ vector, (|0..0> + |1..1> + ... )/sqrt(d)."""
    if n < 2 or d < 2:
        raise ValidationError("ghz_state requires n >= 2 and d >= 2")
    dims = (d,) * n
    vec = np.zeros(d**n, dtype=np.complex128)
    amp = 1.0 / math.sqrt(d)
    for i in range(d):
        vec[pack_index([i] * n, dims)] = amp
    return vec


def w_state(n: int) -> np.ndarray:
    """Equal superposition of all n-qubit basis strings of Hamming weight 1."""
    if n < 2:
        raise ValidationError("w_state requires n >= 2")
    vec = np.zeros(2**n, dtype=np.complex128)
    amp = 1.0 / math.sqrt(n)
    for j in range(n):
        vec[2 ** (n - 1 - j)] = amp
    return vec


def xi_state() -> np.ndarray:
    """Equal superposition of the six three-qutrit permutation strings of 012."""
    dims = (3, 3, 3)
    vec = np.zeros(27, dtype=np.complex128)
    amp = 1.0 / math.sqrt(6)
    for digits in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        vec[pack_index(digits, dims)] = amp
    return vec


def projector(vec: np.ndarray) -> np.ndarray:
    """Rank-1 projector |vec><vec|."""
    vec = np.asarray(vec, dtype=np.complex128).reshape(-1)
    return np.outer(vec, vec.conj())


@dataclass(frozen=True)
class StateFamilyPoint:
    """A parameter point of one of the built-in noise-mixture families.

    The qubit and qutrit families mix two entangled projectors with white
    noise using weights (alpha, beta); the isotropic family mixes an n-party
    d-level GHZ projector with white noise using visibility p.
    """

    family: str
    alpha: float = 0.0
    beta: float = 0.0
    p: float = 0.0
    n: int = 0
    d: int = 0


def ghz_w_qubit_family(alpha: float, beta: float) -> StateFamilyPoint:
    """Three-qubit mixture of GHZ and W projectors with white noise."""
    _check_mixture_weights(alpha, beta)
    return StateFamilyPoint(QUBIT_GHZ_W_FAMILY, alpha=float(alpha), beta=float(beta))


def ghz_xi_qutrit_family(alpha: float, beta: float) -> StateFamilyPoint:
    """Three-qutrit mixture of the generalized GHZ and xi projectors with white noise."""
    _check_mixture_weights(alpha, beta)
    return StateFamilyPoint(QUTRIT_GHZ_XI_FAMILY, alpha=float(alpha), beta=float(beta))


def isotropic_ghz_family(p: float, n: int, d: int) -> StateFamilyPoint:
    """n-party d-level GHZ projector dampened by white noise with visibility p."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"visibility p={p!r} must lie in [0, 1]")
    if n < 2 or d < 2:
        raise ValidationError("isotropic family requires n >= 2 and d >= 2")
    return StateFamilyPoint(ISOTROPIC_GHZ_FAMILY, p=float(p), n=int(n), d=int(d))


def _check_mixture_weights(alpha: float, beta: float) -> None:
    if alpha < 0.0 or beta < 0.0 or alpha + beta > 1.0 + 1e-12:
        raise ValidationError(
            f"mixture weights alpha={alpha!r}, beta={beta!r} must be nonnegative "
            "with alpha + beta <= 1"
        )


def family_state(point: StateFamilyPoint) -> DensityMatrix:
    """Build the density matrix of a family point."""
    if point.family == QUBIT_GHZ_W_FAMILY:
        _check_mixture_weights(point.alpha, point.beta)
        rest = (1.0 - point.alpha - point.beta) / 8.0
        mat = (
            point.alpha * projector(ghz_state(3, 2))
            + point.beta * projector(w_state(3))
            + rest * np.eye(8)
        )
        return DensityMatrix((2, 2, 2), mat)
    if point.family == QUTRIT_GHZ_XI_FAMILY:
        _check_mixture_weights(point.alpha, point.beta)
        rest = (1.0 - point.alpha - point.beta) / 27.0
        mat = (
            point.alpha * projector(ghz_state(3, 3))
            + point.beta * projector(xi_state())
            + rest * np.eye(27)
        )
        return DensityMatrix((3, 3, 3), mat)
    if point.family == ISOTROPIC_GHZ_FAMILY:
        if not 0.0 <= point.p <= 1.0:
            raise ValidationError(f"visibility p={point.p!r} must lie in [0, 1]")
        size = point.d**point.n
        mat = point.p * projector(ghz_state(point.n, point.d)) + (1.0 - point.p) / size * np.eye(
            size
        )
        return DensityMatrix((point.d,) * point.n, mat)
    raise ValidationError(f"unknown state family {point.family!r}")


def apply_local_unitaries(
    state: ProductState, unitaries: Sequence[np.ndarray]
) -> ProductState:
    """Apply one unitary per subsystem to the factors of a product state."""
    if len(unitaries) != state.n:
        raise ValidationError(
            f"expected {state.n} unitaries, got {len(unitaries)}"
        )
    new_factors = []
    for j, (gate, factor) in enumerate(zip(unitaries, state.factors)):
        mat = np.asarray(gate, dtype=np.complex128)
        d = factor.size
        if mat.shape != (d, d):
            raise ValidationError(
                f"unitary {j} has shape {mat.shape}, expected ({d}, {d})"
            )
        defect = float(np.max(np.abs(mat.conj().T @ mat - np.eye(d))))
        if not defect <= UNITARY_TOL:
            raise ValidationError(f"matrix {j} is not unitary (defect {defect:.3e})")
        new_factors.append(mat @ factor)
    return ProductState(tuple(new_factors))


# ---------------------------------------------------------------------------
# JSON persistence.
#
# Matrices: {"dims": [d1, ..., dn], "data": [[re, im], ...]} with the data
# listed row-major. Product states: {"dims": [...], "factors": [[[re, im],
# ...], ...]}. Floats use Python's shortest round-trip rendering, so a
# save/load cycle is bit exact.
# ---------------------------------------------------------------------------


def _pairs_to_complex(pairs: Iterable, what: str) -> np.ndarray:
    values = []
    for entry in pairs:
        try:
            re, im = entry
            values.append(complex(float(re), float(im)))
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"{what}: entries must be [re, im] pairs") from exc
    return np.array(values, dtype=np.complex128)


def density_matrix_to_dict(state: DensityMatrix) -> dict:
    return {
        "dims": list(state.dims),
        "data": [[float(z.real), float(z.imag)] for z in state.matrix.ravel()],
    }


def density_matrix_from_dict(obj: dict, check_psd: bool = False) -> DensityMatrix:
    try:
        dims = [int(d) for d in obj["dims"]]
        data = obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError("matrix object needs integer 'dims' and a 'data' list") from exc
    size = math.prod(dims) if dims else 0
    flat = _pairs_to_complex(data, "matrix data")
    if flat.size != size * size:
        raise ValidationError(
            f"matrix data has {flat.size} entries, expected {size * size} for dims {dims}"
        )
    return make_density_matrix(dims, flat.reshape(size, size), check_psd=check_psd)


def product_state_to_dict(state: ProductState) -> dict:
    return {
        "dims": list(state.dims),
        "factors": [
            [[float(z.real), float(z.imag)] for z in factor] for factor in state.factors
        ],
    }


def product_state_from_dict(obj: dict) -> ProductState:
    try:
        dims = [int(d) for d in obj["dims"]]
        factors = obj["factors"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError("product state object needs 'dims' and 'factors'") from exc
    if len(factors) != len(dims):
        raise ValidationError("number of factors does not match dims")
    arrays = []
    for d, factor in zip(dims, factors):
        arr = _pairs_to_complex(factor, "product state factor")
        if arr.size != d:
            raise ValidationError(f"factor has {arr.size} amplitudes, expected {d}")
        arrays.append(arr)
    return ProductState(tuple(arrays))


def save_density_matrix(path: str | Path, state: DensityMatrix) -> None:
    Path(path).write_text(json.dumps(density_matrix_to_dict(state)))


def load_density_matrix(path: str | Path, check_psd: bool = False) -> DensityMatrix:
    return density_matrix_from_dict(json.loads(Path(path).read_text()), check_psd=check_psd)


def save_product_state(path: str | Path, state: ProductState) -> None:
    Path(path).write_text(json.dumps(product_state_to_dict(state)))


def load_product_state(path: str | Path) -> ProductState:
    return product_state_from_dict(json.loads(Path(path).read_text()))
