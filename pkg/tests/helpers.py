"""Shared generators and small independent oracles for the test suite."""

from __future__ import annotations

import numpy as np

from ksep import DensityMatrix, ProductState, make_density_matrix


def random_density(rng: np.random.Generator, dims) -> DensityMatrix:
    """Full-rank random density matrix (Wishart-style)."""
    size = int(np.prod(dims))
    g = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    mat = g @ g.conj().T
    mat /= np.trace(mat).real
    return make_density_matrix(dims, mat)


def random_vector(rng: np.random.Generator, size: int) -> np.ndarray:
    v = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return v / np.linalg.norm(v)


def random_product_state(rng: np.random.Generator, dims) -> ProductState:
    return ProductState(tuple(random_vector(rng, d) for d in dims))


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a Ginibre matrix."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_partition_blocks(rng: np.random.Generator, n: int, k: int) -> list[list[int]]:
    """Random partition of range(n) into exactly k nonempty blocks."""
    while True:
        labels = rng.integers(0, k, size=n)
        if len(set(labels.tolist())) == k:
            break
    blocks: dict[int, list[int]] = {}
    for index, label in enumerate(labels.tolist()):
        blocks.setdefault(label, []).append(index)
    return list(blocks.values())


def assemble_blocks(blocks, block_vectors, dims) -> np.ndarray:
    """Tensor several block states together and reorder the axes to site order."""
    order = [site for block in blocks for site in block]
    tensor = np.array(1.0, dtype=complex)
    for block, vec in zip(blocks, block_vectors):
        tensor = np.multiply.outer(tensor, vec.reshape(tuple(dims[s] for s in block)))
    tensor = tensor.reshape(tuple(dims[s] for s in order))
    return np.transpose(tensor, np.argsort(order)).reshape(-1)


def random_ksep_pure_vector(rng: np.random.Generator, dims, k: int) -> np.ndarray:
    """Random pure state separable into at least k blocks (k' drawn in [k, n])."""
    n = len(dims)
    k_actual = int(rng.integers(k, n + 1))
    blocks = random_partition_blocks(rng, n, k_actual)
    vectors = [
        random_vector(rng, int(np.prod([dims[s] for s in block]))) for block in blocks
    ]
    return assemble_blocks(blocks, vectors, dims)


def random_ksep_density(
    rng: np.random.Generator, dims, k: int, terms: int = 4
) -> DensityMatrix:
    """Random k-separable mixed state, mixing components over different partitions."""
    size = int(np.prod(dims))
    weights = rng.random(terms)
    weights /= weights.sum()
    mat = np.zeros((size, size), dtype=complex)
    for w in weights:
        vec = random_ksep_pure_vector(rng, dims, k)
        mat += w * np.outer(vec, vec.conj())
    return make_density_matrix(dims, mat)


def single_site_state(matrix: np.ndarray, dims, site: int) -> np.ndarray:
    """Reduced state of one subsystem, tracing out all others."""
    import string

    n = len(dims)
    tensor = matrix.reshape(tuple(dims) * 2)
    row = list(string.ascii_lowercase[:n])
    col = [row[i] if i != site else string.ascii_lowercase[n] for i in range(n)]
    subscript = "".join(row) + "".join(col) + "->" + row[site] + col[site]
    return np.einsum(subscript, tensor)


def bell_number(n: int) -> int:
    """Bell numbers via the Bell triangle (independent of the package)."""
    if n < 1:
        return 1
    row = [1]
    for _ in range(n - 1):
        nxt = [row[-1]]
        for value in row:
            nxt.append(nxt[-1] + value)
        row = nxt
    return row[-1]
