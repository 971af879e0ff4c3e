"""Partitions of subsystem indices into exactly k nonempty blocks."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator


@dataclass(frozen=True)
class Partition:
    """A division of {0..n-1} into disjoint nonempty blocks.

    Canonical form: indices sorted inside each block, blocks ordered by
    their smallest element. Enumeration always yields this form, which keeps
    reports and per-partition term lists stable from run to run.
    """

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        blocks = tuple(tuple(int(i) for i in block) for block in self.blocks)
        if not blocks or any(not block for block in blocks):
            raise ValueError("blocks must be nonempty")
        seen: set[int] = set()
        for block in blocks:
            if list(block) != sorted(block):
                raise ValueError(f"block {block} is not sorted")
            if seen & set(block):
                raise ValueError("blocks must be disjoint")
            seen.update(block)
        n = len(seen)
        if seen != set(range(n)):
            raise ValueError("blocks must cover 0..n-1 without gaps")
        if [b[0] for b in blocks] != sorted(b[0] for b in blocks):
            raise ValueError("blocks must be ordered by smallest element")
        object.__setattr__(self, "blocks", blocks)

    @property
    def n(self) -> int:
        return sum(len(block) for block in self.blocks)

    @property
    def k(self) -> int:
        return len(self.blocks)

    def label(self) -> str:
        """Render as e.g. ``{0|1,2}``."""
        return "{" + "|".join(",".join(str(i) for i in b) for b in self.blocks) + "}"


def _check_range(n: int, k: int) -> None:
    if not 2 <= k <= n:
        raise ValueError(f"block count k={k} must satisfy 2 <= k <= n={n}")


def enumerate_partitions(n: int, k: int) -> Iterator[Partition]:
    """Yield every partition of {0..n-1} into exactly k blocks.

    Partitions are generated from restricted-growth strings in ascending
    lexicographic order, so the sequence is deterministic and free of
    duplicates.
    """
    _check_range(n, k)
    labels = [0] * n

    def descend(pos: int, used: int) -> Iterator[Partition]:
        if pos == n:
            if used == k:
                blocks: list[list[int]] = [[] for _ in range(k)]
                for index, label in enumerate(labels):
                    blocks[label].append(index)
                yield Partition(tuple(tuple(b) for b in blocks))
            return
        cap = min(used, k - 1)
        for label in range(cap + 1):
            grown = used + (1 if label == used else 0)
            if grown + (n - pos - 1) >= k:
                labels[pos] = label
                yield from descend(pos + 1, grown)

    yield from descend(0, 0)


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if k == 0:
        return 1 if n == 0 else 0
    if k > n:
        return 0
    if k == n:
        return 1
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


def count_partitions(n: int, k: int) -> int:
    """Number of partitions of {0..n-1} into exactly k blocks (no enumeration)."""
    _check_range(n, k)
    return _stirling2(n, k)
