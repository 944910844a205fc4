"""Permutation ranking, unranking and parity via Lehmer codes.

Generators of a grid complex are bijections row -> vertical circle.  They are
stored as tuples and addressed by their Lehmer rank in [0, n!), so bases of
size n! never need to be materialized to index a matrix.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator

import numpy as np

FACTORIALS = [1]
for _k in range(1, 21):
    FACTORIALS.append(FACTORIALS[-1] * _k)


def factorial(n: int) -> int:
    return FACTORIALS[n]


def rank_of(perm: tuple[int, ...]) -> int:
    """Lehmer rank of a permutation of {0..n-1}; identity has rank 0."""
    n = len(perm)
    rank = 0
    for i in range(n):
        smaller = sum(1 for j in range(i + 1, n) if perm[j] < perm[i])
        rank += smaller * FACTORIALS[n - 1 - i]
    return rank


def unrank(n: int, rank: int) -> tuple[int, ...]:
    """Inverse of rank_of; rank must lie in [0, n!)."""
    if not 0 <= rank < FACTORIALS[n]:
        raise ValueError(f"rank {rank} out of range for n={n}")
    avail = list(range(n))
    out = []
    for i in range(n):
        f = FACTORIALS[n - 1 - i]
        idx, rank = divmod(rank, f)
        out.append(avail.pop(idx))
    return tuple(out)


def iter_perms(n: int) -> Iterator[tuple[int, ...]]:
    """All permutations of {0..n-1} in rank order."""
    for r in range(FACTORIALS[n]):
        yield unrank(n, r)


def sign_of(perm: tuple[int, ...]) -> int:
    """Parity sign (+1/-1) of a permutation."""
    n = len(perm)
    inv = 0
    for i in range(n):
        for j in range(i + 1, n):
            if perm[j] < perm[i]:
                inv += 1
    return -1 if inv & 1 else 1


def inverse(perm: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, v in enumerate(perm):
        inv[v] = i
    return tuple(inv)


@lru_cache(maxsize=8)
def perm_table(n: int) -> np.ndarray:
    """All n! permutations in rank order as an (n!, n) int8 array."""
    if n > 9:
        raise ValueError("perm_table is meant for n <= 9")
    total = FACTORIALS[n]
    table = np.empty((total, n), dtype=np.int8)
    # Build recursively from the (n-1)-table: rank = idx * (n-1)! + subrank,
    # where idx selects which of the remaining values goes first.
    if n == 1:
        table[0, 0] = 0
        return table
    sub = perm_table(n - 1)
    block = FACTORIALS[n - 1]
    for idx in range(n):
        rest = np.array([v for v in range(n) if v != idx], dtype=np.int8)
        table[idx * block:(idx + 1) * block, 0] = idx
        table[idx * block:(idx + 1) * block, 1:] = rest[sub]
    return table


def ranks_of_array(perms: np.ndarray) -> np.ndarray:
    """Vectorized Lehmer ranks of an (m, n) array of permutations."""
    m, n = perms.shape
    ranks = np.zeros(m, dtype=np.int64)
    for i in range(n):
        smaller = np.zeros(m, dtype=np.int64)
        for j in range(i + 1, n):
            smaller += perms[:, j] < perms[:, i]
        ranks += smaller * FACTORIALS[n - 1 - i]
    return ranks


@lru_cache(maxsize=8)
def parity_table(n: int) -> np.ndarray:
    """Per-rank permutation sign (+1/-1) as an int8 array of length n!."""
    perms = perm_table(n).astype(np.int16)
    m = perms.shape[0]
    inv = np.zeros(m, dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            inv += perms[:, j] < perms[:, i]
    return np.where(inv & 1, -1, 1).astype(np.int8)
