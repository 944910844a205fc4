"""GF(2) linear algebra on int bitsets and packed uint64 matrices."""

from __future__ import annotations

import numpy as np


def rank_bitrows(rows: list[int]) -> int:
    """Rank over GF(2); each row is a python int bitset."""
    pivots: list[int] = []
    rank = 0
    for row in rows:
        for p in pivots:
            low = p & -p
            if row & low:
                row ^= p
        if row:
            pivots.append(row)
            rank += 1
    return rank


def rref_bitrows(rows: list[int]) -> tuple[list[int], list[int]]:
    """Reduced rows and their pivot bit positions (lowest-bit pivoting)."""
    basis: list[int] = []
    pivot_bits: list[int] = []
    for row in rows:
        for b, p in zip(pivot_bits, basis):
            if (row >> b) & 1:
                row ^= p
        if row:
            b = (row & -row).bit_length() - 1
            # insert and back-reduce
            for i in range(len(basis)):
                if (basis[i] >> b) & 1:
                    basis[i] ^= row
            basis.append(row)
            pivot_bits.append(b)
    return basis, pivot_bits


def kernel_basis(columns: list[int], ncols: int) -> list[int]:
    """Basis of {v : sum_{i in v} columns[i] = 0} over GF(2).

    columns[i] is the i-th column as an int bitset; returned vectors are int
    bitsets over the column index set.
    """
    basis: list[int] = []        # reduced column images
    tags: list[int] = []         # which combination produced them
    kernel: list[int] = []
    for i in range(ncols):
        col, tag = columns[i], 1 << i
        for p, t in zip(basis, tags):
            low = p & -p
            if col & low:
                col ^= p
                tag ^= t
        if col:
            basis.append(col)
            tags.append(tag)
        else:
            kernel.append(tag)
    return kernel


def in_span(vec: int, basis_rows: list[int]) -> bool:
    for p in basis_rows:
        low = p & -p
        if vec & low:
            vec ^= p
    return vec == 0


def pack_rows(mat: np.ndarray) -> np.ndarray:
    """Pack a 0/1 matrix into uint64 words, little-endian within each word."""
    m, n = mat.shape
    words = (n + 63) // 64
    out = np.zeros((m, words), dtype=np.uint64)
    cols = np.arange(n)
    for w in range(words):
        sel = (cols >> 6) == w
        bits = (mat[:, sel].astype(np.uint64) << (cols[sel] & 63).astype(np.uint64))
        out[:, w] = bits.sum(axis=1, dtype=np.uint64) if bits.size else 0
    return out


def rank_packed(packed: np.ndarray, ncols: int) -> int:
    """Rank of a packed GF(2) matrix (destructive on a copy)."""
    work = packed.copy()
    m = work.shape[0]
    rank = 0
    row = 0
    for col in range(ncols):
        w, b = col >> 6, np.uint64(col & 63)
        cand = np.nonzero((work[row:, w] >> b) & np.uint64(1))[0]
        if cand.size == 0:
            continue
        piv = row + cand[0]
        if piv != row:
            work[[row, piv]] = work[[piv, row]]
        mask = ((work[:, w] >> b) & np.uint64(1)).astype(bool)
        mask[row] = False
        if mask.any():
            work[mask] ^= work[row]
        rank += 1
        row += 1
        if row == m:
            break
    return rank
