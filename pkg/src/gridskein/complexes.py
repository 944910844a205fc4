"""Chain complexes of grid diagrams: vectorized boundary assembly."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy import sparse as sp

from . import perms
from .algebra import GradedComplex, Ring, SignAssignmentMissing, SparseMatrix
from .grid import Bigrading, GridDiagram, UngradedMode


@lru_cache(maxsize=8)
def swap_rank_tables(n: int) -> dict[tuple[int, int], np.ndarray]:
    """rank -> rank of the permutation with rows a, b swapped, per pair."""
    table = perms.perm_table(n)
    out = {}
    for a in range(n):
        for b in range(a + 1, n):
            swapped = table.copy()
            swapped[:, [a, b]] = swapped[:, [b, a]]
            ranks = perms.ranks_of_array(swapped.astype(np.int64))
            out[(a, b)] = ranks
            out[(b, a)] = ranks
    return out


def gradings_array(g: GridDiagram) -> tuple[np.ndarray, np.ndarray]:
    """Doubled Maslov and Alexander gradings for all n! generators."""
    if g.mode != "oriented":
        raise UngradedMode("gradings need the O/X distinction")
    n = g.n
    table = perms.perm_table(n).astype(np.int64)
    N = table.shape[0]

    j_xx = np.zeros(N, dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            j_xx += 2 * (table[:, i] < table[:, j]).astype(np.int64)

    def j_x_markers(cols) -> np.ndarray:
        # generator point (2 perm[i], 2 i) against marker (2 c + 1, 2 r + 1)
        acc = np.zeros(N, dtype=np.int64)
        for i in range(n):
            xi = 2 * table[:, i]
            for r, c in enumerate(cols):
                mx, my = 2 * c + 1, 2 * r + 1
                acc += ((xi < mx) & (2 * i < my)).astype(np.int64)
                acc += ((mx < xi) & (my < 2 * i)).astype(np.int64)
        return acc

    def j_mm(cols_a, cols_b) -> int:
        acc = 0
        for ra, ca in enumerate(cols_a):
            for rb, cb in enumerate(cols_b):
                if ca < cb and ra < rb:
                    acc += 1
                if cb < ca and rb < ra:
                    acc += 1
        return acc

    j_xo = j_x_markers(g.o_cols)
    j_xX = j_x_markers(g.x_cols)
    j_oo = j_mm(g.o_cols, g.o_cols)
    j_XX = j_mm(g.x_cols, g.x_cols)
    maslov2 = j_xx - 2 * j_xo + j_oo + 2
    alex2 = j_xX - j_xo - j_XX // 2 + j_oo // 2 - (n - 1)
    return maslov2, alex2


def grading_pieces(g: GridDiagram) -> dict[Bigrading, np.ndarray]:
    maslov2, alex2 = gradings_array(g)
    pieces: dict[Bigrading, np.ndarray] = {}
    keys = maslov2 * (1 << 32) + alex2  # alex2 fits well inside 32 bits
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    boundaries = np.nonzero(np.diff(sorted_keys))[0] + 1
    for chunk in np.split(order, boundaries):
        i = int(chunk[0])
        pieces[Bigrading(int(maslov2[i]), int(alex2[i]))] = np.sort(chunk).astype(np.int64)
    return pieces


def boundary_matrix(g: GridDiagram, ring: Ring, signs=None,
                    piece_cap: int | None = None) -> GradedComplex:
    """The grid differential as a sparse matrix over the full n! basis.

    Over Z a sign table (see signs.sign_table_array) is required; the entry
    for a rectangle from x to y is its solved sign.  Oriented diagrams block
    both marker types, X-only diagrams block the X's.
    """
    n = g.n
    if ring == "Z" and signs is None:
        raise SignAssignmentMissing(f"Z coefficients need a sign assignment for n={n}")
    table = perms.perm_table(n).astype(np.int64)
    N = table.shape[0]
    swaps = swap_rank_tables(n)
    stab = None
    if ring == "Z":
        from .signs import sign_table_array
        stab = sign_table_array(signs, n)
    cells = sorted(g.marker_cells)
    rows_acc, cols_acc, data_acc = [], [], []
    for a in range(n):
        pa = table[:, a]
        for b in range(n):
            if a == b:
                continue
            d = (b - a) % n
            width = (table[:, b] - pa) % n
            ok = np.ones(N, dtype=bool)
            for step in range(1, d):
                t = (a + step) % n
                rel = (table[:, t] - pa) % n
                np.logical_and(ok, ~((rel > 0) & (rel < width)), out=ok)
            for mr, mc in cells:
                if (mr - a) % n < d:
                    relm = (mc - pa) % n
                    np.logical_and(ok, ~(relm < width), out=ok)
            idx = np.nonzero(ok)[0]
            if idx.size == 0:
                continue
            cols_acc.append(idx)
            rows_acc.append(swaps[(a, b)][idx])
            if ring == "F2":
                data_acc.append(np.ones(idx.size, dtype=np.int64))
            else:
                data_acc.append(stab[idx, a, b].astype(np.int64))
    if rows_acc:
        mat = sp.coo_matrix((np.concatenate(data_acc),
                             (np.concatenate(rows_acc), np.concatenate(cols_acc))),
                            shape=(N, N), dtype=np.int64)
    else:
        mat = sp.coo_matrix((N, N), dtype=np.int64)
    boundary = SparseMatrix(mat, ring)
    if g.mode == "oriented":
        pieces = grading_pieces(g)
    else:
        pieces = {None: np.arange(N, dtype=np.int64)}
    cx = GradedComplex(ring=ring, boundary=boundary, pieces=pieces)
    if piece_cap is not None:
        cx.piece_cap = piece_cap
    return cx


def differential_terms(g: GridDiagram, perm: tuple[int, ...], ring: Ring,
                       signs=None) -> dict[tuple[int, ...], int]:
    """Matrix-free boundary of one generator (any grid size)."""
    from .grid import rectangle_interior_clear, markers_in_rect
    n = g.n
    cells = g.marker_cells
    out: dict[tuple[int, ...], int] = {}
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            if not rectangle_interior_clear(perm, a, b, n):
                continue
            if markers_in_rect(cells, a, b, perm[a], perm[b], n):
                continue
            dst = list(perm)
            dst[a], dst[b] = dst[b], dst[a]
            dst = tuple(dst)
            coeff = 1 if ring == "F2" else signs.sign(perm, a, b)
            out[dst] = out.get(dst, 0) + coeff
    if ring == "F2":
        out = {p_: v % 2 for p_, v in out.items()}
    return {p_: v for p_, v in out.items() if v}
