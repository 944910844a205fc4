"""The one-crossing skein triple and its chain maps.

Given a grid diagram with a crossing region in the canonical local form, the
three diagrams G_0 (crossing), G_1 and G_2 (the two resolutions) share every
marker and differ only in which corridor curve is used.  This module builds
the triple, the maps

    f_k   = pentagons + triangles      : C_k -> C_{k+1}
    phi_k = hexagons + quadrilaterals  : C_k -> C_{k+2}
    psi_k = heptagons                  : C_k -> C_k

over F2 and Z, and verifies the chain-level identities and the exactness of
the induced triangle on homology.

The crossing region (rows W..W+3, corridor columns q, q+1) of a flat input:

    state 0 (crossing):    column q holds rows {W, W+3}, q+1 holds {W+1, W+2}
    state 1 (resolution):  column q holds rows {W, W+1}, q+1 holds {W+2, W+3}
    state 2 (resolution):  column q holds rows {W, W+2}, q+1 holds {W+1, W+3}

with the row-(W+1) partner east of column q+1 and the row-(W+2) partner west
of column q (these make state 0 an honest crossing of the two strands).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy import sparse as sp

from . import geometry, perms
from .algebra import (GradedComplex, Ring, SignAssignmentMissing, SparseMatrix,
                      homology, mapping_cone)
from .complexes import boundary_matrix, gradings_array, swap_rank_tables
from .geometry import EAST, WEST, Corridor
from .grid import GridDiagram, grid_to_planar


class PatternMismatch(ValueError):
    """The designated region is not in the canonical crossing form."""


class NonHomogeneous(ValueError):
    """A map failed to shift the delta grading by one constant."""


STATE_LAYOUTS = geometry.STATE_LEFT_ROWS


def detect_state(g: GridDiagram, window: int, q: int) -> int:
    """Which of the three corridor layouts the flat diagram carries."""
    n = g.n
    if window + geometry.WINDOW_ROWS > n or q + 1 >= n:
        raise PatternMismatch("crossing region does not fit inside the grid")
    left_rows = set(g.col_rows(q))
    right_rows = set(g.col_rows(q + 1))
    expect_rows = {window + i for i in range(geometry.WINDOW_ROWS)}
    if left_rows | right_rows != expect_rows or left_rows & right_rows:
        raise PatternMismatch("corridor columns do not hold the four region markers")
    for state, left in STATE_LAYOUTS.items():
        if left_rows == {window + d for d in left}:
            break
    else:
        raise PatternMismatch("corridor marker rows match no resolution state")
    # partner directions make state 0 a genuine crossing
    r1 = window + 1
    (c1,) = [c for c in g.row_cols(r1) if c not in (q, q + 1)] or [None]
    r2 = window + 2
    (c2,) = [c for c in g.row_cols(r2) if c not in (q, q + 1)] or [None]
    if c1 is None or c1 <= q + 1:
        raise PatternMismatch("row W+1 partner must sit east of the corridor")
    if c2 is None or c2 >= q:
        raise PatternMismatch("row W+2 partner must sit west of the corridor")
    return state


@dataclass
class SkeinTriple:
    """The three X-only diagrams of one crossing plus the corridor geometry."""

    corridor: Corridor
    input_state: int
    outside_cells: frozenset[tuple[int, int]]
    diagrams: dict[int, GridDiagram]
    oriented: dict[int, GridDiagram] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.corridor.n

    def complex(self, k: int, ring: Ring, signs=None) -> GradedComplex:
        return boundary_matrix(self.diagrams[k], ring, signs=signs)

    def extra_markers(self) -> list[tuple[int, int]]:
        """Non-corridor markers as (row, x offset from the circle)."""
        n32 = 32 * self.n
        out = []
        for r, ccol in sorted(self.outside_cells):
            off = (32 * (ccol - self.corridor.circle) + 16) % n32
            if off > n32 - 32:
                off -= n32
            out.append((r, off))
        return out


def build_skein_triple(g: GridDiagram, anchor: tuple[int, int] | None = None,
                       oriented: dict[int, GridDiagram] | None = None) -> SkeinTriple:
    """Build the triple from a flat diagram whose region matches the pattern.

    anchor is (window row, left corridor column); when omitted, the unique
    matching region is searched for.  The input may be any of the three
    states; which one it was is recorded.
    """
    base = g.forget() if g.mode == "oriented" else g
    n = base.n
    candidates = []
    if anchor is not None:
        candidates.append(anchor)
    else:
        for w in range(n - geometry.WINDOW_ROWS + 1):
            for q in range(n - 1):
                try:
                    detect_state(base, w, q)
                except PatternMismatch:
                    continue
                candidates.append((w, q))
        if not candidates:
            raise PatternMismatch("no crossing region in canonical form found")
        if len(candidates) > 1:
            raise PatternMismatch(f"ambiguous crossing region: {candidates}")
    window, q = candidates[0]
    state = detect_state(base, window, q)
    cor = Corridor(n=n, window=window, q=q)
    outside = frozenset(c for c in base.marker_cells if c[1] not in (q, q + 1))
    diagrams = {}
    for k in range(3):
        cells = set(outside) | cor.flat_corridor_cells(k)
        diagrams[k] = GridDiagram.x_only(cells)
    if diagrams[state].marker_cells != base.marker_cells:
        raise PatternMismatch("corridor reconstruction failed")
    return SkeinTriple(corridor=cor, input_state=state, outside_cells=outside,
                       diagrams=diagrams, oriented=dict(oriented or {}))


# -- map assembly ------------------------------------------------------------

MapKind = Literal["f", "phi", "psi"]

_RECT_OF = {"f": "pentagon", "phi": "hexagon", "psi": "heptagon"}
_TRI_OF = {"f": "triangle", "phi": "quad"}
_SHIFT_OF = {"f": 1, "phi": 2, "psi": 0}


@lru_cache(maxsize=4096)
def _cached_candidates(cor: Corridor, extra: tuple, kind: str, k: int):
    rect = geometry.rect_like_candidates(cor, _RECT_OF[kind], k, list(extra))
    tri = (geometry.tri_like_candidates(cor, _TRI_OF[kind], k, list(extra))
           if kind in _TRI_OF else [])
    return rect, tri


def map_candidates(cor: Corridor, extra: list[tuple[int, int]], kind: MapKind, k: int):
    rect, tri = _cached_candidates(cor, tuple(extra), kind, k)
    if kind == "psi" and any(c.side == WEST for c in rect):
        raise AssertionError("left-domain heptagon candidate survived")
    return rect, tri


def polygon_count_report(cor: Corridor, extra, kind: MapKind, k: int) -> dict:
    rect, tri = map_candidates(cor, extra, kind, k)
    return {"kind": kind, "k": k,
            "rect_candidates": len(rect), "tri_candidates": len(tri),
            "rect_sides": sorted({c.side for c in rect})}


def build_chain_map(triple: SkeinTriple, kind: MapKind, k: int, ring: Ring,
                    signs=None, twist: bool = False) -> SparseMatrix:
    """Materialize f_k / phi_k / psi_k as a sparse matrix on the n! bases.

    Over Z, pentagons and hexagons are weighted by the sign of their
    straightened rectangle (right-domain pentagons negated), triangles and
    quadrilaterals by the signature of the source generator, and heptagons by
    minus their straightened sign; `twist` flips the triangle-like weights
    (the cube's modification rule).
    """
    cor = triple.corridor
    n = cor.n
    N = perms.factorial(n)
    if ring == "Z" and signs is None:
        raise SignAssignmentMissing(f"Z coefficients need signs for n={n}")
    stab = None
    if ring == "Z":
        from .signs import sign_table_array
        stab = sign_table_array(signs, n)
    table = perms.perm_table(n).astype(np.int64)
    swaps = swap_rank_tables(n)
    circle = cor.circle
    rect, tri = map_candidates(cor, triple.extra_markers(), kind, k)
    rows_acc, cols_acc, data_acc = [], [], []

    col_of = {}
    for a in range(n):
        col_of[a] = np.nonzero(table[:, a] == circle)[0]

    for cand in rect:
        sub = col_of[cand.arow]
        bottom, top = cand.bottom, cand.top
        pb = table[sub, bottom]
        width = (table[sub, top] - pb) % n
        span = (top - bottom) % n
        ok = np.ones(sub.size, dtype=bool)
        for step in range(1, span):
            t = (bottom + step) % n
            rel = (table[sub, t] - pb) % n
            np.logical_and(ok, ~((rel > 0) & (rel < width)), out=ok)
        j2 = table[sub, cand.brow]
        if cand.side == EAST:
            dist = (j2 - circle) % n
        else:
            dist = (circle - j2) % n
        np.logical_and(ok, dist <= cand.demax, out=ok)
        idx = sub[ok]
        if idx.size == 0:
            continue
        cols_acc.append(idx)
        rows_acc.append(swaps[(cand.arow, cand.brow)][idx])
        if ring == "F2":
            data_acc.append(np.ones(idx.size, dtype=np.int64))
        else:
            s = stab[idx, bottom, top].astype(np.int64)
            if kind == "f" and cand.side == EAST:
                s = -s      # right-domain pentagons flip sign
            elif kind == "psi":
                s = -s      # heptagons carry minus their straightening
            data_acc.append(s)

    if tri:
        parity = perms.parity_table(n).astype(np.int64)
        for cand in tri:
            idx = col_of[cand.arow]
            if idx.size == 0:
                continue
            cols_acc.append(idx)
            rows_acc.append(idx)  # same permutation in the target complex
            if ring == "F2":
                data_acc.append(np.ones(idx.size, dtype=np.int64))
            else:
                s = parity[idx].copy()
                if twist:
                    s = -s
                data_acc.append(s)

    if rows_acc:
        mat = sp.coo_matrix((np.concatenate(data_acc),
                             (np.concatenate(rows_acc), np.concatenate(cols_acc))),
                            shape=(N, N), dtype=np.int64)
    else:
        mat = sp.coo_matrix((N, N), dtype=np.int64)
    return SparseMatrix(mat, ring)


def chain_map_terms(cor: Corridor, extra: list[tuple[int, int]], kind: MapKind,
                    k: int, perm: tuple[int, ...], ring: Ring, signs=None,
                    twist: bool = False) -> dict[tuple[int, ...], int]:
    """Matrix-free evaluation of one map on one generator (any grid size)."""
    n = cor.n
    circle = cor.circle
    inv = perms.inverse(perm)
    arow = inv[circle]
    out: dict[tuple[int, ...], int] = {}
    rect, tri = map_candidates(cor, extra, kind, k)
    for cand in rect:
        if cand.arow != arow:
            continue
        bottom, top = cand.bottom, cand.top
        pb = perm[bottom]
        width = (perm[top] - pb) % n
        span = (top - bottom) % n
        if any(0 < (perm[(bottom + s) % n] - pb) % n < width for s in range(1, span)):
            continue
        j2 = perm[cand.brow]
        dist = (j2 - circle) % n if cand.side == EAST else (circle - j2) % n
        if dist > cand.demax:
            continue
        dst = list(perm)
        dst[cand.arow], dst[cand.brow] = dst[cand.brow], dst[cand.arow]
        dst = tuple(dst)
        if ring == "F2":
            coeff = 1
        else:
            coeff = signs.sign(perm, bottom, top)
            if (kind == "f" and cand.side == EAST) or kind == "psi":
                coeff = -coeff
        out[dst] = out.get(dst, 0) + coeff
    for cand in tri:
        if cand.arow != arow:
            continue
        coeff = 1 if ring == "F2" else perms.sign_of(perm) * (-1 if twist else 1)
        out[perm] = out.get(perm, 0) + coeff
    if ring == "F2":
        out = {p: v % 2 for p, v in out.items()}
    return {p: v for p, v in out.items() if v}


# -- identity checks -----------------------------------------------------------

@dataclass
class TripleMaps:
    ring: Ring
    d: dict[int, SparseMatrix]
    f: dict[int, SparseMatrix]
    phi: dict[int, SparseMatrix]
    psi: dict[int, SparseMatrix]


def build_triple_maps(triple: SkeinTriple, ring: Ring, signs=None) -> TripleMaps:
    d = {k: triple.complex(k, ring, signs=signs).boundary for k in range(3)}
    f = {k: build_chain_map(triple, "f", k, ring, signs) for k in range(3)}
    phi = {k: build_chain_map(triple, "phi", k, ring, signs) for k in range(3)}
    psi = {k: build_chain_map(triple, "psi", k, ring, signs) for k in range(3)}
    return TripleMaps(ring=ring, d=d, f=f, phi=phi, psi=psi)


def check_chain_identity(m: TripleMaps, k: int) -> bool:
    """d f_k + f_k d = 0 (chain map over F2, anti-chain map over Z)."""
    lhs = m.d[(k + 1) % 3] @ m.f[k] + m.f[k] @ m.d[k]
    return lhs.is_zero()


def check_condition1(m: TripleMaps, k: int) -> bool:
    """f_{k+1} f_k + d phi_k + phi_k d = 0."""
    lhs = m.f[(k + 1) % 3] @ m.f[k] + m.d[(k + 2) % 3] @ m.phi[k] + m.phi[k] @ m.d[k]
    return lhs.is_zero()


def check_condition2(m: TripleMaps, k: int) -> bool:
    """phi_{k+1} f_k + f_{k+2} phi_k + d psi_k + psi_k d = identity."""
    lhs = (m.phi[(k + 1) % 3] @ m.f[k] + m.f[(k + 2) % 3] @ m.phi[k]
           + m.d[k] @ m.psi[k] + m.psi[k] @ m.d[k])
    return lhs == SparseMatrix.identity(lhs.shape[0], m.ring)


def check_summand_chain_identities(triple: SkeinTriple, m: TripleMaps, k: int,
                                   signs=None) -> bool:
    """Pentagons and triangles are separately (anti-)chain maps."""
    tri = _triangle_only_matrix(triple, k, m.ring, signs)
    pent = m.f[k] + tri.scaled(-1)
    ok = (m.d[(k + 1) % 3] @ pent + pent @ m.d[k]).is_zero()
    return ok and (m.d[(k + 1) % 3] @ tri + tri @ m.d[k]).is_zero()


def _triangle_only_matrix(triple: SkeinTriple, k: int, ring: Ring, signs=None) -> SparseMatrix:
    cor = triple.corridor
    n = cor.n
    N = perms.factorial(n)
    table = perms.perm_table(n)
    tri = geometry.tri_like_candidates(cor, "triangle", k, triple.extra_markers())
    rows, cols, data = [], [], []
    parity = perms.parity_table(n).astype(np.int64)
    for cand in tri:
        idx = np.nonzero(table[:, cand.arow] == cor.circle)[0]
        rows.append(idx)
        cols.append(idx)
        data.append(np.ones(idx.size, dtype=np.int64) if ring == "F2" else parity[idx])
    if rows:
        mat = sp.coo_matrix((np.concatenate(data),
                             (np.concatenate(rows), np.concatenate(cols))),
                            shape=(N, N), dtype=np.int64)
    else:
        mat = sp.coo_matrix((N, N), dtype=np.int64)
    return SparseMatrix(mat, ring)


# -- homology-level verification ----------------------------------------------

@dataclass
class TriangleReport:
    ring: Ring
    basis_size: int
    parity_ok: dict[int, bool]
    condition1_ok: dict[int, bool]
    condition2_ok: dict[int, bool]
    homology_ranks: dict[int, int]
    induced_ranks: dict[int, int]
    exact: dict[int, bool]
    cone_rank: int | None = None
    cone_matches: bool | None = None

    def all_ok(self) -> bool:
        checks = (list(self.parity_ok.values()) + list(self.condition1_ok.values())
                  + list(self.condition2_ok.values()) + list(self.exact.values()))
        if self.cone_matches is not None:
            checks.append(self.cone_matches)
        return all(checks)

    def to_json(self) -> dict:
        return {
            "ring": self.ring,
            "basis_size": self.basis_size,
            "chain_maps": self.parity_ok,
            "condition1": self.condition1_ok,
            "condition2": self.condition2_ok,
            "homology_ranks": self.homology_ranks,
            "induced_ranks": self.induced_ranks,
            "exact": self.exact,
            "cone_rank": self.cone_rank,
            "cone_matches": self.cone_matches,
        }


def _f2_homology_data(d: SparseMatrix):
    """(kernel bitset basis, image bitset basis) of one differential."""
    from . import gf2
    n = d.shape[1]
    cols = []
    mat = d.mat.tocsc()
    for j in range(n):
        col = 0
        for i in mat.indices[mat.indptr[j]:mat.indptr[j + 1]]:
            col |= 1 << int(i)
        cols.append(col)
    kernel = gf2.kernel_basis(cols, n)
    image = [c for c in cols if c]
    return kernel, image


def _f2_rank(vectors: list[int]) -> int:
    from . import gf2
    return gf2.rank_bitrows(vectors)


def _induced_rank_f2(f: SparseMatrix, ker_src: list[int], img_src_target: list[int]) -> int:
    """Rank of the induced map H(src) -> H(dst) over F2."""
    mat = f.mat.tocsc()
    n = f.shape[1]
    images = []
    for vec in ker_src:
        out = 0
        v = vec
        while v:
            j = (v & -v).bit_length() - 1
            v &= v - 1
            col = 0
            for i, val in zip(mat.indices[mat.indptr[j]:mat.indptr[j + 1]],
                              mat.data[mat.indptr[j]:mat.indptr[j + 1]]):
                if val % 2:
                    col |= 1 << int(i)
            out ^= col
        images.append(out)
    base = _f2_rank(img_src_target)
    return _f2_rank(img_src_target + images) - base


def _q_rank(mat: list[list[int]]) -> int:
    from .smith import smith_normal_form
    if not mat or not mat[0]:
        return 0
    return smith_normal_form(mat, check=False).rank


def _induced_rank_z(f: SparseMatrix, ker_src: list[list[int]], d_target: SparseMatrix) -> int:
    fk = [[sum(int(f.mat[i, j]) * col[j] for j in range(len(col))) for col in ker_src]
          for i in range(f.shape[0])]
    dt = d_target.dense_rows()
    img_cols = [[row[j] for row in dt] for j in range(d_target.shape[1])]
    img_cols = [c for c in img_cols if any(c)]
    base = _q_rank([list(r) for r in zip(*img_cols)]) if img_cols else 0
    both = img_cols + [[fk[i][t] for i in range(f.shape[0])] for t in range(len(ker_src))]
    joint = _q_rank([list(r) for r in zip(*both)]) if both else 0
    return joint - base


def verify_triangle(triple: SkeinTriple, ring: Ring, signs=None,
                    with_cone: bool = True) -> TriangleReport:
    """Chain identities, exactness at the three nodes, and the cone check.

    Exactness at node k+1 holds iff dim H(C_{k+1}) equals the sum of the
    induced ranks of f_k and f_{k+1}; over Z the free (rational) ranks are
    used.  The mapping-cone formulation compares rank H(cone f_1) with
    rank H(C_0).
    """
    m = build_triple_maps(triple, ring, signs=signs)
    report = TriangleReport(ring=ring, basis_size=perms.factorial(triple.n),
                            parity_ok={}, condition1_ok={}, condition2_ok={},
                            homology_ranks={}, induced_ranks={}, exact={})
    for k in range(3):
        report.parity_ok[k] = check_chain_identity(m, k)
        report.condition1_ok[k] = check_condition1(m, k)
        report.condition2_ok[k] = check_condition2(m, k)
    if not all(report.parity_ok.values()):
        return report
    if ring == "F2":
        data = {k: _f2_homology_data(m.d[k]) for k in range(3)}
        for k in range(3):
            ker, img = data[k]
            report.homology_ranks[k] = _f2_rank(ker) - _f2_rank(img)
        for k in range(3):
            ker, _ = data[k]
            _, img_t = data[(k + 1) % 3]
            report.induced_ranks[k] = _induced_rank_f2(m.f[k], ker, img_t)
    else:
        from .smith import kernel_lattice
        kers, ranks = {}, {}
        for k in range(3):
            dm = m.d[k].dense_rows()
            _, ker = kernel_lattice(dm)
            kers[k] = ker
            ranks[k] = len(ker) - _q_rank(dm)
            report.homology_ranks[k] = ranks[k]
        for k in range(3):
            report.induced_ranks[k] = _induced_rank_z(m.f[k], kers[k], m.d[(k + 1) % 3])
    for k in range(3):
        report.exact[k] = (report.homology_ranks[(k + 1) % 3]
                           == report.induced_ranks[k] + report.induced_ranks[(k + 1) % 3])
    if with_cone:
        parity = "chain" if ring == "F2" else "anti"
        cone = mapping_cone(m.f[1], m.d[1], m.d[2], parity=parity)
        cone_h = homology(cone, check=False)
        report.cone_rank = cone_h.total_rank()
        report.cone_matches = report.cone_rank == report.homology_ranks[0]
    return report


# -- delta-grading shifts -------------------------------------------------------

def delta_shift(triple: SkeinTriple, k: int, signs=None) -> int:
    """Doubled delta shift of f_k, verified homogeneous over its entries.

    Requires oriented diagrams for C_k and C_{k+1} in triple.oriented.
    """
    src = triple.oriented.get(k)
    dst = triple.oriented.get((k + 1) % 3)
    if src is None or dst is None:
        raise ValueError("delta shifts need oriented diagrams for both ends")
    f = build_chain_map(triple, "f", k, "F2")
    m_s, a_s = gradings_array(src)
    m_d, a_d = gradings_array(dst)
    delta_src = a_s - m_s
    delta_dst = a_d - m_d
    coo = f.mat.tocoo()
    if coo.nnz == 0:
        raise NonHomogeneous(f"f_{k} is zero; no shift to measure")
    shifts = delta_dst[coo.row] - delta_src[coo.col]
    values = np.unique(shifts)
    if values.size != 1:
        raise NonHomogeneous(f"f_{k} carries delta shifts {sorted(values.tolist())}")
    return int(values[0])


def crossing_sign_of_state0(triple: SkeinTriple) -> int:
    g0 = triple.oriented.get(0)
    if g0 is None:
        raise ValueError("need an oriented crossing diagram")
    pl = grid_to_planar(g0)
    cor = triple.corridor
    for c in pl.crossings:
        if c.col == cor.q and c.row == cor.window + 2:
            return c.sign
    raise PatternMismatch("no crossing at the corridor in the oriented diagram")


def expected_delta_shifts2(triple: SkeinTriple) -> dict[int, int]:
    """Doubled predicted shifts of f_0, f_1, f_2 from the crossing sign.

    At a positive crossing the shifts are (-e/2, +(e+1)/2, +1/2) and at a
    negative one (+1/2, +(1-e)/2, +e/2), where e is the negative-crossing
    difference between the unoriented-resolution diagram and the crossing
    diagram.
    """
    sign = crossing_sign_of_state0(triple)
    h_index = 1 if sign > 0 else 2
    dh = grid_to_planar(triple.oriented[h_index])
    d0 = grid_to_planar(triple.oriented[0])
    # e is measured against the positive-crossing diagram: switching the
    # negative crossing of the input removes one negative crossing
    neg_plus = d0.negative_crossings() - (0 if sign > 0 else 1)
    e = dh.negative_crossings() - neg_plus
    if sign > 0:
        return {0: -e, 1: e + 1, 2: 1}
    return {0: 1, 1: 1 - e, 2: e}
