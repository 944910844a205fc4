"""Coefficient rings, sparse matrices, homology, cones and Poincare data."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal

import numpy as np
from scipy import sparse as sp

from . import gf2
from .grid import Bigrading
from .smith import kernel_lattice, smith_normal_form

Ring = Literal["F2", "Z"]

DEFAULT_PIECE_CAP = 50_000


class AlgebraError(ValueError):
    pass


class NotAComplex(AlgebraError):
    pass


class NotChainMap(AlgebraError):
    pass


class NotDivisible(AlgebraError):
    pass


class BasisMismatch(AlgebraError):
    pass


class SignAssignmentMissing(AlgebraError):
    pass


class CapExceeded(AlgebraError):
    pass


# -- sparse matrices -------------------------------------------------------

class SparseMatrix:
    """Integer sparse matrix with a ring tag (entries mod 2 when ring="F2").

    Thin wrapper over scipy CSR so that map composition at basis size n! stays
    cheap; no zero entries and no duplicate coordinates are kept.
    """

    def __init__(self, mat: sp.spmatrix, ring: Ring):
        csr = mat.tocsr().astype(np.int64)
        csr.sum_duplicates()
        if ring == "F2":
            csr.data %= 2
        csr.eliminate_zeros()
        self.mat = csr
        self.ring: Ring = ring

    @staticmethod
    def from_entries(shape: tuple[int, int], entries: Iterable[tuple[int, int, int]],
                     ring: Ring) -> "SparseMatrix":
        rows, cols, vals = [], [], []
        for r, c, v in entries:
            rows.append(r)
            cols.append(c)
            vals.append(v)
        mat = sp.coo_matrix((vals, (rows, cols)), shape=shape, dtype=np.int64)
        return SparseMatrix(mat, ring)

    @staticmethod
    def zeros(shape: tuple[int, int], ring: Ring) -> "SparseMatrix":
        return SparseMatrix(sp.csr_matrix(shape, dtype=np.int64), ring)

    @staticmethod
    def identity(n: int, ring: Ring) -> "SparseMatrix":
        return SparseMatrix(sp.identity(n, dtype=np.int64, format="csr"), ring)

    @property
    def shape(self) -> tuple[int, int]:
        return self.mat.shape

    @property
    def nnz(self) -> int:
        return self.mat.nnz

    def entries(self) -> list[tuple[int, int, int]]:
        coo = self.mat.tocoo()
        return [(int(r), int(c), int(v)) for r, c, v in zip(coo.row, coo.col, coo.data)]

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ring != other.ring:
            raise BasisMismatch("ring mismatch")
        if self.shape[1] != other.shape[0]:
            raise BasisMismatch(f"shape mismatch {self.shape} @ {other.shape}")
        return SparseMatrix(self.mat @ other.mat, self.ring)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ring != other.ring or self.shape != other.shape:
            raise BasisMismatch("incompatible addition")
        return SparseMatrix(self.mat + other.mat, self.ring)

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix(-self.mat, self.ring)

    def scaled(self, k: int) -> "SparseMatrix":
        return SparseMatrix(self.mat * k, self.ring)

    def is_zero(self) -> bool:
        return self.nnz == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.ring == other.ring and (self.mat != other.mat).nnz == 0

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.mat.T, self.ring)

    def submatrix(self, rows: np.ndarray, cols: np.ndarray) -> "SparseMatrix":
        return SparseMatrix(self.mat[rows][:, cols], self.ring)

    def column(self, j: int) -> dict[int, int]:
        col = self.mat.getcol(j).tocoo()
        return {int(r): int(v) for r, v in zip(col.row, col.data)}

    def dense(self) -> np.ndarray:
        return np.asarray(self.mat.todense())

    def dense_rows(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self.dense()]


def apply_map(f: SparseMatrix, chain: dict[int, int]) -> dict[int, int]:
    """Image of a sparse chain {index: coeff} under the matrix f."""
    out: dict[int, int] = {}
    ncols = f.shape[1]
    for j, coeff in chain.items():
        if not 0 <= j < ncols:
            raise BasisMismatch(f"chain index {j} outside domain of size {ncols}")
        for r, v in f.column(j).items():
            out[r] = out.get(r, 0) + coeff * v
    if f.ring == "F2":
        out = {r: v % 2 for r, v in out.items()}
    return {r: v for r, v in out.items() if v}


# -- Poincare polynomials ----------------------------------------------------

@dataclass(frozen=True)
class HomGroup:
    free: int
    torsion: tuple[int, ...] = ()


class PoincarePolynomial:
    """Graded homology bookkeeping: bigrading -> free rank and torsion.

    Ungraded homology uses the single key None.
    """

    def __init__(self, ring: Ring, groups: dict[Bigrading | None, HomGroup]):
        self.ring = ring
        self.groups = {g: h for g, h in groups.items() if h.free or h.torsion}
        if ring == "F2":
            for h in self.groups.values():
                if h.torsion:
                    raise AlgebraError("F2 homology carries no torsion data")

    def total_rank(self) -> int:
        return sum(h.free for h in self.groups.values())

    def total_torsion(self) -> int:
        return sum(len(h.torsion) for h in self.groups.values())

    def rank_at(self, g: Bigrading | None) -> int:
        return self.groups.get(g, HomGroup(0)).free

    def delta_support(self) -> set[int]:
        """Doubled delta gradings present (delta2 = alex2 - maslov2)."""
        return {g.delta2 for g in self.groups if g is not None}

    def __eq__(self, other) -> bool:
        if not isinstance(other, PoincarePolynomial):
            return NotImplemented
        return self.ring == other.ring and self.groups == other.groups

    def __repr__(self) -> str:
        def key(g):
            return (0,) if g is None else (1, g.maslov2, g.alex2)
        parts = []
        for g in sorted(self.groups, key=key):
            h = self.groups[g]
            tag = "*" if g is None else f"({g.maslov2 / 2:g},{g.alex2 / 2:g})"
            tors = "" if not h.torsion else "+" + "+".join(f"Z/{d}" for d in h.torsion)
            parts.append(f"{tag}:{h.free}{tors}")
        return f"Poincare[{self.ring}; " + " ".join(parts) + "]"

    def to_json(self) -> dict:
        entries = []
        def key(g):
            return (0,) if g is None else (1, g.maslov2, g.alex2)
        for g in sorted(self.groups, key=key):
            h = self.groups[g]
            e = {"free": h.free, "torsion": list(h.torsion)}
            if g is not None:
                e["maslov2"] = g.maslov2
                e["alex2"] = g.alex2
            entries.append(e)
        return {"ring": self.ring, "entries": entries}

    @staticmethod
    def from_json(obj: dict) -> "PoincarePolynomial":
        groups = {}
        for e in obj["entries"]:
            g = Bigrading(e["maslov2"], e["alex2"]) if "maslov2" in e else None
            groups[g] = HomGroup(e["free"], tuple(e.get("torsion", ())))
        return PoincarePolynomial(obj["ring"], groups)


def factor_out_V(poly: PoincarePolynomial, e: int) -> PoincarePolynomial:
    """Divide by (1 + u)^e where u is the bigrading shift (-1, -1).

    Raises NotDivisible when the polynomial is not an exact multiple, which
    signals a wrong component count or an upstream computation bug.
    """
    if e < 0:
        raise AlgebraError("V exponent must be nonnegative")
    if e == 0:
        return poly
    if set(poly.groups) == {None} or not poly.groups:
        total = poly.total_rank()
        if poly.total_torsion():
            raise NotDivisible("ungraded torsion cannot be divided")
        if total % (1 << e):
            raise NotDivisible(f"total rank {total} not divisible by 2^{e}")
        return PoincarePolynomial(poly.ring, {None: HomGroup(total >> e)})

    def divide_once(counts: dict[Bigrading, int]) -> dict[Bigrading, int]:
        q: dict[Bigrading, int] = {}
        for g in sorted(counts, key=lambda g: -(g.maslov2 + g.alex2)):
            need = counts.get(g, 0) - q.get(Bigrading(g.maslov2 + 2, g.alex2 + 2), 0)
            if need < 0:
                raise NotDivisible("negative coefficient in quotient")
            if need:
                q[g] = need
        # verify: q * (1 + u) == counts
        recomposed: dict[Bigrading, int] = {}
        for g, c in q.items():
            recomposed[g] = recomposed.get(g, 0) + c
            lower = Bigrading(g.maslov2 - 2, g.alex2 - 2)
            recomposed[lower] = recomposed.get(lower, 0) + c
        if {g: c for g, c in recomposed.items() if c} != {g: c for g, c in counts.items() if c}:
            raise NotDivisible("polynomial is not a multiple of (1 + u)")
        return q

    # free part and each torsion type divide independently
    free_counts = {g: h.free for g, h in poly.groups.items() if h.free}
    torsion_types = sorted({d for h in poly.groups.values() for d in h.torsion})
    for _ in range(e):
        free_counts = divide_once(free_counts)
    torsion_out: dict[Bigrading, list[int]] = {}
    for d in torsion_types:
        counts = {g: h.torsion.count(d) for g, h in poly.groups.items() if d in h.torsion}
        for _ in range(e):
            counts = divide_once(counts)
        for g, c in counts.items():
            torsion_out.setdefault(g, []).extend([d] * c)
    groups = {}
    for g in set(free_counts) | set(torsion_out):
        groups[g] = HomGroup(free_counts.get(g, 0), tuple(sorted(torsion_out.get(g, ()))))
    return PoincarePolynomial(poly.ring, groups)


# -- graded complexes --------------------------------------------------------

@dataclass
class GradedComplex:
    """A finite complex with one boundary matrix over the full basis.

    pieces maps a bigrading (or None, for ungraded X-only complexes) to the
    array of basis indices living in that degree.  The boundary drops maslov2
    by 2 and preserves alex2 in the graded case.
    """

    ring: Ring
    boundary: SparseMatrix
    pieces: dict[Bigrading | None, np.ndarray]
    piece_cap: int = DEFAULT_PIECE_CAP

    def basis_size(self) -> int:
        return self.boundary.shape[0]

    def check_d_squared(self) -> None:
        if not (self.boundary @ self.boundary).is_zero():
            raise NotAComplex("boundary does not square to zero")

    def check_graded(self) -> None:
        """Every boundary entry goes from (m2, a2) to (m2 - 2, a2)."""
        if set(self.pieces) == {None}:
            return
        grade_of = {}
        for g, idx in self.pieces.items():
            for i in idx:
                grade_of[int(i)] = g
        for r, c, _ in self.boundary.entries():
            gc, gr = grade_of[c], grade_of[r]
            if gr.maslov2 != gc.maslov2 - 2 or gr.alex2 != gc.alex2:
                raise NotAComplex(f"boundary entry breaks the grading: {gc} -> {gr}")


def homology(cx: GradedComplex, check: bool = True) -> PoincarePolynomial:
    """Homology ranks per bigrading; torsion included over Z.

    Over F2 the rank comes from bitset elimination; over Z the free rank and
    torsion come from Smith normal forms of the two adjacent boundary blocks.
    """
    if check:
        cx.check_d_squared()
    for g, idx in cx.pieces.items():
        if len(idx) > cx.piece_cap:
            raise CapExceeded(f"graded piece of size {len(idx)} exceeds cap {cx.piece_cap}")
    groups: dict[Bigrading | None, HomGroup] = {}
    for g, idx in cx.pieces.items():
        if g is None:
            into_idx = out_idx = idx
        else:
            into_idx = cx.pieces.get(Bigrading(g.maslov2 + 2, g.alex2), np.array([], dtype=np.int64))
            out_idx = cx.pieces.get(Bigrading(g.maslov2 - 2, g.alex2), np.array([], dtype=np.int64))
        a = cx.boundary.submatrix(out_idx, idx)       # leaving this degree
        b = cx.boundary.submatrix(idx, into_idx)      # arriving into it
        if cx.ring == "F2":
            if len(idx) > 1500:
                rank_a = _rank_packed_sparse(a)
                rank_b = _rank_packed_sparse(b)
            else:
                rank_a = gf2.rank_bitrows(_bit_columns(a))
                rank_b = gf2.rank_bitrows(_bit_columns(b))
            free = len(idx) - rank_a - rank_b
            groups[g] = HomGroup(free)
        else:
            groups[g] = _z_homology_group(a, b, len(idx))
    return PoincarePolynomial(cx.ring, groups)


def _rank_packed_sparse(m: SparseMatrix) -> int:
    import numpy as np
    rows, cols = m.shape
    if m.nnz == 0 or rows == 0 or cols == 0:
        return 0
    dense = (m.mat.toarray() % 2).astype(np.uint8)
    return gf2.rank_packed(gf2.pack_rows(dense), cols)


def _bit_columns(m: SparseMatrix) -> list[int]:
    cols: dict[int, int] = {}
    for r, c, v in m.entries():
        if v % 2:
            cols[c] = cols.get(c, 0) | (1 << r)
    return list(cols.values())


def _z_homology_group(a: SparseMatrix, b: SparseMatrix, dim: int) -> HomGroup:
    amat = a.dense_rows() if a.shape[0] else []
    if amat:
        _, kernel_cols = kernel_lattice(amat)
    else:
        kernel_cols = [[1 if i == j else 0 for i in range(dim)] for j in range(dim)]
    k = len(kernel_cols)
    bcols = [[int(v) for v in col] for col in b.dense().T] if b.shape[1] else []
    bcols = [col for col in bcols if any(col)]
    if not bcols:
        return HomGroup(k)
    from .smith import solve_exact
    y = solve_exact(kernel_cols, bcols)
    form = smith_normal_form(y)
    torsion = tuple(sorted(d for d in form.diagonal if d not in (0, 1)))
    return HomGroup(k - form.rank, torsion)


def universal_coefficients_consistent(f2: PoincarePolynomial, z: PoincarePolynomial) -> bool:
    """Universal coefficients over F2, checked degreewise.

    dim H(F2) at degree g equals freeZ(g) + #even torsion at g + #even torsion
    one Maslov degree below (the Tor term); in the aggregate this is the
    familiar F2 rank = free rank + 2 * (number of even torsion summands).
    """
    keys = set(f2.groups) | set(z.groups)
    for g in list(keys):
        if g is not None:
            keys.add(Bigrading(g.maslov2 + 2, g.alex2))
    for g in keys:
        zg = z.groups.get(g, HomGroup(0))
        even_here = sum(1 for d in zg.torsion if d % 2 == 0)
        if g is None:
            even_below = even_here
        else:
            below = z.groups.get(Bigrading(g.maslov2 - 2, g.alex2), HomGroup(0))
            even_below = sum(1 for d in below.torsion if d % 2 == 0)
        if f2.rank_at(g) != zg.free + even_here + even_below:
            return False
    return True


def mapping_cone(f: SparseMatrix, d_from: SparseMatrix, d_to: SparseMatrix,
                 parity: Literal["chain", "anti"] = "chain") -> GradedComplex:
    """Cone of f with block boundary [[d_from, 0], [f, s * d_to]].

    parity declares whether f commutes (chain) or anticommutes (anti) with the
    differentials; the block sign s is chosen so the cone squares to zero, and
    both the declared parity and d^2 = 0 are verified.
    """
    ring = f.ring
    comm = d_to @ f + (f @ d_from).scaled(-1)
    anti = d_to @ f + f @ d_from
    if parity == "chain":
        if not comm.is_zero():
            raise NotChainMap("declared chain map does not commute with d")
        s = -1
    else:
        if not anti.is_zero():
            raise NotChainMap("declared anti-chain map does not anticommute with d")
        s = 1
    nf, nt = d_from.shape[0], d_to.shape[0]
    top = sp.hstack([d_from.mat, sp.csr_matrix((nf, nt), dtype=np.int64)])
    bot = sp.hstack([f.mat, d_to.mat * s])
    cone = SparseMatrix(sp.vstack([top, bot]), ring)
    cx = GradedComplex(ring=ring, boundary=cone,
                       pieces={None: np.arange(nf + nt, dtype=np.int64)})
    cx.check_d_squared()
    return cx
