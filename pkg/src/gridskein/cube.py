"""Cube of resolutions: resolved diagrams, edge maps, total complex, pages.

Each crossing of a blocked grid sits in a canonical 6x6 block (an X near
each corner, the four moving markers in the central corridor).  Replacing
block i's corridor layout by resolution state k_i in {1, 2} gives the
diagrams G_{k_1..k_m}; the edge maps are the skein maps f at one block of a
resolved diagram, and over Z the triangle-shaped summands are negated
whenever #{j > i : k_j = 1} is odd, which turns commutation into
anticommutation and makes the total complex square to zero.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse as sp

from . import geometry, perms
from .algebra import (CapExceeded, GradedComplex, Ring, SignAssignmentMissing,
                      SparseMatrix, homology)
from .complexes import boundary_matrix
from .geometry import Corridor
from .grid import GridDiagram
from .skein import PatternMismatch, SkeinTriple, build_chain_map, chain_map_terms, detect_state


@dataclass(frozen=True)
class Block:
    """One crossing block, anchored at its window row and left corridor column."""

    window: int
    q: int

    def rows(self) -> range:
        return range(self.window - 1, self.window + 5)

    def cols(self) -> range:
        return range(self.q - 2, self.q + 4)

    def corner_cells(self) -> list[tuple[int, int]]:
        r0, c0 = self.window - 1, self.q - 2
        return [(r0, c0), (r0, c0 + 5), (r0 + 5, c0 + 1), (r0 + 5, c0 + 4)]


@dataclass
class BlockedGrid:
    """An X-only grid with disjoint crossing blocks in canonical form."""

    base: GridDiagram
    blocks: list[Block]
    strict_corners: bool = True

    def __post_init__(self):
        n = self.base.n
        for b in self.blocks:
            state = detect_state(self.base, b.window, b.q)
            if state != 0:
                raise PatternMismatch(f"block at {(b.window, b.q)} is not in crossing state")
            if self.strict_corners:
                if b.window < 1 or b.q < 2 or b.window + 5 > n or b.q + 4 > n:
                    raise PatternMismatch("6x6 block does not fit inside the grid")
                missing = [c for c in b.corner_cells() if c not in self.base.marker_cells]
                if missing:
                    raise PatternMismatch(f"block at {(b.window, b.q)} lacks corner markers {missing}")
        for b1, b2 in itertools.combinations(self.blocks, 2):
            if self.strict_corners:
                r1, c1, r2, c2 = b1.rows(), b1.cols(), b2.rows(), b2.cols()
            else:
                r1 = range(b1.window, b1.window + 4)
                c1 = range(b1.q, b1.q + 2)
                r2 = range(b2.window, b2.window + 4)
                c2 = range(b2.q, b2.q + 2)
            if set(r1) & set(r2) or set(c1) & set(c2):
                raise PatternMismatch("blocks must occupy disjoint rows and columns")

    @property
    def m(self) -> int:
        return len(self.blocks)


def resolution_diagram(blocked: BlockedGrid, kvec: tuple[int, ...]) -> GridDiagram:
    """The diagram with block i replaced by its state-k_i corridor layout."""
    if len(kvec) != blocked.m:
        raise ValueError("one state per block")
    cells = set(blocked.base.marker_cells)
    for block, k in zip(blocked.blocks, kvec):
        cor = Corridor(n=blocked.base.n, window=block.window, q=block.q)
        cells -= cor.flat_corridor_cells(0)
        cells |= cor.flat_corridor_cells(k)
    return GridDiagram.x_only(cells)


def _block_triple(blocked: BlockedGrid, kvec: tuple[int, ...], i: int) -> SkeinTriple:
    """The skein triple at block i of the kvec-resolved diagram."""
    diagram = resolution_diagram(blocked, tuple(0 if j == i else k for j, k in enumerate(kvec)))
    block = blocked.blocks[i]
    from .skein import build_skein_triple
    return build_skein_triple(diagram, anchor=(block.window, block.q))


def twist_parity(kvec: tuple[int, ...], i: int) -> bool:
    """Negate triangle-like weights when #{j > i : k_j = 1} is odd."""
    return sum(1 for j in range(i + 1, len(kvec)) if kvec[j] == 1) % 2 == 1


def edge_map(blocked: BlockedGrid, kvec: tuple[int, ...], i: int, ring: Ring,
             signs=None, kind: str = "f") -> SparseMatrix:
    """The map f^i (or phi^i) out of the kvec vertex at block i.

    kvec gives the state of every block; block i must be in state 0 or 1 and
    the map raises it by one.
    """
    k = kvec[i]
    if k not in (0, 1):
        raise ValueError(f"edge maps raise k_i by one; k_i = {k}")
    if ring == "Z" and signs is None:
        raise SignAssignmentMissing("Z edge maps need a sign assignment")
    triple = _block_triple(blocked, kvec, i)
    return build_chain_map(triple, kind, k, ring, signs=signs,
                           twist=(ring == "Z" and twist_parity(kvec, i)))


def edge_terms(blocked: BlockedGrid, kvec: tuple[int, ...], i: int,
               perm: tuple[int, ...], ring: Ring, signs=None,
               kind: str = "f") -> dict[tuple[int, ...], int]:
    """Matrix-free edge map on one generator (for sampled checks at large n)."""
    k = kvec[i]
    triple = _block_triple(blocked, kvec, i)
    return chain_map_terms(triple.corridor, triple.extra_markers(), kind, k, perm,
                           ring, signs=signs,
                           twist=(ring == "Z" and twist_parity(kvec, i)))


@dataclass
class CubeComplex:
    """Total complex over the full resolutions k_i in {1, 2}."""

    ring: Ring
    m: int
    vertices: dict[tuple[int, ...], GradedComplex]
    edges: dict[tuple[tuple[int, ...], int], SparseMatrix]
    offsets: dict[tuple[int, ...], int]
    total: SparseMatrix = field(default=None)

    def vertex_order(self) -> list[tuple[int, ...]]:
        return sorted(self.vertices, key=lambda kv: (sum(kv), kv))

    def weight(self, kvec: tuple[int, ...]) -> int:
        return sum(k - 1 for k in kvec)


def build_cube(blocked: BlockedGrid, ring: Ring, signs=None,
               piece_cap: int | None = None) -> CubeComplex:
    """Materialize CR(G): vertex complexes, edge maps, total differential."""
    n = blocked.base.n
    N = perms.factorial(n)
    m = blocked.m
    if N * (2 ** m) > 2_000_000:
        raise CapExceeded("cube too large to materialize; use sampled checks")
    vertices = {}
    for kvec in itertools.product((1, 2), repeat=m):
        g = resolution_diagram(blocked, kvec)
        vertices[kvec] = boundary_matrix(g, ring, signs=signs, piece_cap=piece_cap)
    edges = {}
    for kvec in vertices:
        for i in range(m):
            if kvec[i] == 1:
                edges[(kvec, i)] = edge_map(blocked, kvec, i, ring, signs=signs)
    order = sorted(vertices, key=lambda kv: (sum(kv), kv))
    offsets = {kv: t * N for t, kv in enumerate(order)}
    total_dim = N * len(order)
    mats = []
    rows_acc, cols_acc, data_acc = [], [], []
    for kv in order:
        b = vertices[kv].boundary.mat.tocoo()
        rows_acc.append(b.row + offsets[kv])
        cols_acc.append(b.col + offsets[kv])
        data_acc.append(b.data)
    for (kv, i), f in edges.items():
        target = tuple(2 if j == i else k for j, k in enumerate(kv))
        fm = f.mat.tocoo()
        rows_acc.append(fm.row + offsets[target])
        cols_acc.append(fm.col + offsets[kv])
        data_acc.append(fm.data)
    total = SparseMatrix(sp.coo_matrix(
        (np.concatenate(data_acc), (np.concatenate(rows_acc), np.concatenate(cols_acc))),
        shape=(total_dim, total_dim), dtype=np.int64), ring)
    cube = CubeComplex(ring=ring, m=m, vertices=vertices, edges=edges,
                       offsets=offsets, total=total)
    if not (total @ total).is_zero():
        raise AssertionError("cube differential does not square to zero")
    return cube


def cube_homology_rank(cube: CubeComplex) -> int:
    """Total homology rank of CR (F2 dimension / Z free rank)."""
    cx = GradedComplex(ring=cube.ring, boundary=cube.total,
                       pieces={None: np.arange(cube.total.shape[0], dtype=np.int64)})
    return homology(cx, check=False).total_rank()


def spectral_pages(cube: CubeComplex, maxpage: int = 3) -> dict[int, dict[int, int]]:
    """Rank tables of the weight-filtration spectral sequence (F2 only).

    The cube differential has filtration degrees 0 and 1 only, so E_2 = E_inf;
    pages beyond 2 repeat the E_2 table.  Returns {page: {weight: rank}}.
    """
    if cube.ring != "F2":
        raise ValueError("page ranks are computed over F2")
    from . import gf2
    N = next(iter(cube.vertices.values())).boundary.shape[0]
    weights = {kv: cube.weight(kv) for kv in cube.vertices}
    pages: dict[int, dict[int, int]] = {}
    # E_1: homology of each vertex complex, graded by weight
    e1: dict[int, int] = {}
    kernels: dict[tuple[int, ...], list[int]] = {}
    images: dict[tuple[int, ...], list[int]] = {}
    for kv, cx in cube.vertices.items():
        cols = _bit_cols(cx.boundary)
        kernels[kv] = gf2.kernel_basis(cols, N)
        images[kv] = [c for c in cols if c]
        e1[weights[kv]] = e1.get(weights[kv], 0) + gf2.rank_bitrows(kernels[kv]) - gf2.rank_bitrows(images[kv])
    pages[1] = dict(sorted(e1.items()))
    # d_1 ranks: induced edge maps between consecutive weights
    d1_rank: dict[int, int] = {}
    by_weight: dict[int, list[tuple[tuple[int, ...], int]]] = {}
    for (kv, i) in cube.edges:
        by_weight.setdefault(weights[kv], []).append((kv, i))
    for w, edge_list in by_weight.items():
        # assemble the induced map from H(weight w) to H(weight w+1)
        src_kvs = sorted({kv for kv, _ in edge_list})
        dst_kvs = sorted({tuple(2 if j == i else k for j, k in enumerate(kv))
                          for kv, i in edge_list})
        dst_off = {kv: t for t, kv in enumerate(dst_kvs)}
        dst_img = 0
        img_vectors = []
        base_vectors = []
        for kv in dst_kvs:
            shift = dst_off[kv] * N
            base_vectors.extend(v << shift for v in images[kv])
        for kv in src_kvs:
            for vec in kernels[kv]:
                out = 0
                for kv2, i in edge_list:
                    if kv2 != kv:
                        continue
                    target = tuple(2 if j == i else k for j, k in enumerate(kv))
                    f = cube.edges[(kv, i)]
                    out ^= _apply_bits(f, vec) << (dst_off[target] * N)
                img_vectors.append(out)
        base = gf2.rank_bitrows(base_vectors)
        d1_rank[w] = gf2.rank_bitrows(base_vectors + img_vectors) - base
    e2 = dict(pages[1])
    for w, r in d1_rank.items():
        e2[w] = e2.get(w, 0) - r
        e2[w + 1] = e2.get(w + 1, 0) - r
    pages[2] = dict(sorted(e2.items()))
    for p in range(3, maxpage + 1):
        pages[p] = dict(pages[2])
    return pages


def _bit_cols(mat: SparseMatrix) -> list[int]:
    cols: dict[int, int] = {}
    for r, c, v in mat.entries():
        if v % 2:
            cols[c] = cols.get(c, 0) | (1 << r)
    return [cols.get(j, 0) for j in range(mat.shape[1])]


def _apply_bits(f: SparseMatrix, vec: int) -> int:
    out = 0
    mat = f.mat.tocsc()
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
    return out


# -- sampled verification at sizes beyond materialization ---------------------

@dataclass
class SampledCubeReport:
    ring: Ring
    samples: int
    seed: int
    commute_checked: int = 0
    commute_failures: int = 0
    phi_commute_checked: int = 0
    phi_commute_failures: int = 0
    d_squared_checked: int = 0
    d_squared_failures: int = 0

    def ok(self) -> bool:
        return not (self.commute_failures or self.phi_commute_failures
                    or self.d_squared_failures)

    def to_json(self) -> dict:
        return {
            "ring": self.ring, "samples": self.samples, "seed": self.seed,
            "commutation": {"checked": self.commute_checked, "failures": self.commute_failures},
            "phi_commutation": {"checked": self.phi_commute_checked,
                                "failures": self.phi_commute_failures},
            "d_squared": {"checked": self.d_squared_checked, "failures": self.d_squared_failures},
        }


class _TripleCache:
    def __init__(self, blocked: BlockedGrid):
        self.blocked = blocked
        self.cache: dict = {}

    def get(self, kvec: tuple[int, ...], i: int) -> SkeinTriple:
        key = (tuple(kvec), i)
        if key not in self.cache:
            self.cache[key] = _block_triple(self.blocked, kvec, i)
        return self.cache[key]


def _edge_terms_cached(cache: _TripleCache, kvec, i, perm, ring, signs, kind="f"):
    triple = cache.get(kvec, i)
    return chain_map_terms(triple.corridor, triple.extra_markers(), kind, kvec[i],
                           perm, ring, signs=signs,
                           twist=(ring == "Z" and twist_parity(kvec, i)))


def _combine(acc: dict, terms: dict, scale: int = 1) -> None:
    for key, v in terms.items():
        acc[key] = acc.get(key, 0) + scale * v


def sampled_cube_checks(blocked: BlockedGrid, ring: Ring, samples: int = 10_000,
                        seed: int = 0) -> SampledCubeReport:
    """Per-basis-vector cube checks at sizes beyond materialization.

    Draws (vertex, generator) pairs with a fixed seed and checks, matrix-free:
    commutation of distinct edge maps over F2 / anticommutation after the
    sign-twist rule over Z, commutation of phi with f over F2, and that the
    total cube differential squares to zero on the sampled vector.  Over Z
    each sample uses a sign assignment rooted at its own generator, which is
    gauge-equivalent to any global assignment and hence checks the same
    identities.
    """
    import numpy as np
    from .complexes import differential_terms

    rng = np.random.default_rng(seed)
    n = blocked.base.n
    m = blocked.m
    total = perms.factorial(n)
    cache = _TripleCache(blocked)
    report = SampledCubeReport(ring=ring, samples=samples, seed=seed)
    resolved: dict[tuple[int, ...], GridDiagram] = {}

    def diagram_at(kvec):
        kvec = tuple(kvec)
        if kvec not in resolved:
            resolved[kvec] = resolution_diagram(blocked, kvec)
        return resolved[kvec]

    for _ in range(samples):
        perm = perms.unrank(n, int(rng.integers(total)))
        signs = None
        if ring == "Z":
            from .signs import LocalSigns
            signs = LocalSigns(n, perm)
        # pairwise (anti)commutation of edges out of a random vertex
        if m >= 2:
            i1, i2 = rng.choice(m, size=2, replace=False)
            kvec = [int(rng.integers(1, 3)) for _ in range(m)]
            kvec[int(i1)] = 1
            kvec[int(i2)] = 1
            kvec = tuple(kvec)
            acc: dict = {}
            for first, second in ((i1, i2), (i2, i1)):
                mid_k = tuple(2 if j == first else k for j, k in enumerate(kvec))
                sign = 1
                if ring == "Z" and (first, second) == (i2, i1):
                    sign = 1  # anticommutation means the SUM vanishes
                first_terms = _edge_terms_cached(cache, kvec, int(first), perm, ring, signs)
                for p2, c2 in first_terms.items():
                    second_terms = _edge_terms_cached(cache, mid_k, int(second), p2, ring, signs)
                    _combine(acc, second_terms, sign * c2)
            report.commute_checked += 1
            bad = {k: (v % 2 if ring == "F2" else v) for k, v in acc.items()}
            if ring == "F2":
                # commutation: the two orders agree, so the mod-2 sum vanishes
                if any(v for v in bad.values()):
                    report.commute_failures += 1
            else:
                if any(v for v in bad.values()):
                    report.commute_failures += 1
            # phi-f commutation over F2 (phi raises k_i by two)
            if ring == "F2":
                accp: dict = {}
                kvecp = list(kvec)
                kvecp[int(i2)] = 0
                kvecp = tuple(kvecp)
                mid1 = tuple(2 if j == i1 else k for j, k in enumerate(kvecp))
                f_then_phi = _edge_terms_cached(cache, kvecp, int(i1), perm, ring, signs)
                for p2, c2 in f_then_phi.items():
                    _combine(accp, _edge_terms_cached(cache, mid1, int(i2), p2, ring, signs, kind="phi"), c2)
                phi_first = _edge_terms_cached(cache, kvecp, int(i2), perm, ring, signs, kind="phi")
                mid2 = tuple(2 if j == i2 else k for j, k in enumerate(kvecp))
                for p2, c2 in phi_first.items():
                    _combine(accp, _edge_terms_cached(cache, mid2, int(i1), p2, ring, signs), c2)
                report.phi_commute_checked += 1
                if any(v % 2 for v in accp.values()):
                    report.phi_commute_failures += 1
        # total differential squared at a random full-resolution vertex
        kvec = tuple(int(rng.integers(1, 3)) for _ in range(m))
        acc2: dict = {}
        first: dict = {}
        g0 = diagram_at(kvec)
        _combine(first, {(kvec, p): c for p, c in differential_terms(g0, perm, ring, signs).items()})
        for i in range(m):
            if kvec[i] == 1:
                tgt = tuple(2 if j == i else k for j, k in enumerate(kvec))
                _combine(first, {(tgt, p): c
                                 for p, c in _edge_terms_cached(cache, kvec, i, perm, ring, signs).items()})
        for (kv2, p2), c2 in first.items():
            _combine(acc2, {(kv2, p3): c3
                            for p3, c3 in differential_terms(diagram_at(kv2), p2, ring, signs).items()}, c2)
            for i in range(m):
                if kv2[i] == 1:
                    tgt = tuple(2 if j == i else k for j, k in enumerate(kv2))
                    _combine(acc2, {(tgt, p3): c3
                                    for p3, c3 in _edge_terms_cached(cache, kv2, i, p2, ring, signs).items()}, c2)
        report.d_squared_checked += 1
        vals = [(v % 2 if ring == "F2" else v) for v in acc2.values()]
        if any(vals):
            report.d_squared_failures += 1
    return report
