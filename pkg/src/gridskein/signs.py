"""Sign assignments on empty rectangles: solver, closed form, verification.

A sign assignment S maps empty rectangles to +-1 subject to three axioms:
composable pairs with two decompositions anticommute, the two halves of a
vertical annulus multiply to -1, and those of a horizontal annulus to +1.
It exists and is unique up to a gauge g : generators -> +-1.

Two constructions live here.

* solve_sign_assignment builds the F2 linear system straight from the axioms
  (one equation per two-decomposition composite domain and per annulus) and
  solves it with a deterministic gauge: a spanning tree of the generator
  graph is fixed to +1 in BFS order, which makes the remaining system have a
  unique solution.  This is exhaustive and is capped by grid size.

* pin_sign_assignment evaluates the same data through the Clifford algebra:
  a transposition of rows a, b lifts to the unit vector (e_a - e_b)/sqrt(2),
  disjoint lifts anticommute, and a rectangle's sign is the comparison of
  canonical lifts s(y) vs s(x) * gamma * span_sign.  This scales to any n and
  is gauge-equivalent to the solver output (checked in tests).

Rectangles are described by (generator, bottom moving row a, top moving row
b); the column span is implied by the generator, and markers never enter.
"""

from __future__ import annotations

import json
import os
import struct
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

from . import perms
from .grid import GridDiagram, empty_rectangles_from, rectangle_interior_clear


class SignError(ValueError):
    pass


class Inconsistent(SignError):
    """The axiom system had no solution: an enumeration bug, not math."""


class NotGaugeEquivalent(SignError):
    pass


class SolverCapExceeded(SignError):
    pass


def sgn(perm: tuple[int, ...]) -> int:
    """Signature of the generator's permutation."""
    return perms.sign_of(perm)


# -- descriptor helpers ------------------------------------------------------

def _span_bit(a: int, b: int) -> int:
    """Span orientation bit: 1 when the row span wraps past the top seam."""
    return 1 if a > b else 0


def rect_target(perm: tuple[int, ...], a: int, b: int) -> tuple[int, ...]:
    out = list(perm)
    out[a], out[b] = out[b], out[a]
    return tuple(out)


# -- Clifford lifting --------------------------------------------------------

class _CliffordSmall:
    """Exact products of (e_i - e_j) vectors as {monomial mask: int coeff}."""

    @staticmethod
    def mul_vector(elem: dict[int, int], i: int, j: int) -> dict[int, int]:
        out: dict[int, int] = {}
        for mask, coeff in elem.items():
            for k, s in ((i, 1), (j, -1)):
                fold = bin(mask >> (k + 1)).count("1")
                sign = -1 if fold & 1 else 1
                m2 = mask ^ (1 << k)
                out[m2] = out.get(m2, 0) + sign * s * coeff
        return {m: c for m, c in out.items() if c}

    @staticmethod
    def word_lift(word: list[tuple[int, int]]) -> dict[int, int]:
        elem = {0: 1}
        for i, j in word:
            elem = _CliffordSmall.mul_vector(elem, i, j)
        return elem

    @staticmethod
    def compare(lhs: dict[int, int], rhs: dict[int, int]) -> int:
        """Sign c with lhs = c * 2^k * rhs for some integer k >= 0; else raise."""
        if not lhs or not rhs or set(lhs) != set(rhs):
            raise Inconsistent("lift comparison failed: different supports")
        mask = next(iter(rhs))
        num, den = lhs[mask], rhs[mask]
        if num % den:
            raise Inconsistent("lift comparison failed: non-scalar ratio")
        ratio = num // den
        scale = abs(ratio)
        if scale & (scale - 1):
            raise Inconsistent("lift ratio is not a power of two")
        for m, c in rhs.items():
            if lhs[m] != ratio * c:
                raise Inconsistent("lift comparison failed: not proportional")
        return 1 if ratio > 0 else -1


def sorting_word(perm: tuple[int, ...]) -> list[tuple[int, int]]:
    """Canonical transposition word: perm = w1 o w2 o ... o wk applied to id.

    Selection order: repeatedly fix the smallest row whose value is wrong by
    swapping it with the row currently holding that value.  The word is read
    off so that perm = (...((id) adjusted by w_k)...) with s(perm) =
    s(perm') * gamma_{w_last}; only the resulting lift matters.
    """
    cur = list(perm)
    word: list[tuple[int, int]] = []
    n = len(perm)
    pos = {v: i for i, v in enumerate(cur)}
    for target in range(n):
        if cur[target] == target:
            continue
        j = pos[target]
        # swap rows target, j
        word.append((target, j))
        vt, vj = cur[target], cur[j]
        cur[target], cur[j] = vj, vt
        pos[vj], pos[vt] = target, j
    word.reverse()
    return word


class PinSigns:
    """Closed-form sign assignment via canonical Clifford lifts.

    sign(perm, a, b) is defined for every generator-empty rectangle (and in
    fact for every rectangle descriptor); it depends only on the permutations
    and the span orientation.
    """

    def __init__(self, n: int):
        self.n = n
        self._lift_cache: dict[tuple[int, ...], dict[int, int]] = {}

    def provenance(self) -> str:
        return f"pin:v1:n{self.n}"

    def _lift(self, perm: tuple[int, ...]) -> dict[int, int]:
        lift = self._lift_cache.get(perm)
        if lift is None:
            lift = _CliffordSmall.word_lift(sorting_word(perm))
            self._lift_cache[perm] = lift
        return lift

    def sign(self, perm: tuple[int, ...], a: int, b: int) -> int:
        dst = rect_target(perm, a, b)
        i, j = (a, b) if a < b else (b, a)
        moved = _CliffordSmall.mul_vector(self._lift(perm), i, j)
        c = _CliffordSmall.compare(moved, self._lift(dst))
        return -c if _span_bit(a, b) else c


class LocalSigns:
    """Sign assignment rooted at a base generator, for matrix-free work.

    Lifts are computed for the difference permutation base^-1 . perm, which
    stays short for generators near the base; by Theorem-level gauge
    uniqueness the result is a valid sign assignment (gauge-equivalent to the
    canonical one), so any identity or homology statement checked with it is
    checked for every assignment.
    """

    def __init__(self, n: int, base: tuple[int, ...]):
        self.n = n
        self.base_inv = perms.inverse(base)
        self._pin = PinSigns(n)

    def sign(self, perm: tuple[int, ...], a: int, b: int) -> int:
        diff = tuple(self.base_inv[v] for v in perm)
        return self._pin.sign(diff, a, b)


@dataclass
class SignAssignment:
    """A solved table of rectangle signs for one grid size."""

    n: int
    table: dict[tuple[int, int, int], int]  # (x_rank, a, b) -> +-1
    provenance: str = "solver:v1"

    def sign(self, perm: tuple[int, ...], a: int, b: int) -> int:
        key = (perms.rank_of(perm), a, b)
        try:
            return self.table[key]
        except KeyError:
            raise SignError(f"rectangle {key} not in the solved table") from None

    def sign_by_rank(self, rank: int, a: int, b: int) -> int:
        return self.table[(rank, a, b)]

    def descriptors(self) -> list[tuple[int, int, int]]:
        return sorted(self.table)


def pin_sign_table(n: int) -> SignAssignment:
    """Materialize the Clifford assignment on all empty rectangles of size n."""
    pin = PinSigns(n)
    diagram = _bare_diagram(n)
    table = {}
    for rank, perm in enumerate(perms.iter_perms(n)):
        for rect in empty_rectangles_from(diagram, perm, blocked=None):
            table[(rank, rect.row_lo, rect.row_hi)] = pin.sign(perm, rect.row_lo, rect.row_hi)
    return SignAssignment(n=n, table=table, provenance=pin.provenance())


def _bare_diagram(n: int) -> GridDiagram:
    """A throwaway diagram of size n (markers are irrelevant to Rect-degree data)."""
    cells = [(i, i) for i in range(n)] + [(i, (i + 1) % n) for i in range(n)]
    return GridDiagram.x_only(cells)


def _selection_parent(perm: tuple[int, ...]) -> tuple[tuple[int, ...], int, int]:
    """First selection-sort step: parent permutation and the rows it swaps."""
    for target, v in enumerate(perm):
        if v != target:
            j = perm.index(target)
            out = list(perm)
            out[target], out[j] = out[j], out[target]
            return tuple(out), target, j
    raise ValueError("identity has no parent")


_PIN_TABLE_CACHE: dict[int, np.ndarray] = {}


def pin_table_array(n: int) -> np.ndarray:
    """Dense (n!, n, n) int8 table of Clifford rectangle signs.

    Entry [rank, a, b] is the sign of the rectangle with bottom moving row a
    and top moving row b from the rank-th generator; every descriptor is
    filled (emptiness does not affect the value).
    """
    if n > 9:
        raise SignError("dense pin tables are meant for n <= 9")
    cached = _PIN_TABLE_CACHE.get(n)
    if cached is not None:
        return cached
    total = perms.factorial(n)
    table = perms.perm_table(n).astype(np.int64)
    dim = 1 << n

    # right-multiplication by e_k as a signed permutation of monomials
    masks = np.arange(dim, dtype=np.int64)
    e_perm = np.empty((n, dim), dtype=np.int64)
    e_sign = np.empty((n, dim), dtype=np.int64)
    for k in range(n):
        e_perm[k] = masks ^ (1 << k)
        fold = np.zeros(dim, dtype=np.int64)
        for t in range(k + 1, n):
            fold += (masks >> t) & 1
        e_sign[k] = np.where(fold & 1, -1, 1)

    def rmul(vec: np.ndarray, i: int, j: int) -> np.ndarray:
        out = np.zeros_like(vec)
        np.add.at(out, e_perm[i], vec * e_sign[i])
        np.subtract.at(out, e_perm[j], vec * e_sign[j])
        return out

    def rmul_rows(mat: np.ndarray, i: int, j: int) -> np.ndarray:
        out = np.zeros_like(mat)
        out[:, e_perm[i]] += mat * e_sign[i]
        out[:, e_perm[j]] -= mat * e_sign[j]
        return out

    lifts = np.zeros((total, dim), dtype=np.int64)
    lifts[0, 0] = 1
    word_len = np.zeros(total, dtype=np.int64)
    order = []
    for rank in range(1, total):
        perm = perms.unrank(n, rank)
        parent, i, j = _selection_parent(perm)
        prank = perms.rank_of(parent)
        order.append((rank, prank, i, j))
        word_len[rank] = word_len[prank] + 1
    for rank, prank, i, j in sorted(order, key=lambda t: word_len[t[0]]):
        lifts[rank] = rmul(lifts[prank], i, j)

    swaps_mod = {}
    for a in range(n):
        for b in range(a + 1, n):
            swapped = table.copy()
            swapped[:, [a, b]] = swapped[:, [b, a]]
            swaps_mod[(a, b)] = perms.ranks_of_array(swapped)

    out = np.zeros((total, n, n), dtype=np.int8)
    for a in range(n):
        for b in range(a + 1, n):
            moved = rmul_rows(lifts, a, b)
            rhs = lifts[swaps_mod[(a, b)]]
            idx = np.abs(rhs).argmax(axis=1)
            rows = np.arange(total)
            num = moved[rows, idx]
            den = rhs[rows, idx]
            if np.any(den == 0) or np.any(num == 0):
                raise Inconsistent("pin lift comparison degenerate")
            if not np.array_equal(moved * den[:, None], rhs * num[:, None]):
                raise Inconsistent("pin lifts are not proportional")
            base = np.sign(num * den).astype(np.int8)
            out[:, a, b] = base
            out[:, b, a] = -base
    out.setflags(write=False)
    _PIN_TABLE_CACHE[n] = out
    return out


def sign_table_array(source, n: int) -> np.ndarray:
    """Dense (n!, n, n) int8 sign table from any assignment source.

    Accepts a SignAssignment (solver output: only generator-empty rectangles
    are filled, the rest stay 0), a PinSigns instance, or an ndarray that is
    already in table form.
    """
    if isinstance(source, np.ndarray):
        return source
    if isinstance(source, PinSigns):
        if source.n != n:
            raise SignError("sign table size mismatch")
        return pin_table_array(n)
    if isinstance(source, SignAssignment):
        if source.n != n:
            raise SignError("sign table size mismatch")
        out = np.zeros((perms.factorial(n), n, n), dtype=np.int8)
        for (rank, a, b), s in source.table.items():
            out[rank, a, b] = s
        return out
    raise SignError(f"unsupported sign source {type(source)!r}")


# -- composite domain enumeration -------------------------------------------

def _rect_cells(a: int, b: int, p: int, q: int, n: int):
    d, w = (b - a) % n, (q - p) % n
    return [((a + i) % n, (p + j) % n) for i in range(d) for j in range(w)]


def iter_composites(n: int, x_perm: tuple[int, ...]):
    """All ordered composable pairs (r1: x->y, r2: y->z) of empty rectangles."""
    diagram = _bare_diagram(n)
    for r1 in empty_rectangles_from(diagram, x_perm, blocked=None):
        y = r1.dst
        for r2 in empty_rectangles_from(diagram, y, blocked=None):
            yield r1, r2


def composite_key(r1, r2, n: int):
    cells = Counter(_rect_cells(r1.row_lo, r1.row_hi, r1.col_lo, r1.col_hi, n))
    cells.update(_rect_cells(r2.row_lo, r2.row_hi, r2.col_lo, r2.col_hi, n))
    return tuple(sorted(cells.items()))


def _is_vertical_annulus(key, n: int) -> bool:
    cells = dict(key)
    cols = {c for (_, c) in cells}
    return len(cols) == 1 and len(cells) == n and all(v == 1 for v in cells.values())


def _is_horizontal_annulus(key, n: int) -> bool:
    cells = dict(key)
    rows = {r for (r, _) in cells}
    return len(rows) == 1 and len(cells) == n and all(v == 1 for v in cells.values())


@dataclass
class AxiomReport:
    n: int
    checked_pairs: int = 0
    checked_vertical: int = 0
    checked_horizontal: int = 0
    violations: list = field(default_factory=list)

    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> dict:
        return {
            "n": self.n,
            "checked_pairs": self.checked_pairs,
            "checked_vertical": self.checked_vertical,
            "checked_horizontal": self.checked_horizontal,
            "violations": len(self.violations),
            "witnesses": self.violations[:5],
        }


def _sign_lookup(assignment, perm, a, b) -> int:
    if isinstance(assignment, PinSigns):
        return assignment.sign(perm, a, b)
    return assignment.sign(perm, a, b)


def verify_sign_axioms(assignment, n: int | None = None, sample: int | None = None,
                       seed: int = 0) -> AxiomReport:
    """Check Definition-style axioms on composite domains, with witnesses.

    With sample=None every composite pair of every generator is enumerated
    (use for small n); otherwise `sample` random composite pairs are drawn
    with a fixed seed.
    """
    n = n if n is not None else assignment.n
    report = AxiomReport(n=n)
    rng = np.random.default_rng(seed)
    diagram = _bare_diagram(n)
    rect_memo: dict = {}

    def rects_of(perm):
        out = rect_memo.get(perm)
        if out is None:
            out = empty_rectangles_from(diagram, perm, blocked=None)
            rect_memo[perm] = out
        return out

    def check_pair(x_perm, r1, r2):
        key = composite_key(r1, r2, n)
        s1 = _sign_lookup(assignment, x_perm, r1.row_lo, r1.row_hi)
        s2 = _sign_lookup(assignment, r1.dst, r2.row_lo, r2.row_hi)
        if r2.dst == x_perm and _is_vertical_annulus(key, n):
            report.checked_vertical += 1
            if s1 * s2 != -1:
                report.violations.append(("vertical_annulus", x_perm, (r1.row_lo, r1.row_hi)))
            return
        if r2.dst == x_perm and _is_horizontal_annulus(key, n):
            report.checked_horizontal += 1
            if s1 * s2 != 1:
                report.violations.append(("horizontal_annulus", x_perm, (r1.row_lo, r1.row_hi)))
            return
        # find the alternate decompositions of the same domain
        decomps = []
        for q1 in rects_of(x_perm):
            for q2 in rects_of(q1.dst):
                if q2.dst == r2.dst and composite_key(q1, q2, n) == key:
                    decomps.append((q1, q2))
        if len(decomps) != 2:
            report.violations.append(("decomposition_count", x_perm,
                                      (r1.row_lo, r1.row_hi, r2.row_lo, r2.row_hi), len(decomps)))
            return
        report.checked_pairs += 1
        (q1, q2) = decomps[0] if decomps[1][0].row_lo == r1.row_lo and decomps[1][0].row_hi == r1.row_hi and decomps[1][0].col_lo == r1.col_lo else decomps[1]
        t1 = _sign_lookup(assignment, x_perm, q1.row_lo, q1.row_hi)
        t2 = _sign_lookup(assignment, q1.dst, q2.row_lo, q2.row_hi)
        if s1 * s2 * t1 * t2 != -1:
            report.violations.append(("alternate_decomposition", x_perm,
                                      (r1.row_lo, r1.row_hi), (r2.row_lo, r2.row_hi)))

    if sample is None:
        for perm in perms.iter_perms(n):
            for r1, r2 in iter_composites(n, perm):
                check_pair(perm, r1, r2)
    else:
        total = perms.factorial(n)
        drawn = 0
        while drawn < sample:
            perm = perms.unrank(n, int(rng.integers(total)))
            rects1 = rects_of(perm)
            r1 = rects1[int(rng.integers(len(rects1)))]
            rects2 = rects_of(r1.dst)
            r2 = rects2[int(rng.integers(len(rects2)))]
            check_pair(perm, r1, r2)
            drawn += 1
    return report


# -- the F2 linear-system solver ---------------------------------------------

DEFAULT_SOLVER_CAP = 6


def solve_sign_assignment(n: int, cap: int = DEFAULT_SOLVER_CAP,
                          order: str = "lex") -> SignAssignment:
    """Solve the axiom system over F2 for all empty rectangles of size n.

    Variables are rectangle sign bits; equations come from two-decomposition
    composite domains (sum = 1) and vertical/horizontal annuli (1 / 0).  Free
    variables -- one rectangle per spanning-tree edge of the generator graph,
    explored in deterministic `order` -- are fixed to 0, so the output is
    reproducible bit for bit.
    """
    if n < 2:
        raise SignError("grid size must be at least 2")
    if n > cap:
        raise SolverCapExceeded(f"n={n} exceeds the solver cap {cap}")
    diagram = _bare_diagram(n)
    total = perms.factorial(n)
    all_perms = list(perms.iter_perms(n))
    rects_of = [empty_rectangles_from(diagram, p, blocked=None) for p in all_perms]

    var_index: dict[tuple[int, int, int], int] = {}
    var_list: list[tuple[int, int, int]] = []
    for rank in range(total):
        for r in rects_of[rank]:
            key = (rank, r.row_lo, r.row_hi)
            var_index[key] = len(var_list)
            var_list.append(key)

    equations: list[tuple[tuple[int, ...], int]] = []

    # annuli
    for rank, perm in enumerate(all_perms):
        inv = perms.inverse(perm)
        for j in range(n):
            a, b = inv[j], inv[(j + 1) % n]
            y = rect_target(perm, a, b)
            yr = perms.rank_of(y)
            equations.append(((var_index[(rank, a, b)], var_index[(yr, b, a)]), 1))
        for i in range(n):
            b = (i + 1) % n
            y = rect_target(perm, i, b)
            yr = perms.rank_of(y)
            equations.append(((var_index[(rank, i, b)], var_index[(yr, i, b)]), 0))

    # two-decomposition composites
    for rank, perm in enumerate(all_perms):
        buckets: dict = defaultdict(list)
        for r1 in rects_of[rank]:
            y_rank = perms.rank_of(r1.dst)
            for r2 in rects_of[y_rank]:
                z_rank = perms.rank_of(r2.dst)
                key = (z_rank, composite_key(r1, r2, n))
                buckets[key].append((var_index[(rank, r1.row_lo, r1.row_hi)],
                                     var_index[(y_rank, r2.row_lo, r2.row_hi)]))
        for (z_rank, ckey), decomps in buckets.items():
            if len(decomps) == 1:
                if z_rank != rank or not (_is_vertical_annulus(ckey, n)
                                          or _is_horizontal_annulus(ckey, n)):
                    raise Inconsistent("isolated non-annular composite domain")
                continue
            if len(decomps) != 2:
                raise Inconsistent(f"composite domain with {len(decomps)} decompositions")
            (a1, a2), (b1, b2) = decomps
            equations.append(((a1, a2, b1, b2), 1))

    # gauge spanning tree over generators, explored deterministically
    ranks_in_order = range(total) if order == "lex" else range(total - 1, -1, -1)
    tree_fixed: dict[int, int] = {}
    visited = [False] * total
    root = 0 if order == "lex" else total - 1
    visited[root] = True
    frontier = [root]
    while frontier:
        nxt = []
        for rank in frontier:
            rect_iter = rects_of[rank] if order == "lex" else list(reversed(rects_of[rank]))
            for r in rect_iter:
                other = perms.rank_of(r.dst)
                if not visited[other]:
                    visited[other] = True
                    tree_fixed[var_index[(rank, r.row_lo, r.row_hi)]] = 0
                    nxt.append(other)
        frontier = nxt
    if not all(visited):
        raise Inconsistent("generator-rectangle graph is disconnected")

    values = _solve_f2(len(var_list), equations, tree_fixed)
    table = {var_list[i]: (1 if values[i] == 0 else -1) for i in range(len(var_list))}
    return SignAssignment(n=n, table=table, provenance=f"solver:v1:{order}:n{n}")


def _solve_f2(nvars: int, equations, fixed: dict[int, int]) -> list[int]:
    """Propagation-first F2 solve; falls back to elimination on the residue."""
    value: list[int | None] = [None] * nvars
    for var, val in fixed.items():
        value[var] = val
    pending = [(tuple(vs), rhs) for vs, rhs in equations]
    progress = True
    while progress:
        progress = False
        remaining = []
        for vs, rhs in pending:
            unknown = []
            acc = rhs
            for v in vs:
                if value[v] is None:
                    unknown.append(v)
                else:
                    acc ^= value[v]
            if not unknown:
                if acc:
                    raise Inconsistent("axiom equations are contradictory")
                continue
            if len(unknown) == 1:
                value[unknown[0]] = acc
                progress = True
                continue
            remaining.append((tuple(unknown), acc))
        pending = remaining
    if pending:
        # residual elimination with lexicographic pivots, leftover free -> 0
        rows = []
        for vs, rhs in pending:
            mask = 0
            for v in vs:
                mask ^= 1 << v
            rows.append((mask, rhs))
        pivots: dict[int, tuple[int, int]] = {}
        for mask, rhs in rows:
            while mask:
                p = (mask & -mask).bit_length() - 1
                if p in pivots:
                    pm, pr = pivots[p]
                    mask ^= pm
                    rhs ^= pr
                else:
                    pivots[p] = (mask, rhs)
                    break
            if not mask and rhs:
                raise Inconsistent("residual system is contradictory")
        for p in sorted(pivots, reverse=True):
            mask, rhs = pivots[p]
            acc = rhs
            m = mask & ~(1 << p)
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                if value[v] is None:
                    value[v] = 0
                acc ^= value[v]
            value[p] = acc
    return [0 if v is None else v for v in value]


# -- gauge comparison --------------------------------------------------------

@dataclass
class Gauge:
    n: int
    g: np.ndarray  # +-1 per generator rank

    def apply(self, assignment: SignAssignment) -> SignAssignment:
        table = {}
        for (rank, a, b), s in assignment.table.items():
            perm = perms.unrank(self.n, rank)
            other = perms.rank_of(rect_target(perm, a, b))
            table[(rank, a, b)] = int(self.g[rank]) * int(self.g[other]) * s
        return SignAssignment(n=self.n, table=table,
                              provenance=assignment.provenance + "+gauge")


def gauge_compare(s1: SignAssignment, s2: SignAssignment) -> Gauge:
    """Find g with s2(r) = g(x) g(y) s1(r), or raise NotGaugeEquivalent."""
    if s1.n != s2.n:
        raise SignError("sizes differ")
    n = s1.n
    total = perms.factorial(n)
    g = np.zeros(total, dtype=np.int8)
    edges: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for (rank, a, b) in s1.table:
        if (rank, a, b) not in s2.table:
            raise SignError("assignments cover different rectangle sets")
        perm = perms.unrank(n, rank)
        other = perms.rank_of(rect_target(perm, a, b))
        rel = s1.table[(rank, a, b)] * s2.table[(rank, a, b)]
        edges[rank].append((other, rel))
    for start in range(total):
        if g[start]:
            continue
        g[start] = 1
        stack = [start]
        while stack:
            x = stack.pop()
            for y, rel in edges[x]:
                want = rel * g[x]
                if g[y] == 0:
                    g[y] = want
                    stack.append(y)
                elif g[y] != want:
                    raise NotGaugeEquivalent("inconsistent cycle while propagating gauge")
    return Gauge(n=n, g=g)


# -- cache -------------------------------------------------------------------

CACHE_ENV = "GRIDSKEIN_CACHE"
CACHE_DEFAULT = ".gridskein-cache"
_CACHE_VERSION = 1


def cache_dir() -> str:
    return os.environ.get(CACHE_ENV, CACHE_DEFAULT)


def save_assignment(assignment: SignAssignment, directory: str | None = None) -> str:
    """Write signs_n<k>.bin (header + packed bits) plus a JSON sidecar."""
    directory = directory or cache_dir()
    os.makedirs(directory, exist_ok=True)
    descs = assignment.descriptors()
    bits = bytearray((len(descs) + 7) // 8)
    for i, d in enumerate(descs):
        if assignment.table[d] < 0:
            bits[i // 8] |= 1 << (i % 8)
    prov = assignment.provenance.encode()
    path = os.path.join(directory, f"signs_n{assignment.n}.bin")
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(struct.pack("<III", assignment.n, _CACHE_VERSION, len(prov)))
        fh.write(prov)
        fh.write(struct.pack("<Q", len(descs)))
        fh.write(bytes(bits))
    os.replace(tmp, path)
    sidecar = {"n": assignment.n, "version": _CACHE_VERSION,
               "provenance": assignment.provenance, "rectangles": len(descs)}
    with open(path + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=1)
    return path


def load_assignment(n: int, directory: str | None = None) -> SignAssignment | None:
    directory = directory or cache_dir()
    path = os.path.join(directory, f"signs_n{n}.bin")
    if not os.path.exists(path):
        return None
    with open(path, "rb") as fh:
        header = fh.read(12)
        nn, version, prov_len = struct.unpack("<III", header)
        if nn != n or version != _CACHE_VERSION:
            return None
        prov = fh.read(prov_len).decode()
        (count,) = struct.unpack("<Q", fh.read(8))
        bits = fh.read((count + 7) // 8)
    diagram = _bare_diagram(n)
    descs = []
    for rank, perm in enumerate(perms.iter_perms(n)):
        for r in empty_rectangles_from(diagram, perm, blocked=None):
            descs.append((rank, r.row_lo, r.row_hi))
    descs.sort()
    if len(descs) != count:
        return None
    table = {}
    for i, d in enumerate(descs):
        table[d] = -1 if (bits[i // 8] >> (i % 8)) & 1 else 1
    return SignAssignment(n=n, table=table, provenance=prov)
