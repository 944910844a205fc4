"""Grid diagram model: validation, generators, empty rectangles, gradings.

Conventions (fixed once, used everywhere):

* rows are indexed 0..n-1 bottom to top, columns 0..n-1 left to right;
  user-facing text files are 1-based.
* vertical circle j is the line x = j; cell (row i, col j) is the unit square
  between circles j, j+1 and heights i, i+1.  All row/column arithmetic is
  mod n (the diagram lives on a torus).
* a generator assigns to each row a vertical circle; its point for row i is
  (perm[i], i).  Markers sit at half-integer positions (j + 1/2, i + 1/2).
* gradings are stored doubled (maslov2 = 2M, ...) so that everything is an
  exact integer even for links.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Literal, Sequence

from . import perms


class GridError(ValueError):
    """Base class for malformed grid input."""


class SizeMismatch(GridError):
    pass


class DuplicateMarker(GridError):
    pass


class RowColumnCount(GridError):
    pass


class UngradedMode(GridError):
    """Raised when an operation needs O/X types but the diagram has only X's."""


def _cyc_between(t: int, lo: int, hi: int, mod: int) -> bool:
    """Is t strictly inside the cyclic open interval (lo, hi)?"""
    return 0 < (t - lo) % mod < (hi - lo) % mod


def _cell_in_span(j: int, lo: int, width: int, mod: int) -> bool:
    """Is cell j among the width cells lo, lo+1, ... (cyclically)?"""
    return (j - lo) % mod < width


@dataclass(frozen=True)
class GridDiagram:
    """A toroidal grid diagram, either oriented (O and X) or X-only."""

    n: int
    mode: Literal["oriented", "x_only"]
    o_cols: tuple[int, ...] | None
    x_cols: tuple[int, ...] | None
    marker_cells: frozenset[tuple[int, int]]  # (row, col), every marker

    # -- constructors ------------------------------------------------------

    @staticmethod
    def oriented(o_cols: Sequence[int], x_cols: Sequence[int]) -> "GridDiagram":
        return validate_grid(o_cols=o_cols, x_cols=x_cols, mode="oriented")

    @staticmethod
    def x_only(marker_cells) -> "GridDiagram":
        return validate_grid(marker_cells=marker_cells, mode="x_only")

    # -- basic queries -----------------------------------------------------

    def markers(self) -> frozenset[tuple[int, int]]:
        return self.marker_cells

    def row_cols(self, row: int) -> tuple[int, ...]:
        """Columns of the markers in a row, sorted."""
        return tuple(sorted(c for (r, c) in self.marker_cells if r == row))

    def col_rows(self, col: int) -> tuple[int, ...]:
        return tuple(sorted(r for (r, c) in self.marker_cells if c == col))

    def forget(self) -> "GridDiagram":
        """Forget marker types, producing the X-only diagram."""
        return GridDiagram.x_only(self.marker_cells)

    def component_count(self) -> int:
        if self.mode == "oriented":
            o_row = {c: r for r, c in enumerate(self.o_cols)}
            seen, count = set(), 0
            for start in range(self.n):
                if start in seen:
                    continue
                count += 1
                i = start
                while i not in seen:
                    seen.add(i)
                    i = o_row[self.x_cols[i]]
            return count
        return planar_xonly_components(self)

    def translate(self, dr: int, dc: int) -> "GridDiagram":
        """Shift the fundamental domain; the toroidal diagram is unchanged."""
        n = self.n
        cells = frozenset(((r + dr) % n, (c + dc) % n) for r, c in self.marker_cells)
        if self.mode == "x_only":
            return GridDiagram.x_only(cells)
        o = tuple((self.o_cols[(i - dr) % n] + dc) % n for i in range(n))
        x = tuple((self.x_cols[(i - dr) % n] + dc) % n for i in range(n))
        return GridDiagram.oriented(o, x)


def validate_grid(o_cols: Sequence[int] | None = None,
                  x_cols: Sequence[int] | None = None,
                  marker_cells=None,
                  mode: str = "oriented") -> GridDiagram:
    """Check raw marker data and build a GridDiagram.

    Raises SizeMismatch / DuplicateMarker / RowColumnCount on bad input.
    """
    if mode == "oriented":
        if o_cols is None or x_cols is None:
            raise SizeMismatch("oriented mode needs O and X column lists")
        n = len(o_cols)
        if n < 2 or len(x_cols) != n:
            raise SizeMismatch(f"marker lists must have equal length >= 2, got {len(o_cols)}/{len(x_cols)}")
        o = tuple(int(c) for c in o_cols)
        x = tuple(int(c) for c in x_cols)
        for name, cols in (("O", o), ("X", x)):
            if any(not 0 <= c < n for c in cols):
                raise SizeMismatch(f"{name} column out of range")
            if len(set(cols)) != n:
                raise RowColumnCount(f"{name} markers do not hit every column once")
        for i in range(n):
            if o[i] == x[i]:
                raise DuplicateMarker(f"O and X share cell (row {i}, col {o[i]})")
        cells = frozenset({(i, o[i]) for i in range(n)} | {(i, x[i]) for i in range(n)})
        return GridDiagram(n=n, mode="oriented", o_cols=o, x_cols=x, marker_cells=cells)

    if mode == "x_only":
        if marker_cells is None:
            raise SizeMismatch("x_only mode needs marker cells")
        cells = [(int(r), int(c)) for r, c in marker_cells]
        if len(cells) != len(set(cells)):
            raise DuplicateMarker("a cell is marked twice")
        cellset = frozenset(cells)
        if not cells:
            raise SizeMismatch("no markers")
        n2 = len(cells)
        if n2 % 2:
            raise RowColumnCount("odd number of markers")
        n = n2 // 2
        if n < 2:
            raise SizeMismatch("grid number must be >= 2")
        if any(not (0 <= r < n and 0 <= c < n) for r, c in cells):
            raise SizeMismatch("marker out of range for inferred grid size")
        for i in range(n):
            if sum(1 for r, _ in cells if r == i) != 2:
                raise RowColumnCount(f"row {i} does not have exactly two markers")
            if sum(1 for _, c in cells if c == i) != 2:
                raise RowColumnCount(f"column {i} does not have exactly two markers")
        return GridDiagram(n=n, mode="x_only", o_cols=None, x_cols=None, marker_cells=cellset)

    raise SizeMismatch(f"unknown mode {mode!r}")


# -- text format -----------------------------------------------------------

def parse_grid_text(text: str) -> GridDiagram:
    """Parse the grid text format (1-based columns).

    Oriented:  line 1 "n", line 2 "O: c1 ... cn", line 3 "X: c1 ... cn".
    X-only:    line 1 "n", then n lines "M: a b" (row 1 = bottom row first).
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise SizeMismatch("empty grid file")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise SizeMismatch(f"first line must be the grid number, got {lines[0]!r}") from exc
    body = [ln for ln in lines[1:] if not ln.upper().startswith("BLOCK")]
    if body and body[0].upper().startswith("O"):
        if len(body) < 2 or not body[1].upper().startswith("X"):
            raise SizeMismatch("oriented grid file needs an O: line then an X: line")
        o = [int(t) - 1 for t in body[0].split(":", 1)[1].split()]
        x = [int(t) - 1 for t in body[1].split(":", 1)[1].split()]
        if len(o) != n or len(x) != n:
            raise SizeMismatch("marker count does not match the grid number")
        return validate_grid(o_cols=o, x_cols=x, mode="oriented")
    cells = []
    mlines = [ln for ln in body if ln.upper().startswith("M")]
    if len(mlines) != n:
        raise SizeMismatch(f"x_only grid file needs {n} M: lines, got {len(mlines)}")
    for row, ln in enumerate(mlines):
        toks = ln.split(":", 1)[1].split()
        if len(toks) != 2:
            raise RowColumnCount(f"row {row + 1} must list two columns")
        for t in toks:
            cells.append((row, int(t) - 1))
    return validate_grid(marker_cells=cells, mode="x_only")


def grid_to_text(g: GridDiagram) -> str:
    if g.mode == "oriented":
        o = " ".join(str(c + 1) for c in g.o_cols)
        x = " ".join(str(c + 1) for c in g.x_cols)
        return f"{g.n}\nO: {o}\nX: {x}\n"
    lines = [str(g.n)]
    for r in range(g.n):
        a, b = g.row_cols(r)
        lines.append(f"M: {a + 1} {b + 1}")
    return "\n".join(lines) + "\n"


# -- generators ------------------------------------------------------------

def enumerate_generators(g: GridDiagram) -> Iterator[tuple[int, ...]]:
    """All n! generators in Lehmer-rank order."""
    return perms.iter_perms(g.n)


def generator_by_rank(g: GridDiagram, rank: int) -> tuple[int, ...]:
    return perms.unrank(g.n, rank)


# -- empty rectangles ------------------------------------------------------

@dataclass(frozen=True)
class EmptyRect:
    """An empty rectangle from one generator to another.

    Row span is the cyclic interval [row_lo, row_lo + height); the column span
    starts at the source generator's bottom-left corner.
    """

    src: tuple[int, ...]
    dst: tuple[int, ...]
    row_lo: int  # bottom moving row (a corner of src)
    row_hi: int  # top moving row
    col_lo: int
    col_hi: int
    markers_inside: int

    def height(self, n: int) -> int:
        return (self.row_hi - self.row_lo) % n


def rectangle_interior_clear(perm: tuple[int, ...], a: int, b: int, n: int) -> bool:
    """No component of perm lies strictly inside the rectangle R(perm; a, b)."""
    p, q = perm[a], perm[b]
    d = (b - a) % n
    for step in range(1, d):
        i = (a + step) % n
        if _cyc_between(perm[i], p, q, n):
            return False
    return True


def markers_in_rect(cells, a: int, b: int, p: int, q: int, n: int) -> int:
    d = (b - a) % n
    w = (q - p) % n
    return sum(1 for (r, c) in cells
               if (r - a) % n < d and (c - p) % n < w)


def empty_rectangles_from(g: GridDiagram, perm: tuple[int, ...],
                          blocked: str | None = None) -> list[EmptyRect]:
    """All rectangles in Rect°(perm, .) with their blocked-marker counts.

    blocked selects the marker policy: "all" (oriented differential, O and X
    both block), "x" (X-only differential) or None (no filtering; every
    generator-empty rectangle is returned with its marker count).
    """
    n = g.n
    if blocked == "x" and g.mode == "oriented":
        cells = frozenset((i, c) for i, c in enumerate(g.x_cols))
    else:
        cells = g.marker_cells
    out = []
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            if not rectangle_interior_clear(perm, a, b, n):
                continue
            p, q = perm[a], perm[b]
            inside = markers_in_rect(cells, a, b, p, q, n)
            if blocked is not None and inside:
                continue
            dst = list(perm)
            dst[a], dst[b] = q, p
            out.append(EmptyRect(src=perm, dst=tuple(dst), row_lo=a, row_hi=b,
                                 col_lo=p, col_hi=q, markers_inside=inside))
    return out


def candidate_rectangle_count(n: int) -> int:
    """Rectangles from any generator before emptiness filtering: n(n-1)."""
    return n * (n - 1)


# -- gradings --------------------------------------------------------------

@dataclass(frozen=True)
class Bigrading:
    """Doubled Maslov/Alexander/delta gradings (2M, 2A, 2A - 2M)."""

    maslov2: int
    alex2: int

    @property
    def delta2(self) -> int:
        return self.alex2 - self.maslov2

    def shifted(self, dm2: int, da2: int) -> "Bigrading":
        return Bigrading(self.maslov2 + dm2, self.alex2 + da2)


def _j2(points_a, points_b) -> int:
    """Doubled J: ordered southwest-northeast pairs, counted both ways."""
    total = 0
    for ax, ay in points_a:
        for bx, by in points_b:
            if ax < bx and ay < by:
                total += 1
            if bx < ax and by < ay:
                total += 1
    return total


def grading(g: GridDiagram, perm: tuple[int, ...]) -> Bigrading:
    """Maslov/Alexander bigrading of a generator (oriented diagrams only).

    Points are taken in the fundamental domain [0,n) x [0,n), generators at
    integer and markers at half-integer coordinates; doubled coordinates keep
    the arithmetic integral.  The result does not depend on the choice of
    fundamental domain (asserted in tests, not assumed here).
    """
    if g.mode != "oriented":
        raise UngradedMode("gradings need the O/X distinction")
    n = g.n
    xs = [(2 * perm[i], 2 * i) for i in range(n)]
    os_ = [(2 * c + 1, 2 * i + 1) for i, c in enumerate(g.o_cols)]
    xs_m = [(2 * c + 1, 2 * i + 1) for i, c in enumerate(g.x_cols)]
    j_xx = _j2(xs, xs)
    j_xo = _j2(xs, os_)
    j_oo = _j2(os_, os_)
    j_xX = _j2(xs, xs_m)
    j_XX = _j2(xs_m, xs_m)
    maslov2 = j_xx - 2 * j_xo + j_oo + 2
    alex2 = j_xX - j_xo - j_XX // 2 + j_oo // 2 - (n - 1)
    return Bigrading(maslov2, alex2)


# -- planar diagram --------------------------------------------------------

@dataclass(frozen=True)
class Crossing:
    col: int          # column of the vertical (over) strand
    row: int          # row of the horizontal (under) strand
    sign: int         # 0 in unoriented diagrams
    over_up: bool     # vertical strand points up (meaningless if unoriented)
    under_east: bool


@dataclass
class PlanarLinkDiagram:
    """Planar projection extracted from a grid (horizontal strands underpass)."""

    n: int
    oriented: bool
    crossings: list[Crossing]
    # strands in doubled planar coordinates (x2, y2 in 0..2n)
    segments_h: list[tuple[int, int, int]]  # (y2, x2_lo, x2_hi)
    segments_v: list[tuple[int, int, int]]  # (x2, y2_lo, y2_hi)
    components: int
    writhe: int = 0
    component_of_row: dict = field(default_factory=dict)

    def negative_crossings(self) -> int:
        return sum(1 for c in self.crossings if c.sign < 0)

    def positive_crossings(self) -> int:
        return sum(1 for c in self.crossings if c.sign > 0)


def _xonly_pairs(g: GridDiagram):
    row_pair = {r: g.row_cols(r) for r in range(g.n)}
    col_pair = {c: g.col_rows(c) for c in range(g.n)}
    return row_pair, col_pair


def planar_xonly_components(g: GridDiagram) -> int:
    """Components of the link presented by an X-only diagram."""
    row_pair, col_pair = _xonly_pairs(g)
    cells = set(g.marker_cells)
    seen: set[tuple[int, int]] = set()
    count = 0
    while cells - seen:
        count += 1
        start = min(cells - seen)
        cur, via_row = start, True
        while True:
            seen.add(cur)
            r, c = cur
            if via_row:
                a, b = row_pair[r]
                cur = (r, b if c == a else a)
            else:
                a, b = col_pair[c]
                cur = (b if r == a else a, c)
            via_row = not via_row
            if cur == start and via_row:
                break
            seen.add(cur)
    return count


def grid_to_planar(g: GridDiagram) -> PlanarLinkDiagram:
    """Planar link projection; vertical segments are always the overpass."""
    n = g.n
    segs_h, segs_v, crossings = [], [], []
    if g.mode == "oriented":
        o_row = {c: r for r, c in enumerate(g.o_cols)}
        x_row = {c: r for r, c in enumerate(g.x_cols)}
        hinfo = []
        for i in range(n):
            xo, xx = 2 * g.o_cols[i] + 1, 2 * g.x_cols[i] + 1
            segs_h.append((2 * i + 1, min(xo, xx), max(xo, xx)))
            hinfo.append((i, xo, xx))
        vinfo = []
        for c in range(n):
            yx, yo = 2 * x_row[c] + 1, 2 * o_row[c] + 1
            segs_v.append((2 * c + 1, min(yx, yo), max(yx, yo)))
            vinfo.append((c, yx, yo))
        writhe = 0
        for c, yx, yo in vinfo:
            x2 = 2 * c + 1
            for i, xo, xx in hinfo:
                y2 = 2 * i + 1
                if min(yx, yo) < y2 < max(yx, yo) and min(xo, xx) < x2 < max(xo, xx):
                    over_up = yo > yx            # X -> O goes upward
                    under_east = xx > xo         # O -> X goes eastward
                    # det[over; under] with over = (0, +-1), under = (+-1, 0)
                    sign = -(1 if over_up else -1) * (1 if under_east else -1)
                    writhe += sign
                    crossings.append(Crossing(c, i, sign, over_up, under_east))
        return PlanarLinkDiagram(n=n, oriented=True, crossings=crossings,
                                 segments_h=segs_h, segments_v=segs_v,
                                 components=g.component_count(), writhe=writhe)
    # X-only: chords between the two markers of each row/column.
    row_pair, col_pair = _xonly_pairs(g)
    for i in range(n):
        a, b = row_pair[i]
        segs_h.append((2 * i + 1, 2 * a + 1, 2 * b + 1))
    for c in range(n):
        a, b = col_pair[c]
        segs_v.append((2 * c + 1, 2 * a + 1, 2 * b + 1))
    for x2, ylo, yhi in segs_v:
        for y2, xlo, xhi in segs_h:
            if ylo < y2 < yhi and xlo < x2 < xhi:
                crossings.append(Crossing((x2 - 1) // 2, (y2 - 1) // 2, 0, True, True))
    return PlanarLinkDiagram(n=n, oriented=False, crossings=crossings,
                             segments_h=segs_h, segments_v=segs_v,
                             components=planar_xonly_components(g))
