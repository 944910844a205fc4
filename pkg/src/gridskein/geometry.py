"""Corridor geometry for the one-crossing triple of grid diagrams.

Three diagrams that differ at a crossing share every marker and every
vertical circle except one.  The three candidate circles beta_0, beta_1,
beta_2 run inside a two-cell-wide corridor and braid around each other in a
full twist spanning the four marker rows of the crossing region; each pair
meets exactly twice, once among the u points (on the boundary of the
marker-free annulus b) and once among the v points (the corners shared by
the three marker-free triangles).  Every map between the three chain
complexes counts polygons with sides on these curves, so this module pins
the curves down exactly and reduces each polygon species to:

* a per-candidate scalar gate: the corridor side must pass its switch
  points in ascending order without wrapping the torus, with no reflex
  corner at any switch, and
* a marker threshold demax: the polygon's interior is marker-free iff its
  straight side is at most demax columns away from the corridor.

All coordinates are scaled by 32.  Heights are measured from the window
base row W (the bottom marker row of the region); x offsets are measured
from the distinguished circle c = q + 1, where q is the left corridor
column.  Lattice data (rows, circles, markers) lands on multiples of 16
while the braid's jogs live at odd 32nds, so no comparison ever ties.

Boundary orientations are induced from the standard torus orientation
(counterclockwise); with that convention this braid chirality is the one
for which the map identities close up.  The whole transcription is enforced
by the chain-map/homotopy identity suite, which fails loudly for any wrong
choice here.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

# Piecewise-constant x offsets of the three curves over the local window
# [0, 128) (four rows of height 32).  Outside the window each curve runs at
# its base offset.  beta_0 is the circle of the crossing diagram.
_PROFILES = {
    0: ((0, 20), (36, 9), (52, -7), (82, 9), (98, 20)),
    1: ((0, 8), (34, 22), (68, 8), (84, -8), (114, 8)),
    2: ((0, -9), (50, 7), (66, 21), (100, 7), (116, -9)),
}

# Intersection points: U[k] lies on the boundary of the marker-free annulus
# b (to the east of the corridor), V[k] is the other meeting point of beta_k
# and beta_{k+1}.  Stored as (x offset, local height).
U_POINTS = {0: (20, 34), 1: (21, 68), 2: (20, 100)}
V_POINTS = {0: (8, 82), 1: (7, 114), 2: (7, 52)}

# Physical corridor markers relative to (W, c): (row offset, x offset).
# Row W's marker sits in the left corridor column, the other three in the
# right one; which curve separates them distinguishes the three diagrams.
CORRIDOR_MARKERS = ((0, -16), (1, 16), (2, 16), (3, 16))

# Flat-diagram corridor layouts: state -> rows (relative to W) of the LEFT
# column's markers; the other two rows sit in the right column.
STATE_LEFT_ROWS = {0: (0, 3), 1: (0, 1), 2: (0, 2)}

WINDOW_ROWS = 4


def beta_offset_local(k: int, yloc: int) -> int:
    """Offset of beta_k at local height yloc in [0, 32n)."""
    if yloc >= 32 * WINDOW_ROWS:
        return _PROFILES[k][0][1]
    off = _PROFILES[k][0][1]
    for start, value in _PROFILES[k]:
        if yloc >= start:
            off = value
    return off


@dataclass(frozen=True)
class Corridor:
    """A crossing region: window base row W and left corridor column q."""

    n: int
    window: int   # W
    q: int        # left corridor column; the distinguished circle is q + 1

    @property
    def circle(self) -> int:
        return self.q + 1

    def local_height(self, y: int) -> int:
        return (y - 32 * self.window) % (32 * self.n)

    def offset(self, k: int, y: int) -> int:
        return beta_offset_local(k, self.local_height(y))

    def u_point(self, k: int) -> tuple[int, int]:
        off, yloc = U_POINTS[k]
        return off, (yloc + 32 * self.window) % (32 * self.n)

    def v_point(self, k: int) -> tuple[int, int]:
        off, yloc = V_POINTS[k]
        return off, (yloc + 32 * self.window) % (32 * self.n)

    def marker_positions(self) -> list[tuple[int, int]]:
        """Physical corridor markers as (row, x offset from the circle)."""
        return [((self.window + dr) % self.n, off) for dr, off in CORRIDOR_MARKERS]

    def flat_corridor_cells(self, state: int) -> set[tuple[int, int]]:
        """Marker cells of the straightened state-`state` diagram."""
        n = self.n
        left = {(self.window + dr) % n for dr in STATE_LEFT_ROWS[state]}
        cells = set()
        for dr, _ in CORRIDOR_MARKERS:
            r = (self.window + dr) % n
            cells.add((r, self.q if r in left else self.q + 1))
        return cells


# -- polygon candidates ------------------------------------------------------

# Side of the corridor the region lives on.  An EAST region has the corridor
# curves as its western boundary and covers the marker-free annulus b, so in
# the left/right-domain language it is a right domain; WEST regions are left
# domains.  (Asserted against the annulus in the test suite.)
EAST = "east"
WEST = "west"


@dataclass(frozen=True)
class RectLikeCandidate:
    """A validated pentagon/hexagon/heptagon shape, up to the straight side.

    For a generator x with corridor component in row `arow` and straight
    component on circle j2 = x[brow], the polygon exists with marker-free
    interior iff the straightened rectangle R(x; bottom, top) is
    generator-empty and the column distance from the circle to j2 (measured
    on the region's side) is at most demax.
    """

    kind: str
    k: int
    arow: int        # row of the source corridor component
    brow: int        # row of the moving straight component
    side: str        # EAST or WEST
    bottom: int      # bottom row of the span (arow iff the side is EAST)
    top: int
    demax: int       # survives iff distance(circle -> j2) <= demax


@dataclass(frozen=True)
class TriLikeCandidate:
    """A validated triangle/quadrilateral (fixed shape, no straight side)."""

    kind: str
    k: int
    arow: int
    direction: str   # "up" or "down"


def _chain_heights(cor: Corridor, bottom_row: int, top_row: int,
                   switches: list[tuple[int, int]]) -> list[tuple[int, int]] | None:
    """Segments of the corridor side, ascending from 32*bottom to 32*top.

    Returns (y_start, length) per curve segment, or None when the chain
    cannot visit the switch points in order without wrapping the torus.
    """
    n32 = 32 * cor.n
    start = (32 * bottom_row) % n32
    need = (32 * top_row - 32 * bottom_row) % n32
    cur = start
    total = 0
    segs = []
    for _, wy in switches:
        step = (wy - cur) % n32
        if step == 0:
            return None
        segs.append((cur, step))
        total += step
        cur = wy
    step = (32 * top_row - cur) % n32
    if step == 0:
        return None
    segs.append((cur, step))
    total += step
    if total != need:
        return None
    return segs


def _switch_legal(cor: Corridor, below: int, above: int, w: tuple[int, int],
                  side: str) -> bool:
    """No reflex corner at a switch point of the corridor side.

    Exactly one of the two curves jogs horizontally at the switch height.
    When the upper curve jogs, its continuation must move away from the
    region; when the lower curve jogs, it must arrive from the region side.
    """
    wx, wy = w
    above_lo, above_hi = cor.offset(above, wy - 1), cor.offset(above, wy + 1)
    if above_lo != above_hi:
        return (side == EAST) == (above_hi > wx)
    below_lo, below_hi = cor.offset(below, wy - 1), cor.offset(below, wy + 1)
    if below_lo != below_hi:
        return (side == EAST) == (below_lo > wx)
    return False


def _marker_demax(cor: Corridor, side: str, pieces, bottom_row: int, span: int,
                  markers: list[tuple[int, int]]) -> int:
    """Largest straight-side distance keeping every marker outside.

    markers arrive as (row, exact x offset from the circle), normalized to
    (-32, 32n - 32].
    """
    n32 = 32 * cor.n
    demax = cor.n - 1
    for row, off in markers:
        ym = (32 * row + 16) % n32
        pos = (ym - 32 * bottom_row) % n32
        if pos >= 32 * span:
            continue
        prof = None
        for y0, ln, curve in pieces:
            if (ym - y0) % n32 < ln:
                prof = cor.offset(curve, ym)
                break
        if prof is None:
            continue
        if side == EAST:
            if off > prof:
                demax = min(demax, off // 32 if off > 0 else -1)
        else:
            woff = (-off) % n32
            if woff > n32 - 32:
                woff -= n32
            if woff > -prof:
                demax = min(demax, woff // 32 if woff > 0 else -1)
    return demax


_KIND_CURVES = {
    # side -> (ascending curve labels rel. k, ascending switch labels):
    # a WEST region has the source corridor component at the bottom of the
    # span and its corridor side ascends source-to-target.
    "pentagon": {
        EAST: ((0, 1), ("u0",)),
        WEST: ((1, 0), ("u0",)),
    },
    "hexagon": {
        EAST: ((0, 1, 2), ("u0", "u1")),
        WEST: ((2, 1, 0), ("u1", "u0")),
    },
    "heptagon": {
        EAST: ((0, 1, 2, 0), ("u0", "u1", "u2")),
        WEST: ((0, 2, 1, 0), ("u2", "u1", "u0")),
    },
}


def _resolve_point(cor: Corridor, k: int, label: str) -> tuple[int, int]:
    idx = (k + int(label[1])) % 3
    return cor.u_point(idx) if label[0] == "u" else cor.v_point(idx)


def rect_like_candidates(cor: Corridor, kind: str, k: int,
                         extra_markers: list[tuple[int, int]]) -> list[RectLikeCandidate]:
    """All geometrically valid candidates for a rectangle-like polygon family.

    extra_markers: markers outside the corridor columns, as (row, x offset
    from the circle) with offsets normalized to (-32, 32n - 32].
    """
    n = cor.n
    markers = [(r, off) for r, off in cor.marker_positions()] + extra_markers
    out = []
    for side, (curve_shifts, switch_labels) in _KIND_CURVES[kind].items():
        curves = [(k + s) % 3 for s in curve_shifts]
        switches = [_resolve_point(cor, k, lab) for lab in switch_labels]
        for arow_off in range(n):
            arow = (cor.window + arow_off) % n
            for brow in range(n):
                if brow == arow:
                    continue
                bottom, top = (arow, brow) if side == EAST else (brow, arow)
                segs = _chain_heights(cor, bottom, top, switches)
                if segs is None:
                    continue
                ok = True
                for i, w in enumerate(switches):
                    if not _switch_legal(cor, curves[i], curves[i + 1], w, side):
                        ok = False
                        break
                if not ok:
                    continue
                pieces = [(y, ln, c) for (y, ln), c in zip(segs, curves)]
                span = (top - bottom) % n
                demax = _marker_demax(cor, side, pieces, bottom, span, markers)
                if demax < 1:
                    continue
                out.append(RectLikeCandidate(kind=kind, k=k, arow=arow, brow=brow,
                                             side=side, bottom=bottom, top=top,
                                             demax=demax))
    return out


_TRI_SPECS = {
    # kind -> (destination curve shift, chain of corners toward the apex)
    "triangle": (1, ("v0",)),
    "quad": (2, ("u1", "v0")),
}


def tri_like_candidates(cor: Corridor, kind: str, k: int,
                        extra_markers: list[tuple[int, int]]) -> list[TriLikeCandidate]:
    """Valid triangles (to beta_{k+1}) or quadrilaterals (to beta_{k+2})."""
    n = cor.n
    n32 = 32 * n
    dst_shift, chain_labels = _TRI_SPECS[kind]
    src, dst = k, (k + dst_shift) % 3
    markers = [(r, off) for r, off in cor.marker_positions()] + extra_markers
    u_block = cor.u_point(k)  # the other crossing of beta_k and beta_{k+1}
    out = []
    for arow in range(n):
        ya = (32 * arow) % n32
        off_s, off_d = cor.offset(src, ya), cor.offset(dst, ya)
        for direction in ("up", "down"):
            # counterclockwise boundary: the source corner sits west of the
            # target corner when the region opens upward
            if direction == "up" and not off_s < off_d:
                continue
            if direction == "down" and not off_s > off_d:
                continue
            pts = [_resolve_point(cor, k, lab) for lab in chain_labels]
            apex = pts[-1]
            cur, total = ya, 0
            okchain = True
            for _, wy in pts:
                step = (wy - cur) % n32 if direction == "up" else (cur - wy) % n32
                if step == 0:
                    okchain = False
                    break
                total += step
                cur = wy
            direct = (apex[1] - ya) % n32 if direction == "up" else (ya - apex[1]) % n32
            if not okchain or total != direct:
                continue
            if kind == "triangle":
                # the two curves must not cross strictly between base and apex
                ub = (u_block[1] - ya) % n32 if direction == "up" else (ya - u_block[1]) % n32
                if 0 < ub < direct:
                    continue
            if kind == "quad":
                # the chain hugs the target side: its switch point must not
                # put a reflex corner on the region boundary
                mid = pts[0]
                if direction == "up":
                    below, above, reg = (k + 2) % 3, (k + 1) % 3, WEST
                else:
                    below, above, reg = (k + 1) % 3, (k + 2) % 3, EAST
                if not _switch_legal(cor, below, above, mid, reg):
                    continue
            if not _tri_region_clear(cor, kind, k, src, dst, ya, direction, pts, markers):
                continue
            out.append(TriLikeCandidate(kind=kind, k=k, arow=arow, direction=direction))
    return out


def _tri_region_clear(cor: Corridor, kind: str, k: int, src: int, dst: int,
                      ya: int, direction: str, pts, markers) -> bool:
    """No marker inside, and the two sides never touch except at the apex."""
    n32 = 32 * cor.n
    apex_y = pts[-1][1]
    span = (apex_y - ya) % n32 if direction == "up" else (ya - apex_y) % n32

    def pos(y: int) -> int:
        return (y - ya) % n32 if direction == "up" else (ya - y) % n32

    def side_curves(p: int) -> tuple[int, int]:
        # (west curve, east curve) at distance p from the base
        if kind == "triangle":
            far = dst
        else:
            mid_pos = pos(pts[0][1])
            far = dst if p < mid_pos else (k + 1) % 3
        a, b = src, far
        if direction == "down":
            a, b = b, a
        return a, b

    events = {0, span}
    for kk in range(3):
        for start, _ in _PROFILES[kk]:
            y = (start + 32 * cor.window) % n32
            p = pos(y)
            if 0 < p < span:
                events.add(p)
    for y0 in range(0, n32, 32):
        p = pos(y0)
        if 0 < p < span:
            events.add(p)
    seq = sorted(events)
    for lo, hi in zip(seq, seq[1:]):
        p = (lo + hi) // 2
        y = (ya + p) % n32 if direction == "up" else (ya - p) % n32
        west, east = side_curves(p)
        if not cor.offset(west, y) < cor.offset(east, y):
            return False
    for row, off in markers:
        ym = (32 * row + 16) % n32
        p = pos(ym)
        if not 0 < p < span:
            continue
        west, east = side_curves(p)
        if cor.offset(west, ym) < off < cor.offset(east, ym):
            return False
    return True


@lru_cache(maxsize=None)
def annulus_profile(n: int) -> tuple[tuple[int, int, int], ...]:
    """The west boundary of the marker-free annulus b: (ylocal, length, curve)."""
    events = sorted({start for k in _PROFILES for start, _ in _PROFILES[k]} | {0, 32 * WINDOW_ROWS})
    out = []
    for lo, hi in zip(events, events[1:] + [32 * n]):
        offs = {k: beta_offset_local(k, lo) for k in range(3)}
        east = max(offs, key=lambda k: offs[k])
        out.append((lo, hi - lo, east))
    return tuple(out)
