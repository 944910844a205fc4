"""Catalog of verified grid diagrams used by the CLI and the test suite.

Every entry records the invariants it is expected to have (components,
determinant, signature, crossing count); validate() recomputes all of them
from scratch through the planar/Goeritz oracles, so a corrupted entry cannot
survive loading.  The block-form entries have their crossing region in the
canonical local pattern, anchored at (window row, left corridor column).
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field

from .grid import GridDiagram, grid_to_planar, grid_to_text
from .invariants import determinant, signature
from . import invariants


@dataclass
class CatalogEntry:
    name: str
    diagram: GridDiagram
    components: int
    det: int
    sigma: int | None            # None for unoriented entries
    crossings: int
    anchors: tuple[tuple[int, int], ...] = ()   # skein/cube block anchors
    notes: str = ""
    oriented_triple: dict = field(default_factory=dict)

    def validate(self) -> None:
        g = self.diagram
        assert g.component_count() == self.components, self.name
        pl = grid_to_planar(g)
        assert len(pl.crossings) == self.crossings, self.name
        assert determinant(pl) == self.det, self.name
        if self.sigma is not None:
            assert g.mode == "oriented"
            assert signature(g) == self.sigma, self.name
        if g.mode == "oriented" and self.components == 1:
            assert invariants.euler_determinant_knot(g) == self.det, self.name

    def grid_text(self) -> str:
        return grid_to_text(self.diagram)


def _e(name, diagram, components, det, sigma, crossings, anchors=(), notes="",
       oriented_triple=None) -> CatalogEntry:
    return CatalogEntry(name=name, diagram=diagram, components=components,
                        det=det, sigma=sigma, crossings=crossings,
                        anchors=tuple(anchors), notes=notes,
                        oriented_triple=dict(oriented_triple or {}))


def _twisted_unknot_xcells(n: int) -> list[tuple[int, int]]:
    """One positive kink in canonical block position, padded to size n."""
    assert n >= 4
    cells = [(0, 0), (0, 1), (2, 0), (2, 2), (3, 1), (3, 3), (1, 2), (1, n - 1)]
    for r in range(4, n):
        cells.append((r, r - 1))
        cells.append((r, r))
    if n == 4:
        return [(0, 0), (0, 1), (1, 2), (1, 3), (2, 0), (2, 2), (3, 1), (3, 3)]
    return cells


def twisted_unknot(n: int) -> GridDiagram:
    """The one-crossing unknot with its crossing region at (window 0, q 1)."""
    return GridDiagram.x_only(_twisted_unknot_xcells(n))


def oriented_twisted_unknot(n: int) -> GridDiagram:
    """Oriented version (the kink is a positive crossing)."""
    if n == 4:
        return GridDiagram.oriented([0, 3, 2, 1], [1, 2, 0, 3])
    o_cols = [0] + [n - 1] + [2, 1] + [r - 1 for r in range(4, n)]
    x_cols = [1, 2, 0, 3] + [r for r in range(4, n)]
    return GridDiagram.oriented(o_cols, x_cols)


def orientations_of(gx: GridDiagram):
    """All marker-type assignments turning an X-only diagram into an oriented one."""
    from .grid import _xonly_pairs
    row_pair, col_pair = _xonly_pairs(gx)
    comps, seen = [], set()
    for start in sorted(gx.marker_cells):
        if start in seen:
            continue
        cyc, cur, via_row = [], start, True
        while True:
            cyc.append(cur)
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
        comps.append(cyc)
    for flips in itertools.product((0, 1), repeat=len(comps)):
        o_cols, x_cols = [None] * gx.n, [None] * gx.n
        ok = True
        for comp, flip in zip(comps, flips):
            for i, (r, c) in enumerate(comp):
                if (i % 2 == 0) ^ flip:
                    if o_cols[r] is not None:
                        ok = False
                        break
                    o_cols[r] = c
                else:
                    if x_cols[r] is not None:
                        ok = False
                        break
                    x_cols[r] = c
            if not ok:
                break
        if ok and None not in o_cols and None not in x_cols:
            try:
                yield GridDiagram.oriented(o_cols, x_cols)
            except Exception:
                continue


def compatible_orientations(resolution: GridDiagram, reference: GridDiagram,
                            corridor_cols: tuple[int, int]):
    """Orientations of a resolution matching the reference outside the corridor.

    The oriented resolution of a crossing is exactly the one admitting such an
    orientation; the unoriented resolution admits none.
    """
    ref_types = {(r, c): (c == reference.o_cols[r])
                 for r, c in reference.marker_cells if c not in corridor_cols}
    for og in orientations_of(resolution):
        types = {(r, c): (c == og.o_cols[r])
                 for r, c in og.marker_cells if c not in corridor_cols}
        if types == ref_types:
            yield og


def make_oriented_triple(base_oriented: GridDiagram, anchor: tuple[int, int] | None = None):
    """Skein triple of an oriented diagram with oriented resolutions attached.

    The compatibly-orientable resolution gets its compatible orientation; the
    other resolution gets an arbitrary one (the delta-shift bookkeeping
    computes its crossing-sign difference from whatever is chosen).
    """
    from .skein import build_skein_triple
    triple = build_skein_triple(base_oriented, anchor=anchor)
    state = triple.input_state
    oriented = {state: base_oriented}
    cols = (triple.corridor.q, triple.corridor.q + 1)
    for k in range(3):
        if k == state:
            continue
        compat = list(compatible_orientations(triple.diagrams[k], base_oriented, cols))
        if compat:
            oriented[k] = compat[0]
        else:
            oriented[k] = next(iter(orientations_of(triple.diagrams[k])))
    triple.oriented = oriented
    return triple


def standard_entries() -> dict[str, CatalogEntry]:
    entries = [
        _e("unknot2", GridDiagram.oriented([0, 1], [1, 0]), 1, 1, 0, 0),
        _e("twisted_unknot4", oriented_twisted_unknot(4), 1, 1, 0, 1,
           anchors=((0, 1),), notes="positive kink in block position"),
        _e("twisted_unknot5", oriented_twisted_unknot(5), 1, 1, 0, 1, anchors=((0, 1),)),
        _e("twisted_unknot6", oriented_twisted_unknot(6), 1, 1, 0, 1, anchors=((0, 1),)),
        _e("twisted_unknot7", oriented_twisted_unknot(7), 1, 1, 0, 1, anchors=((0, 1),)),
        _e("twisted_unknot8", oriented_twisted_unknot(8), 1, 1, 0, 1, anchors=((0, 1),)),
        _e("trefoil5", GridDiagram.oriented([0, 4, 3, 2, 1], [3, 2, 1, 0, 4]),
           1, 3, -2, 3, notes="right-handed"),
        _e("trefoil5_mirror", GridDiagram.oriented([0, 1, 2, 3, 4], [2, 3, 4, 0, 1]),
           1, 3, 2, 3, notes="left-handed"),
        _e("hopf4", GridDiagram.oriented([0, 3, 2, 1], [2, 1, 0, 3]),
           2, 2, -1, 2, notes="positive Hopf link"),
        _e("hopf4_mirror", GridDiagram.oriented([0, 1, 2, 3], [2, 3, 0, 1]),
           2, 2, 1, 2, notes="negative Hopf link"),
        _e("figure_eight6", GridDiagram.oriented([0, 2, 1, 4, 3, 5], [4, 5, 3, 2, 0, 1]),
           1, 5, 0, 4),
        _e("trefoil6_block", GridDiagram.oriented([1, 2, 0, 5, 4, 3], [4, 3, 2, 1, 0, 5]),
           1, 3, -2, 4, anchors=((0, 1),),
           notes="right-handed trefoil; block crossing positive"),
        _e("hopf5_block", GridDiagram.oriented([1, 3, 2, 4, 0], [4, 2, 0, 1, 3]),
           2, 2, 1, 2, anchors=((0, 1),),
           notes="negative Hopf link; block crossing negative"),
        _e("blocked_unknot7",
           GridDiagram.x_only([(0, 0), (0, 5), (1, 2), (1, 5), (2, 3), (2, 6), (3, 1),
                               (3, 3), (4, 2), (4, 4), (5, 1), (5, 4), (6, 0), (6, 6)]),
           1, 1, None, 1, anchors=((1, 2),), notes="strict 6x6 block"),
        _e("blocked_unknot14",
           GridDiagram.x_only([(0, 0), (0, 5), (1, 2), (1, 5), (2, 3), (2, 13), (3, 1),
                               (3, 3), (4, 2), (4, 4), (5, 1), (5, 4), (6, 6), (6, 11),
                               (7, 8), (7, 11), (8, 9), (8, 12), (9, 7), (9, 9), (10, 8),
                               (10, 10), (11, 7), (11, 10), (12, 0), (12, 6), (13, 12),
                               (13, 13)]),
           1, 1, None, 2, anchors=((1, 2), (7, 8)),
           notes="two-crossing unknot, two strict 6x6 blocks"),
    ]
    return {e.name: e for e in entries}


_CATALOG: dict[str, CatalogEntry] | None = None


def catalog(validated: bool = True) -> dict[str, CatalogEntry]:
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = standard_entries()
        if validated:
            for e in _CATALOG.values():
                e.validate()
    return _CATALOG


def get(name: str) -> CatalogEntry:
    try:
        return catalog()[name]
    except KeyError:
        raise KeyError(f"no catalog entry named {name!r}") from None


def write_grid_files(directory: str) -> list[str]:
    """Write every catalog entry as a .grid file (plus BLOCK anchor lines)."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for name, entry in catalog().items():
        path = os.path.join(directory, f"{name}.grid")
        text = entry.grid_text()
        for (w, q) in entry.anchors:
            text += f"BLOCK: {w + 1} {q + 1}\n"
        with open(path, "w") as fh:
            fh.write(text)
        paths.append(path)
    return paths
