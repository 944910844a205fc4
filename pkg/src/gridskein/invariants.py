"""Classical invariants from the planar projection: det, signature, thinness.

The determinant and signature come from a checkerboard coloring of the
projection.  Every strand runs on the half-integer lattice, so regions are
computed exactly by union-find on a doubled grid; the Goeritz matrix of the
white regions plus the Gordon-Litherland correction term gives the signature
uniformly for links.  Both checkerboard colorings are computed and must
agree, which is asserted on every call.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .grid import GridDiagram, PlanarLinkDiagram, grid_to_planar


class DisconnectedDiagram(ValueError):
    pass


@dataclass
class GoeritzData:
    """Goeritz matrix of one checkerboard color class plus its correction."""

    matrix: list[list[int]]       # full (undeleted) Goeritz matrix
    correction: int               # mu = sum of eta over type II crossings
    regions: int

    def reduced(self, drop: int = 0) -> list[list[int]]:
        m = self.matrix
        idx = [i for i in range(len(m)) if i != drop]
        return [[m[i][j] for j in idx] for i in idx]


def _region_structure(diagram: PlanarLinkDiagram):
    """Union-find regions of the complement on a doubled grid with a border."""
    n2 = 2 * diagram.n
    cells = [(i, j) for i in range(-1, n2 + 1) for j in range(-1, n2 + 1)]
    index = {c: t for t, c in enumerate(cells)}
    parent = list(range(len(cells)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    h_walls = set()
    for y2, xlo, xhi in diagram.segments_h:
        for i in range(xlo, xhi):
            h_walls.add((i, y2))
    v_walls = set()
    for x2, ylo, yhi in diagram.segments_v:
        for j in range(ylo, yhi):
            v_walls.add((x2, j))
    # adjacency: the east neighbor is blocked by a vertical wall segment at
    # x = i+1 over height j, the north neighbor by a horizontal wall at j+1
    for (i, j) in cells:
        east = (i + 1, j)
        if east in index and (i + 1, j) not in v_walls:
            union(index[(i, j)], index[east])
        north = (i, j + 1)
        if north in index and (i, j + 1) not in h_walls:
            union(index[(i, j)], index[north])

    color = {}
    for (i, j) in cells:
        c = 0
        for y2, xlo, xhi in diagram.segments_h:
            if y2 <= j and xlo <= i < xhi:
                c ^= 1
        color[(i, j)] = c
    rep_of_cell = {c: find(index[c]) for c in cells}
    regions = sorted(set(rep_of_cell.values()))
    region_color = {}
    for c in cells:
        r = rep_of_cell[c]
        if r in region_color and region_color[r] != color[c]:
            raise AssertionError("checkerboard coloring inconsistent within a region")
        region_color[r] = color[c]
    return rep_of_cell, regions, region_color


def _goeritz(diagram: PlanarLinkDiagram, white: int) -> GoeritzData:
    rep_of_cell, regions, region_color = _region_structure(diagram)
    white_regions = [r for r in regions if region_color[r] == white]
    widx = {r: t for t, r in enumerate(white_regions)}
    m = len(white_regions)
    mat = [[0] * m for _ in range(m)]
    mu = 0
    for c in diagram.crossings:
        x2, y2 = 2 * c.col + 1, 2 * c.row + 1
        ne = rep_of_cell[(x2, y2)]
        nw = rep_of_cell[(x2 - 1, y2)]
        sw = rep_of_cell[(x2 - 1, y2 - 1)]
        se = rep_of_cell[(x2, y2 - 1)]
        if region_color[ne] == white:
            pair = (ne, sw)
            eta = 1
        else:
            pair = (nw, se)
            eta = -1
        # type II when the two oriented strands run antiparallel along the
        # white band; for a vertical overpass this reads off the direction
        # bits together with which diagonal is white
        if diagram.oriented:
            antiparallel = (c.over_up == c.under_east) != (eta == 1)
            if antiparallel:
                mu += eta
        a, b = widx[pair[0]], widx[pair[1]]
        if a == b:
            # a nugatory crossing touches the same white region twice and
            # contributes nothing off-diagonal
            continue
        mat[a][b] -= eta
        mat[b][a] -= eta
    for i in range(m):
        mat[i][i] = -sum(mat[i][j] for j in range(m) if j != i)
    return GoeritzData(matrix=mat, correction=mu, regions=m)


def _det_int(mat: list[list[int]]) -> int:
    """Exact determinant by fraction-free elimination."""
    m = len(mat)
    if m == 0:
        return 1
    a = [[Fraction(v) for v in row] for row in mat]
    det = Fraction(1)
    for col in range(m):
        piv = next((r for r in range(col, m) if a[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, m):
            f = a[r][col] * inv
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    assert det.denominator == 1
    return int(det)


def _signature_sym(mat: list[list[int]]) -> int:
    """Signature of a symmetric integer matrix via exact LDL-style pivoting."""
    m = len(mat)
    a = [[Fraction(v) for v in row] for row in mat]
    pos = neg = 0
    size = m
    while size:
        sub = a
        piv = next((i for i in range(size) if sub[i][i]), None)
        if piv is None:
            off = None
            for i in range(size):
                for j in range(i + 1, size):
                    if sub[i][j]:
                        off = (i, j)
                        break
                if off:
                    break
            if off is None:
                break  # zero matrix: remaining contributes nothing
            i, j = off
            # a hyperbolic pair contributes (+1, -1)
            pos += 1
            neg += 1
            keep = [t for t in range(size) if t not in (i, j)]
            b = [[sub[r][c] for c in keep] for r in keep]
            for ri, r in enumerate(keep):
                for ci, c in enumerate(keep):
                    b[ri][ci] = sub[r][c] - (sub[r][i] * sub[j][c] + sub[r][j] * sub[i][c]) / sub[i][j]
            a = b
            size -= 2
            continue
        d = sub[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        keep = [t for t in range(size) if t != piv]
        b = [[sub[r][c] - sub[r][piv] * sub[piv][c] / d for c in keep] for r in keep]
        a = b
        size -= 1
    return pos - neg


def _check_connected(diagram: PlanarLinkDiagram) -> None:
    if not diagram.crossings and diagram.components > 1:
        raise DisconnectedDiagram("split diagram has no checkerboard signature")
    # connectivity of the projection: every region count matches Euler's count
    # c + 2 for a connected 4-valent projection
    rep_of_cell, regions, _ = _region_structure(diagram)
    if len(regions) != len(diagram.crossings) + 2:
        raise DisconnectedDiagram(
            f"projection is not connected: {len(regions)} regions for {len(diagram.crossings)} crossings")


def goeritz_data(arg: GridDiagram | PlanarLinkDiagram, white: int = 0) -> GoeritzData:
    diagram = arg if isinstance(arg, PlanarLinkDiagram) else grid_to_planar(arg)
    return _goeritz(diagram, white)


def determinant(arg: GridDiagram | PlanarLinkDiagram) -> int:
    """|det L| from the Goeritz matrix; both colorings must agree."""
    diagram = arg if isinstance(arg, PlanarLinkDiagram) else grid_to_planar(arg)
    _check_connected(diagram)
    vals = []
    for white in (0, 1):
        g = _goeritz(diagram, white)
        red = g.reduced(0)
        vals.append(abs(_det_int(red)))
        # independence of the dropped region
        if g.regions > 1:
            alt = abs(_det_int(g.reduced(g.regions - 1)))
            if alt != vals[-1]:
                raise AssertionError("determinant depends on the dropped region")
    if vals[0] != vals[1]:
        raise AssertionError("determinant differs between checkerboard colorings")
    return vals[0]


def signature(arg: GridDiagram | PlanarLinkDiagram) -> int:
    """Link signature via the Goeritz form and its correction term."""
    diagram = arg if isinstance(arg, PlanarLinkDiagram) else grid_to_planar(arg)
    if not diagram.oriented:
        raise ValueError("signature needs an oriented diagram")
    _check_connected(diagram)
    vals = []
    for white in (0, 1):
        g = _goeritz(diagram, white)
        vals.append(_signature_sym(g.reduced(0)) - g.correction)
    if vals[0] != vals[1]:
        raise AssertionError("signature differs between checkerboard colorings")
    return vals[0]


# -- thinness ----------------------------------------------------------------

@dataclass
class ThinnessVerdict:
    delta_support: tuple[int, ...]   # doubled delta gradings present
    sigma: int
    is_thin: bool
    is_sigma_thin: bool
    torsion_free: bool

    def to_json(self) -> dict:
        return {
            "delta_support_doubled": list(self.delta_support),
            "sigma": self.sigma,
            "thin": self.is_thin,
            "sigma_thin": self.is_sigma_thin,
            "torsion_free": self.torsion_free,
        }


def thinness(hat_poly, sigma: int) -> ThinnessVerdict:
    """Thin / sigma-thin verdict for a hat-level Poincare polynomial.

    Over Z freeness is part of thinness; sigma-thin additionally pins the
    single (doubled) delta grading to -sigma.
    """
    support = tuple(sorted(hat_poly.delta_support()))
    torsion_free = hat_poly.total_torsion() == 0
    is_thin = torsion_free and len(support) == 1
    is_sigma_thin = is_thin and support == (-sigma,)
    return ThinnessVerdict(delta_support=support, sigma=sigma, is_thin=is_thin,
                           is_sigma_thin=is_sigma_thin, torsion_free=torsion_free)


def rank_identity_check(hat_poly, det: int, components: int) -> bool:
    """Total F2 hat rank against 2^(l-1) * det."""
    return hat_poly.total_rank() == (1 << (components - 1)) * det


def euler_determinant_knot(g: GridDiagram) -> int:
    """|chi of the tilde complex at t = -1| / 2^(n-1), knots only.

    An independent determinant oracle: no homology is computed, only the
    signed generator count by bigrading.
    """
    from .complexes import gradings_array
    if g.mode != "oriented" or g.component_count() != 1:
        raise ValueError("Euler-characteristic determinant needs an oriented knot diagram")
    maslov2, alex2 = gradings_array(g)
    total = 0
    for m2, a2 in zip(maslov2.tolist(), alex2.tolist()):
        assert m2 % 2 == 0 and a2 % 2 == 0
        total += (-1) ** ((m2 + a2) // 2)
    val = abs(int(total))
    denom = 1 << (g.n - 1)
    assert val % denom == 0
    return val // denom
