"""Cube of resolutions: blocks, edge maps, total complex, pages, sampling."""

import numpy as np
import pytest

from gridskein.algebra import homology
from gridskein.catalog import get, twisted_unknot
from gridskein.complexes import boundary_matrix
from gridskein.cube import (Block, BlockedGrid, CubeComplex, build_cube,
                            cube_homology_rank, edge_map, resolution_diagram,
                            sampled_cube_checks, spectral_pages, twist_parity)
from gridskein.grid import GridDiagram
from gridskein.signs import solve_sign_assignment
from gridskein.skein import PatternMismatch


def blocked_tw5():
    return BlockedGrid(twisted_unknot(5), [Block(0, 1)], strict_corners=False)


def blocked_pair8():
    cells = [(0, 0), (0, 1), (1, 2), (1, 3), (2, 0), (2, 2), (3, 1), (3, 3),
             (4, 4), (4, 5), (5, 6), (5, 7), (6, 4), (6, 6), (7, 5), (7, 7)]
    return BlockedGrid(GridDiagram.x_only(cells), [Block(0, 1), Block(4, 5)],
                       strict_corners=False)


class TestBlocks:
    def test_all_zero_is_the_input(self):
        bg = blocked_tw5()
        assert resolution_diagram(bg, (0,)).marker_cells == bg.base.marker_cells

    def test_resolution_components(self):
        bg = blocked_tw5()
        comps = sorted(resolution_diagram(bg, (k,)).component_count() for k in (1, 2))
        assert comps == [1, 2]

    def test_blocks_commute(self):
        bg = blocked_pair8()
        a = resolution_diagram(bg, (1, 2))
        cells = set(bg.base.marker_cells)
        one = resolution_diagram(BlockedGrid(resolution_diagram(bg, (1, 0)),
                                             [Block(4, 5)], strict_corners=False), (2,))
        assert a.marker_cells == one.marker_cells

    def test_strict_corner_enforcement(self):
        g7 = get("blocked_unknot7").diagram
        BlockedGrid(g7, [Block(1, 2)], strict_corners=True)
        cells = set(g7.marker_cells)
        cells -= {(0, 0), (6, 0)}
        cells |= {(6, 5), (0, 6)}
        broken = None
        try:
            broken = GridDiagram.x_only(cells)
        except Exception:
            pass
        if broken is not None:
            with pytest.raises(PatternMismatch):
                BlockedGrid(broken, [Block(1, 2)], strict_corners=True)

    def test_disjointness_enforced(self):
        bg = blocked_pair8()
        with pytest.raises(PatternMismatch):
            BlockedGrid(bg.base, [Block(0, 1), Block(0, 1)], strict_corners=False)

    def test_bad_state_for_edge(self):
        bg = blocked_tw5()
        with pytest.raises(ValueError):
            edge_map(bg, (2,), 0, "F2")

    def test_twist_parity(self):
        assert twist_parity((1, 1), 0) is True
        assert twist_parity((1, 2), 0) is False
        assert twist_parity((1, 1), 1) is False


class TestCubeM1:
    def test_f2_cube_matches_base_homology(self):
        bg = blocked_tw5()
        cube = build_cube(bg, "F2")
        rank_cr = cube_homology_rank(cube)
        rank_g = homology(boundary_matrix(bg.base, "F2"), check=False).total_rank()
        assert rank_cr == rank_g == 2 ** 4

    def test_z_cube_squares_to_zero_and_matches(self):
        bg = blocked_tw5()
        cube = build_cube(bg, "Z", signs=solve_sign_assignment(5))
        assert cube_homology_rank(cube) == 16

    def test_pages_terminate_at_e2(self):
        bg = blocked_tw5()
        cube = build_cube(bg, "F2")
        pages = spectral_pages(cube, maxpage=4)
        assert pages[1] == {0: 16, 1: 16}
        assert pages[2] == pages[3] == pages[4]
        assert sum(pages[2].values()) == 16

    def test_zero_edge_cube_pages_stay_at_e1(self):
        bg = blocked_tw5()
        cube = build_cube(bg, "F2")
        from gridskein.algebra import SparseMatrix
        for key in cube.edges:
            cube.edges[key] = SparseMatrix.zeros(cube.edges[key].shape, "F2")
        pages = spectral_pages(cube, maxpage=3)
        assert pages[2] == pages[1] == pages[3]

    def test_cone_of_quasi_isomorphism_is_acyclic(self):
        # the inclusion-like map f_0 + phi_0 : C(G) -> CR(G) has acyclic cone
        from scipy import sparse as sp
        from gridskein.algebra import SparseMatrix, mapping_cone
        from gridskein.skein import build_chain_map, build_skein_triple
        for ring in ("F2", "Z"):
            signs = solve_sign_assignment(5) if ring == "Z" else None
            bg = blocked_tw5()
            cube = build_cube(bg, ring, signs=signs)
            triple = build_skein_triple(bg.base, anchor=(0, 1))
            f0 = build_chain_map(triple, "f", 0, ring, signs=signs)
            phi0 = build_chain_map(triple, "phi", 0, ring, signs=signs)
            off1 = cube.offsets[(1,)]
            off2 = cube.offsets[(2,)]
            assert (off1, off2) == (0, 120)
            top = sp.vstack([f0.mat, phi0.mat])
            quasi = SparseMatrix(top, ring)
            d_from = boundary_matrix(bg.base, ring, signs=signs).boundary
            parity = "chain" if ring == "F2" else "anti"
            cone = mapping_cone(quasi, d_from, cube.total, parity=parity)
            assert homology(cone, check=False).total_rank() == 0


class TestCubeM2:
    def test_f2_materialized_pair_squares_to_zero(self):
        bg = blocked_pair8()
        cube = build_cube(bg, "F2")  # asserts d^2 = 0 internally
        assert cube.total.shape == (4 * 40320, 4 * 40320)

    def test_f2_sampled_checks_large(self):
        bg = BlockedGrid(get("blocked_unknot14").diagram, [Block(1, 2), Block(7, 8)])
        rep = sampled_cube_checks(bg, "F2", samples=400, seed=3)
        assert rep.ok(), rep.to_json()

    @pytest.mark.xfail(reason="the published sign-twist rule cannot close the "
                              "Z cube at m >= 2; see the decisions ledger",
                       strict=True)
    def test_z_sampled_anticommutation(self):
        bg = BlockedGrid(get("blocked_unknot14").diagram, [Block(1, 2), Block(7, 8)])
        rep = sampled_cube_checks(bg, "Z", samples=60, seed=3)
        assert rep.ok(), rep.to_json()
