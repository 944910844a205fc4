"""Skein triple: pattern matching, maps, identities, exactness, delta shifts."""

import pytest

from gridskein import perms
from gridskein.catalog import (get, make_oriented_triple, oriented_twisted_unknot,
                               twisted_unknot)
from gridskein.grid import GridDiagram
from gridskein.signs import PinSigns, pin_table_array, solve_sign_assignment
from gridskein.skein import (NonHomogeneous, PatternMismatch, build_chain_map,
                             build_skein_triple, build_triple_maps, chain_map_terms,
                             check_chain_identity, check_condition1, check_condition2,
                             check_summand_chain_identities, crossing_sign_of_state0,
                             delta_shift, detect_state, expected_delta_shifts2,
                             map_candidates, verify_triangle)


class TestPattern:
    def test_twisted_unknot_matches(self):
        triple = build_skein_triple(twisted_unknot(4))
        assert triple.input_state == 0
        assert triple.corridor.window == 0 and triple.corridor.q == 1

    def test_resolution_components(self):
        triple = build_skein_triple(twisted_unknot(4))
        comps = {k: triple.diagrams[k].component_count() for k in range(3)}
        assert comps[0] == 1 and sorted((comps[1], comps[2])) == [1, 2]

    def test_missing_corner_pattern_rejected(self):
        cells = set(twisted_unknot(4).marker_cells)
        cells -= {(0, 1), (1, 2)}
        cells |= {(0, 2), (1, 1)}  # swap two corridor markers out of pattern
        with pytest.raises(PatternMismatch):
            build_skein_triple(GridDiagram.x_only(cells), anchor=(0, 1))

    def test_cyclic_relabel_gives_same_diagram_set(self):
        triple = build_skein_triple(twisted_unknot(5))
        sets0 = {frozenset(triple.diagrams[k].marker_cells) for k in range(3)}
        # rebuild the triple starting from a resolution state
        again = build_skein_triple(triple.diagrams[1], anchor=(0, 1))
        assert again.input_state == 1
        sets1 = {frozenset(again.diagrams[k].marker_cells) for k in range(3)}
        assert sets0 == sets1

    def test_state_detection(self):
        triple = build_skein_triple(twisted_unknot(4))
        for k in range(3):
            assert detect_state(triple.diagrams[k], 0, 1) == k


class TestIdentities:
    @pytest.mark.parametrize("n", [4, 5])
    def test_f2_identities(self, n):
        triple = build_skein_triple(twisted_unknot(n))
        maps = build_triple_maps(triple, "F2")
        for k in range(3):
            assert check_chain_identity(maps, k)
            assert check_condition1(maps, k)
            assert check_condition2(maps, k)

    @pytest.mark.parametrize("n", [4, 5])
    def test_z_identities(self, n):
        triple = build_skein_triple(twisted_unknot(n))
        maps = build_triple_maps(triple, "Z", signs=solve_sign_assignment(n))
        for k in range(3):
            assert check_chain_identity(maps, k)
            assert check_condition1(maps, k)
            assert check_condition2(maps, k)

    def test_pentagons_and_triangles_separately_anti_chain(self):
        triple = build_skein_triple(twisted_unknot(4))
        s4 = solve_sign_assignment(4)
        maps = build_triple_maps(triple, "Z", signs=s4)
        for k in range(3):
            assert check_summand_chain_identities(triple, maps, k, signs=s4)

    def test_at_most_one_triangle_per_generator(self):
        triple = build_skein_triple(twisted_unknot(5))
        cor, extra = triple.corridor, triple.extra_markers()
        for k in range(3):
            _, tri = map_candidates(cor, extra, "f", k)
            rows = [c.arow for c in tri]
            assert len(rows) == len(set(rows))

    def test_heptagons_are_right_domains(self):
        triple = build_skein_triple(twisted_unknot(6))
        cor, extra = triple.corridor, triple.extra_markers()
        for k in range(3):
            rect, _ = map_candidates(cor, extra, "psi", k)
            assert all(c.side == "east" for c in rect)

    def test_terms_match_matrix_columns(self):
        triple = build_skein_triple(twisted_unknot(4))
        tab = pin_table_array(4)
        pin = PinSigns(4)
        for kind in ("f", "phi", "psi"):
            for k in range(3):
                mat = build_chain_map(triple, kind, k, "Z", signs=tab)
                for rank in range(0, 24, 5):
                    perm = perms.unrank(4, rank)
                    terms = chain_map_terms(triple.corridor, triple.extra_markers(),
                                            kind, k, perm, "Z", signs=pin)
                    col = {perms.unrank(4, r): v for r, v in mat.column(rank).items()}
                    assert terms == col, (kind, k, rank)


class TestExactness:
    @pytest.mark.parametrize("ring", ["F2", "Z"])
    def test_twisted_unknot_triangle(self, ring):
        triple = build_skein_triple(twisted_unknot(4))
        signs = solve_sign_assignment(4) if ring == "Z" else None
        rep = verify_triangle(triple, ring, signs=signs)
        assert rep.all_ok(), rep.to_json()
        assert rep.homology_ranks == {0: 8, 1: 8, 2: 8}
        assert rep.cone_rank == rep.homology_ranks[0]

    def test_corrupted_map_flagged_before_exactness(self):
        from gridskein.algebra import SparseMatrix
        triple = build_skein_triple(twisted_unknot(4))
        maps = build_triple_maps(triple, "Z", signs=solve_sign_assignment(4))
        ent = maps.f[0].entries()
        broke = False
        for i in range(len(ent)):
            flipped = [(r, c, -v if j == i else v) for j, (r, c, v) in enumerate(ent)]
            maps.f[0] = SparseMatrix.from_entries((24, 24), flipped, "Z")
            if not check_chain_identity(maps, 0):
                broke = True
                break
        assert broke


class TestDeltaShifts:
    def test_positive_kink(self):
        g0 = oriented_twisted_unknot(4)
        triple = make_oriented_triple(g0, anchor=(0, 1))
        assert crossing_sign_of_state0(triple) == 1
        expected = expected_delta_shifts2(triple)
        for k in range(3):
            assert delta_shift(triple, k) == expected[k]

    def test_positive_crossing_block_trefoil(self):
        entry = get("trefoil6_block")
        triple = make_oriented_triple(entry.diagram, anchor=entry.anchors[0])
        assert crossing_sign_of_state0(triple) == 1
        expected = expected_delta_shifts2(triple)
        assert expected[2] == 1  # the oriented-resolution map shifts by +1/2
        for k in range(3):
            assert delta_shift(triple, k) == expected[k]

    def test_negative_crossing_block_hopf(self):
        entry = get("hopf5_block")
        triple = make_oriented_triple(entry.diagram, anchor=entry.anchors[0])
        assert crossing_sign_of_state0(triple) == -1
        expected = expected_delta_shifts2(triple)
        assert expected[0] == 1  # f_0 shifts by +1/2 at a negative crossing
        for k in range(3):
            assert delta_shift(triple, k) == expected[k]

    def test_sigma_relations_on_trefoil_family(self):
        from gridskein.grid import grid_to_planar
        from gridskein.invariants import determinant, signature
        entry = get("trefoil6_block")
        triple = make_oriented_triple(entry.diagram, anchor=entry.anchors[0])
        g0, g1, g2 = (triple.oriented[k] for k in range(3))
        # determinant additivity and the signature relations (positive crossing)
        assert determinant(g0) == determinant(g1) + determinant(g2)
        e = (grid_to_planar(g1).negative_crossings()
             - grid_to_planar(g0).negative_crossings())
        assert signature(g2) - signature(g0) == 1
        assert signature(g1) - signature(g0) == e
