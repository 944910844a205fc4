"""Determinant, signature, thinness and the rank identity."""

import pytest

from gridskein.algebra import factor_out_V, homology
from gridskein.catalog import catalog, get
from gridskein.complexes import boundary_matrix
from gridskein.grid import GridDiagram, grid_to_planar
from gridskein.invariants import (DisconnectedDiagram, determinant,
                                  euler_determinant_knot, rank_identity_check,
                                  signature, thinness)
from gridskein.signs import solve_sign_assignment


EXPECTED = {
    "unknot2": (1, 0),
    "trefoil5": (3, -2),
    "trefoil5_mirror": (3, 2),
    "hopf4": (2, -1),
    "hopf4_mirror": (2, 1),
    "figure_eight6": (5, 0),
}


class TestClassical:
    @pytest.mark.parametrize("name", sorted(EXPECTED))
    def test_det_and_sigma(self, name):
        det, sigma = EXPECTED[name]
        g = get(name).diagram
        assert determinant(g) == det
        assert signature(g) == sigma

    def test_zero_crossing_unknot(self):
        g = GridDiagram.oriented([0, 1], [1, 0])
        assert determinant(g) == 1 and signature(g) == 0

    def test_euler_characteristic_cross_check(self):
        for name in ("unknot2", "trefoil5", "figure_eight6"):
            entry = get(name)
            assert euler_determinant_knot(entry.diagram) == entry.det

    def test_split_diagram_rejected(self):
        g = GridDiagram.oriented([0, 1, 2, 3], [1, 0, 3, 2])
        assert g.component_count() == 2
        with pytest.raises(DisconnectedDiagram):
            determinant(g)


def hat_poly(name, ring):
    entry = get(name)
    g = entry.diagram
    signs = solve_sign_assignment(g.n) if ring == "Z" else None
    poly = homology(boundary_matrix(g, ring, signs=signs))
    return factor_out_V(poly, g.n - entry.components)


class TestThinness:
    def test_unknot_verdict(self):
        verdict = thinness(hat_poly("unknot2", "Z"), 0)
        assert verdict.is_sigma_thin and verdict.delta_support == (0,)

    @pytest.mark.parametrize("name", ["trefoil5", "figure_eight6", "hopf4"])
    def test_quasi_alternating_entries_are_sigma_thin(self, name):
        entry = get(name)
        verdict = thinness(hat_poly(name, "Z"), signature(entry.diagram))
        assert verdict.torsion_free
        assert verdict.is_sigma_thin, verdict.to_json()

    def test_sigma_thin_implies_thin_and_support(self):
        entry = get("trefoil5")
        verdict = thinness(hat_poly("trefoil5", "Z"), signature(entry.diagram))
        assert verdict.is_thin
        assert verdict.delta_support == (-verdict.sigma,)


class TestRankIdentity:
    @pytest.mark.parametrize("name", ["unknot2", "trefoil5", "hopf4", "figure_eight6"])
    def test_hat_rank_against_determinant(self, name):
        entry = get(name)
        hat = hat_poly(name, "F2")
        assert rank_identity_check(hat, determinant(entry.diagram), entry.components)

    def test_catalog_revalidates(self):
        for entry in catalog().values():
            entry.validate()
