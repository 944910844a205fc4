"""Sparse matrices, Smith forms, homology, cones, V-factor extraction."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gridskein.algebra import (HomGroup, NotChainMap, NotDivisible, PoincarePolynomial,
                               SparseMatrix, apply_map, factor_out_V, homology,
                               mapping_cone, universal_coefficients_consistent)
from gridskein.complexes import boundary_matrix
from gridskein.grid import Bigrading, GridDiagram
from gridskein.signs import solve_sign_assignment
from gridskein.smith import smith_normal_form, kernel_lattice


class TestSmith:
    def test_known_form(self):
        form = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, 4, 16]])
        assert [d for d in form.diagonal if d] == [2, 2, 156]

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3),
                    min_size=2, max_size=4))
    def test_recomposition_and_divisibility(self, rows):
        form = smith_normal_form(rows)  # check=True verifies U D V = A internally
        nonzero = [d for d in form.diagonal if d]
        for a, b in zip(nonzero, nonzero[1:]):
            assert b % a == 0
        assert all(d >= 0 for d in form.diagonal)

    def test_kernel_lattice(self):
        mat = [[1, 2, 3], [2, 4, 6]]
        form, kernel = kernel_lattice(mat)
        assert len(kernel) == 2
        for col in kernel:
            assert all(sum(row[i] * col[i] for i in range(3)) == 0 for row in mat)


class TestHomology:
    def test_zero_differential(self):
        cx = boundary_matrix(GridDiagram.oriented([0, 1], [1, 0]), "F2")
        assert cx.boundary.is_zero()
        assert homology(cx).total_rank() == 2

    def test_unknot_bigradings(self):
        cx = boundary_matrix(GridDiagram.oriented([0, 1], [1, 0]), "F2")
        poly = homology(cx)
        assert poly.rank_at(Bigrading(0, 0)) == 1
        assert poly.rank_at(Bigrading(-2, -2)) == 1

    def test_trefoil_tilde_rank(self):
        g = GridDiagram.oriented([0, 4, 3, 2, 1], [3, 2, 1, 0, 4])
        poly = homology(boundary_matrix(g, "F2"))
        assert poly.total_rank() == 48  # 3 * 2^4

    def test_universal_coefficients_on_catalog(self):
        for o, x in ([(0, 1), (1, 0)], [(0, 3, 2, 1), (1, 2, 0, 3)]):
            g = GridDiagram.oriented(list(o), list(x))
            f2 = homology(boundary_matrix(g, "F2"))
            z = homology(boundary_matrix(g, "Z", signs=solve_sign_assignment(g.n)))
            assert universal_coefficients_consistent(f2, z)


class TestCone:
    def test_zero_map_gives_direct_sum(self):
        g = GridDiagram.oriented([0, 3, 2, 1], [1, 2, 0, 3])
        cx = boundary_matrix(g, "F2")
        zero = SparseMatrix.zeros(cx.boundary.shape, "F2")
        cone = mapping_cone(zero, cx.boundary, cx.boundary, parity="chain")
        assert homology(cone).total_rank() == 2 * homology(cx).total_rank()

    def test_identity_on_zero_complex_is_acyclic(self):
        ident = SparseMatrix.identity(4, "F2")
        zero = SparseMatrix.zeros((4, 4), "F2")
        cone = mapping_cone(ident, zero, zero, parity="chain")
        assert homology(cone).total_rank() == 0

    def test_non_chain_map_rejected(self):
        g = GridDiagram.oriented([0, 3, 2, 1], [1, 2, 0, 3])
        cx = boundary_matrix(g, "F2")
        with pytest.raises(NotChainMap):
            mapping_cone(SparseMatrix.identity(24, "F2"),
                         cx.boundary, SparseMatrix.zeros((24, 24), "F2"))


class TestFactorOutV:
    def test_rank_two_to_one(self):
        poly = PoincarePolynomial("F2", {Bigrading(0, 0): HomGroup(1),
                                         Bigrading(-2, -2): HomGroup(1)})
        out = factor_out_V(poly, 1)
        assert out.groups == {Bigrading(0, 0): HomGroup(1)}

    def test_exponent_zero_is_identity(self):
        poly = PoincarePolynomial("F2", {Bigrading(0, 0): HomGroup(3)})
        assert factor_out_V(poly, 0) == poly

    def test_trefoil_hat_rank(self):
        g = GridDiagram.oriented([0, 4, 3, 2, 1], [3, 2, 1, 0, 4])
        poly = homology(boundary_matrix(g, "F2"))
        hat = factor_out_V(poly, 4)
        assert hat.total_rank() == 3
        assert hat.delta_support() == {2}  # delta = +1, right-handed

    def test_not_divisible(self):
        poly = PoincarePolynomial("F2", {Bigrading(0, 0): HomGroup(1)})
        with pytest.raises(NotDivisible):
            factor_out_V(poly, 1)

    def test_json_round_trip(self):
        poly = PoincarePolynomial("Z", {Bigrading(0, 0): HomGroup(2, (3,)),
                                        Bigrading(-2, -2): HomGroup(1)})
        assert PoincarePolynomial.from_json(poly.to_json()) == poly


class TestApplyMap:
    def test_zero_and_identity(self):
        zero = SparseMatrix.zeros((4, 4), "Z")
        ident = SparseMatrix.identity(4, "Z")
        chain = {1: 2, 3: -1}
        assert apply_map(zero, chain) == {}
        assert apply_map(ident, chain) == chain

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2 ** 31 - 1))
    def test_matches_dense_product(self, seed):
        rng = np.random.default_rng(seed)
        dense = rng.integers(-2, 3, size=(6, 6))
        mat = SparseMatrix.from_entries((6, 6),
                                        [(i, j, int(dense[i, j])) for i in range(6)
                                         for j in range(6) if dense[i, j]], "Z")
        vec = rng.integers(-2, 3, size=6)
        chain = {i: int(v) for i, v in enumerate(vec) if v}
        want = dense @ vec
        got = apply_map(mat, chain)
        assert got == {i: int(v) for i, v in enumerate(want) if v}
