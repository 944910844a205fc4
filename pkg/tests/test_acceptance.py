"""Acceptance suite: every criterion at its stated tolerance.

All identities are exact integer arithmetic (zero tolerance); the stated
wall-clock budgets are asserted too.  Each criterion prints one PASS/FAIL
line (run with -s to see them as they happen).
"""

import time

import pytest

from gridskein import perms
from gridskein.algebra import factor_out_V, homology, mapping_cone, universal_coefficients_consistent
from gridskein.catalog import catalog, get, make_oriented_triple, twisted_unknot
from gridskein.complexes import boundary_matrix
from gridskein.cube import Block, BlockedGrid, build_cube, cube_homology_rank, sampled_cube_checks, spectral_pages
from gridskein.grid import GridDiagram
from gridskein.invariants import determinant, rank_identity_check, signature, thinness
from gridskein.signs import (gauge_compare, pin_table_array, solve_sign_assignment,
                             verify_sign_axioms)
from gridskein.skein import (build_skein_triple, build_triple_maps, check_chain_identity,
                             check_condition1, check_condition2, crossing_sign_of_state0,
                             delta_shift, expected_delta_shifts2, verify_triangle)

SOLVED = {}


def solved(n):
    if n not in SOLVED:
        SOLVED[n] = solve_sign_assignment(n)
    return SOLVED[n]


def signs_for(n):
    return solved(n) if n <= 6 else pin_table_array(n)


def report(number, ok, detail=""):
    line = f"[criterion {number:>2}] {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    assert ok, line


SMALL_ORIENTED = ["unknot2", "twisted_unknot4", "twisted_unknot5", "twisted_unknot6",
                  "trefoil5", "trefoil5_mirror", "hopf4", "hopf4_mirror",
                  "figure_eight6", "trefoil6_block", "hopf5_block"]


def test_criterion_1_d_squared_both_rings():
    worst = 0.0
    for name in SMALL_ORIENTED:
        g = get(name).diagram
        t0 = time.time()
        boundary_matrix(g, "F2").check_d_squared()
        cxz = boundary_matrix(g, "Z", signs=solved(g.n))
        cxz.check_d_squared()
        cxz.check_graded()
        worst = max(worst, time.time() - t0)
    report(1, worst < 10.0,
           f"d^2 = 0 over F2 and Z on {len(SMALL_ORIENTED)} grids, worst {worst:.2f}s")


def test_criterion_2_sign_axioms_and_gauge():
    t0 = time.time()
    for n in (2, 3, 4):
        rep = verify_sign_axioms(solved(n), n=n)
        assert rep.ok(), rep.summary()
    for n in (5, 6):
        rep = verify_sign_axioms(solved(n), n=n, sample=100_000, seed=0)
        assert rep.ok(), rep.summary()
    for n in (3, 4):
        a = solve_sign_assignment(n, order="lex")
        b = solve_sign_assignment(n, order="rev")
        assert a.table != b.table
        gauge_compare(a, b)
    elapsed = time.time() - t0
    report(2, elapsed < 60.0,
           f"axioms exhaustive n<=4, 1e5 samples n=5,6, gauge recovered ({elapsed:.1f}s)")


def test_criterion_3_rank_oracle():
    t0 = time.time()
    expected = {"unknot2": 1, "trefoil5": 3, "figure_eight6": 5, "hopf4": 4}
    for name, want in expected.items():
        entry = get(name)
        poly = homology(boundary_matrix(entry.diagram, "F2"))
        hat = factor_out_V(poly, entry.diagram.n - entry.components)
        det = determinant(entry.diagram)
        assert hat.total_rank() == want
        assert rank_identity_check(hat, det, entry.components)
    elapsed = time.time() - t0
    report(3, elapsed < 300.0,
           f"hat F2 rank = 2^(l-1) det for unknot/trefoil/figure-eight/Hopf ({elapsed:.1f}s)")


def test_criterion_4_skein_identities_exhaustive():
    t0 = time.time()
    for n in range(4, 9):
        triple = build_skein_triple(twisted_unknot(n))
        for ring in ("F2", "Z"):
            maps = build_triple_maps(triple, ring,
                                     signs=None if ring == "F2" else signs_for(n))
            for k in range(3):
                assert check_chain_identity(maps, k), (n, ring, k)
                assert check_condition1(maps, k), (n, ring, k)
                assert check_condition2(maps, k), (n, ring, k)
    elapsed = time.time() - t0
    report(4, elapsed < 120.0,
           f"chain/Condition-1/Condition-2 per basis vector, n = 4..8, both rings ({elapsed:.1f}s)")


def test_criterion_5_exactness():
    t0 = time.time()
    for n in (4, 5):
        triple = build_skein_triple(twisted_unknot(n))
        for ring in ("F2", "Z"):
            rep = verify_triangle(triple, ring,
                                  signs=None if ring == "F2" else solved(n),
                                  with_cone=True)
            assert rep.all_ok(), rep.to_json()
            assert all(rep.homology_ranks[k] == 2 ** (n - 1) for k in range(3))
            assert rep.cone_rank == rep.homology_ranks[0]
    elapsed = time.time() - t0
    report(5, elapsed < 300.0,
           f"im = ker at all three nodes and cone(f_1) rank matches, both rings ({elapsed:.1f}s)")


def test_criterion_6_delta_shifts():
    cases = [("twisted_unknot4", 1), ("trefoil6_block", 1), ("hopf5_block", -1)]
    for name, want_sign in cases:
        entry = get(name)
        triple = make_oriented_triple(entry.diagram, anchor=entry.anchors[0])
        assert crossing_sign_of_state0(triple) == want_sign
        expected = expected_delta_shifts2(triple)
        for k in range(3):
            assert delta_shift(triple, k) == expected[k], (name, k)
    report(6, True, "delta shifts homogeneous and equal to the predicted values "
                    "(positive crossings and the negative variant)")


def test_criterion_7_cube_m1():
    t0 = time.time()
    bg5 = BlockedGrid(twisted_unknot(5), [Block(0, 1)], strict_corners=False)
    base_ranks = {}
    for ring in ("F2", "Z"):
        signs = None if ring == "F2" else solved(5)
        cube = build_cube(bg5, ring, signs=signs)  # asserts d_CR^2 = 0
        rank_cr = cube_homology_rank(cube)
        rank_g = homology(boundary_matrix(bg5.base, ring, signs=signs),
                          check=False).total_rank()
        assert rank_cr == rank_g == 16
        base_ranks[ring] = rank_g
        if ring == "F2":
            pages = spectral_pages(cube, maxpage=4)
            assert pages[2] == pages[3] == pages[4]
            assert sum(pages[2].values()) == rank_g
    # strict 6x6 block entry over F2
    entry = get("blocked_unknot7")
    bg7 = BlockedGrid(entry.diagram, [Block(*entry.anchors[0])], strict_corners=True)
    cube7 = build_cube(bg7, "F2")
    assert cube_homology_rank(cube7) == homology(
        boundary_matrix(entry.diagram, "F2"), check=False).total_rank() == 64
    elapsed = time.time() - t0
    report(7, elapsed < 300.0,
           f"m=1: d_CR^2 = 0 both rings, H(CR) = H(C(G)), E_inf at page 2 ({elapsed:.1f}s)")


def test_criterion_8_cube_m2_f2_and_d_squared():
    t0 = time.time()
    entry = get("blocked_unknot14")
    bg = BlockedGrid(entry.diagram, [Block(*a) for a in entry.anchors])
    rep = sampled_cube_checks(bg, "F2", samples=10_000, seed=0)
    assert rep.ok(), rep.to_json()
    assert rep.commute_checked >= 10_000 and rep.d_squared_checked >= 10_000
    elapsed = time.time() - t0
    report(8, elapsed < 600.0,
           f"m=2 (n=14): F2 commutation and d_CR^2 = 0 on 1e4 sampled vectors; "
           f"full homology not reproducible at this size by design ({elapsed:.1f}s)")


@pytest.mark.xfail(reason="the published sign-twist rule cannot make the m>=2 cube "
                          "anticommute over Z (see the decisions ledger for the "
                          "four-relation parity obstruction); recorded as an "
                          "honest red", strict=True)
def test_criterion_8_cube_m2_z_twist_rule():
    entry = get("blocked_unknot14")
    bg = BlockedGrid(entry.diagram, [Block(*a) for a in entry.anchors])
    rep = sampled_cube_checks(bg, "Z", samples=200, seed=0)
    report("8Z", rep.ok(), f"Z anticommutation after the twist rule: {rep.to_json()}")


def test_criterion_9_sigma_thinness():
    t0 = time.time()
    for name in ("unknot2", "trefoil5", "figure_eight6", "hopf4"):
        entry = get(name)
        poly = homology(boundary_matrix(entry.diagram, "Z", signs=solved(entry.diagram.n)))
        hat = factor_out_V(poly, entry.diagram.n - entry.components)
        verdict = thinness(hat, signature(entry.diagram))
        assert verdict.is_sigma_thin and verdict.torsion_free, (name, verdict.to_json())
    elapsed = time.time() - t0
    report(9, elapsed < 300.0,
           f"unknot/trefoil/figure-eight/Hopf sigma-thin over Z ({elapsed:.1f}s)")


def test_criterion_10_universal_coefficients():
    checked = 0
    for name in SMALL_ORIENTED:
        g = get(name).diagram
        f2 = homology(boundary_matrix(g, "F2"), check=False)
        z = homology(boundary_matrix(g, "Z", signs=solved(g.n)), check=False)
        assert universal_coefficients_consistent(f2, z), name
        checked += 1
    for n in (4, 5):
        triple = build_skein_triple(twisted_unknot(n))
        for k in range(3):
            f2 = homology(boundary_matrix(triple.diagrams[k], "F2"), check=False)
            z = homology(boundary_matrix(triple.diagrams[k], "Z", signs=solved(n)),
                         check=False)
            assert universal_coefficients_consistent(f2, z)
            checked += 1
    report(10, True, f"F2 rank = free rank + 2 (even torsion) on {checked} homologies")
