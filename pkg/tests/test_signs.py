"""Sign assignments: solver, closed form, axioms, gauge, caching."""

import numpy as np
import pytest

from gridskein import perms
from gridskein.complexes import boundary_matrix
from gridskein.algebra import homology
from gridskein.grid import GridDiagram
from gridskein.signs import (Gauge, LocalSigns, NotGaugeEquivalent, PinSigns,
                             SignAssignment, SolverCapExceeded, gauge_compare,
                             load_assignment, pin_sign_table, pin_table_array,
                             save_assignment, sgn, solve_sign_assignment,
                             verify_sign_axioms)


class TestSgn:
    def test_identity_and_transposition(self):
        assert sgn((0, 1, 2)) == 1
        assert sgn((1, 0, 2)) == -1

    def test_rectangles_flip_signature(self):
        g = GridDiagram.oriented([0, 3, 2, 1], [1, 2, 0, 3])
        from gridskein.grid import empty_rectangles_from, enumerate_generators
        for perm in enumerate_generators(g):
            for r in empty_rectangles_from(g, perm, blocked=None):
                assert sgn(r.src) == -sgn(r.dst)


class TestSolver:
    def test_vertical_annuli_at_n2(self):
        s2 = solve_sign_assignment(2)
        for perm in ((0, 1), (1, 0)):
            for j in range(2):
                inv = perms.inverse(perm)
                a, b = inv[j], inv[(j + 1) % 2]
                y = list(perm)
                y[a], y[b] = y[b], y[a]
                prod = s2.sign(perm, a, b) * s2.sign(tuple(y), b, a)
                assert prod == -1

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_axioms_exhaustive(self, n):
        rep = verify_sign_axioms(solve_sign_assignment(n), n=n)
        assert rep.ok(), rep.summary()

    def test_perturbation_reported(self):
        s3 = solve_sign_assignment(3)
        key = sorted(s3.table)[0]
        broken = SignAssignment(n=3, table=dict(s3.table))
        broken.table[key] = -broken.table[key]
        rep = verify_sign_axioms(broken, n=3)
        assert not rep.ok()

    def test_all_plus_one_violates_vertical_annuli(self):
        s2 = solve_sign_assignment(2)
        allplus = SignAssignment(n=2, table={k: 1 for k in s2.table})
        rep = verify_sign_axioms(allplus, n=2)
        assert any(v[0] == "vertical_annulus" for v in rep.violations)

    def test_cap(self):
        with pytest.raises(SolverCapExceeded):
            solve_sign_assignment(20)

    def test_deterministic(self):
        assert solve_sign_assignment(3).table == solve_sign_assignment(3).table


class TestGauge:
    def test_identical_assignments_give_trivial_gauge(self):
        s3 = solve_sign_assignment(3)
        g = gauge_compare(s3, s3)
        assert (g.g == 1).all()

    def test_random_twist_recovered(self):
        s3 = solve_sign_assignment(3)
        rng = np.random.default_rng(5)
        g = Gauge(n=3, g=np.where(rng.integers(0, 2, perms.factorial(3)), 1, -1).astype(np.int8))
        twisted = g.apply(s3)
        found = gauge_compare(s3, twisted)
        # equal up to a global sign on the (connected) generator graph
        ratio = found.g * g.g
        assert (ratio == ratio[0]).all()

    def test_single_flip_is_not_gauge_equivalent(self):
        s3 = solve_sign_assignment(3)
        broken = SignAssignment(n=3, table=dict(s3.table))
        key = sorted(broken.table)[5]
        broken.table[key] = -broken.table[key]
        with pytest.raises(NotGaugeEquivalent):
            gauge_compare(s3, broken)

    def test_two_pivot_orders_are_gauge_equivalent(self):
        a = solve_sign_assignment(3, order="lex")
        b = solve_sign_assignment(3, order="rev")
        gauge_compare(a, b)

    def test_gauge_twist_preserves_homology(self):
        g = GridDiagram.oriented([0, 3, 2, 1], [1, 2, 0, 3])
        s4 = solve_sign_assignment(4)
        rng = np.random.default_rng(11)
        gauge = Gauge(n=4, g=np.where(rng.integers(0, 2, 24), 1, -1).astype(np.int8))
        twisted = gauge.apply(s4)
        h1 = homology(boundary_matrix(g, "Z", signs=s4))
        h2 = homology(boundary_matrix(g, "Z", signs=twisted))
        assert h1 == h2


class TestPin:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_axioms(self, n):
        rep = verify_sign_axioms(PinSigns(n), n=n)
        assert rep.ok(), rep.summary()

    def test_sampled_axioms_n5(self):
        rep = verify_sign_axioms(PinSigns(5), n=5, sample=2000, seed=1)
        assert rep.ok()

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_pin_gauge_equivalent_to_solver(self, n):
        gauge_compare(solve_sign_assignment(n), pin_sign_table(n))

    def test_table_array_matches_pointwise(self, ):
        n = 4
        tab = pin_table_array(n)
        pin = PinSigns(n)
        for rank in range(0, perms.factorial(n), 3):
            perm = perms.unrank(n, rank)
            for a in range(n):
                for b in range(n):
                    if a != b:
                        assert tab[rank, a, b] == pin.sign(perm, a, b)

    def test_local_signs_are_gauge_of_pin(self):
        n = 4
        base = (3, 1, 0, 2)
        loc = LocalSigns(n, base)
        from gridskein.grid import empty_rectangles_from
        from gridskein.signs import _bare_diagram
        d = _bare_diagram(n)
        table = {}
        for rank in range(perms.factorial(n)):
            perm = perms.unrank(n, rank)
            for r in empty_rectangles_from(d, perm, blocked=None):
                table[(rank, r.row_lo, r.row_hi)] = loc.sign(perm, r.row_lo, r.row_hi)
        local_table = SignAssignment(n=n, table=table, provenance="local")
        gauge_compare(pin_sign_table(n), local_table)

    def test_d_squared_zero_with_pin_signs(self):
        g = GridDiagram.oriented([0, 4, 2, 1, 3], [1, 2, 0, 3, 4])
        cx = boundary_matrix(g, "Z", signs=PinSigns(5))
        cx.check_d_squared()


class TestCache:
    def test_round_trip(self, tmp_path):
        s4 = solve_sign_assignment(4)
        save_assignment(s4, str(tmp_path))
        loaded = load_assignment(4, str(tmp_path))
        assert loaded is not None and loaded.table == s4.table
        assert (tmp_path / "signs_n4.bin.json").exists()

    def test_missing_cache(self, tmp_path):
        assert load_assignment(5, str(tmp_path)) is None
