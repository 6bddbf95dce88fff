import io
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from quasipin.catalog import ConstraintCatalog, FacetPair, GPConstraint, Setting, candidate_pairs, load_setting
from quasipin.errors import (
    DegeneratePair, NonEmptyClass, SettingMismatch, UnknownConstraint, ZeroDenominatorEverywhere,
)
from quasipin.lp.derive import (
    class_membership, derive_minimal_pairs, derive_prefactor, derive_scalar_bound, facet_closure,
    maximize_constraint, polytope_program, sigma_distance_exact, verify_catalog,
)
from quasipin.lp.dump import LPDumpWriter, format_lp
from quasipin.lp.program import EQ, GE, INFEASIBLE, LE, OPTIMAL, UNBOUNDED, LinearProgram, solve_exact
from quasipin.lp.tableau import solve_standard

BD = load_setting((3, 6))
C310 = load_setting((3, 10))


def _random_lp(rng, n=4, m=5):
    A = rng.integers(-5, 6, size=(m, n))
    b = rng.integers(-3, 10, size=m)
    c = rng.integers(-5, 6, size=n)
    lp = LinearProgram(c.tolist(), bounds=[(0, 10)] * n)
    for row, rhs, rel in zip(A.tolist(), b.tolist(), rng.choice([LE, GE, EQ], size=m, p=[.6, .3, .1])):
        lp.add(row, str(rel), rhs)
    return lp, A, b, c


def _scipy(lp, A, b, c):
    ub_A, ub_b, eq_A, eq_b = [], [], [], []
    for row in lp.rows:
        coeffs = [float(v) for v in row.coeffs]
        if row.relation == LE:
            ub_A.append(coeffs), ub_b.append(float(row.rhs))
        elif row.relation == GE:
            ub_A.append([-v for v in coeffs]), ub_b.append(-float(row.rhs))
        else:
            eq_A.append(coeffs), eq_b.append(float(row.rhs))
    return linprog(-c, A_ub=ub_A or None, b_ub=ub_b or None, A_eq=eq_A or None, b_eq=eq_b or None,
                   bounds=[(0, 10)] * len(c), method="highs")


def test_matches_floating_point_solver():
    rng = np.random.default_rng(7)
    for _ in range(120):
        lp, A, b, c = _random_lp(rng)
        exact = solve_exact(lp)
        ref = _scipy(lp, A, b, c)
        if ref.status == 2:
            assert exact.status == INFEASIBLE
        else:
            assert exact.status == OPTIMAL
            assert float(exact.value) == pytest.approx(-ref.fun, abs=1e-7)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_exact_by_substitution_and_routes_agree(seed):
    lp, *_ = _random_lp(np.random.default_rng(seed))
    primal = solve_exact(lp, "primal")
    dual = solve_exact(lp, "dual")
    assert primal.status == dual.status
    if primal.optimal:
        for res in (primal, dual):
            assert lp.is_feasible(res.x)
            assert lp.evaluate(res.x) == res.value
            assert all(isinstance(v, Fraction) for v in res.x)
        assert primal.value == dual.value


def test_unbounded_and_infeasible():
    lp = LinearProgram([1, 1], bounds=[(0, None), (0, None)])
    lp.add([1, -1], LE, 1)
    assert solve_exact(lp).status == UNBOUNDED
    lp = LinearProgram([1], bounds=[(0, None)])
    lp.add([1], GE, 2)
    lp.add([1], LE, 1)
    assert solve_exact(lp).status == INFEASIBLE


def test_standard_form_degenerate_cycle_free():
    # a classic cycling example for the largest-coefficient rule
    A = [[Fraction(1, 2), Fraction(-11, 2), Fraction(-5, 2), 9, 1, 0, 0],
         [Fraction(1, 2), Fraction(-3, 2), Fraction(-1, 2), 1, 0, 1, 0],
         [1, 0, 0, 0, 0, 0, 1]]
    res = solve_standard(A, [0, 0, 1], [-10, 57, 9, 24, 0, 0, 0])
    assert res.status == OPTIMAL and res.value == -1
    assert res.x[:4] == (1, 0, 1, 0)


def test_solution_is_deterministic():
    prog = polytope_program(C310, C310[54].linear, C310[54].kappa0)
    first, second = solve_exact(prog), solve_exact(prog)
    assert first == second


def test_borland_dennis_class():
    res = derive_minimal_pairs(1, BD)
    assert res.minimal_pairs == (FacetPair(1, 1),)
    for k in (1, 2, 3):
        assert class_membership(1, FacetPair(k, k), BD)
    with pytest.raises(DegeneratePair):
        class_membership(1, FacetPair(1, 0), BD)


@pytest.mark.parametrize("row", [1, 3, 7, 12, 54, 93])
def test_pruning_is_sound(row):
    pruned = derive_minimal_pairs(row, C310)
    full = derive_minimal_pairs(row, C310, prune=False)
    assert pruned.minimal_pairs == full.minimal_pairs
    assert pruned.lp_solves <= full.lp_solves
    # pruned membership is reported on closed pairs; the literal one must imply it
    for pair, member in full.membership.items():
        if member:
            assert pruned.membership[pair]


def test_facet_closure_is_idempotent_and_larger():
    for pair in candidate_pairs(C310.setting):
        closed = facet_closure(pair, C310)
        assert pair.is_below(closed) or closed == FacetPair(3, 7)
        assert facet_closure(closed, C310) == closed


def test_prefactor_examples_with_tight_witness():
    con = C310[7]
    for pair, c in [(FacetPair(0, 4), 1), (FacetPair(1, 3), Fraction(3, 4))]:
        res = derive_prefactor(7, pair, C310)
        assert res.value == c
        assert con.value_at(res.witness) == c * sigma_distance_exact(res.witness, pair)
    assert derive_prefactor(1, FacetPair(1, 1), BD).value == Fraction(1, 2)


def test_scalar_bound_row_3():
    assert maximize_constraint(3, C310).value == Fraction(9, 7)
    assert derive_scalar_bound(3, C310) == Fraction(9, 14)
    with pytest.raises(NonEmptyClass):
        derive_scalar_bound(7, C310)


def test_zero_denominator_everywhere():
    # a polytope squeezed onto the Hartree-Fock point
    s = Setting(3, 6)
    squeeze = GPConstraint(s, 1, (-3, 1, 1, 1, 0, 0, 0))
    cat = ConstraintCatalog(s, (squeeze,))
    with pytest.raises(ZeroDenominatorEverywhere):
        derive_prefactor(1, FacetPair(1, 1), cat)


def test_constraint_resolution_errors():
    with pytest.raises(UnknownConstraint):
        derive_minimal_pairs(200, C310)
    with pytest.raises(SettingMismatch):
        derive_minimal_pairs(BD[1], C310)


def test_verify_flags_corrupted_row():
    con = C310[7]
    bad = GPConstraint(con.setting, 7, con.coeffs, con.minimal_pairs, (Fraction(1), Fraction(1)))
    report = verify_catalog((3, 10), [6, 7, 8], catalog=C310.replace(bad))
    assert [r.index for r in report.mismatches] == [7]
    assert report.n_match == 2 and not report.ok


def test_lp_dump_round_trips_fractions():
    buf = io.StringIO()
    derive_prefactor(7, FacetPair(1, 3), C310, recorder=LPDumpWriter(buf))
    text = buf.getvalue()
    assert text.count("End") == 2
    assert "Maximize" in text and "Subject To" in text
    lp = LinearProgram([Fraction(1, 3), -1], constant=2)
    lp.add([1, 1], LE, Fraction(5, 2), "cap")
    out = format_lp(lp)
    assert "obj: 1/3 x1 - x2 + 2 const" in out
    assert "cap: x1 + x2 <= 5/2" in out
