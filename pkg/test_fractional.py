"""Tests for the exact fractional degree-f arboricity LP."""

from fractions import Fraction

import pytest

from errors import BudgetExceededError, InputError
from fractional import (
    blowup_scaling_check,
    check_dual,
    enumerate_degree_f_forests,
    maximal_forests,
    solve_fractional,
    solve_fractional_copies,
)
from gadgets import build_gadget, gadget_dual
from generators import complete, pair, path, star, triangle
from graph_core import DegreeFn, Multigraph
from rational_lp import maximize

F2 = DegreeFn.constant(2)


def test_simplex_returns_exact_optimum_and_duals():
    solution = maximize([[1, 0], [0, 1], [1, 1]], [1, 1, Fraction(3, 2)], [1, 1])
    assert solution.status == "optimal"
    assert solution.objective == Fraction(3, 2)
    assert sum(solution.x) == Fraction(3, 2)
    assert sum(b * y for b, y in zip([1, 1, Fraction(3, 2)], solution.y)) == Fraction(3, 2)


def test_simplex_rejects_negative_rhs():
    with pytest.raises(InputError):
        maximize([[1]], [-1], [1])


@pytest.mark.parametrize(
    "graph,expected",
    [(triangle(), Fraction(3, 2)), (star(3), Fraction(3, 2)), (pair(2), Fraction(2)), (path(5), Fraction(1))],
)
def test_known_fractional_values(graph, expected):
    value, cert = solve_fractional(graph, F2)
    assert value == expected
    assert cert.objective_primal == cert.objective_dual == expected


def test_edgeless_graph_has_zero_value():
    value, cert = solve_fractional(Multigraph(3), F2)
    assert value == 0
    assert cert.primal == {}


def test_forest_family_of_triangle():
    family = enumerate_degree_f_forests(triangle(), F2)
    # empty, three singletons, three paths of length two
    assert len(family.forests) == 7
    assert family.largest() == 2
    assert len(maximal_forests(family)) == 3


def test_enumeration_guards():
    with pytest.raises(InputError):
        enumerate_degree_f_forests(pair(2), F2)
    with pytest.raises(BudgetExceededError):
        enumerate_degree_f_forests(complete(8), F2)


def test_check_dual_reports_violations():
    feasible = check_dual(triangle(), F2, {(0, 1): Fraction(1, 2), (0, 2): Fraction(1, 2), (1, 2): Fraction(1, 2)})
    assert feasible.feasible
    assert feasible.objective == Fraction(3, 2)

    infeasible = check_dual(triangle(), F2, {(0, 1): 1, (0, 2): 1, (1, 2): 1})
    assert not infeasible.feasible
    assert infeasible.max_forest_weight == 2
    assert len(infeasible.violating_forest) == 2


def test_check_dual_validates_weights():
    with pytest.raises(InputError):
        check_dual(triangle(), F2, {(0, 1): 1, (0, 2): 0})
    with pytest.raises(InputError):
        check_dual(triangle(), F2, {(0, 1): -1, (0, 2): 0, (1, 2): 0})
    with pytest.raises(InputError):
        check_dual(triangle(), F2, {(0, 1): 0, (0, 2): 0, (1, 2): 0, (0, 3): 0})


@pytest.mark.parametrize("t", [2, 3, 4, 5])
def test_gadget_values_meet_the_dual_bound(t):
    gadget = build_gadget(t)
    f = DegreeFn.constant(t)
    expected = Fraction(4 * t + 7, 2 * t + 3)
    value, _ = solve_fractional(gadget.graph, f)
    check = check_dual(gadget.graph, f, gadget_dual(gadget))
    assert value >= expected
    assert check.feasible
    assert check.objective == expected


def test_blowup_scales_exactly():
    report = blowup_scaling_check(build_gadget(2).graph, F2, [1, 2, 3])
    assert report.passed
    assert [m for m, _, _ in report.rows] == [1, 2, 3]
    assert all(value == m * report.base_value for m, value, _ in report.rows)


def test_copy_level_lp_agrees_with_reduced_lp():
    for graph in (pair(2), triangle(2), Multigraph(3, [(0, 1, 2), (1, 2, 1)])):
        reduced, _ = solve_fractional(graph, F2)
        assert solve_fractional_copies(graph, F2) == reduced


@pytest.mark.parametrize("graph", [star(4), triangle(2), complete(4), path(5)])
def test_value_does_not_grow_when_f_grows_at_one_vertex(graph):
    f = DegreeFn.constant(2)
    base, _ = solve_fractional(graph, f)
    for v in range(graph.n):
        raised, _ = solve_fractional(graph, f.with_override(v, 3))
        assert raised <= base
