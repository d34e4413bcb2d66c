"""Tests for the counterexample gadget, the blowup counterexample and the gadget search."""

from fractions import Fraction

import pytest

from density import arboricity
from errors import BudgetExceededError, InputError, PreconditionError
from exact_oracle import brute_a_f
from fractional import check_dual, solve_fractional
from gadgets import (
    build_counterexample,
    build_gadget,
    decode,
    dual_objective,
    encode,
    gadget_dual,
    gadget_search,
    net_gadget,
    search_size,
    uniform_dual,
    verify_forest_bounds,
)
from generators import triangle
from graph_core import DegreeFn, adjacency_code, delta_f
from graph_io import load_resume


@pytest.mark.parametrize("t", range(2, 9))
def test_gadget_shape(t):
    gadget = build_gadget(t)
    G = gadget.graph
    assert G.n == 2 * t + 2
    assert len(G.edges) == 2 * t + 3
    assert G.total_multiplicity == 4 * t + 2
    assert G.degrees[gadget.roles["u"]] == G.degrees[gadget.roles["v"]] == 2 * t
    assert delta_f(G, DegreeFn.constant(t)) == arboricity(G)[0] == 2
    assert dual_objective(G, gadget_dual(gadget)) == Fraction(4 * t + 7, 2 * t + 3)


def test_smallest_gadget_layout():
    gadget = build_gadget(2)
    G = gadget.graph
    assert G.n == 6
    assert G.multiplicity(*gadget.edge("e1")) == 2
    assert G.multiplicity(*gadget.edge("e2")) == 1
    assert G.multiplicity(*gadget.edge("e7")) == 1
    assert gadget.edge("e7") == (gadget.roles["u"], gadget.roles["v"])


def test_gadget_rejects_small_t():
    with pytest.raises(InputError):
        build_gadget(1)


@pytest.mark.parametrize("t", [2, 3, 4])
def test_forest_size_bounds(t):
    report = verify_forest_bounds(t)
    assert report.passed
    assert report.bound_all == 2 * t + 1
    assert report.bound_required == 2 * t


def test_forest_size_bounds_are_tight_for_t_2():
    report = verify_forest_bounds(2)
    assert report.max_forest == 5
    assert report.max_with_required == 4


def test_counterexample_refutes_at_m_8():
    result = build_counterexample(2, 8)
    assert result.lower_bound >= Fraction(120, 7)
    assert result.dual_bound == Fraction(120, 7)
    assert result.conjecture_bound == 17
    assert result.refutes
    assert result.dual_check.feasible


def test_counterexample_does_not_refute_at_m_1():
    result = build_counterexample(2, 1)
    assert result.conjecture_bound == 3
    assert not result.refutes


def test_lower_bound_respects_exact_value():
    result = build_counterexample(2, 1)
    exact = brute_a_f(result.graph, DegreeFn.constant(2))
    assert exact.exact
    assert exact.value >= result.lower_bound


@pytest.mark.parametrize("t,ratio", [(2, Fraction(9, 8)), (3, Fraction(15, 14)), (4, Fraction(21, 20))])
def test_net_gadget_carries_uniform_dual(t, ratio):
    G = net_gadget(t)
    f = DegreeFn.constant(t)
    assert G.total_multiplicity == 6 * t - 3
    assert delta_f(G, f) == arboricity(G)[0] == 2
    check = check_dual(G, f, uniform_dual(G, t))
    assert check.feasible
    assert check.objective / 2 == ratio


def test_code_round_trip():
    G = net_gadget(2)
    assert adjacency_code(decode(encode(G))) == adjacency_code(G)
    with pytest.raises(InputError):
        decode("3:12")


def test_search_restricted_to_smallest_gadget():
    result = gadget_search(2, target_ratio=Fraction(15, 14), restrict_to=build_gadget(2).graph)
    assert result.ratio == solve_fractional(build_gadget(2).graph, DegreeFn.constant(2))[0] / 2
    assert result.ratio >= Fraction(15, 14)
    assert result.meets_target
    assert result.dual_check.feasible


def test_search_restriction_must_be_admissible():
    with pytest.raises(PreconditionError):
        gadget_search(2, restrict_to=triangle())


def test_search_finds_ratio_9_8(tmp_path):
    resume = tmp_path / "search.jsonl"
    result = gadget_search(2, max_vertices=6, max_total_mult=10, target_ratio=Fraction(9, 8), resume=str(resume))
    assert result.meets_target
    assert result.ratio >= Fraction(9, 8)
    assert result.dual_check.feasible
    assert result.dual_check.objective == result.value
    assert resume.exists()

    again = gadget_search(2, max_vertices=6, max_total_mult=10, target_ratio=Fraction(9, 8), resume=str(resume))
    assert again.evaluated == 0
    assert again.resumed == result.evaluated
    assert again.ratio == result.ratio
    assert again.code == result.code

    codes_only = tmp_path / "codes.txt"
    codes_only.write_text("".join(f"{code}\n" for code in load_resume(resume)))
    from_codes = gadget_search(
        2, max_vertices=6, max_total_mult=10, target_ratio=Fraction(9, 8), resume=str(codes_only)
    )
    assert from_codes.evaluated == 0
    assert from_codes.ratio == result.ratio
    assert from_codes.code == result.code


def test_search_target_one_is_trivial():
    result = gadget_search(2, max_vertices=4, max_total_mult=6, target_ratio=Fraction(1))
    assert result.meets_target


def test_search_refuses_oversized_bounds():
    with pytest.raises(BudgetExceededError):
        gadget_search(2, max_vertices=8)
    assert search_size(4, 6) > 0
