"""Tests for the brute-force exact oracles."""

import pytest

from density import arboricity
from errors import BudgetExceededError
from exact_oracle import OracleBudget, brute_a_f, brute_pa_f, brute_vec_a, brute_vec_a_f
from generators import complete, pair, path, star, triangle
from graph_core import CertificateKind, DegreeFn, Digraph, Multigraph, symmetric_digraph, verify_certificate

F2 = DegreeFn.constant(2)


@pytest.mark.parametrize(
    "graph,expected",
    [(triangle(), 2), (pair(2), 2), (path(5), 1), (star(4), 2), (Multigraph(3), 0)],
)
def test_degree_2_forests(graph, expected):
    result = brute_a_f(graph, F2)
    assert result.exact
    assert result.value == expected
    assert verify_certificate(graph, result.certificate)


def test_plain_forests_match_arboricity():
    for graph in (complete(4), complete(5), pair(3), triangle(2)):
        assert brute_a_f(graph, None).value == arboricity(graph)[0]


def test_pseudoforests():
    result = brute_pa_f(triangle(), F2)
    assert result.value == 1
    assert result.certificate.kind == CertificateKind.DEGREE_F_PSEUDOFOREST
    assert brute_pa_f(pair(3), None).value == 2


def test_symmetric_triangle_needs_four_linear_branchings():
    D = symmetric_digraph(complete(3))
    result = brute_vec_a_f(D, F2)
    assert result.exact
    assert result.value == 4
    assert verify_certificate(D, result.certificate)
    assert brute_vec_a(D).value == 3


def test_branchings_of_a_directed_path():
    D = Digraph(3, [(0, 1), (1, 2)])
    assert brute_vec_a(D).value == 1
    assert brute_vec_a_f(D, F2).value == 1


def test_budget_refusals():
    with pytest.raises(BudgetExceededError):
        brute_a_f(complete(6), F2, OracleBudget(max_edges=10))
    with pytest.raises(BudgetExceededError):
        brute_a_f(star(5), F2, OracleBudget(max_colors=2))
