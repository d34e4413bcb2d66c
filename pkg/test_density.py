"""Tests for arboricity, pseudoarboricity and their witnesses."""

import math
import random

import pytest

from density import (
    arboricity,
    conjecture_bound,
    degree_f_pseudoarboricity,
    directed_arboricity_formula,
    directed_conjecture_bound,
    hakimi_bruteforce,
    nash_williams_bruteforce,
    pseudoarboricity,
    pseudoforest_upper_bound,
)
from errors import BudgetExceededError
from exact_oracle import brute_a_f, brute_pa_f, brute_vec_a, brute_vec_a_f
from fractional import solve_fractional
from generators import complete, pair, petersen, random_multigraph, star, triangle, unicyclic
from graph_core import DegreeFn, Multigraph, delta_f, edge_count_within, symmetric_digraph, verify_certificate


@pytest.mark.parametrize(
    "graph,expected",
    [(triangle(), 2), (pair(3), 3), (complete(4), 2), (complete(5), 3), (petersen(), 2), (star(5), 1)],
)
def test_arboricity_known_values(graph, expected):
    a, cert, witness = arboricity(graph)
    assert a == expected
    assert cert.k == expected
    assert verify_certificate(graph, cert)
    assert witness.value == expected
    assert witness.e_S == edge_count_within(graph, witness.S)


@pytest.mark.parametrize(
    "graph,expected",
    [(triangle(), 1), (pair(3), 2), (complete(4), 2), (complete(5), 2), (star(5), 1)],
)
def test_pseudoarboricity_known_values(graph, expected):
    pa, cert, witness = pseudoarboricity(graph)
    assert pa == expected
    assert verify_certificate(graph, cert)
    assert witness.value == expected


def test_edgeless_graph_has_no_witness():
    G = Multigraph(4)
    assert arboricity(G)[0] == 0
    assert arboricity(G)[2] is None
    pa, cert, witness = pseudoarboricity(G)
    assert pa == 0 and witness is None


def test_formulas_match_subset_scans():
    """Test arboricity and pseudoarboricity against brute-force density maxima."""
    rng = random.Random(20240501)
    for _ in range(200):
        G = random_multigraph(rng.randint(2, 7), 12, rng)
        a, forests, _ = arboricity(G)
        pa, pseudoforests, _ = pseudoarboricity(G)
        assert a == nash_williams_bruteforce(G)[0]
        assert pa == hakimi_bruteforce(G)[0]
        assert verify_certificate(G, forests)
        assert verify_certificate(G, pseudoforests)


def test_degree_f_pseudoarboricity_matches_oracle():
    rng = random.Random(7)
    for _ in range(60):
        G = random_multigraph(rng.randint(2, 6), 9, rng)
        f = DegreeFn.constant(rng.choice([2, 3]))
        value, cert = degree_f_pseudoarboricity(G, f)
        pa, _, _ = pseudoarboricity(G)
        assert value == max(delta_f(G, f), pa)
        assert verify_certificate(G, cert)
        assert brute_pa_f(G, f).value == value


def test_bounds_sandwich_the_exact_value():
    rng = random.Random(11)
    for _ in range(40):
        G = random_multigraph(rng.randint(2, 6), 9, rng)
        f = DegreeFn.constant(rng.choice([2, 3]))
        exact = brute_a_f(G, f)
        fractional, _ = solve_fractional(G, f)
        a, _, _ = arboricity(G)
        assert exact.value >= fractional
        assert exact.value >= max(delta_f(G, f), a)
        assert math.ceil(fractional) >= max(delta_f(G, f), a)
        assert exact.value <= pseudoforest_upper_bound(G, f)


def test_conjecture_bound_on_triangle():
    assert conjecture_bound(triangle(), DegreeFn.constant(2)) == 2


def test_directed_arboricity_formula_on_symmetric_triangle():
    D = symmetric_digraph(complete(3))
    assert directed_arboricity_formula(D) == 3
    assert brute_vec_a(D).value == 3


def test_subset_scan_refuses_large_graphs():
    with pytest.raises(BudgetExceededError):
        nash_williams_bruteforce(Multigraph(17, [(0, 1)]))


def test_directed_conjecture_bound_matches_k3_star():
    D = symmetric_digraph(complete(3))
    assert directed_conjecture_bound(D, DegreeFn.constant(2)) == 4
    assert brute_vec_a_f(D, DegreeFn.constant(2)).value == 4


def test_unicyclic_graphs_split_into_one_pseudoforest():
    G = unicyclic(4, 3)
    assert pseudoarboricity(G)[0] == 1
    assert arboricity(G)[0] == 2


def test_pseudoarboricity_sandwiches_arboricity():
    rng = random.Random(11)
    for _ in range(150):
        G = random_multigraph(rng.randint(2, 12), 30, rng)
        a = arboricity(G)[0]
        pa = pseudoarboricity(G)[0]
        assert pa <= a <= 2 * pa
