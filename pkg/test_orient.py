"""Tests for capped orientations and their infeasibility witnesses."""

import random

import pytest

from errors import PreconditionError
from generators import pair, path, petersen, random_multigraph, star, triangle
from graph_core import DegreeFn, Digraph, edge_count_within
from orient import check_et_conditions, orient, orient_for_branchings


def caps(default, overrides=None):
    return DegreeFn(default=default, overrides=overrides or {}, min_allowed=0)


def random_caps(rng, n):
    return caps(rng.randint(0, 3), {v: rng.randint(0, 4) for v in range(n) if rng.random() < 0.5})


def test_orientation_agrees_with_subset_scan():
    rng = random.Random(31)
    for _ in range(250):
        n = rng.randint(2, 6)
        G = random_multigraph(n, 10, rng)
        g, h = random_caps(rng, n), random_caps(rng, n)
        result = orient(G, g, h)
        check = check_et_conditions(G, g, h)
        assert result.feasible == (check.cond1_ok and check.cond2_ok)
        if result.feasible:
            D = result.orientation
            assert all(D.indegrees[v] <= g(v) for v in range(n))
            assert all(D.outdegrees[v] <= h(v) for v in range(n))
            assert sum(m for _, _, m in D.arcs) == G.total_multiplicity
        else:
            witness = result.infeasibility
            if witness.kind == "set-condition":
                assert witness.e_S == edge_count_within(G, witness.S)
                assert witness.e_S > witness.limit
            else:
                assert G.degrees[witness.vertex] > g(witness.vertex) + h(witness.vertex)


def test_set_condition_is_reported_first():
    result = orient(triangle(2), caps(1), caps(1))
    assert not result.feasible
    witness = result.infeasibility
    assert witness.kind == "set-condition"
    assert witness.bound == "g"
    assert witness.S == (0, 1, 2)
    assert (witness.e_S, witness.limit) == (6, 3)


def test_vertex_condition_on_star():
    result = orient(star(3), caps(1), caps(1))
    assert not result.feasible
    assert result.infeasibility.kind == "vertex-condition"
    assert result.infeasibility.vertex == 0
    assert check_et_conditions(star(3), caps(1), caps(1)).cond2_ok


def test_outdegree_cap_alone_can_fail():
    result = orient(pair(3), caps(3), caps(1))
    assert result.infeasibility.kind == "set-condition"
    assert result.infeasibility.bound == "h"


def test_feasible_counts_cover_each_pair():
    result = orient(path(4), caps(1), caps(1))
    assert result.feasible
    for (u, v, m), (cu, cv, u_to_v, v_to_u) in zip(path(4).edges, result.counts):
        assert (cu, cv) == (u, v)
        assert u_to_v + v_to_u == m


def test_orient_for_branchings():
    f = DegreeFn.constant(3)
    D = orient_for_branchings(petersen(), f, 2)
    assert max(D.indegrees) <= 2
    assert max(D.outdegrees) <= 4
    assert len(D.arcs) == 15


def test_orient_for_branchings_checks_preconditions():
    with pytest.raises(PreconditionError):
        orient_for_branchings(triangle(3), DegreeFn.constant(2), 2)
    with pytest.raises(PreconditionError):
        orient_for_branchings(star(6), DegreeFn.constant(2), 2)


def test_reversed_orientation_swaps_caps():
    rng = random.Random(5)
    for _ in range(100):
        n = rng.randint(2, 6)
        G = random_multigraph(n, 10, rng)
        g, h = random_caps(rng, n), random_caps(rng, n)
        result = orient(G, g, h)
        assert orient(G, h, g).feasible == result.feasible
        if result.feasible:
            D = result.orientation
            reversed_D = Digraph(n, tuple((v, u, m) for u, v, m in D.arcs))
            assert all(reversed_D.indegrees[v] <= h(v) for v in range(n))
            assert all(reversed_D.outdegrees[v] <= g(v) for v in range(n))
