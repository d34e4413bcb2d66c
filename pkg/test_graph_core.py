"""Tests for the graph model, degree statistics and certificate verification."""

import math
import random

import pytest

from density import arboricity
from errors import InputError
from generators import (
    circulant_digraph,
    complete,
    cycle,
    directed_cycle,
    long_girth_cubic,
    pair,
    path,
    petersen,
    random_multigraph,
    star,
    triangle,
)
from graph_core import (
    CertificateKind,
    DecompositionCertificate,
    DegreeFn,
    Digraph,
    DisjointSets,
    Multigraph,
    ViolationKind,
    adjacency_code,
    blowup,
    canonical_form,
    delta_f,
    directed_degree_stats,
    directed_girth,
    edge_count_within,
    from_adjacency_code,
    girth,
    symmetric_digraph,
    underlying_multigraph,
    underlying_simple,
    undirected_certificate,
    verify_certificate,
)


def test_repeated_pairs_are_merged():
    """Test that (u, v) and (v, u) entries add up to one pair."""
    G = Multigraph(3, [(0, 1), (1, 0, 2)])
    assert G.edges == ((0, 1, 3),)
    assert G.degrees == (3, 3, 0)
    assert G.multiplicity(1, 0) == 3
    assert not G.is_simple


@pytest.mark.parametrize("edges", [[(1, 1)], [(0, 1, 0)], [(0, 5)]])
def test_malformed_edges_are_rejected(edges):
    with pytest.raises(InputError):
        Multigraph(3, edges)


def test_simple_digraph_rejects_parallel_arcs():
    with pytest.raises(InputError):
        Digraph(2, [(0, 1, 2)], simple=True)
    assert not Digraph(2, [(0, 1, 2)]).simple
    assert Digraph(2, [(0, 1), (1, 0)]).simple


def test_degree_statistics():
    f = DegreeFn.constant(2)
    assert delta_f(star(4), f) == 2
    assert delta_f(star(4), f.with_override(0, 4)) == 1
    assert delta_f(Multigraph(3), f) == 0
    assert edge_count_within(triangle(2), [0, 1]) == 2

    D = Digraph(3, [(0, 1), (0, 2), (1, 2)])
    assert directed_degree_stats(D, f) == (2, 2)
    assert directed_degree_stats(D, DegreeFn.constant(3)) == (2, 1)


def test_degree_function_rejects_small_values():
    with pytest.raises(InputError):
        DegreeFn.constant(1)
    with pytest.raises(InputError):
        DegreeFn(default=3, overrides={2: 1})
    assert DegreeFn.constant(0, min_allowed=0)(7) == 0


def test_constructions():
    G = blowup(triangle(), 3)
    assert G.total_multiplicity == 9
    with pytest.raises(InputError):
        blowup(triangle(), 0)

    simple, mu = underlying_simple(triangle(2))
    assert simple.is_simple
    assert mu == {(0, 1): 2, (0, 2): 2, (1, 2): 2}

    D = symmetric_digraph(triangle())
    assert len(D.arcs) == 6
    assert underlying_multigraph(D) == triangle(2)


def test_girth_values():
    assert girth(cycle(5)) == 5
    assert girth(pair(2)) == 2
    assert girth(path(4)) == math.inf
    assert girth(petersen()) == 5
    assert girth(long_girth_cubic()) == 8
    assert max(long_girth_cubic().degrees) == 3


def test_directed_girth_values():
    assert directed_girth(directed_cycle(4)) == 4
    assert directed_girth(symmetric_digraph(triangle())) == 2
    assert directed_girth(circulant_digraph(16, [1, 2])) == 8
    assert directed_girth(Digraph(3, [(0, 1), (1, 2), (0, 2)])) == math.inf


def test_canonical_form_ignores_labels():
    first = Multigraph(3, [(0, 1, 2), (1, 2, 1)])
    second = Multigraph(3, [(1, 2, 2), (0, 2, 1)])
    assert canonical_form(first) == canonical_form(second)
    assert canonical_form(first) != canonical_form(triangle())

    code = adjacency_code(first)
    assert from_adjacency_code(3, code) == first


def test_disjoint_sets_rollback():
    sets = DisjointSets(rollback=True)
    assert sets.add_edge(0, 1) == 0
    mark = sets.snapshot()
    sets.add_edge(1, 2)
    assert sets.add_edge(0, 2) == 1
    sets.rollback(mark)
    assert not sets.connected(0, 2)
    assert sets.excess(0) == 0


def test_verify_accepts_valid_certificate():
    cert = DecompositionCertificate(CertificateKind.DEGREE_F_FOREST, 1, ((0,), (0,), (0,)), DegreeFn.constant(2))
    assert verify_certificate(path(4), cert).accepted


def test_verify_reports_cycle_with_class():
    cert = DecompositionCertificate(CertificateKind.PLAIN_FOREST, 1, ((0,), (0,), (0,)))
    verdict = verify_certificate(triangle(), cert)
    assert not verdict
    assert verdict.violation.kind == ViolationKind.CYCLE
    assert verdict.violation.class_index == 0
    assert set(verdict.violation.cycle) == {0, 1, 2}


def test_verify_reports_degree_and_coverage():
    f = DegreeFn.constant(2)
    cert = DecompositionCertificate(CertificateKind.DEGREE_F_FOREST, 1, ((0,), (0,), (0,)), f)
    verdict = verify_certificate(star(3), cert)
    assert verdict.violation.kind == ViolationKind.DEGREE
    assert verdict.violation.vertex == 0

    short = DecompositionCertificate(CertificateKind.PLAIN_FOREST, 2, ((0,),))
    verdict = verify_certificate(pair(2), short)
    assert verdict.coverage_mismatch

    out_of_range = DecompositionCertificate(CertificateKind.PLAIN_FOREST, 1, ((0, 1),))
    assert verify_certificate(pair(2), out_of_range).coverage_mismatch


def test_verify_branching_caps():
    merge = DecompositionCertificate(CertificateKind.PLAIN_BRANCHING, 1, ((0,), (0,)))
    verdict = verify_certificate(Digraph(3, [(0, 2), (1, 2)]), merge)
    assert verdict.violation.kind == ViolationKind.INDEGREE
    assert verdict.violation.vertex == 2

    fork = DecompositionCertificate(CertificateKind.DEGREE_F_BRANCHING, 1, ((0,), (0,)), DegreeFn.constant(2))
    verdict = verify_certificate(Digraph(3, [(0, 1), (0, 2)]), fork)
    assert verdict.violation.kind == ViolationKind.OUTDEGREE
    assert verdict.violation.vertex == 0


def test_verify_pseudoforest_allows_one_cycle():
    one = DecompositionCertificate(CertificateKind.PLAIN_PSEUDOFOREST, 1, ((0,), (0,), (0,)))
    assert verify_certificate(triangle(), one)

    G = Multigraph(4, [(0, 1, 2), (2, 3, 2), (1, 2)])
    cert = DecompositionCertificate(CertificateKind.PLAIN_PSEUDOFOREST, 1, ((0, 0), (0, 0), (0,)))
    assert verify_certificate(G, cert).violation.kind == ViolationKind.SECOND_CYCLE


def test_verify_needs_degree_function_and_direction():
    cert = DecompositionCertificate(CertificateKind.DEGREE_F_FOREST, 1, ((0,),))
    with pytest.raises(InputError):
        verify_certificate(pair(1), cert)
    branching = DecompositionCertificate(CertificateKind.PLAIN_BRANCHING, 1, ((0,),))
    with pytest.raises(InputError):
        verify_certificate(pair(1), branching)


def test_undirected_certificate_maps_back():
    D = Digraph(3, [(0, 1), (2, 1)])
    cert = DecompositionCertificate(CertificateKind.PLAIN_BRANCHING, 2, ((0,), (1,)))
    G = path(3)
    mapped = undirected_certificate(G, D, cert)
    assert mapped.kind == CertificateKind.PLAIN_FOREST
    assert verify_certificate(G, mapped)


def test_complete_graph_counts():
    K5 = complete(5)
    assert len(K5.edges) == 10
    assert K5.degrees == (4, 4, 4, 4, 4)


def test_girth_of_blowup_is_two():
    for graph in (path(2), cycle(5), petersen(), long_girth_cubic()):
        for m in (2, 3):
            assert girth(blowup(graph, m)) == 2


def test_delta_f_is_monotone_and_scales_under_blowup():
    rng = random.Random(7)
    for _ in range(60):
        n = rng.randint(2, 7)
        G = random_multigraph(n, 12, rng)
        overrides = {v: rng.randint(1, 4) for v in range(n) if rng.random() < 0.3}
        f = DegreeFn(default=rng.randint(1, 3), overrides=overrides, min_allowed=1)
        v = rng.randrange(n)
        raised = f.with_override(v, f(v) + rng.randint(1, 3))
        assert delta_f(G, raised) <= delta_f(G, f)
        for m in (2, 3):
            assert delta_f(blowup(G, m), f) <= m * delta_f(G, f)

    ones = DegreeFn.constant(1, min_allowed=1)
    for graph in (petersen(), star(4), pair(3)):
        for m in (2, 3):
            assert delta_f(blowup(graph, m), ones) == m * delta_f(graph, ones)


def test_verify_accepts_certificates_with_permuted_classes():
    rng = random.Random(3)
    for graph in (petersen(), complete(5), pair(3), long_girth_cubic()):
        _, cert, _ = arboricity(graph)
        for _ in range(5):
            perm = rng.sample(range(cert.k), cert.k)
            renamed = cert.permuted(perm)
            assert verify_certificate(graph, renamed)
            sizes, renamed_sizes = cert.class_sizes(), renamed.class_sizes()
            assert all(renamed_sizes[perm[c]] == sizes[c] for c in range(cert.k))

    broken = DecompositionCertificate(CertificateKind.PLAIN_FOREST, 2, ((0,), (0,), (0,)))
    assert not verify_certificate(triangle(), broken.permuted([1, 0]))
