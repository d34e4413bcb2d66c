"""Graph families used by the tests and the reproduction suite."""

import random
from typing import Optional, Sequence

import networkx as nx
import structlog

from errors import InputError
from graph_core import Digraph, Multigraph

logger = structlog.get_logger(__name__)


def from_networkx(H: nx.Graph, mult_attr: str = "mult") -> Multigraph:
    """Relabel nodes to 0..n-1 in sorted order; edge attribute mult_attr sets multiplicity."""
    order = {v: i for i, v in enumerate(sorted(H.nodes()))}
    return Multigraph(
        len(order), tuple((order[x], order[y], data.get(mult_attr, 1)) for x, y, data in H.edges(data=True))
    )


def cycle(n: int, mult: int = 1) -> Multigraph:
    if n < 3:
        raise InputError(f"A cycle needs at least 3 vertices, got {n}", field_path="n")
    return Multigraph(n, tuple((i, (i + 1) % n, mult) for i in range(n)))


def path(n: int, mult: int = 1) -> Multigraph:
    return Multigraph(n, tuple((i, i + 1, mult) for i in range(n - 1)))


def star(leaves: int, mult: int = 1) -> Multigraph:
    return Multigraph(leaves + 1, tuple((0, i, mult) for i in range(1, leaves + 1)))


def complete(n: int, mult: int = 1) -> Multigraph:
    return Multigraph(n, tuple((i, j, mult) for i in range(n) for j in range(i + 1, n)))


def triangle(mult: int = 1) -> Multigraph:
    return complete(3, mult)


def pair(mult: int) -> Multigraph:
    return Multigraph(2, ((0, 1, mult),))


def petersen() -> Multigraph:
    return from_networkx(nx.petersen_graph())


def long_girth_cubic() -> Multigraph:
    """Tutte 8-cage: cubic, 30 vertices, girth 8."""
    return from_networkx(nx.LCF_graph(30, [-13, -9, 7, -7, 9, 13], 5))


def unicyclic(cycle_len: int, pendants: int) -> Multigraph:
    """Cycle with `pendants` leaves hung round-robin on its vertices."""
    edges = [(i, (i + 1) % cycle_len, 1) for i in range(cycle_len)]
    for j in range(pendants):
        edges.append((j % cycle_len, cycle_len + j, 1))
    return Multigraph(cycle_len + pendants, tuple(edges))


def random_tree(n: int, max_degree: int, rng: random.Random) -> Multigraph:
    """Random recursive tree whose degrees stay at most max_degree (>= 2)."""
    if max_degree < 2 and n > 2:
        raise InputError("random_tree needs max_degree >= 2 for more than 2 vertices", field_path="max_degree")
    deg = [0] * n
    edges = []
    for v in range(1, n):
        parent = rng.choice([u for u in range(v) if deg[u] < max_degree])
        edges.append((parent, v, 1))
        deg[parent] += 1
        deg[v] += 1
    return Multigraph(n, tuple(edges))


def random_multigraph(n: int, max_total_mult: int, rng: random.Random) -> Multigraph:
    """Between 1 and max_total_mult edge copies dropped on uniformly random vertex pairs."""
    if n < 2:
        return Multigraph(n)
    total = rng.randint(1, max_total_mult)
    return Multigraph(n, tuple(tuple(rng.sample(range(n), 2)) for _ in range(total)))


def directed_cycle(n: int) -> Digraph:
    return Digraph(n, tuple((i, (i + 1) % n, 1) for i in range(n)))


def circulant_digraph(n: int, shifts: Sequence[int]) -> Digraph:
    """Arcs i -> i + s (mod n); directed girth is at least n / max(shifts)."""
    if len(set(s % n for s in shifts)) != len(shifts) or any(s % n == 0 for s in shifts):
        raise InputError(f"Shifts {list(shifts)} must be distinct and nonzero modulo {n}", field_path="shifts")
    return Digraph(n, tuple((i, (i + s) % n, 1) for i in range(n) for s in shifts))


def cyclic_lift(base: Digraph, m: int, voltages: Optional[Sequence[int]] = None, seed: int = 0) -> Digraph:
    """m-fold cyclic cover: vertex (v, j) is v * m + j and arc uv with voltage s maps (u, j) to (v, j + s).

    A directed cycle of the lift projects onto a closed walk of the base whose voltages sum
    to 0 modulo m. Random voltages are drawn when none are given.
    """
    if not base.simple:
        raise InputError("cyclic_lift expects a base digraph without parallel arcs")
    if voltages is None:
        rng = random.Random(seed)
        voltages = [rng.randrange(m) for _ in base.arcs]
    if len(voltages) != len(base.arcs):
        raise InputError(f"Expected {len(base.arcs)} voltages, got {len(voltages)}", field_path="voltages")
    arcs = []
    for (u, v, _), s in zip(base.arcs, voltages):
        for j in range(m):
            arcs.append((u * m + j, v * m + (j + s) % m, 1))
    return Digraph(base.n * m, tuple(arcs))


def random_eulerian_digraph(n: int, d: int, seed: int = 0) -> Digraph:
    """Eulerian orientation of a random 2d-regular simple graph: in- and outdegree d everywhere."""
    if 4 * d > n - 1:
        # dense degrees: sample the sparse complement instead
        H = nx.complement(nx.random_regular_graph(n - 1 - 2 * d, n, seed=seed))
    else:
        H = nx.random_regular_graph(2 * d, n, seed=seed)
    arcs = []
    for component in nx.connected_components(H):
        arcs.extend((x, y, 1) for x, y in nx.eulerian_circuit(H.subgraph(component)))
    logger.debug("Generated Eulerian digraph", vertices=n, d=d, arcs=len(arcs))
    return Digraph(n, tuple(arcs))


def random_out_regular_digraph(n: int, d: int, seed: int = 0) -> Digraph:
    """Every vertex sends arcs to d distinct uniformly random other vertices."""
    rng = random.Random(seed)
    arcs = []
    for v in range(n):
        for w in rng.sample([x for x in range(n) if x != v], d):
            arcs.append((v, w, 1))
    return Digraph(n, tuple(arcs))
