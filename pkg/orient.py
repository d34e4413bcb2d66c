"""Orientations with per-vertex indegree and outdegree caps.

A multigraph G has an orientation with d-(v) <= g(v) and d+(v) <= h(v) everywhere iff
(1) d(v) <= g(v) + h(v) for every vertex and (2) e(S) <= min(g(S), h(S)) for every set S.
`orient` decides this with flows and returns either the orientation or a witness that
violates (1) or (2).
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import networkx as nx
import structlog

from config import settings
from errors import ArborizeError, BudgetExceededError, PreconditionError
from graph_core import DegreeFn, Digraph, Multigraph, delta_f, edge_count_within

logger = structlog.get_logger(__name__)

SOURCE, SINK = "s", "t"


@dataclass(frozen=True)
class Infeasibility:
    kind: str
    vertex: Optional[int] = None
    S: Tuple[int, ...] = ()
    bound: str = ""
    e_S: int = 0
    limit: int = 0


@dataclass(frozen=True)
class OrientationResult:
    orientation: Optional[Digraph] = None
    counts: Tuple[Tuple[int, int, int, int], ...] = ()
    infeasibility: Optional[Infeasibility] = None

    @property
    def feasible(self) -> bool:
        return self.orientation is not None


@dataclass(frozen=True)
class ETCheck:
    cond1_ok: bool
    cond2_ok: bool
    counterexample: Optional[Infeasibility] = None


def _cap_network(G: Multigraph, caps: List[int]) -> nx.DiGraph:
    """Edge nodes feed their endpoints; vertex v absorbs at most caps[v] copies."""
    network = nx.DiGraph()
    network.add_node(SOURCE)
    network.add_node(SINK)
    for i, (u, v, m) in enumerate(G.edges):
        network.add_edge(SOURCE, ("e", i), capacity=m)
        network.add_edge(("e", i), ("v", u))
        network.add_edge(("e", i), ("v", v))
    for v in range(G.n):
        network.add_edge(("v", v), SINK, capacity=caps[v])
    return network


def absorb(G: Multigraph, caps: List[int]) -> Optional[List[Tuple[int, int]]]:
    """Assign every copy to one endpoint, at most caps[v] copies per vertex.

    Returns per-pair (copies given to u, copies given to v), or None if impossible.
    """
    total = G.total_multiplicity
    if total == 0:
        return [(0, 0) for _ in G.edges]
    value, flow = nx.maximum_flow(_cap_network(G, caps), SOURCE, SINK)
    if value < total:
        return None
    return [
        (flow[("e", i)].get(("v", u), 0), flow[("e", i)].get(("v", v), 0))
        for i, (u, v, _) in enumerate(G.edges)
    ]


def set_witness(G: Multigraph, caps: List[int], bound: str) -> Optional[Infeasibility]:
    """S with e(S) > caps(S) from a min cut, or None when every copy can be absorbed."""
    total = G.total_multiplicity
    if total == 0:
        return None
    network = _cap_network(G, caps)
    cut_value, (source_side, _) = nx.minimum_cut(network, SOURCE, SINK)
    if cut_value >= total:
        return None
    S = tuple(sorted(node[1] for node in source_side if isinstance(node, tuple) and node[0] == "v"))
    e_S = edge_count_within(G, S)
    limit = sum(caps[v] for v in S)
    return Infeasibility(kind="set-condition", S=S, bound=bound, e_S=e_S, limit=limit)


def _both_bounds_flow(G: Multigraph, gcap: List[int], hcap: List[int]) -> Optional[List[Tuple[int, int, int, int]]]:
    """Per-pair (u, v, u_to_v, v_to_u) meeting both caps, via a flow with lower bounds."""
    degrees = G.degrees
    lower = [max(0, degrees[v] - hcap[v]) for v in range(G.n)]
    network = nx.DiGraph()
    excess = {}

    def add_arc(tail, head, low, high):
        if high - low > 0:
            network.add_edge(tail, head, capacity=high - low)
        if low:
            excess[head] = excess.get(head, 0) + low
            excess[tail] = excess.get(tail, 0) - low

    for i, (u, v, m) in enumerate(G.edges):
        add_arc(SOURCE, ("e", i), m, m)
        add_arc(("e", i), ("v", u), 0, m)
        add_arc(("e", i), ("v", v), 0, m)
    for v in range(G.n):
        add_arc(("v", v), SINK, lower[v], gcap[v])
    network.add_edge(SINK, SOURCE)

    demand = 0
    for node, amount in excess.items():
        if amount > 0:
            network.add_edge("S*", node, capacity=amount)
            demand += amount
        elif amount < 0:
            network.add_edge(node, "T*", capacity=-amount)
    if demand == 0:
        return [(u, v, 0, 0) for u, v, _ in G.edges]
    network.add_node("S*")
    network.add_node("T*")
    value, flow = nx.maximum_flow(network, "S*", "T*")
    if value < demand:
        return None
    counts = []
    for i, (u, v, m) in enumerate(G.edges):
        into_v = flow[("e", i)].get(("v", v), 0)
        into_u = flow[("e", i)].get(("v", u), 0)
        counts.append((u, v, into_v, into_u))
    return counts


def _digraph_from_counts(n: int, counts) -> Digraph:
    arcs = []
    for u, v, u_to_v, v_to_u in counts:
        if u_to_v:
            arcs.append((u, v, u_to_v))
        if v_to_u:
            arcs.append((v, u, v_to_u))
    return Digraph(n, tuple(arcs))


def orient(G: Multigraph, g: DegreeFn, h: DegreeFn) -> OrientationResult:
    """Orientation with d-(v) <= g(v) and d+(v) <= h(v), or a witness of infeasibility.

    Set witnesses are reported in preference to vertex witnesses; the indegree cap g is
    examined before the outdegree cap h.
    """
    gcap, hcap = g.values(G.n), h.values(G.n)
    for bound, caps in (("g", gcap), ("h", hcap)):
        witness = set_witness(G, caps, bound)
        if witness is not None:
            logger.info("Orientation infeasible", condition="set", bound=bound, S=list(witness.S), e_S=witness.e_S)
            return OrientationResult(infeasibility=witness)
    for v, d in enumerate(G.degrees):
        if d > gcap[v] + hcap[v]:
            logger.info("Orientation infeasible", condition="vertex", vertex=v, degree=d)
            return OrientationResult(
                infeasibility=Infeasibility(kind="vertex-condition", vertex=v, e_S=d, limit=gcap[v] + hcap[v])
            )
    counts = _both_bounds_flow(G, gcap, hcap)
    if counts is None:
        raise ArborizeError("Both orientation conditions hold but no orientation flow exists")
    return OrientationResult(orientation=_digraph_from_counts(G.n, counts), counts=tuple(counts))


def check_et_conditions(G: Multigraph, g: DegreeFn, h: DegreeFn, limit: Optional[int] = None) -> ETCheck:
    """Both orientation conditions by explicit enumeration over all vertex subsets."""
    limit = settings.pipeline.et_subset_limit if limit is None else limit
    if G.n > limit:
        raise BudgetExceededError(f"Subset scan over {G.n} vertices exceeds the limit of {limit}", size=G.n)
    gcap, hcap = g.values(G.n), h.values(G.n)
    counterexample = None
    cond1_ok = True
    for v, d in enumerate(G.degrees):
        if d > gcap[v] + hcap[v]:
            cond1_ok = False
            counterexample = Infeasibility(kind="vertex-condition", vertex=v, e_S=d, limit=gcap[v] + hcap[v])
            break
    cond2_ok = True
    edges = [(1 << u, 1 << v, m) for u, v, m in G.edges]
    for mask in range(1, 1 << G.n):
        e_S = sum(m for bu, bv, m in edges if mask & bu and mask & bv)
        if e_S == 0:
            continue
        S = tuple(v for v in range(G.n) if mask >> v & 1)
        g_S = sum(gcap[v] for v in S)
        h_S = sum(hcap[v] for v in S)
        if e_S > min(g_S, h_S):
            cond2_ok = False
            if counterexample is None:
                bound = "g" if e_S > g_S else "h"
                counterexample = Infeasibility(
                    kind="set-condition", S=S, bound=bound, e_S=e_S, limit=g_S if bound == "g" else h_S
                )
            break
    return ETCheck(cond1_ok=cond1_ok, cond2_ok=cond2_ok, counterexample=counterexample)


def orient_for_branchings(G: Multigraph, f: DegreeFn, d: int) -> Digraph:
    """Orientation with indegree <= d and outdegree <= d (f(v) - 1) at every vertex."""
    from density import arboricity

    weighted = delta_f(G, f)
    if weighted > d:
        raise PreconditionError(f"delta_f(G) = {weighted} exceeds d = {d}", parameter="delta_f", value=weighted)
    a, _, _ = arboricity(G)
    if a > d:
        raise PreconditionError(f"arboricity(G) = {a} exceeds d = {d}", parameter="arboricity", value=a)
    g = DegreeFn.constant(d, min_allowed=0)
    h = DegreeFn(
        default=d * (f.default - 1),
        overrides={v: d * (value - 1) for v, value in f.overrides.items()},
        min_allowed=0,
    )
    result = orient(G, g, h)
    if not result.feasible:
        raise PreconditionError(
            f"No orientation with indegree <= {d} and outdegree <= {d}(f - 1): {result.infeasibility}",
            parameter="d",
            value=d,
        )
    logger.debug("Oriented for branchings", d=d, arcs=len(result.orientation.arcs))
    return result.orientation
