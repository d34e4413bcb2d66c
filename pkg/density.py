"""Arboricity, pseudoarboricity and degree-f pseudoarboricity with optimality witnesses."""

import itertools
import math
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import structlog

from errors import BudgetExceededError, CertificateError, InputError
from graph_core import (
    CertificateKind,
    DecompositionCertificate,
    DegreeFn,
    Digraph,
    Multigraph,
    delta_f,
    directed_degree_stats,
    edge_count_within,
    underlying_multigraph,
    undirected_certificate,
    verify_certificate,
)
from orient import absorb, orient, set_witness

logger = structlog.get_logger(__name__)

BRUTE_FORCE_MAX_VERTICES = 16


@dataclass(frozen=True)
class DensityWitness:
    S: Tuple[int, ...]
    e_S: int
    kind: str

    @property
    def value(self) -> int:
        if self.kind == "arboricity":
            return math.ceil(self.e_S / (len(self.S) - 1))
        return math.ceil(self.e_S / len(self.S))


def _witness(G: Multigraph, S, kind: str) -> DensityWitness:
    S = tuple(sorted(S))
    return DensityWitness(S=S, e_S=edge_count_within(G, S), kind=kind)


class ForestPacking:
    """k forests over the parallel copies of G, grown by matroid-union exchange paths."""

    def __init__(self, G: Multigraph):
        self.G = G
        self.ends: List[Tuple[int, int]] = [(u, v) for _, _, u, v in G.copies()]
        self.owner: List[Tuple[int, int]] = [(i, c) for i, c, _, _ in G.copies()]
        self.color: List[Optional[int]] = [None] * len(self.ends)
        self.forests: List[Dict[int, List[Tuple[int, int]]]] = []

    @property
    def k(self) -> int:
        return len(self.forests)

    def add_forest(self):
        self.forests.append({})

    def _attach(self, e: int, i: int):
        u, v = self.ends[e]
        adj = self.forests[i]
        adj.setdefault(u, []).append((v, e))
        adj.setdefault(v, []).append((u, e))
        self.color[e] = i

    def _detach(self, e: int):
        i = self.color[e]
        u, v = self.ends[e]
        adj = self.forests[i]
        adj[u].remove((v, e))
        adj[v].remove((u, e))
        self.color[e] = None

    def _path(self, i: int, u: int, v: int) -> Optional[List[int]]:
        """Elements on the forest-i path from u to v, or None if they are disconnected."""
        adj = self.forests[i]
        parent = {u: (u, -1)}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            if x == v:
                break
            for y, e in adj.get(x, ()):
                if y not in parent:
                    parent[y] = (x, e)
                    queue.append(y)
        if v not in parent:
            return None
        path = []
        x = v
        while x != u:
            x, e = parent[x]
            path.append(e)
        return path

    def insert(self, x: int) -> Optional[set]:
        """Place element x; on failure return the set of elements reached by the search."""
        label: Dict[int, Tuple[int, int]] = {}
        queue = deque([x])
        reached = {x}
        while queue:
            y = queue.popleft()
            u, v = self.ends[y]
            for i in range(self.k):
                if self.color[y] == i:
                    continue
                path = self._path(i, u, v)
                if path is None:
                    self._augment(x, y, i, label)
                    return None
                for z in sorted(path):
                    if z not in reached:
                        reached.add(z)
                        label[z] = (y, i)
                        queue.append(z)
        return reached

    def _augment(self, x: int, last: int, target: int, label: Dict[int, Tuple[int, int]]):
        cur = last
        while True:
            old = self.color[cur]
            if old is not None:
                self._detach(cur)
            self._attach(cur, target)
            if cur == x:
                return
            cur, target = label[cur][0], old

    def certificate(self) -> DecompositionCertificate:
        rows: List[List[int]] = [[] for _ in self.G.edges]
        for e, (i, _) in enumerate(self.owner):
            rows[i].append(self.color[e])
        return DecompositionCertificate(CertificateKind.PLAIN_FOREST, self.k, tuple(tuple(r) for r in rows))


def arboricity(G: Multigraph) -> Tuple[int, DecompositionCertificate, Optional[DensityWitness]]:
    """a(G) with a forest decomposition and a Nash-Williams dense set.

    The witness comes from the last failed insertion: the component of the reached
    elements containing the new copy has e(S) > (a - 1)(|S| - 1).
    """
    packing = ForestPacking(G)
    witness = None
    for x in range(len(packing.ends)):
        while True:
            reached = packing.insert(x)
            if reached is None:
                break
            witness = _reached_component(G, packing, reached, x)
            packing.add_forest()
    cert = packing.certificate()
    a = packing.k
    if witness is not None and witness.value != a:
        raise CertificateError(f"Arboricity witness gives {witness.value}, decomposition uses {a} forests")
    logger.debug("Computed arboricity", vertices=G.n, copies=len(packing.ends), arboricity=a)
    return a, cert, witness


def _reached_component(G: Multigraph, packing: ForestPacking, reached: set, x: int) -> DensityWitness:
    adj: Dict[int, List[int]] = {}
    for e in reached:
        u, v = packing.ends[e]
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    start = packing.ends[x][0]
    seen = {start}
    queue = deque([start])
    while queue:
        y = queue.popleft()
        for z in adj[y]:
            if z not in seen:
                seen.add(z)
                queue.append(z)
    return _witness(G, seen, "arboricity")


def pseudoarboricity(G: Multigraph) -> Tuple[int, DecompositionCertificate, Optional[DensityWitness]]:
    """pa(G) by binary search over outdegree-k orientations; classes give each vertex one out-arc."""
    if G.total_multiplicity == 0:
        return 0, DecompositionCertificate(CertificateKind.PLAIN_PSEUDOFOREST, 0, tuple(() for _ in G.edges)), None
    lo, hi = 1, max(G.degrees)
    assignment = absorb(G, [hi] * G.n)
    while lo < hi:
        mid = (lo + hi) // 2
        attempt = absorb(G, [mid] * G.n)
        if attempt is None:
            lo = mid + 1
        else:
            hi, assignment = mid, attempt
    pa = lo

    next_color = [0] * G.n
    rows = []
    for (u, v, _), (to_u, to_v) in zip(G.edges, assignment):
        row = []
        for owner, count in ((u, to_u), (v, to_v)):
            for _ in range(count):
                row.append(next_color[owner])
                next_color[owner] += 1
        rows.append(tuple(row))
    cert = DecompositionCertificate(CertificateKind.PLAIN_PSEUDOFOREST, pa, tuple(rows))

    found = set_witness(G, [pa - 1] * G.n, "h")
    witness = _witness(G, found.S, "pseudoarboricity") if found is not None else None
    if witness is None or witness.value != pa:
        raise CertificateError(f"Pseudoarboricity witness does not certify pa = {pa}")
    logger.debug("Computed pseudoarboricity", vertices=G.n, pseudoarboricity=pa)
    return pa, cert, witness


def degree_f_pseudoarboricity(G: Multigraph, f: DegreeFn) -> Tuple[int, DecompositionCertificate]:
    """pa_f(G) = max(delta_f(G), pa(G)), realised by orienting then f-coloring the arcs."""
    from branchings import aux_bipartite, hakimi_kariv_color, pseudoforests_from_coloring

    if f.min_allowed < 2:
        raise InputError("degree_f_pseudoarboricity needs f >= 2 pointwise", field_path="f")
    pa, _, _ = pseudoarboricity(G)
    k = max(delta_f(G, f), pa)
    if k == 0:
        return 0, DecompositionCertificate(CertificateKind.DEGREE_F_PSEUDOFOREST, 0, tuple(() for _ in G.edges), f)

    g = DegreeFn.constant(k, min_allowed=0)
    h = DegreeFn(
        default=k * (f.default - 1),
        overrides={v: k * (value - 1) for v, value in f.overrides.items()},
        min_allowed=0,
    )
    result = orient(G, g, h)
    if not result.feasible:
        raise CertificateError(f"No orientation for pa_f = {k}: {result.infeasibility}")
    D = result.orientation
    coloring = hakimi_kariv_color(aux_bipartite(D, f))
    directed = pseudoforests_from_coloring(D, f, coloring)
    cert = undirected_certificate(G, D, directed)
    cert = DecompositionCertificate(CertificateKind.DEGREE_F_PSEUDOFOREST, k, cert.assignment, f)
    verdict = verify_certificate(G, cert)
    if not verdict:
        raise CertificateError(f"Degree-f pseudoforest decomposition failed: {verdict.violation}", verdict)
    return k, cert


def pseudoforest_upper_bound(G: Multigraph, f: DegreeFn) -> int:
    """Upper bound max(delta_f(G) + 1, 2 pa(G)) on a_f(G)."""
    pa, _, _ = pseudoarboricity(G)
    return max(delta_f(G, f) + 1, 2 * pa)


def conjecture_bound(G: Multigraph, f: DegreeFn) -> int:
    """max(delta_f(G) + 1, a(G)); reported against measured values, never asserted."""
    a, _, _ = arboricity(G)
    return max(delta_f(G, f) + 1, a)


def directed_arboricity_formula(D: Digraph) -> int:
    """max(max indegree, a(underlying multigraph))."""
    a, _, _ = arboricity(underlying_multigraph(D))
    return max(max(D.indegrees, default=0), a)


def directed_conjecture_bound(D: Digraph, f: DegreeFn) -> int:
    a, _, _ = arboricity(underlying_multigraph(D))
    return max(*directed_degree_stats(D, f), a) + 1


def _subset_scan(G: Multigraph, min_size: int, offset: int) -> Tuple[int, Tuple[int, ...]]:
    if G.n > BRUTE_FORCE_MAX_VERTICES:
        raise BudgetExceededError(
            f"Subset scan over {G.n} vertices exceeds {BRUTE_FORCE_MAX_VERTICES}", size=G.n
        )
    best, best_S = 0, ()
    for size in range(min_size, G.n + 1):
        for S in itertools.combinations(range(G.n), size):
            value = math.ceil(edge_count_within(G, S) / (size - offset))
            if value > best:
                best, best_S = value, S
    return best, best_S


def nash_williams_bruteforce(G: Multigraph) -> Tuple[int, Tuple[int, ...]]:
    """max over |S| >= 2 of ceil(e(S) / (|S| - 1))."""
    return _subset_scan(G, 2, 1)


def hakimi_bruteforce(G: Multigraph) -> Tuple[int, Tuple[int, ...]]:
    """max over |S| >= 1 of ceil(e(S) / |S|)."""
    return _subset_scan(G, 1, 0)
