"""Brute-force exact values of a_f, pa_f and directed a_f on tiny instances.

Search is iterative deepening on the class count k with a depth-first assignment of
one class per parallel copy. Copy i may only open class `used` (the number of classes
already in use), which removes class-permutation symmetry.
"""

import time
from dataclasses import dataclass
from typing import List, Optional, Union

import structlog

from config import settings
from errors import BudgetExceededError, CertificateError
from graph_core import (
    CertificateKind,
    DecompositionCertificate,
    DegreeFn,
    Digraph,
    DisjointSets,
    Multigraph,
    delta_f,
    directed_degree_stats,
    verify_certificate,
)

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class OracleBudget:
    max_edges: int = 14
    max_colors: int = 16
    time_limit: float = 60.0

    @classmethod
    def from_settings(cls) -> "OracleBudget":
        oracle = settings.oracle
        return cls(max_edges=oracle.max_edges, max_colors=oracle.max_colors, time_limit=oracle.time_limit_seconds)


@dataclass(frozen=True)
class OracleResult:
    value: int
    certificate: DecompositionCertificate
    exact: bool = True
    nodes: int = 0


class _Timeout(Exception):
    pass


class _ClassState:
    """Incremental per-class constraint bookkeeping with undo."""

    def __init__(self, n: int, kind: CertificateKind, f: Optional[DegreeFn]):
        self.kind = kind
        self.f = f
        self.sets = DisjointSets(rollback=True)
        self.deg = [0] * n
        self.indeg = [0] * n
        self.outdeg = [0] * n
        self.allowed_cycles = kind.max_cycles

    def fits(self, u: int, v: int) -> bool:
        f = self.f
        if self.kind.needs_f and (self.deg[u] >= f(u) or self.deg[v] >= f(v)):
            return False
        if self.kind.directed:
            if self.indeg[v] >= 1:
                return False
            if f is not None and self.outdeg[u] >= f(u) - 1:
                return False
        if self.sets.connected(u, v):
            return self.sets.excess(u) + 1 <= self.allowed_cycles
        return self.sets.excess(u) + self.sets.excess(v) <= self.allowed_cycles

    def push(self, u: int, v: int) -> int:
        mark = self.sets.snapshot()
        self.sets.add_edge(u, v)
        self.deg[u] += 1
        self.deg[v] += 1
        self.indeg[v] += 1
        self.outdeg[u] += 1
        return mark

    def pop(self, u: int, v: int, mark: int):
        self.sets.rollback(mark)
        self.deg[u] -= 1
        self.deg[v] -= 1
        self.indeg[v] -= 1
        self.outdeg[u] -= 1


class _Search:
    def __init__(self, graph: Union[Multigraph, Digraph], kind: CertificateKind, f: Optional[DegreeFn], budget: OracleBudget):
        self.graph = graph
        self.kind = kind
        self.f = f
        self.budget = budget
        self.elements = list(graph.copies())
        self.nodes = 0
        self.deadline = time.monotonic() + budget.time_limit

    def _states(self, k: int) -> List[_ClassState]:
        return [_ClassState(self.graph.n, self.kind, self.f) for _ in range(k)]

    def certificate(self, colors: List[int], k: int) -> DecompositionCertificate:
        pairs = self.graph.arcs if isinstance(self.graph, Digraph) else self.graph.edges
        rows: List[List[int]] = [[] for _ in pairs]
        for (i, _, _, _), c in zip(self.elements, colors):
            rows[i].append(c)
        return DecompositionCertificate(self.kind, k, tuple(tuple(r) for r in rows), self.f)

    def greedy(self) -> List[int]:
        states: List[_ClassState] = []
        colors = []
        for _, _, u, v in self.elements:
            for c, state in enumerate(states):
                if state.fits(u, v):
                    break
            else:
                states.append(_ClassState(self.graph.n, self.kind, self.f))
                c = len(states) - 1
            states[c].push(u, v)
            colors.append(c)
        return colors

    def feasible(self, k: int) -> Optional[List[int]]:
        states = self._states(k)
        colors = [0] * len(self.elements)
        elements = self.elements

        def extend(i: int, used: int) -> bool:
            self.nodes += 1
            if self.nodes % 4096 == 0 and time.monotonic() > self.deadline:
                raise _Timeout()
            if i == len(elements):
                return True
            _, _, u, v = elements[i]
            for c in range(min(used + 1, k)):
                state = states[c]
                if not state.fits(u, v):
                    continue
                mark = state.push(u, v)
                colors[i] = c
                if extend(i + 1, max(used, c + 1)):
                    return True
                state.pop(u, v, mark)
            return False

        return list(colors) if extend(0, 0) else None


def _lower_bound(graph, kind: CertificateKind, f: Optional[DegreeFn]) -> int:
    if graph.total_multiplicity == 0:
        return 0
    if isinstance(graph, Digraph):
        if f is None:
            return max(1, max(graph.indegrees))
        return max(1, *directed_degree_stats(graph, f))
    return max(1, delta_f(graph, f)) if f is not None else 1


def _solve(graph, kind: CertificateKind, f: Optional[DegreeFn], budget: Optional[OracleBudget]) -> OracleResult:
    budget = budget or OracleBudget.from_settings()
    copies = graph.total_multiplicity
    if copies > budget.max_edges:
        raise BudgetExceededError(
            f"Oracle input has {copies} parallel copies, budget allows {budget.max_edges}", size=copies
        )
    search = _Search(graph, kind, f, budget)
    greedy = search.greedy()
    upper = max(greedy, default=-1) + 1
    best = search.certificate(greedy, upper)
    lower = _lower_bound(graph, kind, f)
    if lower > budget.max_colors:
        raise BudgetExceededError(f"Lower bound {lower} exceeds the color budget {budget.max_colors}", size=lower)

    exact = True
    try:
        for k in range(lower, min(upper, budget.max_colors + 1)):
            colors = search.feasible(k)
            if colors is not None:
                best = search.certificate(colors, k)
                break
    except _Timeout:
        exact = False
        logger.warning("Oracle timed out", kind=kind.value, upper_bound=best.k, nodes=search.nodes)
    if upper > budget.max_colors and best.k == upper:
        exact = False

    verdict = verify_certificate(graph, best)
    if not verdict:
        raise CertificateError(f"Oracle witness failed verification: {verdict.violation}", verdict)
    logger.debug("Oracle finished", kind=kind.value, value=best.k, exact=exact, nodes=search.nodes)
    return OracleResult(value=best.k, certificate=best, exact=exact, nodes=search.nodes)


def brute_a_f(G: Multigraph, f: Optional[DegreeFn], budget: Optional[OracleBudget] = None) -> OracleResult:
    """Minimum number of degree-f forests (plain forests when f is None)."""
    kind = CertificateKind.PLAIN_FOREST if f is None else CertificateKind.DEGREE_F_FOREST
    return _solve(G, kind, f, budget)


def brute_vec_a_f(D: Digraph, f: Optional[DegreeFn], budget: Optional[OracleBudget] = None) -> OracleResult:
    """Minimum number of degree-f branchings (plain branchings when f is None)."""
    kind = CertificateKind.PLAIN_BRANCHING if f is None else CertificateKind.DEGREE_F_BRANCHING
    return _solve(D, kind, f, budget)


def brute_vec_a(D: Digraph, budget: Optional[OracleBudget] = None) -> OracleResult:
    return brute_vec_a_f(D, None, budget)


def brute_pa_f(G: Multigraph, f: Optional[DegreeFn], budget: Optional[OracleBudget] = None) -> OracleResult:
    kind = CertificateKind.PLAIN_PSEUDOFOREST if f is None else CertificateKind.DEGREE_F_PSEUDOFOREST
    return _solve(G, kind, f, budget)
