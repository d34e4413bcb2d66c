"""Graph data model, degree statistics, structural predicates and certificate checks.

Every other module builds on the immutable `Multigraph` / `Digraph` values defined
here. Parallel copies of a vertex pair are addressed as (pair index, copy index), so a
certificate assigns one class to every copy.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import structlog

from errors import InputError

logger = structlog.get_logger(__name__)

INFINITY = math.inf

Pair = Tuple[int, int]
EdgeTriple = Tuple[int, int, int]


def _aggregate(n: int, triples: Sequence, directed: bool) -> Tuple[EdgeTriple, ...]:
    """Validate raw (u, v[, mult]) entries and merge repeated pairs."""
    index: Dict[Pair, int] = {}
    merged: List[List[int]] = []
    for raw in triples:
        if len(raw) == 2:
            u, v, mult = int(raw[0]), int(raw[1]), 1
        else:
            u, v, mult = int(raw[0]), int(raw[1]), int(raw[2])
        if u == v:
            raise InputError(f"Loop at vertex {u} is not allowed", field_path="edges")
        if mult < 1:
            raise InputError(f"Multiplicity of ({u}, {v}) must be >= 1, got {mult}", field_path="edges")
        if not (0 <= u < n and 0 <= v < n):
            raise InputError(f"Edge ({u}, {v}) has an endpoint outside [0, {n})", field_path="edges")
        key = (u, v) if directed else (min(u, v), max(u, v))
        if key in index:
            merged[index[key]][2] += mult
        else:
            index[key] = len(merged)
            merged.append([key[0], key[1], mult])
    return tuple((u, v, m) for u, v, m in merged)


@dataclass(frozen=True)
class Multigraph:
    """Undirected loop-free multigraph; each vertex pair appears once with its multiplicity."""

    n: int
    edges: Tuple[EdgeTriple, ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise InputError(f"Vertex count must be non-negative, got {self.n}", field_path="n")
        object.__setattr__(self, "edges", _aggregate(self.n, self.edges, directed=False))

    @cached_property
    def pair_index(self) -> Dict[Pair, int]:
        return {(u, v): i for i, (u, v, _) in enumerate(self.edges)}

    @cached_property
    def adjacency(self) -> List[List[Tuple[int, int]]]:
        """adjacency[v] = [(neighbor, pair index), ...] in pair order."""
        adj: List[List[Tuple[int, int]]] = [[] for _ in range(self.n)]
        for i, (u, v, _) in enumerate(self.edges):
            adj[u].append((v, i))
            adj[v].append((u, i))
        return adj

    @cached_property
    def degrees(self) -> Tuple[int, ...]:
        deg = [0] * self.n
        for u, v, m in self.edges:
            deg[u] += m
            deg[v] += m
        return tuple(deg)

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, _, m in self.edges)

    @property
    def is_simple(self) -> bool:
        return all(m == 1 for _, _, m in self.edges)

    def multiplicity(self, u: int, v: int) -> int:
        i = self.pair_index.get((min(u, v), max(u, v)))
        return 0 if i is None else self.edges[i][2]

    def copies(self) -> Iterator[Tuple[int, int, int, int]]:
        """Yield (pair index, copy index, u, v) for every parallel copy."""
        for i, (u, v, m) in enumerate(self.edges):
            for c in range(m):
                yield i, c, u, v


@dataclass(frozen=True)
class Digraph:
    """Directed loop-free (multi)graph; `simple` asserts there are no parallel arcs."""

    n: int
    arcs: Tuple[EdgeTriple, ...] = ()
    simple: Optional[bool] = None

    def __post_init__(self):
        if self.n < 0:
            raise InputError(f"Vertex count must be non-negative, got {self.n}", field_path="n")
        arcs = _aggregate(self.n, self.arcs, directed=True)
        object.__setattr__(self, "arcs", arcs)
        has_parallel = any(m > 1 for _, _, m in arcs)
        if self.simple is None:
            object.__setattr__(self, "simple", not has_parallel)
        elif self.simple and has_parallel:
            raise InputError("simple digraph has parallel arcs", field_path="arcs")

    @cached_property
    def arc_index(self) -> Dict[Pair, int]:
        return {(u, v): i for i, (u, v, _) in enumerate(self.arcs)}

    @cached_property
    def out_adjacency(self) -> List[List[Tuple[int, int]]]:
        adj: List[List[Tuple[int, int]]] = [[] for _ in range(self.n)]
        for i, (u, v, _) in enumerate(self.arcs):
            adj[u].append((v, i))
        return adj

    @cached_property
    def in_adjacency(self) -> List[List[Tuple[int, int]]]:
        adj: List[List[Tuple[int, int]]] = [[] for _ in range(self.n)]
        for i, (u, v, _) in enumerate(self.arcs):
            adj[v].append((u, i))
        return adj

    @cached_property
    def indegrees(self) -> Tuple[int, ...]:
        deg = [0] * self.n
        for _, v, m in self.arcs:
            deg[v] += m
        return tuple(deg)

    @cached_property
    def outdegrees(self) -> Tuple[int, ...]:
        deg = [0] * self.n
        for u, _, m in self.arcs:
            deg[u] += m
        return tuple(deg)

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, _, m in self.arcs)

    def copies(self) -> Iterator[Tuple[int, int, int, int]]:
        """Yield (arc index, copy index, tail, head) for every parallel copy."""
        for i, (u, v, m) in enumerate(self.arcs):
            for c in range(m):
                yield i, c, u, v


Graph = Union[Multigraph, Digraph]


@dataclass(frozen=True)
class DegreeFn:
    """Vertex weight function: `default` everywhere except the listed overrides."""

    default: int
    overrides: Mapping[int, int] = field(default_factory=dict)
    min_allowed: int = 2

    def __post_init__(self):
        overrides = {int(v): int(value) for v, value in dict(self.overrides).items()}
        object.__setattr__(self, "overrides", overrides)
        if self.default < self.min_allowed:
            raise InputError(
                f"Degree function default {self.default} is below the minimum {self.min_allowed}",
                field_path="f.default",
            )
        for v, value in overrides.items():
            if value < self.min_allowed:
                raise InputError(
                    f"Degree function value {value} at vertex {v} is below the minimum {self.min_allowed}",
                    field_path=f"f.overrides.{v}",
                )

    def __hash__(self):
        return hash((self.default, tuple(sorted(self.overrides.items())), self.min_allowed))

    def __call__(self, v: int) -> int:
        return self.overrides.get(v, self.default)

    @classmethod
    def constant(cls, value: int, min_allowed: int = 2) -> "DegreeFn":
        return cls(default=value, min_allowed=min_allowed)

    def values(self, n: int) -> List[int]:
        return [self(v) for v in range(n)]

    def with_override(self, v: int, value: int) -> "DegreeFn":
        overrides = dict(self.overrides)
        overrides[v] = value
        return DegreeFn(default=self.default, overrides=overrides, min_allowed=self.min_allowed)


class CertificateKind(str, Enum):
    DEGREE_F_FOREST = "degree-f-forest"
    DEGREE_F_BRANCHING = "degree-f-branching"
    DEGREE_F_PSEUDOFOREST = "degree-f-pseudoforest"
    DEGREE_F_SUBGRAPH = "degree-f-subgraph"
    PLAIN_FOREST = "plain-forest"
    PLAIN_PSEUDOFOREST = "plain-pseudoforest"
    PLAIN_BRANCHING = "plain-branching"

    @property
    def needs_f(self) -> bool:
        return self.value.startswith("degree-f")

    @property
    def directed(self) -> bool:
        return self in (CertificateKind.DEGREE_F_BRANCHING, CertificateKind.PLAIN_BRANCHING)

    @property
    def max_cycles(self) -> Optional[int]:
        """Independent cycles allowed per component (None = unrestricted)."""
        if self in (CertificateKind.DEGREE_F_SUBGRAPH,):
            return None
        if self in (CertificateKind.DEGREE_F_PSEUDOFOREST, CertificateKind.PLAIN_PSEUDOFOREST):
            return 1
        return 0


@dataclass(frozen=True)
class DecompositionCertificate:
    """Coloring of every parallel copy; assignment[i] lists the classes of pair i's copies."""

    kind: CertificateKind
    k: int
    assignment: Tuple[Tuple[int, ...], ...]
    f: Optional[DegreeFn] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", CertificateKind(self.kind))
        object.__setattr__(self, "assignment", tuple(tuple(int(c) for c in row) for row in self.assignment))

    def class_sizes(self) -> List[int]:
        sizes = [0] * self.k
        for row in self.assignment:
            for c in row:
                if 0 <= c < self.k:
                    sizes[c] += 1
        return sizes

    def permuted(self, perm: Sequence[int]) -> "DecompositionCertificate":
        """Rename class c to perm[c]."""
        return DecompositionCertificate(
            kind=self.kind,
            k=self.k,
            assignment=tuple(tuple(perm[c] for c in row) for row in self.assignment),
            f=self.f,
        )

    def compacted(self) -> "DecompositionCertificate":
        """Drop empty classes, keeping the relative order of the others."""
        used = sorted({c for row in self.assignment for c in row})
        rename = {c: i for i, c in enumerate(used)}
        return DecompositionCertificate(
            kind=self.kind,
            k=len(used),
            assignment=tuple(tuple(rename[c] for c in row) for row in self.assignment),
            f=self.f,
        )


class DisjointSets:
    """Union-find tracking vertex and edge counts per component.

    With `rollback=True` path compression is disabled and every mutation is journaled
    so a search can undo back to a `snapshot()`.
    """

    def __init__(self, rollback: bool = False):
        self.parent: Dict[int, int] = {}
        self.size: Dict[int, int] = {}
        self.edges: Dict[int, int] = {}
        self._rollback = rollback
        self._history: List[Tuple] = []

    def find(self, x: int) -> int:
        parent = self.parent
        if x not in parent:
            parent[x] = x
            self.size[x] = 1
            self.edges[x] = 0
            return x
        root = x
        while parent[root] != root:
            root = parent[root]
        if not self._rollback:
            while parent[x] != root:
                parent[x], x = root, parent[x]
        return root

    def connected(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)

    def excess(self, x: int) -> int:
        """Number of independent cycles in x's component."""
        root = self.find(x)
        return self.edges[root] - self.size[root] + 1

    def add_edge(self, a: int, b: int) -> int:
        """Insert edge ab and return the cycle excess of the resulting component."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            if self._rollback:
                self._history.append(("edge", ra))
            self.edges[ra] += 1
        else:
            if self.size[ra] < self.size[rb]:
                ra, rb = rb, ra
            if self._rollback:
                self._history.append(("union", ra, rb))
            self.parent[rb] = ra
            self.size[ra] += self.size[rb]
            self.edges[ra] += self.edges[rb] + 1
        return self.edges[ra] - self.size[ra] + 1

    def snapshot(self) -> int:
        return len(self._history)

    def rollback(self, mark: int):
        history = self._history
        while len(history) > mark:
            entry = history.pop()
            if entry[0] == "edge":
                self.edges[entry[1]] -= 1
            else:
                _, ra, rb = entry
                self.parent[rb] = rb
                self.size[ra] -= self.size[rb]
                self.edges[ra] -= self.edges[rb] + 1


# ---------------------------------------------------------------------------
# Degree statistics
# ---------------------------------------------------------------------------

def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def delta_f(G: Multigraph, f: DegreeFn) -> int:
    """Weighted maximum degree max_v ceil(d(v) / f(v)); 0 for edgeless graphs."""
    if f.min_allowed < 1:
        raise InputError("delta_f needs f >= 1 pointwise", field_path="f")
    return max((_ceil_div(d, f(v)) for v, d in enumerate(G.degrees)), default=0)


def directed_degree_stats(D: Digraph, f: DegreeFn) -> Tuple[int, int]:
    """(max indegree, max_v ceil(d+(v) / (f(v) - 1)))."""
    if f.min_allowed < 2:
        raise InputError("directed_degree_stats needs f >= 2 pointwise", field_path="f")
    max_in = max(D.indegrees, default=0)
    max_out = max((_ceil_div(d, f(v) - 1) for v, d in enumerate(D.outdegrees)), default=0)
    return max_in, max_out


def branching_parameter(D: Digraph, f: DegreeFn) -> int:
    """d = max(Δ⁻, Δ⁺_{f-1})."""
    return max(directed_degree_stats(D, f))


def edge_count_within(G: Multigraph, S) -> int:
    """e(S) counted with multiplicity."""
    inside = set(S)
    return sum(m for u, v, m in G.edges if u in inside and v in inside)


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def blowup(G: Multigraph, m: int) -> Multigraph:
    """Replace every edge by m parallel copies."""
    if m < 1:
        raise InputError(f"Blowup factor must be >= 1, got {m}", field_path="m")
    return Multigraph(G.n, tuple((u, v, mult * m) for u, v, mult in G.edges))


def underlying_simple(G: Multigraph) -> Tuple[Multigraph, Dict[Pair, int]]:
    """Underlying simple graph and the multiplicity of each of its edges."""
    simple = Multigraph(G.n, tuple((u, v, 1) for u, v, _ in G.edges))
    return simple, {(u, v): m for u, v, m in G.edges}


def underlying_multigraph(D: Digraph) -> Multigraph:
    """Forget directions; anti-parallel arcs become parallel edges."""
    return Multigraph(D.n, D.arcs)


def symmetric_digraph(G: Multigraph) -> Digraph:
    """G*: every edge replaced by a pair of anti-parallel arcs."""
    arcs = []
    for u, v, m in G.edges:
        arcs.append((u, v, m))
        arcs.append((v, u, m))
    return Digraph(G.n, tuple(arcs))


def undirected_certificate(G: Multigraph, D: Digraph, cert: DecompositionCertificate) -> DecompositionCertificate:
    """Carry a certificate on an orientation D of G back to G."""
    kind = {
        CertificateKind.DEGREE_F_BRANCHING: CertificateKind.DEGREE_F_FOREST,
        CertificateKind.PLAIN_BRANCHING: CertificateKind.PLAIN_FOREST,
    }.get(cert.kind, cert.kind)
    pools: List[List[int]] = [[] for _ in G.edges]
    for (u, v, m), classes in zip(D.arcs, cert.assignment):
        i = G.pair_index.get((min(u, v), max(u, v)))
        if i is None:
            raise InputError(f"Arc ({u}, {v}) has no counterpart in the undirected graph")
        pools[i].extend(classes)
    for i, (u, v, m) in enumerate(G.edges):
        if len(pools[i]) != m:
            raise InputError(f"Orientation covers pair ({u}, {v}) {len(pools[i])} times, expected {m}")
    return DecompositionCertificate(kind=kind, k=cert.k, assignment=tuple(tuple(p) for p in pools), f=cert.f)


# ---------------------------------------------------------------------------
# Girth
# ---------------------------------------------------------------------------

def girth(G: Multigraph) -> Union[int, float]:
    """Length of a shortest cycle; parallel edges give 2, forests give INFINITY."""
    if any(m > 1 for _, _, m in G.edges):
        return 2
    best = INFINITY
    adj = G.adjacency
    for root in range(G.n):
        dist = {root: 0}
        via = {root: -1}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            if 2 * dist[x] + 1 >= best:
                break
            for y, pair in adj[x]:
                if pair == via[x]:
                    continue
                if y in dist:
                    best = min(best, dist[x] + dist[y] + 1)
                else:
                    dist[y] = dist[x] + 1
                    via[y] = pair
                    queue.append(y)
    return best


def directed_girth(D: Digraph) -> Union[int, float]:
    """Length of a shortest directed cycle; anti-parallel arcs give 2."""
    arcs = D.arc_index
    if any((v, u) in arcs for u, v in arcs):
        return 2
    best = INFINITY
    out = D.out_adjacency
    for root in range(D.n):
        dist = {root: 0}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            if dist[x] + 1 >= best:
                break
            for y, _ in out[x]:
                if y == root:
                    best = min(best, dist[x] + 1)
                elif y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
    return best


# ---------------------------------------------------------------------------
# Canonical form
# ---------------------------------------------------------------------------

def adjacency_code(G: Multigraph, perm: Optional[Sequence[int]] = None) -> Tuple[int, ...]:
    """Upper-triangle multiplicities of G relabelled by perm (old vertex -> new vertex)."""
    n = G.n
    perm = range(n) if perm is None else perm
    matrix = [[0] * n for _ in range(n)]
    for u, v, m in G.edges:
        a, b = perm[u], perm[v]
        matrix[a][b] = matrix[b][a] = m
    return tuple(matrix[i][j] for i in range(n) for j in range(i + 1, n))


def canonical_form(G: Multigraph) -> Tuple[int, Tuple[int, ...]]:
    """Isomorphism invariant: the lexicographically smallest adjacency code over all labellings."""
    if G.n > 8:
        raise InputError(f"canonical_form supports at most 8 vertices, got {G.n}")
    best = min(adjacency_code(G, perm) for perm in itertools.permutations(range(G.n))) if G.n else ()
    return G.n, best


def from_adjacency_code(n: int, code: Sequence[int]) -> Multigraph:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if len(pairs) != len(code):
        raise InputError(f"Adjacency code of length {len(code)} does not match {n} vertices")
    return Multigraph(n, tuple((i, j, m) for (i, j), m in zip(pairs, code) if m))


# ---------------------------------------------------------------------------
# Certificate verification
# ---------------------------------------------------------------------------

class ViolationKind(str, Enum):
    COVERAGE = "coverage"
    CYCLE = "cycle"
    SECOND_CYCLE = "second-cycle"
    DEGREE = "degree"
    INDEGREE = "indegree"
    OUTDEGREE = "outdegree"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    message: str
    class_index: Optional[int] = None
    vertex: Optional[int] = None
    cycle: Tuple[int, ...] = ()


@dataclass(frozen=True)
class Verdict:
    violation: Optional[Violation] = None

    @property
    def accepted(self) -> bool:
        return self.violation is None

    @property
    def coverage_mismatch(self) -> bool:
        return self.violation is not None and self.violation.kind == ViolationKind.COVERAGE

    def __bool__(self) -> bool:
        return self.accepted


def _tree_path(adj: Dict[int, List[int]], start: int, goal: int) -> Tuple[int, ...]:
    parent = {start: start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        if x == goal:
            break
        for y in adj.get(x, ()):
            if y not in parent:
                parent[y] = x
                queue.append(y)
    path = [goal]
    while path[-1] != start:
        path.append(parent[path[-1]])
    return tuple(reversed(path))


def _coverage_violation(graph: Graph, cert: DecompositionCertificate) -> Optional[Violation]:
    pairs = graph.arcs if isinstance(graph, Digraph) else graph.edges
    if len(cert.assignment) != len(pairs):
        return Violation(
            ViolationKind.COVERAGE,
            f"Assignment lists {len(cert.assignment)} pairs but the graph has {len(pairs)}",
        )
    for (u, v, m), classes in zip(pairs, cert.assignment):
        if len(classes) != m:
            return Violation(
                ViolationKind.COVERAGE,
                f"Pair ({u}, {v}) has multiplicity {m} but {len(classes)} copies are colored",
            )
        for c in classes:
            if not 0 <= c < cert.k:
                return Violation(
                    ViolationKind.COVERAGE,
                    f"Pair ({u}, {v}) uses class {c} outside [0, {cert.k})",
                    class_index=c,
                )
    return None


def verify_certificate(graph: Graph, cert: DecompositionCertificate) -> Verdict:
    """Check that cert covers every copy exactly once and each class has its kind's shape."""
    kind = cert.kind
    if kind.needs_f and cert.f is None:
        raise InputError(f"Certificate kind {kind.value} requires a degree function", field_path="f")
    if kind.directed and not isinstance(graph, Digraph):
        raise InputError(f"Certificate kind {kind.value} needs a directed graph", field_path="kind")

    coverage = _coverage_violation(graph, cert)
    if coverage is not None:
        return Verdict(coverage)

    directed = isinstance(graph, Digraph)
    f = cert.f
    max_cycles = kind.max_cycles
    sets = [DisjointSets() for _ in range(cert.k)]
    adj: List[Dict[int, List[int]]] = [{} for _ in range(cert.k)]
    degree: List[Dict[int, int]] = [{} for _ in range(cert.k)]
    indeg: List[Dict[int, int]] = [{} for _ in range(cert.k)]
    outdeg: List[Dict[int, int]] = [{} for _ in range(cert.k)]

    for (u, v, _), classes in zip(graph.arcs if directed else graph.edges, cert.assignment):
        for c in classes:
            if kind.directed:
                indeg[c][v] = indeg[c].get(v, 0) + 1
                if indeg[c][v] > 1:
                    return Verdict(Violation(
                        ViolationKind.INDEGREE, f"Class {c} has indegree {indeg[c][v]} at vertex {v}",
                        class_index=c, vertex=v,
                    ))
                outdeg[c][u] = outdeg[c].get(u, 0) + 1
                if kind == CertificateKind.DEGREE_F_BRANCHING and outdeg[c][u] > f(u) - 1:
                    return Verdict(Violation(
                        ViolationKind.OUTDEGREE,
                        f"Class {c} has outdegree {outdeg[c][u]} > f({u}) - 1 = {f(u) - 1} at vertex {u}",
                        class_index=c, vertex=u,
                    ))
            if kind.needs_f:
                for w in (u, v):
                    degree[c][w] = degree[c].get(w, 0) + 1
                    if degree[c][w] > f(w):
                        return Verdict(Violation(
                            ViolationKind.DEGREE, f"Class {c} has degree {degree[c][w]} > f({w}) = {f(w)} at vertex {w}",
                            class_index=c, vertex=w,
                        ))
            if max_cycles is not None:
                closes = sets[c].connected(u, v)
                cycle = _tree_path(adj[c], u, v) if closes else ()
                excess = sets[c].add_edge(u, v)
                adj[c].setdefault(u, []).append(v)
                adj[c].setdefault(v, []).append(u)
                if excess > max_cycles:
                    violation_kind = ViolationKind.CYCLE if max_cycles == 0 else ViolationKind.SECOND_CYCLE
                    return Verdict(Violation(
                        violation_kind, f"Class {c} contains a {violation_kind.value} through {list(cycle)}",
                        class_index=c, vertex=u, cycle=cycle,
                    ))
    return Verdict()
