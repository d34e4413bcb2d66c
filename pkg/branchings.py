"""Decompositions of digraphs into degree-f branchings.

Pipeline pieces, bottom-up:

  aux_bipartite            arcs of D as a bipartite graph X -> Y with caps f - 1 / 1
  hakimi_kariv_color       f-coloring of a bipartite multigraph with exactly Delta_g colors
  pseudoforests_from_coloring / monochromatic_cycles / independent_transversal
  decompose_large_girth    d + 1 branchings when the directed girth is at least 4d
  lll_vertex_coloring      resampled vertex coloring with balanced in/out color degrees
  asymptotic_assembly      residue-class split into large-girth pieces
  decompose_asymptotic     the assembly, or the trivial 2d decomposition when it is larger
  decompose_undirected     orient, decompose, forget directions
"""

import math
from collections import deque
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal, localcontext
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from config import settings
from errors import BudgetExceededError, CertificateError, PreconditionError, TransversalError
from graph_core import (
    INFINITY,
    CertificateKind,
    DecompositionCertificate,
    DegreeFn,
    Digraph,
    Multigraph,
    branching_parameter,
    delta_f,
    directed_girth,
    girth,
    undirected_certificate,
    verify_certificate,
)

logger = structlog.get_logger(__name__)

ArcCopy = Tuple[int, int]


@dataclass(frozen=True)
class AuxBipartite:
    """Vertex v of D appears as v (the X side) and n + v (the Y side)."""

    digraph: Digraph
    graph: Multigraph
    g: DegreeFn

    @property
    def n(self) -> int:
        return self.digraph.n


@dataclass(frozen=True)
class MonochromaticCycle:
    class_index: int
    vertices: Tuple[int, ...]
    arcs: Tuple[ArcCopy, ...]


@dataclass
class VertexColoring:
    phi: np.ndarray
    k: int
    d: int
    bound: Decimal
    in_cap: int
    out_caps: np.ndarray
    in_counts: np.ndarray
    out_counts: np.ndarray
    resamples: int = 0

    def color(self, v: int) -> int:
        return int(self.phi[v])


class _ResidueTooDense(Exception):
    def __init__(self, residue: int, d_i: int):
        super().__init__(f"residue {residue} has d_i = {d_i}")
        self.residue = residue
        self.d_i = d_i


# ---------------------------------------------------------------------------
# Hakimi-Kariv f-coloring
# ---------------------------------------------------------------------------

def aux_bipartite(D: Digraph, f: DegreeFn) -> AuxBipartite:
    if f.min_allowed < 2:
        raise PreconditionError("aux_bipartite needs f >= 2 pointwise", parameter="f")
    n = D.n
    graph = Multigraph(2 * n, tuple((u, n + v, m) for u, v, m in D.arcs))
    g = DegreeFn(default=1, overrides={v: f(v) - 1 for v in range(n)}, min_allowed=1)
    return AuxBipartite(digraph=D, graph=graph, g=g)


def _two_coloring(B: Multigraph) -> Optional[List[int]]:
    side = [-1] * B.n
    for root in range(B.n):
        if side[root] >= 0:
            continue
        side[root] = 0
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y, _ in B.adjacency[x]:
                if side[y] < 0:
                    side[y] = 1 - side[x]
                    queue.append(y)
                elif side[y] == side[x]:
                    return None
    return side


def _free_color(at: Dict[int, int], limit: int) -> int:
    for c in range(limit):
        if c not in at:
            return c
    raise CertificateError("No free color; clone degree exceeds the color count")


def _konig_coloring(num_nodes: int, ends: Sequence[Tuple[int, int]], colors: int) -> List[int]:
    """Proper edge coloring of a bipartite multigraph with max degree <= colors."""
    at: List[Dict[int, int]] = [{} for _ in range(num_nodes)]
    color = [-1] * len(ends)
    for e, (x, y) in enumerate(ends):
        a = _free_color(at[x], colors)
        b = _free_color(at[y], colors)
        if a not in at[y]:
            c = a
        elif b not in at[x]:
            c = b
        else:
            path = []
            node, want, other = y, a, b
            while want in at[node]:
                step = at[node][want]
                path.append(step)
                p, q = ends[step]
                node = q if p == node else p
                want, other = other, want
            for step in path:
                p, q = ends[step]
                del at[p][color[step]]
                del at[q][color[step]]
            for step in path:
                color[step] = b if color[step] == a else a
                p, q = ends[step]
                at[p][color[step]] = step
                at[q][color[step]] = step
            c = a
        color[e] = c
        at[x][c] = e
        at[y][c] = e
    return color


def hakimi_kariv_color(
    B: Union[Multigraph, AuxBipartite], g: Optional[DegreeFn] = None
) -> DecompositionCertificate:
    """Split a bipartite multigraph into exactly Delta_g(B) degree-g subgraphs.

    Each vertex v is split into g(v) clones that take its copies round-robin, the clone
    graph is edge-colored with Delta_g colors by alternating paths, and clones are merged.
    """
    if isinstance(B, AuxBipartite):
        B, g = B.graph, B.g if g is None else g
    if g is None:
        raise PreconditionError("hakimi_kariv_color needs a degree function", parameter="g")
    if _two_coloring(B) is None:
        raise PreconditionError("hakimi_kariv_color needs a bipartite graph", parameter="B")
    colors = delta_f(B, g)
    if colors == 0:
        return DecompositionCertificate(CertificateKind.DEGREE_F_SUBGRAPH, 0, tuple(() for _ in B.edges), g)

    clone_base = []
    total = 0
    for v in range(B.n):
        clone_base.append(total)
        total += g(v)
    turn = [0] * B.n
    ends = []
    owner = []
    for i, _, u, v in B.copies():
        cu = clone_base[u] + turn[u] % g(u)
        cv = clone_base[v] + turn[v] % g(v)
        turn[u] += 1
        turn[v] += 1
        ends.append((cu, cv))
        owner.append(i)
    edge_colors = _konig_coloring(total, ends, colors)

    rows: List[List[int]] = [[] for _ in B.edges]
    for i, c in zip(owner, edge_colors):
        rows[i].append(c)
    cert = DecompositionCertificate(CertificateKind.DEGREE_F_SUBGRAPH, colors, tuple(tuple(r) for r in rows), g)
    verdict = verify_certificate(B, cert)
    if not verdict:
        raise CertificateError(f"f-coloring violates its caps: {verdict.violation}", verdict)
    logger.debug("Colored bipartite multigraph", vertices=B.n, copies=len(ends), colors=colors)
    return cert


def pseudoforests_from_coloring(D: Digraph, f: DegreeFn, coloring: DecompositionCertificate) -> DecompositionCertificate:
    """Read an f-coloring of aux_bipartite(D, f) back onto the arcs of D."""
    if len(coloring.assignment) != len(D.arcs):
        raise PreconditionError("Coloring does not match the digraph's arcs", parameter="coloring")
    return DecompositionCertificate(CertificateKind.DEGREE_F_PSEUDOFOREST, coloring.k, coloring.assignment, f)


# ---------------------------------------------------------------------------
# Cycles and transversals
# ---------------------------------------------------------------------------

def monochromatic_cycles(D: Digraph, cert: DecompositionCertificate) -> List[MonochromaticCycle]:
    """Directed cycles of every class; each class must have indegree <= 1."""
    pred: List[Dict[int, Tuple[int, ArcCopy]]] = [{} for _ in range(cert.k)]
    for i, ((u, v, _), classes) in enumerate(zip(D.arcs, cert.assignment)):
        for copy, c in enumerate(classes):
            if v in pred[c]:
                raise PreconditionError(f"Class {c} has indegree > 1 at vertex {v}", parameter="cert")
            pred[c][v] = (u, (i, copy))

    cycles = []
    for c in range(cert.k):
        state: Dict[int, int] = {}
        for start in sorted(pred[c]):
            if start in state:
                continue
            walk = []
            x = start
            while x in pred[c] and x not in state:
                state[x] = 1
                walk.append(x)
                x = pred[c][x][0]
            if state.get(x) == 1 and x in walk:
                loop = walk[walk.index(x):]
                arcs = tuple(pred[c][y][1] for y in loop)
                cycles.append(MonochromaticCycle(c, tuple(reversed(loop)), tuple(reversed(arcs))))
            for y in walk:
                state[y] = 2
    return cycles


def _line_degree(D: Digraph, cycles: Sequence[MonochromaticCycle]) -> int:
    degree: Dict[int, int] = {}
    arcs = [a for cycle in cycles for a in cycle.arcs]
    for i, _ in arcs:
        u, v, _ = D.arcs[i]
        degree[u] = degree.get(u, 0) + 1
        degree[v] = degree.get(v, 0) + 1
    return max((degree[D.arcs[i][0]] + degree[D.arcs[i][1]] - 2 for i, _ in arcs), default=0)


def independent_transversal(
    D: Digraph, cycles: Sequence[MonochromaticCycle], node_limit: Optional[int] = None
) -> List[ArcCopy]:
    """One arc per cycle such that no two chosen arcs share an endpoint."""
    if not cycles:
        return []
    node_limit = settings.pipeline.transversal_node_limit if node_limit is None else node_limit
    line_degree = _line_degree(D, cycles)
    short = [i for i, cycle in enumerate(cycles) if len(cycle.arcs) < line_degree + 2]
    if short:
        logger.warning(
            "Transversal existence not guaranteed",
            line_graph_degree=line_degree,
            short_classes=len(short),
            smallest=min(len(cycles[i].arcs) for i in short),
        )

    def ends(arc: ArcCopy) -> Tuple[int, int]:
        return D.arcs[arc[0]][:2]

    chosen: List[Optional[ArcCopy]] = [None] * len(cycles)
    used: Dict[int, int] = {}

    def take(ci: int, arc: ArcCopy):
        chosen[ci] = arc
        for w in ends(arc):
            used[w] = ci

    def drop(ci: int):
        for w in ends(chosen[ci]):
            del used[w]
        chosen[ci] = None

    def free(arc: ArcCopy) -> bool:
        return all(w not in used for w in ends(arc))

    for ci, cycle in enumerate(cycles):
        for arc in cycle.arcs:
            if free(arc):
                take(ci, arc)
                break

    # single exchanges: evict one blocking representative if it can move elsewhere
    for ci, cycle in enumerate(cycles):
        if chosen[ci] is not None:
            continue
        for arc in cycle.arcs:
            blockers = {used[w] for w in ends(arc) if w in used}
            if len(blockers) != 1:
                continue
            (other,) = blockers
            previous = chosen[other]
            drop(other)
            take(ci, arc)
            moved = next((alt for alt in cycles[other].arcs if free(alt)), None)
            if moved is not None:
                take(other, moved)
                break
            drop(ci)
            take(other, previous)

    if all(arc is not None for arc in chosen):
        return list(chosen)
    logger.info("Greedy transversal incomplete, backtracking", missing=sum(a is None for a in chosen))
    return _backtrack_transversal(D, cycles, node_limit)


def _backtrack_transversal(D: Digraph, cycles: Sequence[MonochromaticCycle], node_limit: int) -> List[ArcCopy]:
    used: set = set()
    chosen: Dict[int, ArcCopy] = {}
    nodes = 0
    tightest = (INFINITY, -1)

    def options(ci: int) -> List[ArcCopy]:
        return [arc for arc in cycles[ci].arcs if D.arcs[arc[0]][0] not in used and D.arcs[arc[0]][1] not in used]

    def search() -> bool:
        nonlocal nodes, tightest
        nodes += 1
        if nodes > node_limit:
            raise TransversalError(
                f"Transversal search exceeded {node_limit} nodes", class_index=tightest[1], class_size=len(cycles[tightest[1]].arcs)
            )
        open_classes = [ci for ci in range(len(cycles)) if ci not in chosen]
        if not open_classes:
            return True
        ci, avail = min(((ci, options(ci)) for ci in open_classes), key=lambda item: (len(item[1]), item[0]))
        if len(avail) < tightest[0]:
            tightest = (len(avail), ci)
        for arc in avail:
            u, v, _ = D.arcs[arc[0]]
            used.update((u, v))
            chosen[ci] = arc
            if search():
                return True
            del chosen[ci]
            used.difference_update((u, v))
        return False

    if not search():
        ci = tightest[1]
        raise TransversalError(
            f"No independent transversal exists; class {ci} has {len(cycles[ci].arcs)} arcs",
            class_index=ci,
            class_size=len(cycles[ci].arcs),
        )
    return [chosen[ci] for ci in range(len(cycles))]


# ---------------------------------------------------------------------------
# Directed decompositions
# ---------------------------------------------------------------------------

def _verified(D: Digraph, cert: DecompositionCertificate, stage: str) -> DecompositionCertificate:
    verdict = verify_certificate(D, cert)
    if not verdict:
        raise CertificateError(f"{stage} produced an invalid decomposition: {verdict.violation}", verdict)
    return cert


def decompose_large_girth(
    D: Digraph,
    f: DegreeFn,
    known_girth: Optional[float] = None,
    force: bool = False,
    stats: Optional[dict] = None,
) -> DecompositionCertificate:
    """d + 1 degree-f branchings for a simple digraph with directed girth >= 4d."""
    if not D.simple:
        raise PreconditionError("decompose_large_girth needs a digraph without parallel arcs", parameter="simple")
    d = branching_parameter(D, f)
    if d == 0:
        return DecompositionCertificate(CertificateKind.DEGREE_F_BRANCHING, 1, tuple(() for _ in D.arcs), f)
    g = directed_girth(D) if known_girth is None else known_girth
    if g < 4 * d:
        if not force:
            raise PreconditionError(f"Directed girth {g} is below 4d = {4 * d}", parameter="directed_girth", value=g)
        logger.warning("Forcing large-girth pipeline below its girth bound", girth=g, d=d)

    coloring = hakimi_kariv_color(aux_bipartite(D, f))
    pseudo = pseudoforests_from_coloring(D, f, coloring)
    cycles = monochromatic_cycles(D, pseudo)
    matching = independent_transversal(D, cycles)

    rows = [list(classes) for classes in pseudo.assignment]
    for arc_index, copy in matching:
        rows[arc_index][copy] = d
    cert = DecompositionCertificate(CertificateKind.DEGREE_F_BRANCHING, d + 1, tuple(tuple(r) for r in rows), f)
    if stats is not None:
        stats["classes"] = d + 1
        stats["monochromatic_cycles"] = stats.get("monochromatic_cycles", 0) + len(cycles)
        stats["transversal_size"] = stats.get("transversal_size", 0) + len(matching)
    logger.info("Large-girth decomposition", d=d, girth=g, cycles=len(cycles), classes=d + 1)
    return _verified(D, cert, "Large-girth pipeline")


def decompose_trivial(D: Digraph, f: DegreeFn, stats: Optional[dict] = None) -> DecompositionCertificate:
    """Exactly 2d degree-f branchings: d pseudoforests, each minus one arc per cycle."""
    d = branching_parameter(D, f)
    if d == 0:
        return DecompositionCertificate(CertificateKind.DEGREE_F_BRANCHING, 0, tuple(() for _ in D.arcs), f)
    pseudo = pseudoforests_from_coloring(D, f, hakimi_kariv_color(aux_bipartite(D, f)))
    cycles = monochromatic_cycles(D, pseudo)
    rows = [list(classes) for classes in pseudo.assignment]
    for cycle in cycles:
        arc_index, copy = min(cycle.arcs)
        rows[arc_index][copy] = d + cycle.class_index
    if stats is not None:
        stats["classes"] = 2 * d
        stats["monochromatic_cycles"] = stats.get("monochromatic_cycles", 0) + len(cycles)
    cert = DecompositionCertificate(CertificateKind.DEGREE_F_BRANCHING, 2 * d, tuple(tuple(r) for r in rows), f)
    return _verified(D, cert, "Trivial pipeline")


def _resampler_bound(d: int, k: int) -> Decimal:
    """d/k + 3 sqrt(d ln d / k), rounded upward; d itself when d <= 1."""
    if d <= 1:
        return Decimal(d)
    with localcontext() as ctx:
        ctx.prec = settings.pipeline.decimal_precision
        ctx.rounding = ROUND_CEILING
        dd, kk = Decimal(d), Decimal(k)
        return dd / kk + 3 * (dd * dd.ln() / kk).sqrt()


def _floor(value: Decimal) -> int:
    return int(value.to_integral_value(rounding=ROUND_FLOOR))


def color_degree_counts(D: Digraph, phi: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """(in_counts[v, i], out_counts[v, i]): in/out-neighbours of v carrying color i."""
    in_counts = np.zeros((D.n, k), dtype=np.int64)
    out_counts = np.zeros((D.n, k), dtype=np.int64)
    if D.arcs:
        arcs = np.array(D.arcs, dtype=np.int64)
        tails, heads, mults = arcs[:, 0], arcs[:, 1], arcs[:, 2]
        np.add.at(in_counts, (heads, phi[tails]), mults)
        np.add.at(out_counts, (tails, phi[heads]), mults)
    return in_counts, out_counts


def check_vertex_coloring(D: Digraph, f: DegreeFn, coloring: VertexColoring) -> bool:
    """Recount the color degrees from scratch and compare against the bound."""
    in_counts, out_counts = color_degree_counts(D, coloring.phi, coloring.k)
    bound = coloring.bound
    for v in range(D.n):
        for i in range(coloring.k):
            if Decimal(int(in_counts[v, i])) > bound:
                return False
            if f(v) > 1 and Decimal(int(out_counts[v, i])) / (f(v) - 1) > bound:
                return False
    return True


def lll_vertex_coloring(
    D: Digraph, f: DegreeFn, k: int, rng_seed=0, limit: Optional[int] = None
) -> VertexColoring:
    """k-coloring of V(D) with every color in/out-degree at most d/k + 3 sqrt(d log d / k).

    Moser-Tardos resampling: while some (v, i) is over its cap, recolor the in- or
    out-neighbourhood of the first such vertex uniformly at random.
    """
    if k < 1:
        raise PreconditionError(f"Color count must be >= 1, got {k}", parameter="k", value=k)
    d = branching_parameter(D, f)
    if d < 1:
        raise PreconditionError("lll_vertex_coloring needs a digraph with at least one arc", parameter="d", value=d)
    if k > d ** 0.9:
        logger.warning("Color count exceeds d^(9/10)", k=k, d=d)
    limit = settings.pipeline.resample_limit if limit is None else limit

    bound = _resampler_bound(d, k)
    in_cap = _floor(bound)
    out_caps = np.array([_floor(bound * (f(v) - 1)) for v in range(D.n)], dtype=np.int64)
    rng = np.random.default_rng(rng_seed)
    phi = rng.integers(0, k, size=D.n)
    in_counts, out_counts = color_degree_counts(D, phi, k)
    out_adj, in_adj = D.out_adjacency, D.in_adjacency

    def recolor(w: int, new: int):
        old = phi[w]
        if old == new:
            return
        for x, a in out_adj[w]:
            m = D.arcs[a][2]
            in_counts[x, old] -= m
            in_counts[x, new] += m
        for y, a in in_adj[w]:
            m = D.arcs[a][2]
            out_counts[y, old] -= m
            out_counts[y, new] += m
        phi[w] = new

    resamples = 0
    while True:
        in_bad = np.argwhere(in_counts > in_cap)
        out_bad = np.argwhere(out_counts > out_caps[:, None])
        if len(in_bad) == 0 and len(out_bad) == 0:
            break
        if resamples >= limit:
            worst_in = np.unravel_index(np.argmax(in_counts), in_counts.shape)
            raise BudgetExceededError(
                f"Resampling limit {limit} reached; worst event at (v, i) = "
                f"({int(worst_in[0])}, {int(worst_in[1])}) with {int(in_counts[worst_in])} > {in_cap}",
                size=resamples,
            )
        if len(in_bad):
            v = int(in_bad[0][0])
            neighbourhood = [y for y, _ in in_adj[v]]
        else:
            v = int(out_bad[0][0])
            neighbourhood = [x for x, _ in out_adj[v]]
        for w, new in zip(neighbourhood, rng.integers(0, k, size=len(neighbourhood))):
            recolor(w, int(new))
        resamples += 1

    logger.info("Vertex coloring found", d=d, k=k, bound=str(bound.quantize(Decimal("0.0001"))), resamples=resamples)
    return VertexColoring(
        phi=phi, k=k, d=d, bound=bound, in_cap=in_cap, out_caps=out_caps,
        in_counts=in_counts, out_counts=out_counts, resamples=resamples,
    )


def smallest_prime_in(lo: int, hi: int) -> Optional[int]:
    for p in range(max(lo, 2), hi + 1):
        if all(p % q for q in range(2, math.isqrt(p) + 1)):
            return p
    return None


def asymptotic_class_budget(d: int, c: Optional[float] = None) -> int:
    """d + ceil(c d^(3/4) (log d)^(1/2))."""
    c = settings.pipeline.budget_constant if c is None else c
    if d <= 1:
        return d
    return d + math.ceil(c * d ** 0.75 * math.sqrt(math.log(d)))


def _sub_digraph(D: Digraph, arc_indices: Sequence[int]) -> Digraph:
    return Digraph(D.n, tuple(D.arcs[i] for i in arc_indices), simple=D.simple)


def _fallback(D: Digraph, f: DegreeFn, reason: str, stats: Optional[dict]) -> DecompositionCertificate:
    logger.warning("Asymptotic pipeline falling back to the trivial decomposition", reason=reason)
    if stats is not None:
        stats["fallback"] = reason
    return decompose_trivial(D, f, stats)


def _residues(D: Digraph, f: DegreeFn, phi: np.ndarray, k: int) -> List[List[int]]:
    groups: List[List[int]] = [[] for _ in range(k)]
    for a, (u, v, _) in enumerate(D.arcs):
        groups[(int(phi[v]) - int(phi[u])) % k].append(a)
    for i in range(1, k):
        d_i = branching_parameter(_sub_digraph(D, groups[i]), f)
        if k < 4 * d_i:
            raise _ResidueTooDense(i, d_i)
    return groups


def asymptotic_assembly(
    D: Digraph, f: DegreeFn, rng_seed: int = 0, stats: Optional[dict] = None
) -> DecompositionCertificate:
    """Split D by color differences modulo a prime k and decompose each residue digraph.

    Residues i != 0 have all directed cycle lengths divisible by k, so they go through the
    large-girth pipeline; residue 0 takes the trivial route. The assembled certificate is
    verified and returned whatever its class count. Raises PreconditionError when D has
    parallel arcs, no prime fits, or every draw leaves a dense residue; TransversalError
    and BudgetExceededError from the stages pass through.
    """
    d = branching_parameter(D, f)
    if d == 0:
        return DecompositionCertificate(CertificateKind.DEGREE_F_BRANCHING, 0, tuple(() for _ in D.arcs), f)
    if not D.simple:
        raise PreconditionError("digraph has parallel arcs", parameter="simple")
    lo, hi = math.isqrt(25 * d - 1) + 1, math.isqrt(100 * d)
    k = smallest_prime_in(lo, hi)
    if k is None:
        raise PreconditionError(f"no prime in [{lo}, {hi}]", parameter="prime", value=d)

    attempts = settings.pipeline.asymptotic_attempts
    draws = []

    def draw_and_split():
        attempt = len(draws)
        coloring = lll_vertex_coloring(D, f, k, rng_seed=[rng_seed, attempt])
        draws.append(coloring)
        return coloring, _residues(D, f, coloring.phi, k)

    try:
        for attempt in Retrying(
            stop=stop_after_attempt(attempts), retry=retry_if_exception_type(_ResidueTooDense), reraise=True
        ):
            with attempt:
                coloring, groups = draw_and_split()
    except _ResidueTooDense as exc:
        raise PreconditionError(
            f"residue {exc.residue} has d_i = {exc.d_i} > k / 4 after {attempts} draws",
            parameter="residue_density",
            value=exc.d_i,
        ) from exc

    rows: List[List[int]] = [[] for _ in D.arcs]
    offset = 0
    for i in range(k):
        if not groups[i]:
            continue
        sub = _sub_digraph(D, groups[i])
        if i == 0:
            part = decompose_trivial(sub, f)
        else:
            try:
                part = decompose_large_girth(sub, f, known_girth=k)
            except TransversalError as exc:
                raise TransversalError(f"residue {i}: {exc}", exc.class_index, exc.class_size) from exc
        for local, a in enumerate(groups[i]):
            rows[a] = [offset + c for c in part.assignment[local]]
        offset += part.k

    cert = DecompositionCertificate(CertificateKind.DEGREE_F_BRANCHING, offset, tuple(tuple(r) for r in rows), f)
    cert = _verified(D, cert.compacted(), "Asymptotic pipeline")
    if stats is not None:
        stats.update(
            prime=k,
            assembled_classes=cert.k,
            resamples=coloring.resamples,
            colorings_drawn=len(draws),
            residues=sum(1 for group in groups if group),
        )
    logger.info("Asymptotic assembly", d=d, prime=k, classes=cert.k, budget=asymptotic_class_budget(d))
    return cert


def decompose_asymptotic(
    D: Digraph, f: DegreeFn, rng_seed: int = 0, stats: Optional[dict] = None
) -> DecompositionCertificate:
    """The verified residue assembly, or `decompose_trivial` when it fails or needs more than 2d classes."""
    d = branching_parameter(D, f)
    if d == 0:
        return DecompositionCertificate(CertificateKind.DEGREE_F_BRANCHING, 0, tuple(() for _ in D.arcs), f)
    try:
        cert = asymptotic_assembly(D, f, rng_seed, stats)
    except (PreconditionError, TransversalError, BudgetExceededError, RetryError) as exc:
        return _fallback(D, f, str(exc), stats)
    if cert.k > 2 * d:
        return _fallback(D, f, f"{cert.k} classes exceed the trivial 2d = {2 * d}", stats)
    if stats is not None:
        stats.update(classes=cert.k, fallback=None)
    return cert


# ---------------------------------------------------------------------------
# Undirected wrappers
# ---------------------------------------------------------------------------

def decompose_undirected(
    G: Multigraph,
    f: DegreeFn,
    mode: str = "girth",
    rng_seed: int = 0,
    force: bool = False,
    stats: Optional[dict] = None,
) -> DecompositionCertificate:
    """Degree-f forests via an orientation with indegree <= d and outdegree <= d (f - 1)."""
    from density import arboricity
    from orient import orient_for_branchings

    if mode not in ("girth", "asymptotic", "trivial"):
        raise PreconditionError(f"Unknown decomposition mode {mode!r}", parameter="mode", value=mode)
    if not G.is_simple:
        raise PreconditionError("decompose_undirected needs a simple graph", parameter="simple")
    a, _, _ = arboricity(G)
    d = max(delta_f(G, f), a)
    if d == 0:
        return DecompositionCertificate(CertificateKind.DEGREE_F_FOREST, 0, tuple(() for _ in G.edges), f)

    undirected_girth = girth(G) if mode == "girth" else None
    if mode == "girth" and undirected_girth < 4 * d and not force:
        raise PreconditionError(
            f"Girth {undirected_girth} is below 4d = {4 * d}", parameter="girth", value=undirected_girth
        )
    D = orient_for_branchings(G, f, d)
    if mode == "girth":
        directed = decompose_large_girth(D, f, known_girth=undirected_girth, force=force, stats=stats)
        target = d + 1
    elif mode == "asymptotic":
        directed = decompose_asymptotic(D, f, rng_seed, stats)
        target = directed.k
    else:
        directed = decompose_trivial(D, f, stats)
        target = directed.k

    forests = undirected_certificate(G, D, directed)
    cert = DecompositionCertificate(CertificateKind.DEGREE_F_FOREST, max(target, forests.k), forests.assignment, f)
    verdict = verify_certificate(G, cert)
    if not verdict:
        raise CertificateError(f"Undirected decomposition failed: {verdict.violation}", verdict)
    return cert
