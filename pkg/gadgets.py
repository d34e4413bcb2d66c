"""Counterexample gadgets for the degree-f arboricity bound and a search for better ones.

The gadget for degree bound t is a 6-cycle u-a-b-v-c-d with multiplicities
2,1,2,1,2,1, a chord uv, and t-2 parallel pendant pairs at each of u and v.
Its fractional degree-t arboricity exceeds 2 = max(delta_t, a), and blowing
every multiplicity up by m pushes the gap past +1.
"""

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, List, Mapping, Optional, Tuple

import networkx as nx
import structlog
from networkx.algorithms.isomorphism import GraphMatcher

from config import settings
from density import arboricity, conjecture_bound
from errors import BudgetExceededError, CertificateError, InputError, PreconditionError
from fractional import DualCheck, RationalLPCertificate, check_dual, enumerate_degree_f_forests, solve_fractional
from graph_core import DegreeFn, DisjointSets, Multigraph, Pair, adjacency_code, blowup, delta_f, underlying_simple
from graph_io import append_resume, load_resume

logger = structlog.get_logger(__name__)

CYCLE_ROLES = ("u", "a", "b", "v", "c", "d")
CYCLE_MULTS = (2, 1, 2, 1, 2, 1)
ATLAS_MAX_VERTICES = 7


@dataclass(frozen=True)
class Gadget:
    """The gadget graph with its vertex roles and edge labels e1..e7, p1.., q1.. (pendant pairs)."""

    t: int
    graph: Multigraph
    roles: Mapping[str, int]
    labels: Mapping[str, Pair]

    def edge(self, label: str) -> Pair:
        return self.labels[label]


@dataclass
class ForestBoundReport:
    t: int
    forests: int
    max_forest: int
    max_with_required: int

    @property
    def bound_all(self) -> int:
        return 2 * self.t + 1

    @property
    def bound_required(self) -> int:
        return 2 * self.t

    @property
    def passed(self) -> bool:
        return self.max_forest <= self.bound_all and self.max_with_required <= self.bound_required


@dataclass
class Counterexample:
    t: int
    m: int
    graph: Multigraph
    lower_bound: Fraction
    dual_bound: Fraction
    conjecture_bound: int
    dual: Dict[Pair, Fraction]
    dual_check: DualCheck

    @property
    def refutes(self) -> bool:
        return self.lower_bound > self.conjecture_bound


@dataclass
class SearchResult:
    t: int
    target: Fraction
    graph: Optional[Multigraph] = None
    code: Optional[str] = None
    value: Optional[Fraction] = None
    ratio: Optional[Fraction] = None
    certificate: Optional[RationalLPCertificate] = None
    dual_check: Optional[DualCheck] = None
    evaluated: int = 0
    resumed: int = 0

    @property
    def meets_target(self) -> bool:
        return self.ratio is not None and self.ratio >= self.target


# ---------------------------------------------------------------------------
# Gadget construction
# ---------------------------------------------------------------------------

def _require_t(t: int):
    if t < 2:
        raise InputError(f"t must be >= 2, got {t}", field_path="t")


@lru_cache(maxsize=32)
def build_gadget(t: int) -> Gadget:
    _require_t(t)
    roles = {name: i for i, name in enumerate(CYCLE_ROLES)}
    labels: Dict[str, Pair] = {}
    edges = []
    for i, mult in enumerate(CYCLE_MULTS):
        x, y = i, (i + 1) % 6
        labels[f"e{i + 1}"] = (min(x, y), max(x, y))
        edges.append((x, y, mult))
    u, v = roles["u"], roles["v"]
    labels["e7"] = (u, v)
    edges.append((u, v, 1))

    next_vertex = 6
    for prefix, hub in (("p", u), ("q", v)):
        for j in range(1, t - 1):
            roles[f"{prefix}{j}"] = next_vertex
            labels[f"{prefix}{j}"] = (hub, next_vertex)
            edges.append((hub, next_vertex, 2))
            next_vertex += 1

    gadget = Gadget(t=t, graph=Multigraph(next_vertex, tuple(edges)), roles=roles, labels=labels)
    _pinning_checks(gadget)
    return gadget


def _pinning_checks(gadget: Gadget):
    t, G = gadget.t, gadget.graph
    f = DegreeFn.constant(t)

    # A forest through e1, e3, e7 cannot take e2, but e5 stays available.
    closing = DisjointSets()
    cycles = [closing.add_edge(*gadget.edge(label)) for label in ("e1", "e3", "e7", "e2")]
    open_path = DisjointSets()
    acyclic = all(open_path.add_edge(*gadget.edge(label)) == 0 for label in ("e1", "e3", "e7", "e5"))
    load: Dict[int, int] = {}
    for label in ("e1", "e3", "e7", "e5"):
        for x in gadget.edge(label):
            load[x] = load.get(x, 0) + 1
    if cycles[-1] == 0 or not acyclic or max(load.values()) > t:
        raise CertificateError(f"Gadget for t={t} fails the forest-structure pinning check")

    objective = dual_objective(G, gadget_dual(gadget))
    if objective != Fraction(4 * t + 7, 2 * t + 3):
        raise CertificateError(f"Gadget for t={t} dual objective is {objective}, expected {Fraction(4 * t + 7, 2 * t + 3)}")

    a, _, _ = arboricity(G)
    weighted = delta_f(G, f)
    if not (weighted == a == 2):
        raise CertificateError(f"Gadget for t={t} has delta_t = {weighted} and a = {a}, expected both 2")


def gadget_dual(gadget: Gadget) -> Dict[Pair, Fraction]:
    """2/(2t+3) on e1, e3, e7 and 1/(2t+3) on every other simple edge."""
    heavy = {gadget.edge(label) for label in ("e1", "e3", "e7")}
    denominator = 2 * gadget.t + 3
    return {
        (u, v): Fraction(2 if (u, v) in heavy else 1, denominator) for u, v, _ in gadget.graph.edges
    }


def uniform_dual(G: Multigraph, t: int) -> Dict[Pair, Fraction]:
    """1/(3t-2) on every simple edge."""
    _require_t(t)
    return {(u, v): Fraction(1, 3 * t - 2) for u, v, _ in G.edges}


def dual_objective(G: Multigraph, x: Mapping[Pair, Fraction]) -> Fraction:
    return sum((m * Fraction(x[(u, v)]) for u, v, m in G.edges), Fraction(0))


def net_gadget(t: int) -> Multigraph:
    """Triangle whose corners each carry t-1 parallel pendant pairs.

    Every corner has degree 2t, the largest degree-t forest has 3t-2 edges, and the
    total multiplicity is 6t-3, so the uniform dual certifies a_t* >= (6t-3)/(3t-2).
    """
    _require_t(t)
    edges = [(0, 1, 1), (1, 2, 1), (0, 2, 1)]
    next_vertex = 3
    for corner in range(3):
        for _ in range(t - 1):
            edges.append((corner, next_vertex, 2))
            next_vertex += 1
    return Multigraph(next_vertex, tuple(edges))


def verify_forest_bounds(t: int, cap: Optional[int] = None) -> ForestBoundReport:
    """Largest degree-t forests of the gadget, overall and through e1, e3, e7."""
    gadget = build_gadget(t)
    simple, _ = underlying_simple(gadget.graph)
    family = enumerate_degree_f_forests(simple, DegreeFn.constant(t), cap)
    required = [simple.pair_index[gadget.edge(label)] for label in ("e1", "e3", "e7")]
    report = ForestBoundReport(
        t=t,
        forests=len(family.forests),
        max_forest=family.largest(),
        max_with_required=family.largest(required),
    )
    logger.info(
        "Checked forest size bounds",
        t=t,
        forests=report.forests,
        max_forest=report.max_forest,
        max_with_required=report.max_with_required,
        passed=report.passed,
    )
    return report


def build_counterexample(t: int, m: int, cap: Optional[int] = None) -> Counterexample:
    """The m-fold blowup with the certified lower bound m * a_t*(gadget) against max(delta_t + 1, a)."""
    if m < 1:
        raise InputError(f"m must be >= 1, got {m}", field_path="m")
    gadget = build_gadget(t)
    f = DegreeFn.constant(t)
    base_value, _ = solve_fractional(gadget.graph, f, cap)
    G = blowup(gadget.graph, m)
    dual = gadget_dual(gadget)
    check = check_dual(G, f, dual, cap)
    if not check.feasible:
        raise CertificateError(f"Gadget dual is infeasible on forest {check.violating_forest}")
    result = Counterexample(
        t=t,
        m=m,
        graph=G,
        lower_bound=m * base_value,
        dual_bound=check.objective,
        conjecture_bound=conjecture_bound(G, f),
        dual=dual,
        dual_check=check,
    )
    logger.info(
        "Built counterexample",
        t=t,
        m=m,
        lower_bound=str(result.lower_bound),
        conjecture_bound=result.conjecture_bound,
        refutes=result.refutes,
    )
    return result


# ---------------------------------------------------------------------------
# Gadget search
# ---------------------------------------------------------------------------

def encode(G: Multigraph) -> str:
    return f"{G.n}:" + "".join(str(m) for m in adjacency_code(G))


def decode(code: str) -> Multigraph:
    try:
        n_text, body = code.split(":", 1)
        n = int(n_text)
        mults = [int(ch) for ch in body]
    except ValueError as e:
        raise InputError(f"Malformed gadget code {code!r}") from e
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if len(pairs) != len(mults):
        raise InputError(f"Gadget code {code!r} does not match {n} vertices")
    return Multigraph(n, tuple((i, j, m) for (i, j), m in zip(pairs, mults) if m))


def _base_graphs(max_vertices: int, max_total_mult: int) -> List[int]:
    """Atlas indices of connected graphs that could carry an admissible multiplicity."""
    indices = []
    for index, H in enumerate(nx.graph_atlas_g()):
        n = H.number_of_nodes()
        if n < 2 or n > max_vertices or not nx.is_connected(H):
            continue
        # a = 2 caps e(V) at 2(n - 1)
        if H.number_of_edges() > min(max_total_mult, 2 * (n - 1)):
            continue
        indices.append(index)
    return indices


def search_size(max_vertices: int, max_total_mult: int) -> int:
    """Number of (base graph, doubled-edge set) candidates before symmetry pruning."""
    total = 0
    for index in _base_graphs(max_vertices, max_total_mult):
        edges = nx.graph_atlas(index).number_of_edges()
        total += sum(comb(edges, j) for j in range(0, max_total_mult - edges + 1))
    return total


def _admissible(G: Multigraph, t: int) -> bool:
    top = max(G.degrees, default=0)
    if not t < top <= 2 * t:
        return False
    a, _, _ = arboricity(G)
    return a == 2


def _search_base(job: Tuple[int, int, int, frozenset]) -> List[Tuple[str, Fraction]]:
    """Admissible multigraphs over one atlas graph, one per isomorphism class.

    Multiplicities are 1 or 2 since a pair of multiplicity 3 already forces a >= 3.
    """
    index, t, max_total_mult, processed = job
    H = nx.graph_atlas(index)
    n = H.number_of_nodes()
    edges = sorted((min(x, y), max(x, y)) for x, y in H.edges())
    automorphisms = [tuple(sigma[v] for v in range(n)) for sigma in GraphMatcher(H, H).isomorphisms_iter()]
    f = DegreeFn.constant(t)
    records: List[Tuple[str, Fraction]] = []
    for doubled_count in range(0, max_total_mult - len(edges) + 1):
        for doubled in itertools.combinations(range(len(edges)), doubled_count):
            chosen = set(doubled)
            G = Multigraph(n, tuple((x, y, 2 if i in chosen else 1) for i, (x, y) in enumerate(edges)))
            own = adjacency_code(G)
            if any(adjacency_code(G, perm) < own for perm in automorphisms):
                continue
            code = encode(G)
            if code in processed or not _admissible(G, t):
                continue
            value, _ = solve_fractional(G, f)
            records.append((code, value / 2))
    return records


def _evaluate_single(G: Multigraph, t: int) -> Tuple[str, Fraction]:
    if not _admissible(G, t):
        raise PreconditionError(
            f"Restricted search graph does not have delta_{t} = a = 2", parameter="restrict_to"
        )
    value, _ = solve_fractional(G, DegreeFn.constant(t))
    return encode(G), value / 2


def gadget_search(
    t: int,
    max_vertices: Optional[int] = None,
    max_total_mult: Optional[int] = None,
    target_ratio: Fraction = Fraction(1),
    restrict_to: Optional[Multigraph] = None,
    resume: Optional[str] = None,
    workers: Optional[int] = None,
) -> SearchResult:
    """Best a_t*/2 over connected multigraphs with delta_t = a = 2.

    Args:
        t: Degree cap of the forests.
        max_vertices: Largest vertex count enumerated (the graph atlas ends at 7).
        max_total_mult: Largest total multiplicity enumerated.
        target_ratio: Ratio reported as met when reached.
        restrict_to: Evaluate only this multigraph instead of enumerating.
        resume: jsonlines checkpoint of already evaluated codes, appended to as the search runs.
        workers: Process count for the enumeration.

    Returns:
        SearchResult whose certificate and dual check back the reported ratio.
    """
    _require_t(t)
    search = settings.search
    max_vertices = search.max_vertices if max_vertices is None else max_vertices
    max_total_mult = search.max_total_mult if max_total_mult is None else max_total_mult
    target_ratio = Fraction(target_ratio)
    result = SearchResult(t=t, target=target_ratio)

    if restrict_to is not None:
        scores = dict([_evaluate_single(restrict_to, t)])
        result.evaluated = 1
        best_graph = restrict_to
    else:
        if max_vertices > ATLAS_MAX_VERTICES:
            raise BudgetExceededError(
                f"Search over {max_vertices} vertices exceeds the graph atlas limit of {ATLAS_MAX_VERTICES}",
                size=max_vertices,
            )
        size = search_size(max_vertices, max_total_mult)
        if size > search.size_limit:
            raise BudgetExceededError(
                f"Search would examine about {size} candidates, limit is {search.size_limit}", size=size
            )
        scores = load_resume(resume)
        result.resumed = len(scores)
        processed = frozenset(scores)
        _rescore_bare_codes(scores, t)
        jobs = [(index, t, max_total_mult, processed) for index in _base_graphs(max_vertices, max_total_mult)]
        workers = workers or search.threads or 1
        logger.info("Starting gadget search", t=t, base_graphs=len(jobs), candidates=size, workers=workers)
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                batches = pool.map(_search_base, jobs)
                for records in batches:
                    _merge(scores, records, resume, result)
        else:
            for job in jobs:
                _merge(scores, _search_base(job), resume, result)
        best_graph = None

    if not scores:
        logger.warning("Gadget search found no admissible multigraph", t=t)
        return result
    code = min(scores, key=lambda c: (-scores[c], c))
    graph = best_graph if best_graph is not None else decode(code)
    f = DegreeFn.constant(t)
    value, cert = solve_fractional(graph, f)
    check = check_dual(graph, f, cert.dual)
    if not check.feasible or check.objective != value:
        raise CertificateError(f"Dual certificate for gadget {code} does not reproduce a_t* = {value}")
    result.graph, result.code, result.value, result.ratio = graph, code, value, value / 2
    result.certificate, result.dual_check = cert, check
    logger.info(
        "Gadget search finished",
        t=t,
        code=code,
        ratio=str(result.ratio),
        evaluated=result.evaluated,
        meets_target=result.meets_target,
    )
    return result


def _rescore_bare_codes(scores: Dict[str, Optional[Fraction]], t: int):
    """Measure checkpoint codes stored without a ratio; inadmissible ones only stay processed."""
    for code in [c for c, ratio in scores.items() if ratio is None]:
        G = decode(code)
        if _admissible(G, t):
            scores[code] = solve_fractional(G, DegreeFn.constant(t))[0] / 2
        else:
            del scores[code]


def _merge(scores: Dict[str, Fraction], records, resume: Optional[str], result: SearchResult):
    if not records:
        return
    for code, ratio in records:
        scores[code] = ratio
    result.evaluated += len(records)
    if resume is not None:
        append_resume(resume, records)
