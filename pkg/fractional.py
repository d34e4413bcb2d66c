"""Fractional degree-f arboricity over exact rationals.

a_f*(G) is the optimum of the covering LP over degree-f forests of the underlying
simple graph G' weighted by the multiplicities mu:

    (P)  min sum_F y_F   s.t.  sum_{F contains e} y_F >= mu_e,  y >= 0
    (D)  max sum_e mu_e x_e  s.t.  sum_{e in F} x_e <= 1 for every forest F,  x >= 0

(D) is a packing LP, so it is solved directly by `rational_lp.maximize` and the optimal y
is read from its final basis. Only inclusion-maximal forests are needed as rows since
x >= 0.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import structlog

from config import settings
from errors import BudgetExceededError, InputError, LPCertificateError, ScalingError
from graph_core import DegreeFn, DisjointSets, Multigraph, Pair, blowup, underlying_simple
from rational_lp import maximize

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class ForestFamily:
    """All degree-f forests of a simple base graph, as tuples of edge indices."""

    base: Multigraph
    f: DegreeFn
    forests: Tuple[Tuple[int, ...], ...]

    def largest(self, containing: Sequence[int] = ()) -> int:
        """Size of the largest member that contains every listed edge index (-1 if none)."""
        required = set(containing)
        sizes = [len(F) for F in self.forests if required.issubset(F)]
        return max(sizes, default=-1)


@dataclass
class RationalLPCertificate:
    base: Multigraph
    forests: Tuple[Tuple[int, ...], ...]
    primal: Dict[int, Fraction]
    dual: Dict[Pair, Fraction]
    objective_primal: Fraction
    objective_dual: Fraction
    pivots: int = 0

    def forest_edges(self, index: int) -> Tuple[Pair, ...]:
        return tuple(self.base.edges[i][:2] for i in self.forests[index])


@dataclass
class DualCheck:
    feasible: bool
    objective: Fraction
    violating_forest: Optional[Tuple[Pair, ...]] = None
    max_forest_weight: Fraction = Fraction(0)


@dataclass
class ScalingReport:
    base_value: Fraction
    rows: List[Tuple[int, Fraction, Fraction]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ratio == m for m, _, ratio in self.rows)


def _enumerate_forests(n: int, edge_list: Sequence[Pair], f: Optional[DegreeFn], cap: int) -> List[Tuple[int, ...]]:
    """Every acyclic degree-bounded subset of edge_list (repeated pairs are distinct edges)."""
    if len(edge_list) > cap:
        raise BudgetExceededError(
            f"Forest enumeration over {len(edge_list)} edges exceeds the cap of {cap}",
            size=len(edge_list),
        )
    sets = DisjointSets(rollback=True)
    deg = [0] * n
    chosen: List[int] = []
    found: List[Tuple[int, ...]] = []
    total = len(edge_list)

    def extend(i: int):
        if i == total:
            found.append(tuple(chosen))
            return
        extend(i + 1)
        u, v = edge_list[i]
        if f is not None and (deg[u] >= f(u) or deg[v] >= f(v)):
            return
        if sets.connected(u, v):
            return
        mark = sets.snapshot()
        sets.add_edge(u, v)
        deg[u] += 1
        deg[v] += 1
        chosen.append(i)
        extend(i + 1)
        chosen.pop()
        deg[u] -= 1
        deg[v] -= 1
        sets.rollback(mark)

    extend(0)
    return found


def _maximal(n: int, edge_list: Sequence[Pair], f: Optional[DegreeFn], forests: Sequence[Tuple[int, ...]]) -> List[Tuple[int, ...]]:
    keep = []
    for forest in forests:
        sets = DisjointSets()
        deg = [0] * n
        for i in forest:
            u, v = edge_list[i]
            sets.add_edge(u, v)
            deg[u] += 1
            deg[v] += 1
        members = set(forest)
        extendable = False
        for i, (u, v) in enumerate(edge_list):
            if i in members:
                continue
            if f is not None and (deg[u] >= f(u) or deg[v] >= f(v)):
                continue
            if not sets.connected(u, v):
                extendable = True
                break
        if not extendable:
            keep.append(forest)
    return keep


@lru_cache(maxsize=512)
def _cached_family(base: Multigraph, f: DegreeFn, cap: int) -> ForestFamily:
    pairs = [(u, v) for u, v, _ in base.edges]
    forests = _enumerate_forests(base.n, pairs, f, cap)
    return ForestFamily(base=base, f=f, forests=tuple(forests))


def enumerate_degree_f_forests(G_simple: Multigraph, f: DegreeFn, cap: Optional[int] = None) -> ForestFamily:
    """Complete family of degree-f forests of a simple graph, empty forest included."""
    if not G_simple.is_simple:
        raise InputError("Forest enumeration expects a simple graph; pass underlying_simple(G)[0]")
    cap = settings.lp.enumeration_cap if cap is None else cap
    return _cached_family(G_simple, f, cap)


@lru_cache(maxsize=512)
def maximal_forests(family: ForestFamily) -> Tuple[Tuple[int, ...], ...]:
    """Inclusion-maximal members of the family."""
    pairs = [(u, v) for u, v, _ in family.base.edges]
    return tuple(_maximal(family.base.n, pairs, family.f, family.forests))


def _normalize_weights(G_simple: Multigraph, x: Mapping) -> Dict[Pair, Fraction]:
    weights: Dict[Pair, Fraction] = {}
    for key, value in x.items():
        u, v = key
        pair = (min(u, v), max(u, v))
        if pair not in G_simple.pair_index:
            raise InputError(f"Dual weight given for ({u}, {v}), which is not an edge", field_path="dual")
        value = Fraction(value)
        if value < 0:
            raise InputError(f"Dual weight on ({u}, {v}) is negative: {value}", field_path="dual")
        weights[pair] = value
    for u, v, _ in G_simple.edges:
        if (u, v) not in weights:
            raise InputError(f"Dual weight missing for edge ({u}, {v})", field_path="dual")
    return weights


def check_dual(G: Multigraph, f: DegreeFn, x: Mapping, cap: Optional[int] = None) -> DualCheck:
    """Feasibility of x for (D) by enumeration, plus its objective sum mu_e x_e.

    A feasible x certifies a_f(G) >= a_f*(G) >= objective by weak duality.
    """
    G_simple, mu = underlying_simple(G)
    weights = _normalize_weights(G_simple, x)
    family = enumerate_degree_f_forests(G_simple, f, cap)
    order = [(u, v) for u, v, _ in G_simple.edges]
    best_weight, best_forest = Fraction(0), ()
    for forest in maximal_forests(family):
        weight = sum((weights[order[i]] for i in forest), Fraction(0))
        if weight > best_weight:
            best_weight, best_forest = weight, forest
    objective = sum((mu[e] * weights[e] for e in order), Fraction(0))
    feasible = best_weight <= 1
    violating = None if feasible else tuple(order[i] for i in best_forest)
    return DualCheck(feasible=feasible, objective=objective, violating_forest=violating, max_forest_weight=best_weight)


def _solve_rows(columns: int, rows: Sequence[Tuple[int, ...]], weights: Sequence[int]):
    A = [[0] * columns for _ in rows]
    for r, forest in enumerate(rows):
        for i in forest:
            A[r][i] = 1
    return maximize(A, [1] * len(rows), weights)


def solve_fractional(G: Multigraph, f: DegreeFn, cap: Optional[int] = None) -> Tuple[Fraction, RationalLPCertificate]:
    """a_f*(G) with a primal/dual certificate of equal objective."""
    G_simple, mu = underlying_simple(G)
    if not G_simple.edges:
        cert = RationalLPCertificate(G_simple, (), {}, {}, Fraction(0), Fraction(0))
        return Fraction(0), cert

    family = enumerate_degree_f_forests(G_simple, f, cap)
    rows = maximal_forests(family)
    order = [(u, v) for u, v, _ in G_simple.edges]
    solution = _solve_rows(len(order), rows, [mu[e] for e in order])
    if solution.status != "optimal":
        raise LPCertificateError(f"Covering LP dual reported {solution.status}")

    dual = {e: solution.x[i] for i, e in enumerate(order)}
    primal = {r: y for r, y in enumerate(solution.y) if y != 0}
    objective_primal = sum(primal.values(), Fraction(0))
    cert = RationalLPCertificate(
        base=G_simple,
        forests=rows,
        primal=primal,
        dual=dual,
        objective_primal=objective_primal,
        objective_dual=solution.objective,
        pivots=solution.pivots,
    )
    _verify_lp_certificate(G, f, cert, mu, cap)
    logger.info(
        "Solved fractional LP",
        vertices=G.n,
        simple_edges=len(order),
        forest_rows=len(rows),
        pivots=solution.pivots,
        value=str(solution.objective),
    )
    return solution.objective, cert


def _verify_lp_certificate(G: Multigraph, f: DegreeFn, cert: RationalLPCertificate, mu: Mapping[Pair, int], cap):
    cover: Dict[int, Fraction] = {}
    for r, y in cert.primal.items():
        if y < 0:
            raise LPCertificateError(f"Negative primal weight {y} on forest row {r}")
        for i in cert.forests[r]:
            cover[i] = cover.get(i, Fraction(0)) + y
    for i, (u, v, _) in enumerate(cert.base.edges):
        if cover.get(i, Fraction(0)) < mu[(u, v)]:
            raise LPCertificateError(f"Primal does not cover edge ({u}, {v}) {mu[(u, v)]} times")
    check = check_dual(G, f, cert.dual, cap)
    if not check.feasible:
        raise LPCertificateError(f"Extracted dual is infeasible on forest {check.violating_forest}")
    if check.objective != cert.objective_dual or cert.objective_primal != cert.objective_dual:
        raise LPCertificateError(
            f"Objectives disagree: primal {cert.objective_primal}, dual {cert.objective_dual}, recount {check.objective}"
        )


def solve_fractional_copies(G: Multigraph, f: DegreeFn, cap: Optional[int] = None) -> Fraction:
    """Optimum of the covering LP over forests of the multigraph itself (copies as distinct edges)."""
    copies = [(u, v) for _, _, u, v in G.copies()]
    if not copies:
        return Fraction(0)
    cap = settings.lp.enumeration_cap if cap is None else cap
    forests = _enumerate_forests(G.n, copies, f, cap)
    rows = _maximal(G.n, copies, f, forests)
    solution = _solve_rows(len(copies), rows, [1] * len(copies))
    return solution.objective


def blowup_scaling_check(G: Multigraph, f: DegreeFn, m_list: Sequence[int], cap: Optional[int] = None) -> ScalingReport:
    """Confirm a_f*(mG) = m * a_f*(G) exactly for each m."""
    base_value, _ = solve_fractional(G, f, cap)
    report = ScalingReport(base_value=base_value)
    for m in m_list:
        value, _ = solve_fractional(blowup(G, m), f, cap)
        ratio = value / base_value if base_value else Fraction(m if value == 0 else -1)
        report.rows.append((m, value, ratio))
        if value != m * base_value:
            raise ScalingError(f"a_f*({m}G) = {value} but {m} * a_f*(G) = {m * base_value}")
    logger.info("Blowup scaling confirmed", base_value=str(base_value), factors=list(m_list))
    return report
