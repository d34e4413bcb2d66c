#!/usr/bin/env python3
"""Command-line entry point for arborize."""

import argparse
import logging
import math
import sys
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional

import structlog
from dotenv import load_dotenv

from config import settings
from branchings import decompose_asymptotic, decompose_large_girth, decompose_trivial, decompose_undirected
from density import (
    arboricity,
    conjecture_bound,
    degree_f_pseudoarboricity,
    directed_conjecture_bound,
    pseudoarboricity,
)
from errors import ArborizeError, BudgetExceededError, CertificateError, InputError, PreconditionError
from exact_oracle import OracleBudget, brute_a_f, brute_pa_f, brute_vec_a, brute_vec_a_f
from fractional import check_dual, solve_fractional
from gadgets import build_counterexample, build_gadget, gadget_dual, gadget_search
from graph_core import (
    CertificateKind,
    DegreeFn,
    Digraph,
    canonical_form,
    delta_f,
    directed_girth,
    girth,
    underlying_multigraph,
    verify_certificate,
)
from graph_io import (
    certificate_from_document,
    certificate_to_document,
    dual_to_document,
    dumps,
    fraction_to_str,
    graph_to_document,
    load_graph,
    lp_certificate_to_document,
    orientation_to_document,
    parse_fraction,
    read_json,
    to_dot,
    witness_to_document,
    write_text,
)
from orient import orient
from reproduce import ReproductionSuite

# Configure structured logging
_base_processors = [
    structlog.stdlib.filter_by_level,
    structlog.stdlib.add_logger_name,
    structlog.stdlib.add_log_level,
    structlog.stdlib.PositionalArgumentsFormatter(),
    structlog.processors.TimeStamper(fmt="iso"),
    structlog.processors.StackInfoRenderer(),
    structlog.processors.format_exc_info,
]

# structlog dropped UnicodeDecoder in v24+, but older versions still expose it.
_unicode_decoder = getattr(structlog.processors, "UnicodeDecoder", None)
if _unicode_decoder:
    # Older structlog exposes UnicodeDecoder as a function, newer versions as a class.
    if isinstance(_unicode_decoder, type):
        _base_processors.append(_unicode_decoder())
    else:
        _base_processors.append(_unicode_decoder)

if settings.log_format == "console":
    _base_processors.append(structlog.dev.ConsoleRenderer())
else:
    _base_processors.append(structlog.processors.JSONRenderer())

structlog.configure(
    processors=_base_processors,
    context_class=dict,
    logger_factory=structlog.stdlib.LoggerFactory(),
    cache_logger_on_first_use=True,
)

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_REFUSED = 3


@dataclass
class CommandResult:
    document: dict
    exit_code: int = EXIT_OK
    graph: object = None
    certificate: object = None
    headline: str = ""


# ---------------------------------------------------------------------------
# Flag parsing
# ---------------------------------------------------------------------------

def parse_degree_fn(text: str, min_allowed: int = 1):
    """'2' is the constant 2; '2,0=3,5=4' overrides vertices 0 and 5."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        default = int(parts[0])
        overrides = {}
        for part in parts[1:]:
            vertex, value = part.split("=")
            overrides[int(vertex)] = int(value)
    except (IndexError, ValueError) as e:
        raise InputError(f"Malformed degree function {text!r}; expected 'default[,v=value...]'") from e
    return DegreeFn(default=default, overrides=overrides, min_allowed=min_allowed)


def parse_budget(text: Optional[str]):
    """'max_edges=14,max_colors=16,time=60' over the configured oracle defaults."""
    budget = OracleBudget.from_settings()
    if not text:
        return budget
    values = {"max_edges": budget.max_edges, "max_colors": budget.max_colors, "time": budget.time_limit}
    for part in text.split(","):
        key, _, raw = part.partition("=")
        key = key.strip()
        if key not in values or not raw:
            raise InputError(f"Malformed budget entry {part!r}; keys are max_edges, max_colors, time")
        try:
            values[key] = float(raw) if key == "time" else int(raw)
        except ValueError as e:
            raise InputError(f"Budget entry {part!r} is not a number") from e
    return OracleBudget(max_edges=values["max_edges"], max_colors=values["max_colors"], time_limit=values["time"])


def _load_input(args, directed: Optional[bool] = None):
    if not args.input:
        raise InputError(f"--input is required for '{args.command}'")
    graph, f = load_graph(args.input)
    if directed is not None and isinstance(graph, Digraph) != directed:
        expected = "a directed" if directed else "an undirected"
        raise InputError(f"'{args.command}' needs {expected} graph", field_path="directed")
    return graph, f


def _degree_fn(args, graph_f, min_allowed: int = 1, required: bool = True):
    if args.f:
        return parse_degree_fn(args.f, min_allowed)
    if graph_f is not None:
        return graph_f
    if required:
        raise InputError(f"'{args.command}' needs a degree function: pass --f or add 'f' to the graph file")
    return None


def _finite(value):
    return None if value == math.inf else value


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_stats(args) -> CommandResult:
    graph, graph_f = _load_input(args)
    doc = {"n": graph.n, "total_multiplicity": graph.total_multiplicity}
    if isinstance(graph, Digraph):
        doc.update(
            arcs=len(graph.arcs),
            simple=graph.simple,
            max_indegree=max(graph.indegrees, default=0),
            max_outdegree=max(graph.outdegrees, default=0),
            directed_girth=_finite(directed_girth(graph)),
        )
        graph_for_density = underlying_multigraph(graph)
    else:
        doc.update(pairs=len(graph.edges), simple=graph.is_simple, max_degree=max(graph.degrees, default=0))
        doc["girth"] = _finite(girth(graph))
        graph_for_density = graph
    doc["arboricity"] = arboricity(graph_for_density)[0]
    doc["pseudoarboricity"] = pseudoarboricity(graph_for_density)[0]
    f = _degree_fn(args, graph_f, min_allowed=2, required=False)
    if f is not None and isinstance(graph, Digraph):
        doc["conjecture_bound"] = directed_conjecture_bound(graph, f)
    elif f is not None:
        doc["delta_f"] = delta_f(graph, f)
        doc["conjecture_bound"] = conjecture_bound(graph, f)
    if graph_for_density.n <= 8:
        n, code = canonical_form(graph_for_density)
        doc["canonical_form"] = f"{n}:" + ",".join(str(m) for m in code)
    return CommandResult(doc, graph=graph)


def cmd_arboricity(args) -> CommandResult:
    graph, graph_f = _load_input(args, directed=False)
    a, cert, witness = arboricity(graph)
    doc = {"arboricity": a, "certificate": certificate_to_document(graph, cert), "witness": witness_to_document(witness)}
    f = _degree_fn(args, graph_f, required=False)
    if f is not None:
        doc["conjecture_bound"] = conjecture_bound(graph, f)
    return CommandResult(doc, graph=graph, certificate=cert, headline=f"arboricity = {a}")


def cmd_pseudoarboricity(args) -> CommandResult:
    graph, _ = _load_input(args, directed=False)
    pa, cert, witness = pseudoarboricity(graph)
    doc = {
        "pseudoarboricity": pa,
        "certificate": certificate_to_document(graph, cert),
        "witness": witness_to_document(witness),
    }
    return CommandResult(doc, graph=graph, certificate=cert, headline=f"pseudoarboricity = {pa}")


def cmd_paf(args) -> CommandResult:
    graph, graph_f = _load_input(args, directed=False)
    f = _degree_fn(args, graph_f, min_allowed=2)
    value, cert = degree_f_pseudoarboricity(graph, f)
    doc = {"pa_f": value, "certificate": certificate_to_document(graph, cert)}
    return CommandResult(doc, graph=graph, certificate=cert, headline=f"pa_f = {value}")


def cmd_fractional(args) -> CommandResult:
    graph, graph_f = _load_input(args, directed=False)
    f = _degree_fn(args, graph_f)
    value, cert = solve_fractional(graph, f)
    doc = {"a_f*": fraction_to_str(value), "certificate": lp_certificate_to_document(cert)}
    return CommandResult(doc, graph=graph, headline=fraction_to_str(value))


def cmd_certify(args) -> CommandResult:
    graph, graph_f = _load_input(args)
    if not args.cert:
        raise InputError("--cert is required for 'certify'")
    cert = certificate_from_document(read_json(args.cert), graph, args.cert)
    if cert.kind.needs_f and cert.f is None:
        cert = replace(cert, f=_degree_fn(args, graph_f, min_allowed=1 if cert.kind == CertificateKind.DEGREE_F_SUBGRAPH else 2))
    verdict = verify_certificate(graph, cert)
    if verdict:
        return CommandResult({"accepted": True, "kind": cert.kind.value, "k": cert.k}, headline="certificate accepted")
    violation = verdict.violation
    doc = {
        "accepted": False,
        "kind": cert.kind.value,
        "violation": {
            "kind": violation.kind.value,
            "message": violation.message,
            "class_index": violation.class_index,
            "vertex": violation.vertex,
            "cycle": list(violation.cycle),
        },
    }
    return CommandResult(doc, exit_code=EXIT_NEGATIVE, headline=violation.message)


def cmd_gadget(args) -> CommandResult:
    gadget = build_gadget(args.t)
    f = DegreeFn.constant(args.t)
    value, cert = solve_fractional(gadget.graph, f)
    dual = gadget_dual(gadget)
    check = check_dual(gadget.graph, f, dual)
    doc = {
        "t": args.t,
        "graph": graph_to_document(gadget.graph),
        "roles": dict(gadget.roles),
        "labels": {label: list(pair) for label, pair in gadget.labels.items()},
        "delta_t": delta_f(gadget.graph, f),
        "arboricity": arboricity(gadget.graph)[0],
        "a_t*": fraction_to_str(value),
        "gadget_dual": dual_to_document(dual),
        "gadget_dual_objective": fraction_to_str(check.objective),
        "gadget_dual_feasible": check.feasible,
        "certificate": lp_certificate_to_document(cert),
    }
    return CommandResult(doc, graph=gadget.graph, headline=f"a_{args.t}*(gadget) = {fraction_to_str(value)}")


def cmd_counterexample(args) -> CommandResult:
    result = build_counterexample(args.t, args.m)
    verdict = "REFUTED" if result.refutes else "NOT REFUTED"
    doc = {
        "t": result.t,
        "m": result.m,
        "lower_bound": fraction_to_str(result.lower_bound),
        "dual_bound": fraction_to_str(result.dual_bound),
        "conjecture_bound": result.conjecture_bound,
        "verdict": verdict,
        "dual": dual_to_document(result.dual),
        "graph": graph_to_document(result.graph),
    }
    headline = (
        f"lower bound {fraction_to_str(result.lower_bound)} vs conjecture bound {result.conjecture_bound}: {verdict}"
    )
    return CommandResult(
        doc, exit_code=EXIT_OK if result.refutes else EXIT_NEGATIVE, graph=result.graph, headline=headline
    )


def cmd_search(args) -> CommandResult:
    restrict = _load_input(args, directed=False)[0] if args.input else None
    result = gadget_search(
        args.t,
        max_vertices=args.max_vertices,
        max_total_mult=args.max_total_mult,
        target_ratio=parse_fraction(args.target),
        restrict_to=restrict,
        resume=args.resume,
        workers=args.workers,
    )
    if result.graph is None:
        doc = {"t": args.t, "graph": None, "ratio": None, "dual": None, "meets_target": False}
        return CommandResult(doc, exit_code=EXIT_NEGATIVE, headline="no admissible multigraph found")
    doc = {
        "t": result.t,
        "graph": graph_to_document(result.graph),
        "code": result.code,
        "a_t*": fraction_to_str(result.value),
        "ratio": fraction_to_str(result.ratio),
        "dual": dual_to_document(result.certificate.dual),
        "meets_target": result.meets_target,
        "evaluated": result.evaluated,
        "resumed": result.resumed,
    }
    headline = f"best ratio {fraction_to_str(result.ratio)} (target {fraction_to_str(result.target)})"
    return CommandResult(
        doc, exit_code=EXIT_OK if result.meets_target else EXIT_NEGATIVE, graph=result.graph, headline=headline
    )


def cmd_orient(args) -> CommandResult:
    graph, _ = _load_input(args, directed=False)
    if not args.g or not args.h:
        raise InputError("'orient' needs both --g and --h")
    g = parse_degree_fn(args.g, min_allowed=0)
    h = parse_degree_fn(args.h, min_allowed=0)
    result = orient(graph, g, h)
    doc = orientation_to_document(result)
    if result.feasible:
        return CommandResult(doc, graph=result.orientation, headline="orientation found")
    return CommandResult(doc, exit_code=EXIT_NEGATIVE, headline=f"infeasible: {result.infeasibility.kind}")


def cmd_decompose(args) -> CommandResult:
    graph, graph_f = _load_input(args)
    f = _degree_fn(args, graph_f, min_allowed=2)
    stats: dict = {}
    if isinstance(graph, Digraph):
        if args.mode == "girth":
            cert = decompose_large_girth(graph, f, force=args.force, stats=stats)
        elif args.mode == "asymptotic":
            cert = decompose_asymptotic(graph, f, rng_seed=args.seed, stats=stats)
        else:
            cert = decompose_trivial(graph, f, stats=stats)
    else:
        cert = decompose_undirected(graph, f, mode=args.mode, rng_seed=args.seed, force=args.force, stats=stats)
    doc = {"classes": cert.k, "certificate": certificate_to_document(graph, cert)}
    if args.stats:
        doc["stats"] = stats
    return CommandResult(doc, graph=graph, certificate=cert, headline=f"{cert.k} classes")


def cmd_exact(args) -> CommandResult:
    directed = args.quantity in ("vec_a_f", "vec_a")
    graph, graph_f = _load_input(args, directed=directed)
    budget = parse_budget(args.budget)
    if args.quantity == "vec_a":
        result = brute_vec_a(graph, budget)
    else:
        f = _degree_fn(args, graph_f, min_allowed=2, required=False)
        oracle = {"a_f": brute_a_f, "pa_f": brute_pa_f, "vec_a_f": brute_vec_a_f}[args.quantity]
        result = oracle(graph, f, budget)
    doc = {
        "quantity": args.quantity,
        "value": result.value,
        "exact": result.exact,
        "nodes": result.nodes,
        "certificate": certificate_to_document(graph, result.certificate),
    }
    marker = "" if result.exact else " (upper bound, search timed out)"
    return CommandResult(doc, graph=graph, certificate=result.certificate, headline=f"{args.quantity} = {result.value}{marker}")


def cmd_reproduce(args) -> CommandResult:
    suite = ReproductionSuite(seed=args.seed)
    reports = suite.run_all() if args.target == "all" else [suite.run(args.target)]
    passed = all(r.passed for r in reports)
    doc = {"passed": passed, "reports": [r.to_document() for r in reports]}
    text = "".join(r.to_text() for r in reports)
    return CommandResult(doc, exit_code=EXIT_OK if passed else EXIT_NEGATIVE, headline=text.rstrip("\n"))


COMMANDS: Dict[str, Callable] = {
    "stats": cmd_stats,
    "arboricity": cmd_arboricity,
    "pseudoarboricity": cmd_pseudoarboricity,
    "paf": cmd_paf,
    "fractional": cmd_fractional,
    "certify": cmd_certify,
    "gadget": cmd_gadget,
    "counterexample": cmd_counterexample,
    "search": cmd_search,
    "orient": cmd_orient,
    "decompose": cmd_decompose,
    "exact": cmd_exact,
    "reproduce": cmd_reproduce,
}


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def render(result: CommandResult, fmt: str) -> str:
    if fmt == "json":
        return dumps(result.document)
    if fmt == "dot":
        if result.graph is None:
            raise InputError("This command has no graph to render as DOT")
        return to_dot(result.graph, result.certificate)
    lines = []
    if result.headline:
        marker = "✅" if result.exit_code == EXIT_OK else "❌"
        lines.append(f"{marker} {result.headline}")
    for key, value in result.document.items():
        if isinstance(value, (dict, list)):
            continue
        lines.append(f"   {key}: {value}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="JSON graph file")
    common.add_argument("--output", help="Write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "dot", "text"], default="json", help="Report format")
    common.add_argument("--seed", type=int, default=0, help="Seed for randomized steps (default: 0)")
    common.add_argument("--budget", help="Oracle budget, e.g. max_edges=14,max_colors=16,time=60")
    common.add_argument("--f", help="Degree function: 'default[,v=value...]'")

    parser = argparse.ArgumentParser(description="Arboricity-family invariants with checkable certificates")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    subparsers.add_parser("stats", parents=[common], help="Basic graph statistics")
    subparsers.add_parser("arboricity", parents=[common], help="Arboricity with forests and a dense set")
    subparsers.add_parser("pseudoarboricity", parents=[common], help="Pseudoarboricity with a dense set")
    subparsers.add_parser("paf", parents=[common], help="Degree-f pseudoarboricity")
    subparsers.add_parser("fractional", parents=[common], help="Fractional degree-f arboricity (exact)")

    certify_parser = subparsers.add_parser("certify", parents=[common], help="Re-check a certificate file")
    certify_parser.add_argument("--cert", help="Certificate JSON file")

    gadget_parser = subparsers.add_parser("gadget", parents=[common], help="Build the counterexample gadget for degree bound t")
    gadget_parser.add_argument("--t", type=int, required=True)

    counter_parser = subparsers.add_parser("counterexample", parents=[common], help="m-fold blowup of the gadget")
    counter_parser.add_argument("--t", type=int, required=True)
    counter_parser.add_argument("--m", type=int, required=True)

    search_parser = subparsers.add_parser("search", parents=[common], help="Search small gadgets")
    search_parser.add_argument("--t", type=int, required=True)
    search_parser.add_argument("--max-vertices", type=int, default=None)
    search_parser.add_argument("--max-total-mult", type=int, default=None)
    search_parser.add_argument("--target", default="1", help="Target ratio as p/q")
    search_parser.add_argument("--resume", help="jsonlines checkpoint file")
    search_parser.add_argument("--workers", type=int, default=None)

    orient_parser = subparsers.add_parser("orient", parents=[common], help="Orientation with in/out caps")
    orient_parser.add_argument("--g", help="Indegree cap: 'default[,v=value...]'")
    orient_parser.add_argument("--h", help="Outdegree cap: 'default[,v=value...]'")

    decompose_parser = subparsers.add_parser("decompose", parents=[common], help="Degree-f branching/forest decomposition")
    decompose_parser.add_argument("--mode", choices=["girth", "asymptotic", "trivial"], default="girth")
    decompose_parser.add_argument("--force", action="store_true", help="Run the girth pipeline below its girth bound")
    decompose_parser.add_argument("--stats", action="store_true", help="Include per-stage counts in the report")

    exact_parser = subparsers.add_parser("exact", parents=[common], help="Brute-force exact values")
    exact_parser.add_argument("--quantity", choices=["a_f", "pa_f", "vec_a_f", "vec_a"], default="a_f")

    reproduce_parser = subparsers.add_parser("reproduce", parents=[common], help="Rerun reproduction targets")
    reproduce_parser.add_argument("target", help="Target name or 'all'")
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK

    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_INPUT

    try:
        logger.info("Running command", command=args.command)
        result = COMMANDS[args.command](args)
        text = render(result, args.format)
        if args.output:
            write_text(args.output, text)
        else:
            sys.stdout.write(text)
        return result.exit_code
    except InputError as e:
        logger.error("Input error", error=str(e), field_path=e.field_path)
        print(f"❌ Input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (PreconditionError, BudgetExceededError) as e:
        logger.error("Refused", error=str(e))
        print(f"⚠️ Refused: {e}", file=sys.stderr)
        return EXIT_REFUSED
    except CertificateError as e:
        logger.error("Certificate failure", error=str(e))
        print(f"❌ Certificate failure: {e}", file=sys.stderr)
        return EXIT_NEGATIVE
    except ArborizeError as e:
        logger.error("Command failed", error=str(e))
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_NEGATIVE


def main():
    """Main entry point."""
    load_dotenv()
    logging.basicConfig(stream=sys.stderr, level=settings.log_level.upper(), format="%(message)s")
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
