"""JSON, DOT and jsonlines I/O for graphs, certificates and search checkpoints."""

import json
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import jsonlines
import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from errors import InputError
from graph_core import CertificateKind, DecompositionCertificate, DegreeFn, Digraph, Graph, Multigraph

logger = structlog.get_logger(__name__)


class EdgeModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    u: int = Field(ge=0)
    v: int = Field(ge=0)
    mult: int = Field(1, ge=1)


class DegreeFnModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    default: int
    overrides: Dict[str, int] = Field(default_factory=dict)


class GraphDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directed: bool = False
    n: int = Field(ge=0)
    edges: List[EdgeModel] = Field(default_factory=list)
    f: Optional[DegreeFnModel] = None


class AssignmentEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    u: int = Field(ge=0)
    v: int = Field(ge=0)
    classes: List[int]


class CertificateDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: CertificateKind
    k: int = Field(ge=0)
    f: Optional[DegreeFnModel] = None
    assignment: List[AssignmentEntry]


# ---------------------------------------------------------------------------
# Parsing helpers
# ---------------------------------------------------------------------------

def parse_json(text: str, source: str = "<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{source}: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e


def _validate(model, data, source: str):
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        path = ".".join(str(part) for part in first["loc"])
        raise InputError(f"{source}: invalid field '{path}': {first['msg']}", field_path=path) from e


def read_json(path: Union[str, Path]):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e}") from e
    return parse_json(text, str(path))


def fraction_to_str(value: Fraction) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"Not a rational number: {text!r}") from e


# ---------------------------------------------------------------------------
# Graphs and degree functions
# ---------------------------------------------------------------------------

def degree_fn_from_model(model: DegreeFnModel, min_allowed: int = 2) -> DegreeFn:
    try:
        overrides = {int(v): value for v, value in model.overrides.items()}
    except ValueError as e:
        raise InputError("Degree function overrides must be keyed by vertex ids", field_path="f.overrides") from e
    return DegreeFn(default=model.default, overrides=overrides, min_allowed=min_allowed)


def degree_fn_to_document(f: DegreeFn) -> dict:
    return {"default": f.default, "overrides": {str(v): value for v, value in sorted(f.overrides.items())}}


def graph_from_document(data, source: str = "<input>") -> Tuple[Graph, Optional[DegreeFn]]:
    doc = _validate(GraphDocument, data, source)
    triples = tuple((e.u, e.v, e.mult) for e in doc.edges)
    graph = Digraph(doc.n, triples) if doc.directed else Multigraph(doc.n, triples)
    f = degree_fn_from_model(doc.f) if doc.f is not None else None
    return graph, f


def load_graph(path: Union[str, Path]) -> Tuple[Graph, Optional[DegreeFn]]:
    graph, f = graph_from_document(read_json(path), str(path))
    logger.debug("Loaded graph", path=str(path), vertices=graph.n)
    return graph, f


def graph_to_document(graph: Graph, f: Optional[DegreeFn] = None) -> dict:
    directed = isinstance(graph, Digraph)
    pairs = graph.arcs if directed else graph.edges
    doc = {
        "directed": directed,
        "n": graph.n,
        "edges": [{"u": u, "v": v, "mult": m} for u, v, m in pairs],
    }
    if f is not None:
        doc["f"] = degree_fn_to_document(f)
    return doc


# ---------------------------------------------------------------------------
# Certificates and reports
# ---------------------------------------------------------------------------

def certificate_from_document(data, graph: Graph, source: str = "<certificate>") -> DecompositionCertificate:
    """Rows follow the graph's pair order; pairs the document omits stay uncovered."""
    doc = _validate(CertificateDocument, data, source)
    directed = isinstance(graph, Digraph)
    index = graph.arc_index if directed else graph.pair_index
    rows: List[List[int]] = [[] for _ in index]
    for position, entry in enumerate(doc.assignment):
        key = (entry.u, entry.v) if directed else (min(entry.u, entry.v), max(entry.u, entry.v))
        if key not in index:
            raise InputError(
                f"{source}: assignment entry ({entry.u}, {entry.v}) is not an edge of the graph",
                field_path=f"assignment.{position}",
            )
        rows[index[key]].extend(entry.classes)
    min_allowed = 1 if doc.kind == CertificateKind.DEGREE_F_SUBGRAPH else 2
    f = degree_fn_from_model(doc.f, min_allowed) if doc.f is not None else None
    return DecompositionCertificate(kind=doc.kind, k=doc.k, assignment=tuple(tuple(r) for r in rows), f=f)


def certificate_to_document(graph: Graph, cert: DecompositionCertificate) -> dict:
    pairs = graph.arcs if isinstance(graph, Digraph) else graph.edges
    doc = {"kind": cert.kind.value, "k": cert.k}
    if cert.f is not None:
        doc["f"] = degree_fn_to_document(cert.f)
    doc["assignment"] = [
        {"u": u, "v": v, "classes": list(classes)} for (u, v, _), classes in zip(pairs, cert.assignment)
    ]
    return doc


def witness_to_document(witness) -> Optional[dict]:
    if witness is None:
        return None
    return {"S": list(witness.S), "e_S": witness.e_S, "kind": witness.kind, "value": witness.value}


def lp_certificate_to_document(cert) -> dict:
    return {
        "primal": [
            {"forest": [list(e) for e in cert.forest_edges(r)], "y": fraction_to_str(y)}
            for r, y in sorted(cert.primal.items())
        ],
        "dual": [{"u": u, "v": v, "x": fraction_to_str(x)} for (u, v), x in cert.dual.items()],
        "objective_primal": fraction_to_str(cert.objective_primal),
        "objective_dual": fraction_to_str(cert.objective_dual),
    }


def dual_to_document(x: Dict[Tuple[int, int], Fraction]) -> List[dict]:
    return [{"u": u, "v": v, "x": fraction_to_str(value)} for (u, v), value in sorted(x.items())]


def orientation_to_document(result) -> dict:
    if result.feasible:
        return {
            "feasible": True,
            "arcs": [
                {"u": u, "v": v, "u_to_v": u_to_v, "v_to_u": v_to_u} for u, v, u_to_v, v_to_u in result.counts
            ],
        }
    witness = result.infeasibility
    doc = {"feasible": False, "kind": witness.kind}
    if witness.kind == "vertex-condition":
        doc.update(vertex=witness.vertex, degree=witness.e_S, g_plus_h=witness.limit)
    else:
        doc.update(S=list(witness.S), bound=witness.bound, e_S=witness.e_S, cap=witness.limit)
    return doc


def to_dot(graph: Graph, cert: Optional[DecompositionCertificate] = None, name: str = "G") -> str:
    """DOT text; with a certificate every parallel copy is drawn labelled by its class."""
    directed = isinstance(graph, Digraph)
    pairs = graph.arcs if directed else graph.edges
    connector = "->" if directed else "--"
    lines = [f"{'digraph' if directed else 'graph'} {name} {{"]
    for v in range(graph.n):
        lines.append(f"  {v};")
    for i, (u, v, m) in enumerate(pairs):
        if cert is None:
            label = f' [label="x{m}"]' if m > 1 else ""
            lines.append(f"  {u} {connector} {v}{label};")
        else:
            for c in cert.assignment[i]:
                lines.append(f'  {u} {connector} {v} [label="{c}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


@retry(
    retry=retry_if_exception_type(OSError),
    stop=stop_after_attempt(3),
    wait=wait_exponential(multiplier=1, min=1, max=4),
    reraise=True,
)
def write_text(path: Union[str, Path], text: str):
    Path(path).write_text(text, encoding="utf-8")
    logger.debug("Wrote output", path=str(path), size=len(text))


# ---------------------------------------------------------------------------
# Search checkpoints
# ---------------------------------------------------------------------------

def load_resume(path: Union[str, Path, None]) -> Dict[str, Optional[Fraction]]:
    """Processed canonical codes and their measured ratios.

    Lines holding a bare code, with no JSON record around it, are accepted too and map to
    None; the search re-measures those.
    """
    if path is None or not Path(path).exists():
        return {}
    with open(path) as fp:
        lines = [line.strip() for line in fp if line.strip()]
    processed: Dict[str, Optional[Fraction]] = {line: None for line in lines if not line.startswith("{")}
    with jsonlines.Reader([line for line in lines if line.startswith("{")]) as reader:
        for record in reader:
            processed[record["code"]] = parse_fraction(record["ratio"])
    logger.info("Loaded search checkpoint", path=str(path), processed=len(processed))
    return processed


@retry(
    retry=retry_if_exception_type(OSError),
    stop=stop_after_attempt(3),
    wait=wait_exponential(multiplier=1, min=1, max=4),
    reraise=True,
)
def append_resume(path: Union[str, Path], records: Iterable[Tuple[str, Fraction]]):
    with jsonlines.open(path, mode="a") as writer:
        writer.write_all({"code": code, "ratio": fraction_to_str(ratio)} for code, ratio in records)
