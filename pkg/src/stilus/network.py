"""Weighted author-relationship graphs built from rescaled centroid
similarities, with DOT / GraphML / JSON exports.

Nodes are authors; an edge's weight is the min-max rescaled cosine
similarity of the two authors' cluster centroids. Self-loops are never
emitted. JSON is the canonical round-trip format.
"""

import json
import re
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .errors import FormatError, LoadError, ValidationError
from .similarity import SimilarityMatrix, similarity_matrix

__all__ = ["AuthorGraph", "author_similarity", "build_graph", "export_graph", "load_graph_json"]

GRAPH_FORMATS = ("dot", "graphml", "json")


@dataclass(eq=False)
class AuthorGraph:
    """Undirected weighted graph over author nodes.

    edges hold (i, j, weight) with i < j, ordered lexicographically;
    connectivity is the full symmetric weight matrix, zero where no edge.
    """

    nodes: tuple[str, ...]
    edges: tuple[tuple[int, int, float], ...]
    connectivity: np.ndarray

    def __post_init__(self):
        self.nodes = tuple(str(n) for n in self.nodes)
        self.connectivity = np.asarray(self.connectivity, dtype=np.float64)
        n = len(self.nodes)
        if self.connectivity.shape != (n, n):
            raise ValidationError("connectivity shape must match node count")

    def __eq__(self, other) -> bool:
        if not isinstance(other, AuthorGraph):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.edges == other.edges
            and np.array_equal(self.connectivity, other.connectivity)
        )


def author_similarity(centroids, names: list[str]) -> SimilarityMatrix:
    """Pairwise cosine similarity over author centroids."""
    data = np.asarray(centroids, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 2:
        raise ValidationError("need at least 2 centroids for an author similarity matrix")
    return similarity_matrix(data, names)


def build_graph(matrix: SimilarityMatrix, threshold: float | None = None) -> AuthorGraph:
    """Turn a rescaled similarity matrix into a graph.

    Pairs with zero weight never become edges; with a threshold t, a pair
    needs weight >= t (inclusive, so the maximal pair survives t = 1.0).
    The input must already be min-max rescaled onto [0, 1].
    """
    values = matrix.values
    n = matrix.size
    mask = ~np.eye(n, dtype=bool)
    if n > 1 and (values[mask].min() < 0.0 or values[mask].max() > 1.0):
        raise ValidationError("matrix is not rescaled to [0, 1]; run min-max rescaling first")
    if threshold is not None and not 0.0 <= threshold <= 1.0:
        raise ValidationError(f"threshold must lie in [0, 1], got {threshold}")

    connectivity = np.zeros((n, n), dtype=np.float64)
    edges: list[tuple[int, int, float]] = []
    for i in range(n):
        for j in range(i + 1, n):
            weight = float(values[i, j])
            if weight <= 0.0:
                continue
            if threshold is not None and weight < threshold:
                continue
            edges.append((i, j, weight))
            connectivity[i, j] = weight
            connectivity[j, i] = weight
    return AuthorGraph(nodes=tuple(matrix.labels), edges=tuple(edges), connectivity=connectivity)


def _dot_ids(names: tuple[str, ...]) -> list[str]:
    """Sanitized, collision-free DOT identifiers."""
    ids: list[str] = []
    seen: set[str] = set()
    for pos, name in enumerate(names):
        candidate = re.sub(r"[^0-9A-Za-z_]", "_", name) or "_"
        if candidate[0].isdigit():
            candidate = "_" + candidate
        if candidate in seen:
            candidate = f"{candidate}_{pos}"
        seen.add(candidate)
        ids.append(candidate)
    return ids


def _to_dot(graph: AuthorGraph) -> str:
    ids = _dot_ids(graph.nodes)
    lines = ["graph authors {"]
    for node_id, name in zip(ids, graph.nodes):
        if node_id == name:
            lines.append(f"  {node_id};")
        else:
            label = name.replace("\\", "\\\\").replace('"', '\\"')
            lines.append(f'  {node_id} [label="{label}"];')
    for i, j, weight in graph.edges:
        lines.append(f"  {ids[i]} -- {ids[j]} [weight={weight!r}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _to_graphml(graph: AuthorGraph) -> str:
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        '  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>',
        '  <graph id="authors" edgedefault="undirected">',
    ]
    for name in graph.nodes:
        lines.append(f"    <node id={quoteattr(name)}/>")
    for i, j, weight in graph.edges:
        lines.append(
            f"    <edge source={quoteattr(graph.nodes[i])} target={quoteattr(graph.nodes[j])}>"
            f"<data key=\"weight\">{escape(repr(weight))}</data></edge>"
        )
    lines.append("  </graph>")
    lines.append("</graphml>")
    return "\n".join(lines) + "\n"


def _to_json(graph: AuthorGraph) -> str:
    payload = {
        "nodes": list(graph.nodes),
        "edges": [
            {"source": graph.nodes[i], "target": graph.nodes[j], "weight": weight}
            for i, j, weight in graph.edges
        ],
    }
    return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def export_graph(graph: AuthorGraph, format: str, path: str | Path) -> None:
    """Write the graph in one of dot | graphml | json."""
    if format not in GRAPH_FORMATS:
        raise ValidationError(f"unknown graph format {format!r}; expected one of {GRAPH_FORMATS}")
    if format == "dot":
        text = _to_dot(graph)
    elif format == "graphml":
        text = _to_graphml(graph)
    else:
        text = _to_json(graph)
    try:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise LoadError(f"cannot write graph to {path}: {exc}") from exc


def load_graph_json(path: str | Path) -> AuthorGraph:
    """Rebuild a graph from its JSON export (the canonical round-trip)."""
    path = Path(path)
    if not path.is_file():
        raise LoadError(f"graph file not found: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or "nodes" not in payload or "edges" not in payload:
        raise FormatError(f"{path}: graph JSON needs 'nodes' and 'edges'")

    nodes = tuple(str(n) for n in payload["nodes"])
    index = {name: i for i, name in enumerate(nodes)}
    if len(index) != len(nodes):
        raise FormatError(f"{path}: duplicate node names")
    n = len(nodes)
    connectivity = np.zeros((n, n), dtype=np.float64)
    edges: list[tuple[int, int, float]] = []
    for entry in payload["edges"]:
        try:
            i = index[entry["source"]]
            j = index[entry["target"]]
            weight = float(entry["weight"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"{path}: malformed edge {entry!r}") from exc
        if i == j:
            raise FormatError(f"{path}: self-loop on {entry['source']!r}")
        if i > j:
            i, j = j, i
        edges.append((i, j, weight))
        connectivity[i, j] = weight
        connectivity[j, i] = weight
    edges.sort(key=lambda e: (e[0], e[1]))
    return AuthorGraph(nodes=nodes, edges=tuple(edges), connectivity=connectivity)
