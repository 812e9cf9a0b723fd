"""Text, JSON and DOT serialization for the graph types.

Edge-list text format, one record per line::

    # comment
    vertex <id>
    edge <id> <tail> <head> [directed|undirected]

Identifiers are whitespace-free tokens.  Records may appear in any order;
endpoints of edges are added to the vertex set implicitly.  ``directed``
is the default when the flag is omitted.
"""

from __future__ import annotations

import json

from .errors import InputError
from .graphs import MultiGraph, SimpleDigraph, sorted_ids


def parse_edge_list(text) -> MultiGraph:
    vertices = set()
    edges = {}
    undirected = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "vertex" and len(parts) == 2:
            vertices.add(parts[1])
        elif parts[0] == "edge" and len(parts) in (4, 5):
            _, eid, tail, head = parts[:4]
            if eid in edges:
                raise InputError(f"line {lineno}: duplicate edge id {eid}")
            flag = parts[4] if len(parts) == 5 else "directed"
            if flag not in ("directed", "undirected"):
                raise InputError(f"line {lineno}: bad direction flag {flag!r}")
            edges[eid] = (tail, head)
            if flag == "undirected":
                undirected.add(eid)
            vertices.update((tail, head))
        else:
            raise InputError(f"line {lineno}: unrecognized record {line!r}")
    return MultiGraph(vertices, edges, undirected)


def format_edge_list(g: MultiGraph) -> str:
    lines = []
    touched = {x for uv in g.edges.values() for x in uv}
    for v in sorted_ids(g.vertices - touched):
        lines.append(f"vertex {v}")
    for e in sorted_ids(g.edges):
        u, v = g.edges[e]
        flag = "undirected" if e in g.undirected else "directed"
        lines.append(f"edge {e} {u} {v} {flag}")
    return "\n".join(lines) + "\n"


def multigraph_to_digraph(g: MultiGraph) -> SimpleDigraph:
    """Forget edge identities; undirected edges become opposite arc pairs."""
    arcs = set()
    for e, (u, v) in g.edges.items():
        arcs.add((u, v))
        if e in g.undirected:
            arcs.add((v, u))
    return SimpleDigraph(g.vertices, arcs)


def digraph_to_multigraph(g: SimpleDigraph) -> MultiGraph:
    """Name each arc; an arc pair x->y, y->x becomes one undirected edge."""
    edges = {}
    undirected = set()
    done = set()
    for (u, v) in sorted(g.edges, key=lambda p: (str(p[0]), str(p[1]))):
        if (u, v) in done:
            continue
        eid = f"{u}~{v}"
        if (v, u) in g.edges:
            edges[eid] = (u, v)
            undirected.add(eid)
            done.add((v, u))
        else:
            edges[eid] = (u, v)
        done.add((u, v))
    return MultiGraph(g.vertices, edges, undirected)


# ---------------------------------------------------------------------------
# JSON


def digraph_to_json(g: SimpleDigraph):
    doc = {
        "type": "simple_digraph",
        "vertices": sorted_ids(g.vertices),
        "edges": sorted([list(e) for e in g.edges]),
    }
    if g.vertex_labels:
        doc["vertex_labels"] = {str(v): g.vertex_labels[v] for v in sorted_ids(g.vertex_labels)}
    return doc


def digraph_from_json(doc) -> SimpleDigraph:
    if doc.get("type") != "simple_digraph":
        raise InputError("not a simple_digraph document")
    return SimpleDigraph(
        doc["vertices"],
        {tuple(e) for e in doc["edges"]},
        doc.get("vertex_labels"),
    )


def multigraph_to_json(g: MultiGraph):
    return {
        "type": "multigraph",
        "vertices": sorted_ids(g.vertices),
        "edges": {str(e): list(g.edges[e]) for e in sorted_ids(g.edges)},
        "undirected": sorted_ids(g.undirected),
    }


def multigraph_from_json(doc) -> MultiGraph:
    if doc.get("type") != "multigraph":
        raise InputError("not a multigraph document")
    return MultiGraph(
        doc["vertices"],
        {e: tuple(uv) for e, uv in doc["edges"].items()},
        doc["undirected"],
    )


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# DOT


def _dot_id(x):
    return '"%s"' % str(x).replace('"', '\\"')


def digraph_to_dot(g: SimpleDigraph, name="G") -> str:
    lines = [f"digraph {name} {{"]
    for v in sorted_ids(g.vertices):
        label = g.vertex_labels.get(v)
        attr = f' [label="{v}:{label}"]' if label is not None else ""
        lines.append(f"  {_dot_id(v)}{attr};")
    undirected_done = set()
    for (u, v) in sorted(g.edges, key=lambda p: (str(p[0]), str(p[1]))):
        if (v, u) in g.edges:
            if (v, u) in undirected_done:
                continue
            undirected_done.add((u, v))
            lines.append(f"  {_dot_id(u)} -> {_dot_id(v)} [dir=none];")
        else:
            lines.append(f"  {_dot_id(u)} -> {_dot_id(v)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def multigraph_to_dot(g: MultiGraph, name="G") -> str:
    lines = [f"digraph {name} {{"]
    for v in sorted_ids(g.vertices):
        lines.append(f"  {_dot_id(v)};")
    for e in sorted_ids(g.edges):
        u, v = g.edges[e]
        style = " dir=none" if e in g.undirected else ""
        lines.append(f'  {_dot_id(u)} -> {_dot_id(v)} [label="{e}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
