"""Decomposition of 2-connected multigraphs into bonds, cycles and
3-connected pieces, by iterated good 2-separations with marker edges.
"""

from __future__ import annotations

import itertools
import random

from .errors import CapacityError, InputError, PreconditionError, ValidationError
from .graphs import MultiGraph, edge_induced, is_two_connected, sorted_ids
from .bipartitions import BipartitionFamily, bip_overlap

TWO_SEP_CAP = 14

MARKER_PREFIX = "!m"


def is_marker(eid) -> bool:
    return isinstance(eid, str) and eid.startswith(MARKER_PREFIX)


def two_separations(g: MultiGraph, cap=TWO_SEP_CAP) -> BipartitionFamily:
    """All edge bipartitions with both blocks of size at least two and
    exactly two vertices incident to both blocks."""
    eids = sorted_ids(g.edges)
    m = len(eids)
    if m > cap:
        raise CapacityError("2-separation enumeration", m, cap)
    members = []
    for mask in range(1, 1 << (m - 1)) if m else []:
        a = frozenset(eids[i] for i in range(m) if mask >> i & 1)
        b = frozenset(eids) - a
        if len(a) < 2 or len(b) < 2:
            continue
        va = {x for e in a for x in g.edges[e]}
        vb = {x for e in b for x in g.edges[e]}
        if len(va & vb) == 2:
            members.append((a, b))
    return BipartitionFamily(frozenset(eids), members)


def _boundary(g: MultiGraph, block):
    va = {x for e in block for x in g.edges[e]}
    vb = {x for e in g.edges if e not in block for x in g.edges[e]}
    return sorted_ids(va & vb)


def _good_separations(g: MultiGraph, cap):
    seps = list(two_separations(g, cap).members)
    return [p for p in seps if not any(bip_overlap(p, q) for q in seps if q != p)]


class TutteDecomposition:
    """Components tied together by matched marker-edge pairs.

    Matched markers share their endpoint pair; gluing all of them and
    deleting the markers restores the decomposed graph.  Component kinds:
    a bond has exactly two vertices, a cycle is a cycle on at least three,
    and the rest admit no 2-separation on at least four vertices.
    """

    def __init__(self, components, matching, kind):
        self.components = tuple(components)
        self.matching = frozenset(frozenset(p) for p in matching)
        self.kind = dict(kind)
        self._validate()

    def _component_of_marker(self):
        where = {}
        for i, comp in enumerate(self.components):
            for e in comp.edges:
                if is_marker(e):
                    if e in where:
                        raise ValidationError(f"marker {e} appears in two components")
                    where[e] = i
        return where

    def _validate(self):
        if set(self.kind) != set(range(len(self.components))):
            raise ValidationError("every component needs a kind")
        where = self._component_of_marker()
        matched = set()
        adj = {i: set() for i in range(len(self.components))}
        links = []
        for pair in self.matching:
            if len(pair) != 2:
                raise ValidationError("marker matching must pair distinct markers")
            m1, m2 = tuple(pair)
            if m1 not in where or m2 not in where:
                raise ValidationError(f"matched marker missing from components: {m1}, {m2}")
            c1, c2 = where[m1], where[m2]
            if c1 == c2:
                raise ValidationError(f"markers {m1}, {m2} matched within one component")
            e1 = frozenset(self.components[c1].edges[m1])
            e2 = frozenset(self.components[c2].edges[m2])
            if e1 != e2:
                raise ValidationError(f"matched markers {m1}, {m2} disagree on endpoints")
            matched.update((m1, m2))
            adj[c1].add(c2)
            adj[c2].add(c1)
            links.append((c1, c2))
        if matched != set(where):
            raise ValidationError("every marker must be matched exactly once")
        n = len(self.components)
        if n:
            if len(links) != n - 1:
                raise ValidationError("matched markers must tie the components into a tree")
            seen = {0}
            stack = [0]
            while stack:
                for w in adj[stack.pop()]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            if len(seen) != n:
                raise ValidationError("component link structure is disconnected")
        for c1, c2 in links:
            k1, k2 = self.kind[c1], self.kind[c2]
            if k1 == k2 == "bond":
                raise ValidationError("two bond components share a marker")
            if k1 == k2 == "cycle":
                raise ValidationError("two cycle components share a marker")

    def real_edge_partition(self):
        return {
            i: frozenset(e for e in comp.edges if not is_marker(e))
            for i, comp in enumerate(self.components)
        }

    def signature(self):
        """Canonical description: kinds with their real edge sets plus the
        adjacency between real edge sets."""
        parts = self.real_edge_partition()
        where = self._component_of_marker()
        links = set()
        for pair in self.matching:
            m1, m2 = tuple(pair)
            a = tuple(sorted_ids(parts[where[m1]]))
            b = tuple(sorted_ids(parts[where[m2]]))
            links.add(tuple(sorted((a, b))))
        blocks = sorted((self.kind[i], tuple(sorted_ids(parts[i]))) for i in parts)
        return (tuple(blocks), tuple(sorted(links)))

    def to_json(self):
        return {
            "type": "tutte_decomposition",
            "components": [
                {
                    "kind": self.kind[i],
                    "vertices": sorted_ids(c.vertices),
                    "edges": {
                        str(e): {"ends": sorted_ids(c.edges[e]), "marker": is_marker(e)}
                        for e in sorted_ids(c.edges)
                    },
                }
                for i, c in enumerate(self.components)
            ],
            "matching": sorted(sorted_ids(p) for p in self.matching),
        }

    def to_dot(self):
        lines = ["graph tutte {"]
        for i, c in enumerate(self.components):
            lines.append(f'  c{i} [label="{self.kind[i]}: {len(c.edges)} edges"];')
        where = self._component_of_marker()
        for pair in sorted(sorted_ids(p) for p in self.matching):
            m1, m2 = pair
            lines.append(f"  c{where[m1]} -- c{where[m2]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def classify_tutte_component(c: MultiGraph, cap=TWO_SEP_CAP) -> str:
    if len(c.vertices) == 2:
        return "bond"
    if (
        len(c.vertices) >= 3
        and len(c.edges) == len(c.vertices)
        and all(c.degree(v) == 2 for v in c.vertices)
    ):
        return "cycle"
    if len(c.vertices) >= 4 and not two_separations(c, cap).members:
        return "three_connected"
    raise ValidationError("component is neither a bond, a cycle, nor 3-connected")


def tutte_decompose(g: MultiGraph, cap=TWO_SEP_CAP, rng: random.Random = None) -> TutteDecomposition:
    """Split along good 2-separations until none remains.  The result does
    not depend on the choices made, so ``rng`` only shuffles the order in
    which equally valid separations are applied."""
    if not is_two_connected(g):
        raise PreconditionError("the decomposition needs a 2-connected graph")
    if len(g.edges) > cap:
        raise CapacityError("tutte decomposition", len(g.edges), cap)
    if any(is_marker(e) for e in g.edges):
        raise InputError(f"edge ids starting with {MARKER_PREFIX} are reserved for markers")
    comps = [g.underlying_undirected()]
    matching = []
    counter = itertools.count()
    while True:
        progress = False
        for i, comp in enumerate(comps):
            goods = _good_separations(comp, cap)
            if not goods:
                continue
            pick = rng.choice(goods) if rng is not None else goods[0]
            a, b = sorted(pick, key=lambda blk: sorted_ids(blk))
            u, v = _boundary(comp, a)
            k = next(counter)
            m1, m2 = f"{MARKER_PREFIX}{k}.1", f"{MARKER_PREFIX}{k}.2"
            side_a = edge_induced(comp, a)
            side_b = edge_induced(comp, b)
            comp_a = MultiGraph(
                side_a.vertices, {**side_a.edges, m1: (u, v)}, set(side_a.undirected) | {m1}
            )
            comp_b = MultiGraph(
                side_b.vertices, {**side_b.edges, m2: (u, v)}, set(side_b.undirected) | {m2}
            )
            comps[i : i + 1] = [comp_a, comp_b]
            matching.append((m1, m2))
            progress = True
            break
        if not progress:
            break
    kinds = {i: classify_tutte_component(c, cap) for i, c in enumerate(comps)}
    for c in comps:
        if not is_two_connected(c):
            raise ValidationError("a component came out not 2-connected")
    return TutteDecomposition(comps, matching, kinds)


def tutte_eval(d: TutteDecomposition) -> MultiGraph:
    """Glue the matched markers back and delete them."""
    edges = {}
    undirected = set()
    for comp in d.components:
        for e, uv in comp.edges.items():
            if is_marker(e):
                continue
            if e in edges:
                raise ValidationError(f"real edge {e} appears in two components")
            edges[e] = uv
            if e in comp.undirected:
                undirected.add(e)
    verts = {x for uv in edges.values() for x in uv}
    return MultiGraph(verts, edges, undirected)
