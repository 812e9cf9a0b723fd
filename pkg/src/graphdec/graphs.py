"""Core graph values: simple digraphs, multigraphs with edge identities,
two-source graphs, and finite relational structures.

All values are immutable after construction; every operation here returns
a fresh value.  Vertex and edge identifiers are opaque tokens.  Identifiers
derived from other objects (marker vertices, tree nodes) are strings built
from their parents, e.g. ``"(e7,x3)"``, so decomposition outputs stay
traceable to their inputs.
"""

from __future__ import annotations

import itertools

from .errors import CapacityError, InputError, ValidationError

ISO_CAP = 25


def sort_key(x):
    """Deterministic ordering key for mixed int/str identifier sets."""
    return (x.__class__.__name__, x)


def sorted_ids(xs):
    return sorted(xs, key=sort_key)


class SimpleDigraph:
    """Loop-free simple directed graph; an undirected edge x-y is the arc
    pair x->y, y->x."""

    def __init__(self, vertices=(), edges=(), vertex_labels=None):
        self.vertices = frozenset(vertices)
        edges = frozenset(tuple(e) for e in edges)
        for u, v in edges:
            if u == v:
                raise InputError(f"loop {u}->{v} not allowed")
            if u not in self.vertices or v not in self.vertices:
                raise InputError(f"edge {u}->{v} has an endpoint outside the vertex set")
        self.edges = edges
        self.vertex_labels = dict(vertex_labels) if vertex_labels else {}
        for v in self.vertex_labels:
            if v not in self.vertices:
                raise InputError(f"label on unknown vertex {v}")

    def __eq__(self, other):
        return (
            isinstance(other, SimpleDigraph)
            and self.vertices == other.vertices
            and self.edges == other.edges
            and self.vertex_labels == other.vertex_labels
        )

    def __repr__(self):
        return f"SimpleDigraph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def has_edge(self, u, v):
        return (u, v) in self.edges

    def successors(self, v):
        return {w for (u, w) in self.edges if u == v}

    def predecessors(self, v):
        return {u for (u, w) in self.edges if w == v}

    def neighbours(self, v):
        return self.successors(v) | self.predecessors(v)

    def out_degree(self, v):
        return sum(1 for (u, _) in self.edges if u == v)

    def in_degree(self, v):
        return sum(1 for (_, w) in self.edges if w == v)

    def is_undirected(self):
        return all((v, u) in self.edges for (u, v) in self.edges)

    def undirected_pairs(self):
        """The unordered pairs {u,v} carrying at least one arc."""
        return {frozenset((u, v)) for (u, v) in self.edges}

    def relabel(self, mapping):
        return SimpleDigraph(
            {mapping.get(v, v) for v in self.vertices},
            {(mapping.get(u, u), mapping.get(v, v)) for (u, v) in self.edges},
            {mapping.get(v, v): l for v, l in self.vertex_labels.items()},
        )


def undirected_graph(vertices, pairs):
    """Simple digraph holding the symmetric closure of the given pairs."""
    edges = set()
    for u, v in pairs:
        edges.add((u, v))
        edges.add((v, u))
    return SimpleDigraph(vertices, edges)


class MultiGraph:
    """Loop-free graph with identified edges, possibly parallel.

    ``edges`` maps each edge id to its recorded (tail, head) pair; ids in
    ``undirected`` carry no direction semantics, the recorded pair is just
    storage order.
    """

    def __init__(self, vertices=(), edges=None, undirected=()):
        self.vertices = frozenset(vertices)
        self.edges = dict(edges) if edges else {}
        self.undirected = frozenset(undirected)
        for e, (u, v) in self.edges.items():
            if u == v:
                raise InputError(f"loop on edge {e} not allowed")
            if u not in self.vertices or v not in self.vertices:
                raise InputError(f"edge {e} has an endpoint outside the vertex set")
        for e in self.undirected:
            if e not in self.edges:
                raise InputError(f"undirected flag on unknown edge {e}")

    def __eq__(self, other):
        return (
            isinstance(other, MultiGraph)
            and self.vertices == other.vertices
            and self.undirected == other.undirected
            and {e: (uv if e not in self.undirected else frozenset(uv)) for e, uv in self.edges.items()}
            == {e: (uv if e not in other.undirected else frozenset(uv)) for e, uv in other.edges.items()}
        )

    def __repr__(self):
        return f"MultiGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def edge_ids(self):
        return frozenset(self.edges)

    def endpoints(self, e):
        return frozenset(self.edges[e])

    def incident(self, v):
        return {e for e, (a, b) in self.edges.items() if v in (a, b)}

    def degree(self, v):
        return len(self.incident(v))

    def other_end(self, e, v):
        a, b = self.edges[e]
        if v == a:
            return b
        if v == b:
            return a
        raise InputError(f"vertex {v} is not an end of edge {e}")

    def without_vertex(self, v):
        keep = {e: uv for e, uv in self.edges.items() if v not in uv}
        return MultiGraph(self.vertices - {v}, keep, self.undirected & set(keep))

    def underlying_undirected(self):
        return MultiGraph(self.vertices, self.edges, frozenset(self.edges))

    def relabel_vertices(self, mapping):
        return MultiGraph(
            {mapping.get(v, v) for v in self.vertices},
            {e: (mapping.get(u, u), mapping.get(v, v)) for e, (u, v) in self.edges.items()},
            self.undirected,
        )


class TwoGraph:
    """A multigraph with two distinct distinguished source vertices."""

    def __init__(self, graph: MultiGraph, s1, s2):
        if s1 == s2:
            raise InputError("the two sources must be distinct")
        if s1 not in graph.vertices or s2 not in graph.vertices:
            raise InputError("sources must be vertices of the graph")
        self.graph = graph
        self.s1 = s1
        self.s2 = s2

    def __repr__(self):
        return f"TwoGraph({self.s1}, {self.s2}; {self.graph!r})"

    def internal_vertices(self):
        return self.graph.vertices - {self.s1, self.s2}

    def swapped(self):
        return TwoGraph(self.graph, self.s2, self.s1)

    def edge_ids(self):
        return self.graph.edge_ids()


class RelStructure:
    """Finite relational structure: a domain plus named fixed-arity relations."""

    def __init__(self, domain=(), relations=None):
        self.domain = frozenset(domain)
        rels = {}
        for name, (arity, tuples) in (relations or {}).items():
            tuples = frozenset(tuple(t) for t in tuples)
            for t in tuples:
                if len(t) != arity:
                    raise InputError(f"tuple {t} in relation {name} has arity != {arity}")
                if any(x not in self.domain for x in t):
                    raise InputError(f"tuple {t} in relation {name} leaves the domain")
            rels[name] = (arity, tuples)
        self.relations = rels

    def __eq__(self, other):
        return (
            isinstance(other, RelStructure)
            and self.domain == other.domain
            and self.relations == other.relations
        )

    def __repr__(self):
        rels = ", ".join(f"{n}/{a}:{len(t)}" for n, (a, t) in sorted(self.relations.items()))
        return f"RelStructure(|D|={len(self.domain)}, {rels})"


def digraph_as_structure(g: SimpleDigraph):
    return RelStructure(g.vertices, {"edg": (2, g.edges)})


# ---------------------------------------------------------------------------
# Induced substructures


def induced_subgraph(g: SimpleDigraph, xs):
    """G[X]: the vertices of X and every edge with both ends in X."""
    xs = frozenset(xs)
    missing = xs - g.vertices
    if missing:
        raise InputError(f"unknown vertices {sorted_ids(missing)}")
    return SimpleDigraph(
        xs,
        {(u, v) for (u, v) in g.edges if u in xs and v in xs},
        {v: l for v, l in g.vertex_labels.items() if v in xs},
    )


def edge_induced(g: MultiGraph, es):
    """G[F]: the edges of F and their end vertices."""
    es = frozenset(es)
    missing = es - set(g.edges)
    if missing:
        raise InputError(f"unknown edges {sorted_ids(missing)}")
    verts = {x for e in es for x in g.edges[e]}
    return MultiGraph(verts, {e: g.edges[e] for e in es}, g.undirected & es)


# ---------------------------------------------------------------------------
# Connectivity


def _undirected_adjacency(g):
    adj = {v: set() for v in g.vertices}
    if isinstance(g, MultiGraph):
        for (u, v) in g.edges.values():
            adj[u].add(v)
            adj[v].add(u)
    else:
        for (u, v) in g.edges:
            adj[u].add(v)
            adj[v].add(u)
    return adj


def is_connected(g):
    """Undirected connectivity; every edge counts as symmetric."""
    if not g.vertices:
        return True
    adj = _undirected_adjacency(g)
    start = next(iter(g.vertices))
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(g.vertices)


def is_strongly_connected(g):
    """Directed reachability in both directions between all vertex pairs."""
    if not g.vertices:
        return True
    succ = {v: set() for v in g.vertices}
    pred = {v: set() for v in g.vertices}
    arcs = g.edges.values() if isinstance(g, MultiGraph) else g.edges
    if isinstance(g, MultiGraph):
        arcs = list(g.edges.values()) + [(v, u) for e, (u, v) in g.edges.items() if e in g.undirected]
    for (u, v) in arcs:
        succ[u].add(v)
        pred[v].add(u)
    start = next(iter(g.vertices))

    def reach(adj):
        seen = {start}
        stack = [start]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    return len(reach(succ)) == len(g.vertices) and len(reach(pred)) == len(g.vertices)


def is_two_connected(g: MultiGraph):
    """Connected and still connected after deleting any one vertex.

    A graph with one edge, or with several parallel edges on two vertices,
    counts as 2-connected.  A graph with no edges does not.
    """
    if not g.edges:
        return False
    if not is_connected(g):
        return False
    if any(g.degree(v) == 0 for v in g.vertices):
        return False
    for v in g.vertices:
        if not is_connected(g.without_vertex(v)):
            return False
    return True


# ---------------------------------------------------------------------------
# Isomorphism (plain backtracking with degree pruning; desk scale)


def _pair_colour(g: MultiGraph, u, v):
    d_uv = d_vu = und = 0
    for e, (a, b) in g.edges.items():
        if {a, b} != {u, v}:
            continue
        if e in g.undirected:
            und += 1
        elif (a, b) == (u, v):
            d_uv += 1
        else:
            d_vu += 1
    return (d_uv, d_vu, und)


def _backtrack_iso(vs1, vs2, fixed, degree_sig, compatible):
    """Generic vertex-bijection search. ``degree_sig(v, side)`` prunes,
    ``compatible(partial, v, w)`` checks v->w against mapped vertices."""
    if len(vs1) != len(vs2):
        return None
    for v in fixed:
        if v not in vs1 or v not in vs2:
            return None
    sig2 = {}
    for w in vs2:
        sig2.setdefault(degree_sig(w, 1), []).append(w)
    order = sorted(vs1, key=lambda v: (len(sig2.get(degree_sig(v, 0), [])), sort_key(v)))
    mapping = {}
    used = set()

    def extend(i):
        if i == len(order):
            return True
        v = order[i]
        cands = [v] if v in fixed else sig2.get(degree_sig(v, 0), [])
        for w in cands:
            if w in used:
                continue
            if w in fixed and w != v:
                continue
            if compatible(mapping, v, w):
                mapping[v] = w
                used.add(w)
                if extend(i + 1):
                    return True
                del mapping[v]
                used.remove(w)
        return False

    return dict(mapping) if extend(0) else None


def digraph_isomorphism(g: SimpleDigraph, h: SimpleDigraph, fixed=(), cap=ISO_CAP):
    """A structure-preserving vertex bijection fixing ``fixed``, or None."""
    if len(g.vertices) > cap or len(h.vertices) > cap:
        raise CapacityError("digraph isomorphism", max(len(g.vertices), len(h.vertices)), cap)
    if len(g.edges) != len(h.edges):
        return None

    def degree_sig(v, side):
        gr = (g, h)[side]
        return (gr.out_degree(v), gr.in_degree(v), gr.vertex_labels.get(v))

    def compatible(partial, v, w):
        for x, y in partial.items():
            if ((v, x) in g.edges) != ((w, y) in h.edges):
                return False
            if ((x, v) in g.edges) != ((y, w) in h.edges):
                return False
        return True

    return _backtrack_iso(g.vertices, h.vertices, frozenset(fixed), degree_sig, compatible)


def multigraph_isomorphism(g: MultiGraph, h: MultiGraph, fixed=(), cap=ISO_CAP):
    """Vertex bijection under which parallel-class counts and directions
    agree between every vertex pair (edge ids are not matched)."""
    if len(g.vertices) > cap or len(h.vertices) > cap:
        raise CapacityError("multigraph isomorphism", max(len(g.vertices), len(h.vertices)), cap)
    if len(g.edges) != len(h.edges) or len(g.undirected) != len(h.undirected):
        return None

    def degree_sig(v, side):
        gr = (g, h)[side]
        colours = []
        for w in gr.vertices:
            if w == v:
                continue
            c = _pair_colour(gr, v, w)
            if c != (0, 0, 0):
                colours.append(c)
        return (len(colours), tuple(sorted(colours)))

    def compatible(partial, v, w):
        return all(_pair_colour(g, v, x) == _pair_colour(h, w, y) for x, y in partial.items())

    return _backtrack_iso(g.vertices, h.vertices, frozenset(fixed), degree_sig, compatible)


def edge_identified_isomorphism(g: MultiGraph, h: MultiGraph, fixed_pairs=()):
    """Vertex bijection between multigraphs over the same edge-id set that
    maps every edge of ``g`` onto the edge of ``h`` with the same id.

    Directed edges must map tail to tail; undirected edges may flip.  The
    directedness of each id must agree.  Returns the mapping or None.
    """
    if g.edge_ids() != h.edge_ids() or g.undirected != h.undirected:
        return None
    if len(g.vertices) != len(h.vertices):
        return None
    mapping = dict(fixed_pairs)
    if len(set(mapping.values())) != len(mapping):
        return None

    def assign(a, b):
        if a in mapping:
            return mapping[a] == b
        if b in mapping.values():
            return False
        mapping[a] = b
        return True

    flexible = []
    for e in sorted_ids(g.edges):
        gu, gv = g.edges[e]
        hu, hv = h.edges[e]
        if e in g.undirected:
            flexible.append((e, (gu, gv), (hu, hv)))
        else:
            if not (assign(gu, hu) and assign(gv, hv)):
                return None

    def place(i):
        if i == len(flexible):
            free_g = sorted_ids(g.vertices - set(mapping))
            free_h = sorted_ids(h.vertices - set(mapping.values()))
            for a, b in zip(free_g, free_h):
                mapping[a] = b
            return True
        _, (gu, gv), (hu, hv) = flexible[i]
        for hu2, hv2 in ((hu, hv), (hv, hu)):
            saved = dict(mapping)
            if assign(gu, hu2) and assign(gv, hv2) and place(i + 1):
                return True
            mapping.clear()
            mapping.update(saved)
        return False

    return dict(mapping) if place(0) else None


def two_graphs_equal(a: TwoGraph, b: TwoGraph):
    """Same edges with the same ids and incidences up to vertex renaming,
    with sources corresponding in order."""
    return edge_identified_isomorphism(a.graph, b.graph, [(a.s1, b.s1), (a.s2, b.s2)]) is not None


def canonical_undirected(g: MultiGraph):
    """Canonical form of the underlying undirected multigraph with edge
    identities kept: the multiset of per-vertex incident-edge-id sets.

    Two multigraphs have equal canonical forms exactly when some vertex
    bijection matches every edge id's endpoints (directions ignored).
    """
    return tuple(sorted(tuple(sorted_ids(g.incident(v))) for v in g.vertices if g.degree(v) > 0))


def rel_structure_isomorphism(s: RelStructure, t: RelStructure, cap=10):
    """Brute-force isomorphism of relational structures (small domains)."""
    if len(s.domain) > cap or len(t.domain) > cap:
        raise CapacityError("structure isomorphism", max(len(s.domain), len(t.domain)), cap)
    if len(s.domain) != len(t.domain):
        return None
    if set(s.relations) != set(t.relations):
        return None
    for name, (ar, tup) in s.relations.items():
        ar2, tup2 = t.relations[name]
        if ar != ar2 or len(tup) != len(tup2):
            return None

    def profile(struct, x):
        out = []
        for name in sorted(struct.relations):
            _, tuples = struct.relations[name]
            out.append(sum(1 for tu in tuples for i, y in enumerate(tu) if y == x))
        return tuple(out)

    sp = {x: profile(s, x) for x in s.domain}
    tp = {x: profile(t, x) for x in t.domain}
    if sorted(sp.values()) != sorted(tp.values()):
        return None
    sd = sorted_ids(s.domain)
    for perm in itertools.permutations(sorted_ids(t.domain)):
        m = dict(zip(sd, perm))
        if any(sp[x] != tp[m[x]] for x in sd):
            continue
        ok = True
        for name, (ar, tuples) in s.relations.items():
            _, tuples2 = t.relations[name]
            if {tuple(m[x] for x in tu) for tu in tuples} != tuples2:
                ok = False
                break
        if ok:
            return m
    return None


def validate_no_isolated(g: MultiGraph, context):
    isolated = [v for v in g.vertices if g.degree(v) == 0]
    if isolated:
        raise ValidationError(f"{context}: isolated vertices {sorted_ids(isolated)}")
