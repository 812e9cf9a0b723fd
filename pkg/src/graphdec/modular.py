"""Modular decomposition of simple digraphs: module testing and enumeration,
the typed tree of strong modules, vertex substitution, and the graph
representation of the decomposition with exact reconstruction.

Module enumeration is brute force over vertex subsets behind a configurable
cap; it doubles as the oracle for everything built on top of it.
"""

from __future__ import annotations

import itertools

from .errors import CapacityError, ClassificationError, InputError, PreconditionError, ValidationError
from .graphs import SimpleDigraph, sorted_ids
from .partitive import (
    DecompTree,
    NodeKind,
    SetFamily,
    classify_node,
    plus_closure,
    strong_members,
    tree_from_laminar,
)

MODULES_CAP = 16


def is_module(g: SimpleDigraph, m) -> bool:
    """Every vertex outside m relates to all of m uniformly, both directions."""
    m = frozenset(m)
    if not m <= g.vertices:
        raise InputError("module candidate contains unknown vertices")
    size = len(m)
    for z in g.vertices - m:
        outs = sum(1 for x in m if (x, z) in g.edges)
        if 0 < outs < size:
            return False
        ins = sum(1 for x in m if (z, x) in g.edges)
        if 0 < ins < size:
            return False
    return True


def all_modules(g: SimpleDigraph, cap=MODULES_CAP) -> SetFamily:
    """All nonempty modules, by exhaustive subset scan."""
    n = len(g.vertices)
    if n > cap:
        raise CapacityError("module enumeration", n, cap)
    verts = sorted_ids(g.vertices)
    members = []
    for mask in range(1, 1 << n):
        m = frozenset(verts[i] for i in range(n) if mask >> i & 1)
        if is_module(g, m):
            members.append(m)
    return SetFamily(g.vertices, members)


def substitute(g: SimpleDigraph, u, h: SimpleDigraph) -> SimpleDigraph:
    """Replace vertex u of g by the whole graph h; outside vertices see all
    of h the way they saw u.  h is renamed apart from g when they collide."""
    if u not in g.vertices:
        raise InputError(f"vertex {u} not in the host graph")
    shared = (g.vertices - {u}) & h.vertices
    if shared:
        k = 0
        while True:
            ren = {v: f"{v}#{k}" for v in h.vertices}
            if not (set(ren.values()) & (g.vertices - {u})):
                break
            k += 1
        h = h.relabel(ren)
    verts = (g.vertices - {u}) | h.vertices
    edges = set(h.edges)
    for (x, y) in g.edges:
        if u not in (x, y):
            edges.add((x, y))
    for x in g.vertices - {u}:
        if (x, u) in g.edges:
            edges.update((x, y) for y in h.vertices)
        if (u, x) in g.edges:
            edges.update((y, x) for y in h.vertices)
    labels = {v: l for v, l in g.vertex_labels.items() if v != u}
    labels.update(h.vertex_labels)
    return SimpleDigraph(verts, edges, labels)


class ModularTree:
    """Tree of the strong modules with per-node operation data.

    Complete nodes carry a tag: "union" when no edges run between the sons,
    "join" when all edges run both ways.  Linear nodes carry the son order
    giving a one-way complete join from earlier to later sons.  Prime nodes
    carry a quotient digraph on their son node ids.
    """

    def __init__(self, tree: DecompTree, complete_tag, quotient):
        self.tree = tree
        self.complete_tag = dict(complete_tag)
        self.quotient = dict(quotient)
        self._check()

    def _check(self):
        t = self.tree
        for n in t.nodes:
            kind = t.kind.get(n)
            if kind is None:
                raise ValidationError(f"node {n} lacks a kind")
            if kind.name == "complete":
                tag = self.complete_tag.get(n)
                if tag not in ("union", "join"):
                    raise ValidationError(f"complete node {n} lacks a union/join tag")
                for s in t.children(n):
                    if t.kind[s].name == "complete" and self.complete_tag[s] == tag:
                        raise ValidationError(f"{tag} node {n} has a {tag} son")
            elif kind.name == "linear":
                for s in t.children(n):
                    if t.kind[s].name == "linear":
                        raise ValidationError(f"linear node {n} has a linear son")
            elif kind.name == "prime":
                q = self.quotient.get(n)
                if q is None or len(q.vertices) < 3:
                    raise ValidationError(f"prime node {n} needs a quotient on >= 3 sons")

    def strong_module_sets(self):
        return {frozenset(self.tree.subtree_union(n)) for n in self.tree.nodes}


def representative(tree: DecompTree, node):
    """Deterministic representative vertex of a node: its minimal element."""
    return sorted_ids(tree.subtree_union(node))[0]


def md_tree(g: SimpleDigraph, cap=MODULES_CAP) -> ModularTree:
    """The modular decomposition of g, with every node typed."""
    if not g.vertices:
        raise PreconditionError("modular decomposition needs a nonempty vertex set")
    family = plus_closure(all_modules(g, cap))
    tree = tree_from_laminar(strong_members(family))
    kinds = {}
    son_order = {}
    complete_tag = {}
    quotient = {}
    for node in tree.nodes:
        kind = classify_node(family, tree, node)
        if kind.name == "leaf":
            kinds[node] = kind
            continue
        sons = tree.children(node)
        reps = [representative(tree, s) for s in sons]
        if kind.name == "complete":
            r1, r2 = reps[0], reps[1]
            fwd, bwd = (r1, r2) in g.edges, (r2, r1) in g.edges
            if fwd and bwd:
                complete_tag[node] = "join"
            elif not fwd and not bwd:
                complete_tag[node] = "union"
            elif len(sons) == 2:
                # with two sons the family cannot separate a one-way join
                # from the symmetric cases; the edge pattern decides
                order = (sons[0], sons[1]) if fwd else (sons[1], sons[0])
                kind = NodeKind("linear", order)
            else:
                raise ClassificationError(f"complete node {node} with one-way edges")
        if kind.name == "linear":
            first, second = kind.order[0], kind.order[1]
            rf, rs = representative(tree, first), representative(tree, second)
            if (rs, rf) in g.edges and (rf, rs) not in g.edges:
                kind = NodeKind("linear", tuple(reversed(kind.order)))
            elif (rf, rs) not in g.edges:
                raise ClassificationError(f"linear node {node} has no edge between consecutive sons")
            son_order[node] = kind.order
        if kind.name == "prime":
            q_edges = {
                (a, b)
                for a in sons
                for b in sons
                if a != b and (representative(tree, a), representative(tree, b)) in g.edges
            }
            quotient[node] = SimpleDigraph(set(sons), q_edges)
        kinds[node] = kind
    typed = DecompTree(tree.nodes, tree.root, tree.parent, tree.box, kinds, son_order)
    return ModularTree(typed, complete_tag, quotient)


# ---------------------------------------------------------------------------
# The graph representation of the decomposition


class DecompositionGraph:
    """The modular decomposition flattened into one labelled digraph.

    Vertices are the graph vertices (the tree leaves) plus the internal tree
    nodes.  Edges come in three relations: the son relation dropping from
    each internal node, a successor chain over the sons of each linear node,
    and a copy of the quotient over the sons of each prime node.
    """

    def __init__(self, vertices, internal, root, son_edges, order_edges, quotient_edges, node_type):
        self.vertices = frozenset(vertices)
        self.internal = frozenset(internal)
        self.root = root
        self.son_edges = frozenset(son_edges)
        self.order_edges = frozenset(order_edges)
        self.quotient_edges = frozenset(quotient_edges)
        self.node_type = dict(node_type)
        self._validate()

    def _validate(self):
        all_nodes = self.vertices | self.internal
        if self.root not in all_nodes:
            raise ValidationError("root is not a node")
        parent = {}
        for (p, c) in self.son_edges:
            if p not in self.internal:
                raise ValidationError(f"son edge from non-internal node {p}")
            if c in parent:
                raise ValidationError(f"node {c} has two fathers")
            parent[c] = p
        if set(parent) != all_nodes - {self.root}:
            raise ValidationError("son edges must reach every non-root node exactly once")
        for n in all_nodes:
            seen = set()
            while n != self.root:
                if n in seen:
                    raise ValidationError("son relation has a cycle")
                seen.add(n)
                n = parent[n]
        if set(self.node_type) != set(self.internal):
            raise ValidationError("exactly the internal nodes carry type labels")
        children = {n: [] for n in self.internal}
        for (p, c) in self.son_edges:
            children[p].append(c)
        for n, t in self.node_type.items():
            sons = children[n]
            if t == "linear":
                chain = {a: b for (a, b) in self.order_edges if a in sons}
                starts = [s for s in sons if s not in {b for (_, b) in self.order_edges if b in sons}]
                if len(starts) != 1:
                    raise ValidationError(f"linear node {n}: order edges do not chain its sons")
                walk = [starts[0]]
                while walk[-1] in chain:
                    walk.append(chain[walk[-1]])
                if len(walk) != len(sons) or set(walk) != set(sons):
                    raise ValidationError(f"linear node {n}: order edges do not chain its sons")
            elif t == "prime":
                q = {(a, b) for (a, b) in self.quotient_edges if a in sons and b in sons}
                if not q:
                    raise ValidationError(f"prime node {n} has no quotient edges")
            elif t not in ("union", "join"):
                raise ValidationError(f"unknown node type {t}")
        stray = {
            (a, b)
            for (a, b) in self.order_edges | self.quotient_edges
            if parent.get(a) != parent.get(b) or parent.get(a) is None
        }
        if stray:
            raise ValidationError(f"order/quotient edges must join siblings: {sorted(map(str, stray))}")

    def edge_count(self):
        return len(self.son_edges) + len(self.order_edges) + len(self.quotient_edges)

    def to_digraph(self) -> SimpleDigraph:
        labels = {n: self.node_type[n] for n in self.internal}
        return SimpleDigraph(
            self.vertices | self.internal,
            self.son_edges | self.order_edges | self.quotient_edges,
            labels,
        )

    def to_json(self):
        return {
            "type": "decomposition_graph",
            "root": str(self.root),
            "vertices": sorted_ids(self.vertices),
            "internal": sorted_ids(self.internal),
            "node_type": {str(n): self.node_type[n] for n in sorted_ids(self.internal)},
            "son_edges": sorted([str(a), str(b)] for (a, b) in self.son_edges),
            "order_edges": sorted([str(a), str(b)] for (a, b) in self.order_edges),
            "quotient_edges": sorted([str(a), str(b)] for (a, b) in self.quotient_edges),
        }

    def to_dot(self):
        colors = {"union": "lightblue", "join": "salmon", "linear": "gold", "prime": "plum"}
        lines = ["digraph gdec {"]
        for v in sorted_ids(self.vertices):
            lines.append(f'  "{v}" [shape=box];')
        for n in sorted_ids(self.internal):
            t = self.node_type[n]
            lines.append(f'  "{n}" [label="{t}", style=filled, fillcolor={colors[t]}];')
        for (a, b) in sorted(self.son_edges, key=lambda e: (str(e[0]), str(e[1]))):
            lines.append(f'  "{a}" -> "{b}";')
        for (a, b) in sorted(self.order_edges, key=lambda e: (str(e[0]), str(e[1]))):
            lines.append(f'  "{a}" -> "{b}" [style=dashed];')
        for (a, b) in sorted(self.quotient_edges, key=lambda e: (str(e[0]), str(e[1]))):
            lines.append(f'  "{a}" -> "{b}" [style=dotted];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def decomposition_graph(g: SimpleDigraph, cap=MODULES_CAP) -> DecompositionGraph:
    """Flatten the modular decomposition of g into a labelled digraph from
    which g can be rebuilt exactly."""
    mt = md_tree(g, cap)
    t = mt.tree
    names = {}
    counter = itertools.count()
    for n in sorted(t.nodes, key=lambda m: (len(t.subtree_union(m)), sorted_ids(t.subtree_union(m)))):
        if not t.children(n):
            (v,) = t.box[n]
            names[n] = v
        else:
            names[n] = f"n{next(counter)}"
    son_edges = {(names[p], names[c]) for c, p in t.parent.items()}
    order_edges = set()
    quotient_edges = set()
    node_type = {}
    for n in t.internal_nodes():
        kind = t.kind[n]
        if kind.name == "complete":
            node_type[names[n]] = mt.complete_tag[n]
        elif kind.name == "linear":
            node_type[names[n]] = "linear"
            seq = [names[s] for s in kind.order]
            order_edges.update(zip(seq, seq[1:]))
        else:
            node_type[names[n]] = "prime"
            q = mt.quotient[n]
            quotient_edges.update((names[a], names[b]) for (a, b) in q.edges)
    vertices = {names[n] for n in t.nodes if not t.children(n)}
    internal = {names[n] for n in t.internal_nodes()}
    return DecompositionGraph(
        vertices, internal, names[t.root], son_edges, order_edges, quotient_edges, node_type
    )


def graph_from_decomposition(d: DecompositionGraph) -> SimpleDigraph:
    """Rebuild the decomposed graph from its flattened representation."""
    children = {n: [] for n in d.internal}
    for (p, c) in d.son_edges:
        children[p].append(c)

    leaf_sets = {}

    def leaves_below(n):
        if n not in leaf_sets:
            if n in d.internal:
                leaf_sets[n] = frozenset().union(*(leaves_below(c) for c in children[n]))
            else:
                leaf_sets[n] = frozenset((n,))
        return leaf_sets[n]

    edges = set()
    for n in d.internal:
        t = d.node_type[n]
        sons = children[n]
        if t == "union":
            continue
        if t == "join":
            for a, b in itertools.permutations(sons, 2):
                edges.update(itertools.product(leaves_below(a), leaves_below(b)))
        elif t == "linear":
            chain = {a: b for (a, b) in d.order_edges if a in sons}
            start = next(s for s in sons if s not in chain.values())
            seq = [start]
            while seq[-1] in chain:
                seq.append(chain[seq[-1]])
            for i, a in enumerate(seq):
                for b in seq[i + 1 :]:
                    edges.update(itertools.product(leaves_below(a), leaves_below(b)))
        else:
            for (a, b) in d.quotient_edges:
                if a in sons and b in sons:
                    edges.update(itertools.product(leaves_below(a), leaves_below(b)))
    return SimpleDigraph(d.vertices, edges)
