"""Two-source dags and their series/parallel/prime factor decomposition:
the factor family, the typed factor tree, edge substitution, canonical
terms, the separated representation with contraction, and bipolar
orientation of 2-connected multigraphs.
"""

from __future__ import annotations

import itertools
import re

from .errors import CapacityError, InputError, PreconditionError, ValidationError
from .graphs import (
    MultiGraph,
    TwoGraph,
    edge_induced,
    is_two_connected,
    sort_key,
    sorted_ids,
)
from .partitive import DecompTree, NodeKind, SetFamily, classify_node, strong_members, tree_from_laminar

FACTORS_CAP = 14


def single_edge(eid, reverse=False) -> TwoGraph:
    a, b = f"{eid}.a", f"{eid}.b"
    g = MultiGraph({a, b}, {eid: (a, b)})
    return TwoGraph(g, b, a) if reverse else TwoGraph(g, a, b)


def _is_acyclic(g: MultiGraph) -> bool:
    indeg = {v: 0 for v in g.vertices}
    for (u, v) in g.edges.values():
        indeg[v] += 1
    queue = [v for v, d in indeg.items() if d == 0]
    seen = 0
    while queue:
        v = queue.pop()
        seen += 1
        for e, (a, b) in g.edges.items():
            if a == v:
                indeg[b] -= 1
                if indeg[b] == 0:
                    queue.append(b)
    return seen == len(g.vertices)


def is_two_dag(g: TwoGraph) -> bool:
    """Acyclic, the first source is the unique vertex of indegree 0, the
    second the unique vertex of outdegree 0."""
    mg = g.graph
    if mg.undirected:
        return False
    if not mg.edges or not _is_acyclic(mg):
        return False
    indeg0 = [v for v in mg.vertices if all(h != v for (_, h) in mg.edges.values())]
    outdeg0 = [v for v in mg.vertices if all(t != v for (t, _) in mg.edges.values())]
    return indeg0 == [g.s1] and outdeg0 == [g.s2]


def is_two_connected_two_graph(g: TwoGraph) -> bool:
    """2-connected after adding one auxiliary source-to-source edge."""
    aux = "#aux"
    while aux in g.graph.edges:
        aux += "x"
    plus = MultiGraph(g.graph.vertices, {**g.graph.edges, aux: (g.s1, g.s2)}, g.graph.undirected)
    return is_two_connected(plus)


def factor_from_edges(g: TwoGraph, es):
    """The factor of the 2-dag g on edge set es, or None.

    A nonempty edge set is a factor when its edge-induced subgraph is a
    2-dag and no edge outside the set touches one of its internal vertices.
    The sources come out as the unique in/out degree zero vertices.
    """
    es = frozenset(es)
    if not es:
        raise InputError("a factor needs at least one edge")
    if not es <= set(g.graph.edges):
        raise InputError("unknown edge ids in factor candidate")
    sub = edge_induced(g.graph, es)
    if not _is_acyclic(sub):
        return None
    indeg0 = [v for v in sub.vertices if all(h != v for (_, h) in sub.edges.values())]
    outdeg0 = [v for v in sub.vertices if all(t != v for (t, _) in sub.edges.values())]
    if len(indeg0) != 1 or len(outdeg0) != 1 or indeg0 == outdeg0:
        return None
    s1, s2 = indeg0[0], outdeg0[0]
    internal = sub.vertices - {s1, s2}
    for e, (a, b) in g.graph.edges.items():
        if e not in es and (a in internal or b in internal):
            return None
    return TwoGraph(sub, s1, s2)


def factor_family(g: TwoGraph, cap=FACTORS_CAP) -> SetFamily:
    """All factor edge sets of a 2-dag, by exhaustive subset scan."""
    if not is_two_dag(g):
        raise PreconditionError("factor enumeration needs a 2-dag")
    eids = sorted_ids(g.graph.edges)
    m = len(eids)
    if m > cap:
        raise CapacityError("factor enumeration", m, cap)
    members = []
    for mask in range(1, 1 << m):
        es = frozenset(eids[i] for i in range(m) if mask >> i & 1)
        if factor_from_edges(g, es) is not None:
            members.append(es)
    return SetFamily(frozenset(eids), members)


class FactorTree:
    """Factor decomposition tree: leaves are single edges, internal nodes
    are typed parallel, series (with son order) or prime (with a skeleton
    whose marker edges stand for the sons, in stored son order)."""

    def __init__(self, tree: DecompTree, sources, skeleton, skeleton_order):
        self.tree = tree
        self.sources = dict(sources)  # node -> (s1, s2) of its factor
        self.skeleton = dict(skeleton)  # prime node -> TwoGraph
        self.skeleton_order = dict(skeleton_order)  # prime node -> marker edge ids

    def node_edge_sets(self):
        return {frozenset(self.tree.subtree_union(n)) for n in self.tree.nodes}


def factor_tree(g: TwoGraph, cap=FACTORS_CAP) -> FactorTree:
    family = factor_family(g, cap)
    tree = tree_from_laminar(strong_members(family))
    kinds = {}
    son_order = {}
    sources = {}
    skeleton = {}
    skeleton_order = {}
    factors = {}
    for node in tree.nodes:
        factors[node] = factor_from_edges(g, tree.subtree_union(node))
        if factors[node] is None:
            raise ValidationError(f"tree node {node} is not a factor")
        sources[node] = (factors[node].s1, factors[node].s2)
    for node in tree.nodes:
        kind = classify_node(family, tree, node)
        sons = tree.children(node)
        if kind.name == "leaf":
            kinds[node] = kind
            continue
        if kind.name == "complete" and len(sons) == 2:
            a, b = sources[sons[0]], sources[sons[1]]
            if a == b:
                pass  # genuinely parallel
            elif a[1] == b[0]:
                kind = NodeKind("linear", (sons[0], sons[1]))
            elif b[1] == a[0]:
                kind = NodeKind("linear", (sons[1], sons[0]))
            else:
                raise ValidationError(f"two sons of {node} neither chain nor share sources")
        if kind.name == "complete":
            kinds[node] = NodeKind("parallel")
            for s in sons:
                if sources[s] != sources[node]:
                    raise ValidationError(f"parallel son {s} does not share the node sources")
        elif kind.name == "linear":
            order = list(kind.order)
            if len(order) >= 2 and sources[order[0]][1] != sources[order[1]][0]:
                order.reverse()
            for x, y in zip(order, order[1:]):
                if sources[x][1] != sources[y][0]:
                    raise ValidationError(f"series sons of {node} do not chain")
            if sources[order[0]][0] != sources[node][0] or sources[order[-1]][1] != sources[node][1]:
                raise ValidationError(f"series chain of {node} does not span its sources")
            kinds[node] = NodeKind("series", tuple(order))
            son_order[node] = tuple(order)
        else:
            order = sorted(sons, key=lambda s: sort_key(sorted_ids(tree.subtree_union(s))[0]))
            marker = {s: f"k:{sorted_ids(tree.subtree_union(s))[0]}" for s in order}
            verts = set()
            edges = {}
            for s in order:
                s1, s2 = sources[s]
                verts.update((s1, s2))
                edges[marker[s]] = (s1, s2)
            skel = TwoGraph(MultiGraph(verts, edges), *sources[node])
            pairs = [tuple(uv) for uv in edges.values()]
            if len(set(pairs)) != len(pairs):
                raise ValidationError(f"skeleton of {node} is not simple")
            skeleton[node] = skel
            skeleton_order[node] = tuple(marker[s] for s in order)
            kinds[node] = NodeKind("prime")
            son_order[node] = tuple(order)
    typed = DecompTree(tree.nodes, tree.root, tree.parent, tree.box, kinds, son_order)
    return FactorTree(typed, sources, skeleton, skeleton_order)


# ---------------------------------------------------------------------------
# Operations on 2-graphs


def theta_substitute(k: TwoGraph, subs) -> TwoGraph:
    """Substitute the 2-graphs ``subs`` for the edges of ``k`` (in the order
    of the sorted edge ids of ``k``), fusing each sub's sources with the
    ends of its edge.  Internal vertices are renamed apart; colliding edge
    ids get fresh ``#n`` suffixes."""
    slots = sorted_ids(k.graph.edges)
    subs = list(subs)
    if len(subs) != len(slots):
        raise InputError(f"need {len(slots)} substituents, got {len(subs)}")
    verts = set(k.graph.vertices)
    edges = {}
    used_ids = set()
    for slot, sub in zip(slots, subs):
        tail, head = k.graph.edges[slot]
        rename = {sub.s1: tail, sub.s2: head}
        for v in sorted_ids(sub.internal_vertices()):
            name = f"{slot}.{v}"
            while name in verts:
                name += "'"
            rename[v] = name
            verts.add(name)
        for e in sorted_ids(sub.graph.edges):
            a, b = sub.graph.edges[e]
            eid = e
            n = 0
            while eid in used_ids:
                eid = f"{e}#{n}"
                n += 1
            used_ids.add(eid)
            edges[eid] = (rename[a], rename[b])
    return TwoGraph(MultiGraph(verts, edges), k.s1, k.s2)


def _fresh_skeleton(kind, arity):
    if kind == "par":
        edges = {f"_p{i}": ("s", "t") for i in range(arity)}
        return TwoGraph(MultiGraph({"s", "t"}, edges), "s", "t")
    verts = [f"w{i}" for i in range(arity + 1)]
    edges = {f"_s{i}": (verts[i], verts[i + 1]) for i in range(arity)}
    return TwoGraph(MultiGraph(verts, edges), verts[0], verts[-1])


def parallel_graphs(graphs) -> TwoGraph:
    graphs = list(graphs)
    return theta_substitute(_fresh_skeleton("par", len(graphs)), graphs)


def series_graphs(graphs) -> TwoGraph:
    graphs = list(graphs)
    return theta_substitute(_fresh_skeleton("ser", len(graphs)), graphs)


# ---------------------------------------------------------------------------
# Canonical terms


class EdgeConst:
    __match_args__ = ("edge", "reverse")

    def __init__(self, edge, reverse=False):
        self.edge = edge
        self.reverse = bool(reverse)

    def __eq__(self, other):
        return isinstance(other, EdgeConst) and (self.edge, self.reverse) == (other.edge, other.reverse)

    def __repr__(self):
        return f"~e:{self.edge}" if self.reverse else f"e:{self.edge}"


class Par:
    __match_args__ = ("args",)

    def __init__(self, args):
        self.args = tuple(args)
        if len(self.args) < 2:
            raise InputError("parallel nodes need at least two arguments")
        if any(isinstance(a, Par) for a in self.args):
            raise InputError("parallel nodes must not have parallel sons")

    def __eq__(self, other):
        return isinstance(other, Par) and self.args == other.args

    def __repr__(self):
        return f"par({', '.join(map(repr, self.args))})"


class Ser:
    __match_args__ = ("args",)

    def __init__(self, args):
        self.args = tuple(args)
        if len(self.args) < 2:
            raise InputError("series nodes need at least two arguments")
        if any(isinstance(a, Ser) for a in self.args):
            raise InputError("series nodes must not have series sons")

    def __eq__(self, other):
        return isinstance(other, Ser) and self.args == other.args

    def __repr__(self):
        return f"ser({', '.join(map(repr, self.args))})"


class Theta:
    __match_args__ = ("skeleton", "edge_order", "args")

    def __init__(self, skeleton: TwoGraph, edge_order, args):
        self.skeleton = skeleton
        self.edge_order = tuple(edge_order)
        self.args = tuple(args)
        if set(self.edge_order) != set(skeleton.graph.edges) or len(self.edge_order) != len(
            skeleton.graph.edges
        ):
            raise InputError("edge order must enumerate the skeleton edges")
        if len(self.args) != len(self.edge_order):
            raise InputError("arity mismatch between skeleton and arguments")
        if len(self.edge_order) < 3:
            raise InputError("skeletons have at least three edges")

    def __eq__(self, other):
        return (
            isinstance(other, Theta)
            and self.edge_order == other.edge_order
            and self.args == other.args
            and self.skeleton.graph == other.skeleton.graph
            and (self.skeleton.s1, self.skeleton.s2) == (other.skeleton.s1, other.skeleton.s2)
        )

    def __repr__(self):
        args = ", ".join(map(repr, self.args))
        return f"theta[{self.skeleton.s1}>{self.skeleton.s2}]({args})"


def term_edges(t):
    if isinstance(t, EdgeConst):
        return [t.edge]
    return [e for a in t.args for e in term_edges(a)]


def eval_term(t) -> TwoGraph:
    """The 2-graph denoted by a term; every constant contributes the edge
    with its own id."""
    if isinstance(t, EdgeConst):
        return single_edge(t.edge, t.reverse)
    subs = [eval_term(a) for a in t.args]
    if isinstance(t, Par):
        return parallel_graphs(subs)
    if isinstance(t, Ser):
        return series_graphs(subs)
    ordered = {e: s for e, s in zip(t.edge_order, subs)}
    return theta_substitute(t.skeleton, [ordered[e] for e in sorted_ids(t.skeleton.graph.edges)])


def _min_edge(t):
    return min(term_edges(t), key=sort_key)


def canonical_term(g: TwoGraph, cap=FACTORS_CAP):
    """The unique series/parallel/prime term denoting the 2-connected
    2-graph g, up to parallel argument order and skeleton direction.

    A non-dag input is first reoriented to a 2-dag; reversed edges show up
    as reversed constants.  Parallel arguments are normalized by minimal
    contained edge id.
    """
    if not is_two_connected_two_graph(g):
        raise PreconditionError("canonical terms exist for 2-connected 2-graphs only")
    if is_two_dag(g):
        dag, reversed_ids = g, frozenset()
    else:
        dag, reversed_ids = _orient_between_poles(g.graph, g.s1, g.s2)
    ft = factor_tree(dag, cap)
    tree = ft.tree

    def build(node):
        kind = tree.kind[node]
        if kind.name == "leaf":
            (eid,) = tree.subtree_union(node)
            return EdgeConst(eid, eid in reversed_ids)
        sons = tree.children(node)
        args = [build(s) for s in sons]
        if kind.name == "parallel":
            return Par(sorted(args, key=lambda a: sort_key(_min_edge(a))))
        if kind.name == "series":
            return Ser(args)
        return Theta(ft.skeleton[node], ft.skeleton_order[node], args)

    return build(tree.root)


# ---------------------------------------------------------------------------
# Term text syntax


_TOKEN = re.compile(r"\s*([(),|}]|~?e:[^\s(),|{}]+|theta\{|par|ser|[^\s(),|{}]+)")


def parse_term(text):
    """Parse ``e:ID``, ``~e:ID``, ``par(...)``, ``ser(...)`` and
    ``theta{id=tail>head, ... | s1 s2}(...)``.  Identifiers inside terms
    must avoid whitespace and the characters ``(),|{}=>``."""
    pos = 0

    def error(msg):
        raise InputError(f"term syntax error at position {pos}: {msg}")

    def peek():
        m = _TOKEN.match(text, pos)
        return m.group(1) if m else None

    def take(expected=None):
        nonlocal pos
        m = _TOKEN.match(text, pos)
        if not m:
            error("unexpected end of input")
        tok = m.group(1)
        if expected is not None and tok != expected:
            error(f"expected {expected!r}, found {tok!r}")
        pos = m.end()
        return tok

    def parse_args():
        take("(")
        args = [parse_node()]
        while peek() == ",":
            take(",")
            args.append(parse_node())
        take(")")
        return args

    def parse_node():
        tok = take()
        if tok.startswith("e:"):
            return EdgeConst(tok[2:])
        if tok.startswith("~e:"):
            return EdgeConst(tok[3:], True)
        if tok == "par":
            return Par(parse_args())
        if tok == "ser":
            return Ser(parse_args())
        if tok == "theta{":
            edges = {}
            order = []
            while True:
                spec = take()
                m = re.fullmatch(r"([^=>]+)=([^=>]+)>([^=>]+)", spec)
                if not m:
                    error(f"bad skeleton edge {spec!r}")
                eid, tail, head = m.groups()
                if eid in edges:
                    error(f"duplicate skeleton edge id {eid}")
                edges[eid] = (tail, head)
                order.append(eid)
                if peek() == ",":
                    take(",")
                else:
                    break
            take("|")
            s1 = take()
            s2 = take()
            take("}")
            verts = {x for uv in edges.values() for x in uv}
            skel = TwoGraph(MultiGraph(verts, edges), s1, s2)
            return Theta(skel, order, parse_args())
        error(f"unexpected token {tok!r}")

    node = parse_node()
    if text[pos:].strip():
        error("trailing input")
    return node


def format_term(t) -> str:
    if isinstance(t, EdgeConst):
        return f"~e:{t.edge}" if t.reverse else f"e:{t.edge}"
    if isinstance(t, Par):
        return f"par({', '.join(format_term(a) for a in t.args)})"
    if isinstance(t, Ser):
        return f"ser({', '.join(format_term(a) for a in t.args)})"
    edges = ", ".join(
        f"{e}={t.skeleton.graph.edges[e][0]}>{t.skeleton.graph.edges[e][1]}" for e in t.edge_order
    )
    args = ", ".join(format_term(a) for a in t.args)
    return f"theta{{{edges} | {t.skeleton.s1} {t.skeleton.s2}}}({args})"


# ---------------------------------------------------------------------------
# Separated representation


class SepGraph:
    """The factor tree spread out as a graph: each tree node contributes a
    source pair, each leaf one solid edge between its own pair, and
    epsilon edges record which source pairs denote the same vertex."""

    def __init__(self, tree: DecompTree, solid, eps_edges, leaf_map):
        self.tree = tree  # over edge ids; node ids are strings
        self.solid = dict(solid)  # edge id -> ((x,1),(x,2))
        self.eps_edges = frozenset(frozenset(p) for p in eps_edges)
        self.leaf_map = dict(leaf_map)  # leaf node -> edge id
        self.vertices = frozenset((n, i) for n in tree.nodes for i in (1, 2))
        self._validate()

    def source_vertex(self, node, i):
        return (node, i)

    def _validate(self):
        touched = set()
        for e, (a, b) in self.solid.items():
            # rewired graphs may run a solid edge from (x,2) to (x,1)
            if a[0] != b[0] or {a[1], b[1]} != {1, 2}:
                raise ValidationError(f"solid edge {e} must join the pair of node {a[0]}")
            if a[0] not in self.tree.nodes:
                raise ValidationError(f"solid edge {e} on unknown node")
            if a in touched or b in touched:
                raise ValidationError("solid edges must be pairwise non-adjacent")
            touched.update((a, b))
        leaves = set(self.tree.leaves())
        if set(self.leaf_map) != leaves:
            raise ValidationError("leaf map must cover exactly the leaves")
        if {self.leaf_map[l] for l in leaves} != set(self.solid):
            raise ValidationError("solid edges must be exactly the leaf edges")
        for pair in self.eps_edges:
            if len(pair) != 2 or any(v not in self.vertices for v in pair):
                raise ValidationError(f"bad eps edge {sorted(map(str, pair))}")

    def to_json(self):
        def vname(v):
            return f"({v[0]},{v[1]})"

        return {
            "type": "sep_graph",
            "tree": self.tree.to_json(),
            "solid": {str(e): [vname(a), vname(b)] for e, (a, b) in sorted(self.solid.items(), key=lambda kv: str(kv[0]))},
            "eps": sorted(sorted(vname(v) for v in p) for p in self.eps_edges),
        }


def sep_graph(g: TwoGraph, cap=FACTORS_CAP) -> SepGraph:
    ft = factor_tree(g, cap)
    return sep_graph_from_factor_tree(ft)[0]


def sep_graph_from_factor_tree(ft: FactorTree):
    """Build the separated graph; also return the node renaming used."""
    tree = ft.tree
    names = {}
    counter = itertools.count()
    for n in sorted(tree.nodes, key=lambda m: (len(tree.subtree_union(m)), sorted_ids(tree.subtree_union(m)))):
        names[n] = f"x{next(counter)}"
    renamed = DecompTree(
        set(names.values()),
        names[tree.root],
        {names[c]: names[p] for c, p in tree.parent.items()},
        {names[n]: tree.box[n] for n in tree.nodes},
        {names[n]: tree.kind[n] for n in tree.nodes if n in tree.kind},
        {
            names[n]: tuple(names[s] for s in order)
            for n, order in tree.son_order.items()
        },
    )
    sources = {names[n]: ft.sources[n] for n in tree.nodes}
    solid = {}
    leaf_map = {}
    for n in tree.nodes:
        if not tree.children(n):
            (eid,) = tree.subtree_union(n)
            solid[eid] = ((names[n], 1), (names[n], 2))
            leaf_map[names[n]] = eid
    eps = set()
    parent = renamed.parent
    for x in renamed.nodes:
        for y in renamed.nodes:
            if x >= y:
                continue
            adjacent = parent.get(x) == y or parent.get(y) == x
            siblings = parent.get(x) is not None and parent.get(x) == parent.get(y)
            if not adjacent and not siblings:
                continue
            for i in (1, 2):
                for j in (1, 2):
                    if sources[x][i - 1] != sources[y][j - 1]:
                        continue
                    if adjacent:
                        eps.add(frozenset(((x, i), (y, j))))
                    else:
                        z = parent[x]
                        if sources[x][i - 1] not in sources[z]:
                            eps.add(frozenset(((x, i), (y, j))))
    return SepGraph(renamed, solid, eps, leaf_map), names


def contract_sep(s: SepGraph) -> TwoGraph:
    """Contract all epsilon edges; the solid edges become the graph."""
    parent = {v: v for v in s.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for pair in s.eps_edges:
        a, b = tuple(pair)
        parent[find(a)] = find(b)
    classes = {}
    for v in s.vertices:
        classes.setdefault(find(v), []).append(v)
    name = {}
    for root, members in classes.items():
        rep = min(members, key=lambda v: (str(v[0]), v[1]))
        for v in members:
            name[v] = f"v({rep[0]},{rep[1]})"
    edges = {e: (name[a], name[b]) for e, (a, b) in s.solid.items()}
    verts = set(name.values())
    root = s.tree.root
    try:
        # a rewired separated graph may contract to a 2-graph that is no
        # longer a dag, so only loops and source clashes are rejected here
        return TwoGraph(MultiGraph(verts, edges), name[(root, 1)], name[(root, 2)])
    except InputError as exc:
        raise ValidationError(f"contraction did not produce a 2-graph: {exc}") from exc


# ---------------------------------------------------------------------------
# Bipolar orientation


def bipolar_orient(g: MultiGraph, eid):
    """Orient a 2-connected multigraph into a 2-dag whose sources are the
    ends of the given edge.  Returns the 2-dag and the ids of edges whose
    stored direction got reversed."""
    if eid not in g.edges:
        raise InputError(f"unknown edge {eid}")
    if not is_two_connected(g):
        raise PreconditionError("bipolar orientation needs a 2-connected graph")
    s, t = g.edges[eid]
    return _orient_with_ears(g, s, t, first_edge=eid)


def _orient_between_poles(g: MultiGraph, s, t):
    """Bipolar orientation with given poles, via one auxiliary edge."""
    aux = "#pole"
    while aux in g.edges:
        aux += "x"
    plus = MultiGraph(g.vertices, {**g.edges, aux: (s, t)}, g.undirected)
    if not is_two_connected(plus):
        raise PreconditionError("not 2-connected between the requested poles")
    dag, reversed_ids = _orient_with_ears(plus, s, t, first_edge=aux)
    edges = {e: uv for e, uv in dag.graph.edges.items() if e != aux}
    return TwoGraph(MultiGraph(dag.graph.vertices, edges), s, t), reversed_ids - {aux}


def _orient_with_ears(g: MultiGraph, s, t, first_edge):
    """Open ear decomposition starting from a cycle through first_edge,
    each ear oriented along a global vertex order from s to t."""
    # initial cycle: first_edge plus a path from s to t avoiding it
    path_edges = _edge_path(g, s, t, forbidden={first_edge})
    if path_edges is None:
        raise PreconditionError("no cycle through the chosen edge; graph not 2-connected")
    order = [s]
    oriented = {first_edge: (s, t)}
    cur = s
    for e in path_edges:
        nxt = g.other_end(e, cur)
        oriented[e] = (cur, nxt)
        if nxt != t:
            order.append(nxt)
        cur = nxt
    order.append(t)
    placed = set(order)
    used = set(oriented)

    while len(used) < len(g.edges):
        ear = _find_ear(g, placed, used)
        if ear is None:
            raise PreconditionError("graph is not 2-connected")
        a, b, edge_seq = ear
        if order.index(a) > order.index(b):
            a, b = b, a
            edge_seq = list(reversed(edge_seq))
        pos = order.index(a) + 1
        cur = a
        for e in edge_seq:
            nxt = g.other_end(e, cur)
            oriented[e] = (cur, nxt)
            used.add(e)
            if nxt != b:
                order.insert(pos, nxt)
                pos += 1
                placed.add(nxt)
            cur = nxt
    dag = TwoGraph(MultiGraph(g.vertices, oriented), s, t)
    reversed_ids = frozenset(
        e for e, uv in oriented.items() if e not in g.undirected and uv != g.edges[e]
    )
    return dag, reversed_ids


def _edge_path(g: MultiGraph, a, b, forbidden):
    """Edge sequence of some a-b path avoiding forbidden edges, or None."""
    prev = {a: None}
    queue = [a]
    while queue:
        v = queue.pop(0)
        if v == b:
            seq = []
            while prev[v] is not None:
                e, u = prev[v]
                seq.append(e)
                v = u
            return list(reversed(seq))
        for e in sorted_ids(g.incident(v)):
            if e in forbidden:
                continue
            w = g.other_end(e, v)
            if w not in prev:
                prev[w] = (e, v)
                queue.append(w)
    return None


def _find_ear(g: MultiGraph, placed, used):
    """A path of unused edges between two distinct placed vertices whose
    interior avoids placed vertices; returned as (a, b, edge sequence)."""
    for a in sorted_ids(placed):
        for e0 in sorted_ids(g.incident(a)):
            if e0 in used:
                continue
            first = g.other_end(e0, a)
            if first in placed:
                return a, first, [e0]
            prev = {first: None}
            queue = [first]
            hit = None
            while queue and hit is None:
                v = queue.pop(0)
                for e in sorted_ids(g.incident(v)):
                    if e in used or e == e0:
                        continue
                    w = g.other_end(e, v)
                    if w == a:
                        continue
                    if w in placed:
                        hit = (v, e, w)
                        break
                    if w not in prev:
                        prev[w] = (e, v)
                        queue.append(w)
            if hit is not None:
                v, e, w = hit
                seq = [e]
                while prev[v] is not None:
                    pe, pu = prev[v]
                    seq.append(pe)
                    v = pu
                seq.append(e0)
                return a, w, list(reversed(seq))
    return None
