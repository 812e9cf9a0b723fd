"""Clique-width expressions: evaluation, parsing, explicit constructions
for cliques, stars, circles of tournaments, split decomposition graphs and
source fusion, expression substitution, and an exact reachability oracle
deciding clique-width of tiny graphs.
"""

from __future__ import annotations

import heapq
import itertools
import re

from .errors import CapacityError, InputError, ValidationError
from .graphs import SimpleDigraph, sort_key, sorted_ids
from .split import SDGraph


class Const:
    __match_args__ = ("label", "tag")

    def __init__(self, label, tag=None):
        self.label = label
        self.tag = tag


class Add:
    __match_args__ = ("i", "j", "sub", "edge_tag")

    def __init__(self, i, j, sub, edge_tag=None):
        if i == j:
            raise InputError("edge additions need two distinct labels")
        self.i = i
        self.j = j
        self.sub = sub
        self.edge_tag = edge_tag


class Ren:
    __match_args__ = ("i", "j", "sub")

    def __init__(self, i, j, sub):
        self.i = i
        self.j = j
        self.sub = sub


class Union:
    __match_args__ = ("left", "right")

    def __init__(self, left, right):
        self.left = left
        self.right = right


class LabeledGraph:
    """A digraph with a total vertex labelling and optionally tagged edges."""

    def __init__(self, vertices, edges, lab):
        self.vertices = frozenset(vertices)
        self.edges = frozenset(edges)  # triples (u, v, tag); tag None for plain
        self.lab = dict(lab)
        if set(self.lab) != self.vertices:
            raise ValidationError("labelling must be total")

    def plain_edges(self):
        return {(u, v) for (u, v, tag) in self.edges if tag is None}

    def tagged_pairs(self, tag):
        return {(u, v) for (u, v, t) in self.edges if t == tag}

    def digraph(self):
        return SimpleDigraph(self.vertices, self.plain_edges())

    def labels_present(self):
        return set(self.lab.values())


def labels_used(t):
    """Every label mentioned anywhere in the expression."""
    if isinstance(t, Const):
        return {t.label}
    if isinstance(t, Add):
        return {t.i, t.j} | labels_used(t.sub)
    if isinstance(t, Ren):
        return {t.i, t.j} | labels_used(t.sub)
    return labels_used(t.left) | labels_used(t.right)


def eval_cw(t) -> LabeledGraph:
    """The labelled graph denoted by an expression; vertices are the
    constant occurrences, named by their tag when one is given."""

    def rec(node, path):
        if isinstance(node, Const):
            name = node.tag if node.tag is not None else "@" + ".".join(map(str, path))
            return LabeledGraph({name}, set(), {name: node.label})
        if isinstance(node, Union):
            a = rec(node.left, path + (0,))
            b = rec(node.right, path + (1,))
            if a.vertices & b.vertices:
                raise InputError(f"duplicate vertex names {sorted_ids(a.vertices & b.vertices)}")
            return LabeledGraph(a.vertices | b.vertices, a.edges | b.edges, {**a.lab, **b.lab})
        sub = rec(node.sub, path + (0,))
        if isinstance(node, Add):
            new = set(sub.edges)
            for u in sub.vertices:
                if sub.lab[u] != node.i:
                    continue
                for v in sub.vertices:
                    if v != u and sub.lab[v] == node.j:
                        new.add((u, v, node.edge_tag))
            return LabeledGraph(sub.vertices, new, sub.lab)
        lab = {v: (node.j if l == node.i else l) for v, l in sub.lab.items()}
        return LabeledGraph(sub.vertices, sub.edges, lab)

    return rec(t, ())


def tag_all(t, path=()):
    """Pin every constant's vertex name as a tag, so that wrapping the
    expression later cannot change the evaluated vertex names."""
    if isinstance(t, Const):
        if t.tag is not None:
            return t
        return Const(t.label, "@" + ".".join(map(str, path)))
    if isinstance(t, Union):
        return Union(tag_all(t.left, path + (0,)), tag_all(t.right, path + (1,)))
    if isinstance(t, Add):
        return Add(t.i, t.j, tag_all(t.sub, path + (0,)), t.edge_tag)
    return Ren(t.i, t.j, tag_all(t.sub, path + (0,)))


def map_labels(t, mapping):
    """Syntactic relabelling of an expression by a label dictionary."""
    if isinstance(t, Const):
        return Const(mapping.get(t.label, t.label), t.tag)
    if isinstance(t, Add):
        return Add(mapping.get(t.i, t.i), mapping.get(t.j, t.j), map_labels(t.sub, mapping), t.edge_tag)
    if isinstance(t, Ren):
        return Ren(mapping.get(t.i, t.i), mapping.get(t.j, t.j), map_labels(t.sub, mapping))
    return Union(map_labels(t.left, mapping), map_labels(t.right, mapping))


def _ren_chain(labels, target, sub):
    out = sub
    for a in sorted(labels, key=sort_key):
        if a != target:
            out = Ren(a, target, out)
    return out


# ---------------------------------------------------------------------------
# Stock constructions


def clique_expression(n, tags=None) -> "Const | Add | Ren":
    """An undirected n-clique with two labels."""
    if n < 1:
        raise InputError("cliques need at least one vertex")
    tags = list(tags) if tags is not None else [None] * n
    expr = Const("1", tags[0])
    for i in range(1, n):
        expr = Ren("2", "1", Add("1", "2", Add("2", "1", Union(expr, Const("2", tags[i])))))
    return expr


def star_expression(n, tags=None):
    """A star with n leaves and two labels; the center comes first in tags."""
    if n < 1:
        raise InputError("stars need at least one leaf")
    tags = list(tags) if tags is not None else [None] * (n + 1)
    expr = Const("1", tags[0])
    for i in range(n):
        expr = Add("1", "2", Add("2", "1", Union(expr, Const("2", tags[i + 1]))))
    return expr


def ctt_expression(spec) -> "Add":
    """A circle of transitive tournaments, vertex i tagged i, with labels
    1, 2, 3 and a retirement label for finished blocks."""
    n = spec.n
    hinges = set(spec.hinges)
    p2 = spec.hinges[1] if spec.k >= 2 else n
    expr = Add("1", "2", Union(Const("1", 0), Const("2", 1)))
    for i in range(2, n):
        step = Union(expr, Const("3", i))
        if i <= p2:
            step = Add("1", "3", step)
        step = Add("2", "3", step)
        if i in hinges:
            step = Ren("2", "bot", step)
        expr = Ren("3", "2", step)
    return Add("2", "1", expr)


# ---------------------------------------------------------------------------
# Split decomposition graphs as expressions

TOP = "top"
BOT = "bot"


def _const_label_of(expr, tag):
    """The label at the unique constant occurrence carrying the tag."""
    found = []

    def walk(node):
        if isinstance(node, Const):
            if node.tag == tag:
                found.append(node.label)
        elif isinstance(node, Union):
            walk(node.left)
            walk(node.right)
        else:
            walk(node.sub)

    walk(expr)
    if len(found) != 1:
        raise ValidationError(f"expected exactly one constant tagged {tag}")
    return found[0]


def _splice_at_const(expr, tag, replacement):
    if isinstance(expr, Const):
        return replacement if expr.tag == tag else expr
    if isinstance(expr, Union):
        return Union(_splice_at_const(expr.left, tag, replacement), _splice_at_const(expr.right, tag, replacement))
    if isinstance(expr, Add):
        return Add(expr.i, expr.j, _splice_at_const(expr.sub, tag, replacement), expr.edge_tag)
    return Ren(expr.i, expr.j, _splice_at_const(expr.sub, tag, replacement))


def sd_expression(h: SDGraph, comp_exprs) -> object:
    """An expression evaluating to the whole decomposition graph from one
    expression per component, using two extra labels beyond the largest
    component alphabet.  Epsilon edges come out tagged "eps" in both
    directions.

    ``comp_exprs`` maps each component's vertex set (frozenset) to an
    expression whose constants are tagged with the component's vertices.
    """
    comps = h.components()
    by_verts = {c.vertices: c for c in comps}
    if set(comp_exprs) != set(by_verts):
        raise ValidationError("component expressions must cover exactly the components")
    k = 0
    shared = {}
    for verts, expr in comp_exprs.items():
        comp = by_verts[verts]
        val = eval_cw(expr)
        if val.vertices != comp.vertices or val.plain_edges() != comp.edges:
            raise ValidationError(f"expression does not evaluate to its component {sorted_ids(verts)}")
        alphabet = sorted(labels_used(expr), key=sort_key)
        if TOP in alphabet or BOT in alphabet:
            raise ValidationError(f"component alphabets must avoid {TOP!r} and {BOT!r}")
        k = max(k, len(alphabet))
        shared[verts] = alphabet
    canon = [f"L{i}" for i in range(k)]
    exprs = {
        verts: map_labels(comp_exprs[verts], dict(zip(shared[verts], canon)))
        for verts in comp_exprs
    }
    comp_of = {}
    for verts in by_verts:
        for v in verts:
            comp_of[v] = verts

    def attach_downward(expr_m, verts, skip_vertex):
        """Splice every epsilon subtree of component ``verts`` except the
        one at ``skip_vertex`` into its expression."""
        out = expr_m
        for w in sorted_ids(verts):
            if w == skip_vertex:
                continue
            partner = h.eps_partner(w)
            if partner is None:
                continue
            p_w = _const_label_of(exprs[verts], w)
            sub = subtree_expr(w, partner)
            out = _splice_at_const(out, w, Ren(TOP, p_w, sub))
        return out

    def subtree_expr(v, u):
        """Expression for: vertex v, the epsilon edge v-u, and everything
        on u's side; v ends labelled TOP, the rest BOT."""
        verts = comp_of[u]
        e_m = exprs[verts]
        p_u = _const_label_of(e_m, u)
        bridge = Ren(
            BOT,
            p_u,
            Add(TOP, BOT, Add(BOT, TOP, Union(Const(TOP, v), Const(BOT, u)), edge_tag="eps"), edge_tag="eps"),
        )
        out = _splice_at_const(e_m, u, bridge)
        out = attach_downward(out, verts, u)
        return _ren_chain(canon, BOT, out)

    root_verts = comp_of[min(h.vertices, key=sort_key)]
    return attach_downward(exprs[root_verts], root_verts, None)


# ---------------------------------------------------------------------------
# Fusing a source and a sink


def _delete_vertices(expr, names, path=()):
    if isinstance(expr, Const):
        name = expr.tag if expr.tag is not None else "@" + ".".join(map(str, path))
        return None if name in names else expr
    if isinstance(expr, Union):
        a = _delete_vertices(expr.left, names, path + (0,))
        b = _delete_vertices(expr.right, names, path + (1,))
        if a is None:
            return b
        if b is None:
            return a
        return Union(a, b)
    sub = _delete_vertices(expr.sub, names, path + (0,))
    if sub is None:
        return None
    if isinstance(expr, Add):
        return Add(expr.i, expr.j, sub, expr.edge_tag)
    return Ren(expr.i, expr.j, sub)


def _product_transform(expr, vtype, path=()):
    """Replace labels by (label, type) pairs, with the type copied from the
    vertex each constant creates."""

    def pair(c, t):
        return f"{c}.{t}"

    if isinstance(expr, Const):
        name = expr.tag if expr.tag is not None else "@" + ".".join(map(str, path))
        return Const(pair(expr.label, vtype[name]), expr.tag)
    if isinstance(expr, Union):
        return Union(
            _product_transform(expr.left, vtype, path + (0,)),
            _product_transform(expr.right, vtype, path + (1,)),
        )
    sub = _product_transform(expr.sub, vtype, path + (0,))
    if isinstance(expr, Add):
        out = sub
        for s in range(4):
            for t in range(4):
                out = Add(pair(expr.i, s), pair(expr.j, t), out, expr.edge_tag)
        return out
    out = sub
    for s in range(4):
        out = Ren(pair(expr.i, s), pair(expr.j, s), out)
    return out


def fuse_expression(expr, u, v):
    """An expression for the evaluated graph with the edgeless-into vertex
    u and the edgeless-out vertex v fused into one vertex named "u+v".

    Works over the product alphabet (label, adjacency type), where the
    type records whether the deleted u reached a vertex and whether that
    vertex reached the deleted v; four times the original label count.
    """
    expr = tag_all(expr)
    val = eval_cw(expr)
    if any(tag is not None for (_, _, tag) in val.edges):
        raise InputError("fusion expects an expression without tagged edges")
    g = val.digraph()
    if u not in g.vertices or v not in g.vertices or u == v:
        raise InputError("fusion needs two distinct vertices of the graph")
    if g.in_degree(u) != 0 or g.out_degree(v) != 0:
        raise InputError("fusion needs a vertex of indegree 0 and one of outdegree 0")
    if (u, v) in g.edges:
        raise InputError("fusing adjacent vertices would create a loop")
    fused = f"{u}+{v}"
    alphabet = sorted(labels_used(expr), key=sort_key)
    if len(alphabet) == 1:
        # no two labels means no edge additions, hence an edgeless graph
        rest = sorted_ids(g.vertices - {u, v})
        out = Const(alphabet[0], fused)
        for w in rest:
            out = Union(out, Const(alphabet[0], w))
        return out
    c1, c2 = alphabet[0], alphabet[1]
    normalized = _ren_chain(set(alphabet), c1, expr)
    vtype = {}
    for x in g.vertices:
        if x in (u, v):
            vtype[x] = 0
            continue
        out_u = (u, x) in g.edges
        into_v = (x, v) in g.edges
        vtype[x] = 1 if out_u and into_v else 2 if out_u else 3 if into_v else 0
    core = _delete_vertices(_product_transform(normalized, vtype), {u, v})
    p = f"{c2}.0"
    if core is None:
        return Const(p, fused)
    body = Union(core, Const(p, fused))
    body = Add(f"{c1}.3", p, Add(f"{c1}.1", p, Add(p, f"{c1}.2", Add(p, f"{c1}.1", body))))
    for t in (3, 2, 1, 0):
        body = Ren(f"{c1}.{t}", p, body)
    return body


def fuse_oracle(g: SimpleDigraph, u, v) -> SimpleDigraph:
    """Direct fusion of two vertices into one, for cross-checking."""
    fused = f"{u}+{v}"
    mapping = {u: fused, v: fused}
    edges = set()
    for (a, b) in g.edges:
        a2, b2 = mapping.get(a, a), mapping.get(b, b)
        if a2 != b2:
            edges.add((a2, b2))
    return SimpleDigraph((g.vertices - {u, v}) | {fused}, edges)


# ---------------------------------------------------------------------------
# Substitution


def substitute_expression(e_g, u, e_h):
    """An expression for the host graph with vertex u replaced by the whole
    guest graph; the guest alphabet folds into the host's, so the label
    count never exceeds the larger of the two."""
    e_g = tag_all(e_g)
    e_h = tag_all(e_h)
    val_g = eval_cw(e_g)
    if u not in val_g.vertices:
        raise InputError(f"vertex {u} is not in the host graph")
    host_labels = sorted(labels_used(e_g), key=sort_key)
    guest_labels = sorted(labels_used(e_h), key=sort_key)
    target = list(host_labels)
    n = 0
    while len(target) < len(guest_labels):
        fresh = f"x{n}"
        n += 1
        if fresh not in target:
            target.append(fresh)
    mapping = dict(zip(guest_labels, target))
    guest = map_labels(e_h, mapping)
    r = _const_label_of(e_g, u)
    final_guest_labels = eval_cw(guest).labels_present()
    return _splice_at_const(e_g, u, _ren_chain(final_guest_labels, r, guest))


# ---------------------------------------------------------------------------
# Exact decision at desk scale


def _canonical_state(n, lab, arcs):
    """Minimal encoding over vertex permutations with labels renamed by
    first appearance; states equal under it are interchangeable.

    Vertex orderings are restricted to those compatible with a
    permutation-invariant refinement (label class size and degree
    profiles), which keeps the search tiny in practice.
    """
    out = [0] * n
    inn = [0] * n
    succs = [[] for _ in range(n)]
    preds = [[] for _ in range(n)]
    for (a, b) in arcs:
        out[a] += 1
        inn[b] += 1
        succs[a].append(b)
        preds[b].append(a)
    class_size = {}
    for l in lab:
        class_size[l] = class_size.get(l, 0) + 1

    def inv(x):
        return (
            class_size[lab[x]],
            out[x],
            inn[x],
            tuple(sorted((out[y], inn[y]) for y in succs[x])),
            tuple(sorted((out[y], inn[y]) for y in preds[x])),
        )

    groups = {}
    for x in range(n):
        groups.setdefault(inv(x), []).append(x)
    ordered_groups = [groups[k] for k in sorted(groups)]
    best = None
    for parts in itertools.product(*(itertools.permutations(g) for g in ordered_groups)):
        perm = [x for part in parts for x in part]
        seen = {}
        labs = []
        for x in perm:
            if lab[x] not in seen:
                seen[lab[x]] = len(seen)
            labs.append(seen[lab[x]])
        pos = {x: i for i, x in enumerate(perm)}
        bits = 0
        for (a, b) in arcs:
            bits |= 1 << (pos[a] * n + pos[b])
        key = (tuple(labs), bits)
        if best is None or key < best:
            best = key
    return (n, best[0], best[1])


def _unlabeled_key(n, arcs):
    return _canonical_state(n, [0] * n, arcs)


def _subgraph_embeddable(n, arcs, host: SimpleDigraph):
    """Does the state graph inject into the host with edges preserved as a
    subset of the host's edges?"""
    hv = sorted_ids(host.vertices)
    out_deg = [sum(1 for (a, _) in arcs if a == x) for x in range(n)]
    in_deg = [sum(1 for (_, b) in arcs if b == x) for x in range(n)]

    def extend(i, used, mapping):
        if i == n:
            return True
        for w in hv:
            if w in used:
                continue
            if host.out_degree(w) < out_deg[i] or host.in_degree(w) < in_deg[i]:
                continue
            ok = True
            for (a, b) in arcs:
                if a == i and b < i and (w, mapping[b]) not in host.edges:
                    ok = False
                    break
                if b == i and a < i and (mapping[a], w) not in host.edges:
                    ok = False
                    break
            if ok:
                mapping[i] = w
                if extend(i + 1, used | {w}, mapping):
                    return True
                del mapping[i]
        return False

    return extend(0, set(), {})


def clique_width_at_most(g: SimpleDigraph, k, n_cap=6, k_cap=3) -> bool:
    """Exact decision by reachability over canonical labelled states that
    embed into the target as subgraphs."""
    n_target = len(g.vertices)
    if n_target > n_cap:
        raise CapacityError("clique-width decision", n_target, n_cap)
    if k > k_cap:
        raise CapacityError("clique-width labels", k, k_cap)
    if k < 1:
        return False
    if n_target == 0:
        return True
    gv = sorted_ids(g.vertices)
    gidx = {v: i for i, v in enumerate(gv)}
    target_arcs = frozenset((gidx[a], gidx[b]) for (a, b) in g.edges)
    target_key = _unlabeled_key(n_target, target_arcs)

    embed_cache = {}

    def embeds(n, arcs):
        key = _unlabeled_key(n, arcs)
        if key not in embed_cache:
            embed_cache[key] = _subgraph_embeddable(n, sorted(arcs), g)
        return embed_cache[key]

    agenda = [(1, 0, (1, (0,), frozenset()))]
    seen = {_canonical_state(1, [0], set())}
    states = []
    tick = itertools.count(1)

    def push(n, lab, arcs):
        if n > n_target:
            return False
        if len(set(lab)) > k:
            return False
        if not embeds(n, arcs):
            return False
        key = _canonical_state(n, lab, arcs)
        if key in seen:
            return False
        seen.add(key)
        canon_n, canon_lab, bits = key
        canon_arcs = frozenset(
            (p, q) for p in range(canon_n) for q in range(canon_n) if bits >> (p * canon_n + q) & 1
        )
        heapq.heappush(agenda, (canon_n, next(tick), (canon_n, canon_lab, canon_arcs)))
        return True

    while agenda:
        n, _, (sn, lab, arcs) = heapq.heappop(agenda)
        if sn == n_target and _unlabeled_key(sn, arcs) == target_key:
            return True
        states.append((sn, lab, arcs))
        used = sorted(set(lab))
        for i in used:
            for j in used:
                if i == j:
                    continue
                new = set(arcs)
                for a in range(sn):
                    if lab[a] != i:
                        continue
                    for b in range(sn):
                        if b != a and lab[b] == j:
                            new.add((a, b))
                if frozenset(new) != arcs:
                    push(sn, list(lab), frozenset(new))
                relab = [j if l == i else l for l in lab]
                push(sn, relab, arcs)
        for (on, olab, oarcs) in list(states):
            if sn + on > n_target:
                continue
            o_used = sorted(set(olab))
            for image in itertools.permutations(range(k), len(o_used)):
                ren = dict(zip(o_used, image))
                lab2 = list(lab) + [ren[l] for l in olab]
                arcs2 = set(arcs) | {(a + sn, b + sn) for (a, b) in oarcs}
                push(sn + on, lab2, frozenset(arcs2))
    return False


# ---------------------------------------------------------------------------
# Text syntax

_CW_TOKEN = re.compile(r"\s*([(),@]|add\[|add|ren|c|u|\]|[^\s()\[\],@]+)")


def parse_expression(text):
    """Parse ``c(i)``, ``c(i@tag)``, ``add(i,j,t)``, ``add[a](i,j,t)``,
    ``ren(i,j,t)`` and ``u(t1,t2)``."""
    pos = 0

    def error(msg):
        raise InputError(f"expression syntax error at {pos}: {msg}")

    def peek():
        m = _CW_TOKEN.match(text, pos)
        return m.group(1) if m else None

    def take(expected=None):
        nonlocal pos
        m = _CW_TOKEN.match(text, pos)
        if not m:
            error("unexpected end of input")
        tok = m.group(1)
        if expected is not None and tok != expected:
            error(f"expected {expected!r}, found {tok!r}")
        pos = m.end()
        return tok

    def parse_node():
        tok = take()
        if tok == "c":
            take("(")
            label = take()
            tag = None
            if peek() == "@":
                take("@")
                tag = take()
            take(")")
            return Const(label, tag)
        if tok in ("add", "add["):
            edge_tag = None
            if tok == "add[":
                edge_tag = take()
                take("]")
            take("(")
            i = take()
            take(",")
            j = take()
            take(",")
            sub = parse_node()
            take(")")
            return Add(i, j, sub, edge_tag)
        if tok == "ren":
            take("(")
            i = take()
            take(",")
            j = take()
            take(",")
            sub = parse_node()
            take(")")
            return Ren(i, j, sub)
        if tok == "u":
            take("(")
            left = parse_node()
            take(",")
            right = parse_node()
            take(")")
            return Union(left, right)
        error(f"unexpected token {tok!r}")

    node = parse_node()
    if text[pos:].strip():
        error("trailing input")
    return node


def format_expression(t) -> str:
    if isinstance(t, Const):
        return f"c({t.label})" if t.tag is None else f"c({t.label}@{t.tag})"
    if isinstance(t, Add):
        head = "add" if t.edge_tag is None else f"add[{t.edge_tag}]"
        return f"{head}({t.i},{t.j},{format_expression(t.sub)})"
    if isinstance(t, Ren):
        return f"ren({t.i},{t.j},{format_expression(t.sub)})"
    return f"u({format_expression(t.left)},{format_expression(t.right)})"
