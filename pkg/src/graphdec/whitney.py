"""Cycle matroids and 2-isomorphism: independence testing, single-step
twistings, the term-set recursion enumerating all recompositions of a
canonical term, its mirror on the separated representation, and the full
enumeration of graphs with the same cycle matroid as a given 2-connected
graph.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import CapacityError, InputError, PreconditionError
from .graphs import MultiGraph, TwoGraph, is_two_connected, sort_key, sorted_ids
from .twodag import (
    EdgeConst,
    FactorTree,
    Par,
    SepGraph,
    Ser,
    Theta,
    bipolar_orient,
    factor_tree,
    parallel_graphs,
    sep_graph_from_factor_tree,
    series_graphs,
    single_edge,
    theta_substitute,
)

MATROID_CAP = 16


def matroid_indep(g: MultiGraph, es) -> bool:
    """No undirected cycle among the chosen edges (parallel pairs included)."""
    es = frozenset(es)
    if not es <= set(g.edges):
        raise InputError("unknown edge ids")
    parent = {}

    def find(v):
        parent.setdefault(v, v)
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in es:
        a, b = g.edges[e]
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def matroid_equal(g: MultiGraph, h: MultiGraph, cap=MATROID_CAP) -> bool:
    """Same edge ids and the same independent subsets."""
    if g.edge_ids() != h.edge_ids():
        raise InputError("cycle matroid comparison needs equal edge-id sets")
    eids = sorted_ids(g.edges)
    m = len(eids)
    if m > cap:
        raise CapacityError("matroid comparison", m, cap)
    for mask in range(1 << m):
        es = [eids[i] for i in range(m) if mask >> i & 1]
        if matroid_indep(g, es) != matroid_indep(h, es):
            return False
    return True


# ---------------------------------------------------------------------------
# Single-step twistings


def _legs(g: MultiGraph, u, v):
    """Edge classes of g relative to the vertex pair {u, v}: direct u-v
    edges are singleton legs, all other edges group by the component of
    g minus u and v that they touch."""
    rest = g.without_vertex(u).without_vertex(v)
    comp = {}
    for w in rest.vertices:
        if w in comp:
            continue
        stack = [w]
        comp[w] = w
        while stack:
            x = stack.pop()
            for e in rest.incident(x):
                y = rest.other_end(e, x)
                if y not in comp:
                    comp[y] = w
                    stack.append(y)
    legs = {}
    for e, (a, b) in g.edges.items():
        if {a, b} == {u, v}:
            legs[("direct", e)] = {e}
        else:
            anchor = a if a not in (u, v) else b
            legs.setdefault(("comp", comp[anchor]), set()).add(e)
    return list(legs.values())


def _touches_both(g: MultiGraph, es, u, v):
    verts = {x for e in es for x in g.edges[e]}
    return u in verts and v in verts


def _swap_part(g: MultiGraph, es, u, v):
    """Endpoints of the chosen edges with u and v exchanged."""
    swap = {u: v, v: u}
    return {e: (swap.get(a, a), swap.get(b, b)) for e, (a, b) in g.edges.items() if e in es}


def twistings(g: MultiGraph, cap=MATROID_CAP):
    """All single-step twistings of a 2-connected multigraph: split the
    edges at a vertex pair into two connected parts and reglue one of them
    with the pair exchanged."""
    if len(g.edges) > cap:
        raise CapacityError("twisting enumeration", len(g.edges), cap)
    if not is_two_connected(g):
        raise PreconditionError("twisting needs a 2-connected graph")
    seen = {}
    for u, v in itertools.combinations(sorted_ids(g.vertices), 2):
        legs = _legs(g, u, v)
        if len(legs) < 2:
            continue
        if not all(_touches_both(g, leg, u, v) for leg in legs):
            continue
        for mask in range(1, (1 << len(legs)) - 1):
            m_side = set()
            for i, leg in enumerate(legs):
                if mask >> i & 1:
                    m_side |= leg
            edges = {e: uv for e, uv in g.edges.items() if e not in m_side}
            edges.update(_swap_part(g, m_side, u, v))
            twisted = MultiGraph(g.vertices, edges, g.undirected)
            key = tuple(
                sorted(
                    (str(e), tuple(sorted(map(str, uv))) if e in g.undirected else tuple(map(str, uv)))
                    for e, uv in edges.items()
                )
            )
            if key not in seen:
                seen[key] = twisted
    return [seen[k] for k in sorted(seen)]


# ---------------------------------------------------------------------------
# Twist choices on canonical terms


@dataclass(frozen=True)
class TwistChoice:
    """A recomposition choice: source swaps at some skeleton positions,
    edge reversals at some leaf positions, and one permutation per series
    position (identity entries may be omitted)."""

    swap_positions: frozenset = frozenset()
    flip_positions: frozenset = frozenset()
    series_perms: tuple = ()  # pairs (position, permutation tuple)

    def perm_map(self):
        return dict(self.series_perms)


def term_positions(t, pos=()):
    yield pos, t
    if not isinstance(t, EdgeConst):
        for i, a in enumerate(t.args):
            yield from term_positions(a, pos + (i,))


def validate_choice(t, c: TwistChoice):
    nodes = dict(term_positions(t))
    for p in c.swap_positions:
        if not isinstance(nodes.get(p), Theta):
            raise InputError(f"position {p} is not a skeleton node")
    for p in c.flip_positions:
        if not isinstance(nodes.get(p), EdgeConst):
            raise InputError(f"position {p} is not a leaf")
    for p, perm in c.series_perms:
        node = nodes.get(p)
        if not isinstance(node, Ser):
            raise InputError(f"position {p} is not a series node")
        if sorted(perm) != list(range(len(node.args))):
            raise InputError(f"bad permutation {perm} at {p}")


def apply_twist_choice(t, c: TwistChoice):
    """The term with edges reversed at the chosen leaves, skeleton sources
    swapped at the chosen positions, and series arguments permuted."""
    validate_choice(t, c)
    perms = c.perm_map()

    def rec(node, pos):
        if isinstance(node, EdgeConst):
            if pos in c.flip_positions:
                return EdgeConst(node.edge, not node.reverse)
            return node
        args = [rec(a, pos + (i,)) for i, a in enumerate(node.args)]
        if isinstance(node, Par):
            return Par(args)
        if isinstance(node, Ser):
            perm = perms.get(pos)
            if perm:
                args = [args[i] for i in perm]
            return Ser(args)
        skel = node.skeleton.swapped() if pos in c.swap_positions else node.skeleton
        return Theta(skel, node.edge_order, args)

    return rec(t, ())


def all_twist_choices(t):
    """Deterministic stream of every twist choice of a term."""
    flips = []
    swaps = []
    series = []
    for pos, node in term_positions(t):
        if isinstance(node, EdgeConst):
            flips.append(pos)
        elif isinstance(node, Ser):
            series.append((pos, len(node.args)))
        elif isinstance(node, Theta):
            swaps.append(pos)
    flip_opts = itertools.product((False, True), repeat=len(flips))
    for flip_vec in flip_opts:
        chosen_flips = frozenset(p for p, f in zip(flips, flip_vec) if f)
        perm_space = itertools.product(*(itertools.permutations(range(k)) for _, k in series))
        for perm_vec in perm_space:
            perm_entries = tuple(
                (pos, perm) for (pos, _), perm in zip(series, perm_vec)
            )
            for swap_vec in itertools.product((False, True), repeat=len(swaps)):
                yield TwistChoice(
                    frozenset(p for p, s in zip(swaps, swap_vec) if s),
                    chosen_flips,
                    perm_entries,
                )


def nabla_count(t) -> int:
    """Closed-form size of the recomposition term set."""
    if isinstance(t, EdgeConst):
        return 2
    total = 1
    for a in t.args:
        total *= nabla_count(a)
    if isinstance(t, Ser):
        total *= math.factorial(len(t.args))
    elif isinstance(t, Theta):
        total *= 2
    return total


def nabla_terms(t):
    """Stream of all recompositions of t, one per twist choice, without
    duplicates."""
    for c in all_twist_choices(t):
        yield apply_twist_choice(t, c)


# ---------------------------------------------------------------------------
# The rewiring route on the separated representation


def term_from_factor_tree(ft: FactorTree, reversed_ids=frozenset()):
    tree = ft.tree

    def build(node):
        kind = tree.kind[node]
        if kind.name == "leaf":
            (eid,) = tree.subtree_union(node)
            return EdgeConst(eid, eid in reversed_ids)
        args = [build(s) for s in tree.children(node)]
        if kind.name == "parallel":
            return Par(args)
        if kind.name == "series":
            return Ser(args)
        return Theta(ft.skeleton[node], ft.skeleton_order[node], args)

    return build(tree.root)


def term_and_sep(g: TwoGraph, cap=None):
    """The canonical term of a 2-dag together with its separated graph and
    the map from term positions to separated-tree nodes.

    Parallel arguments keep tree order here (sorted by minimal edge id),
    so term positions and tree nodes correspond one to one.
    """
    ft = factor_tree(g) if cap is None else factor_tree(g, cap)
    sep, names = sep_graph_from_factor_tree(ft)
    term = term_from_factor_tree(ft)
    pos_map = {}

    def walk(node, pos):
        pos_map[pos] = names[node]
        for i, child in enumerate(ft.tree.children(node)):
            walk(child, pos + (i,))

    walk(ft.tree.root, ())
    return term, sep, pos_map


def twist_sep(s: SepGraph, term, pos_map, c: TwistChoice) -> SepGraph:
    """Rewire the separated graph according to a twist choice: swap the
    two connector rows of each chosen skeleton node towards its sons,
    re-chain the sons of each permuted series node, and reverse the solid
    edges of flipped leaves."""
    validate_choice(term, c)
    nodes = dict(term_positions(term))
    solid = dict(s.solid)
    eps = set(s.eps_edges)
    tree = s.tree
    for pos in c.flip_positions:
        node = pos_map[pos]
        e = s.leaf_map[node]
        a, b = solid[e]
        solid[e] = (b, a)
    for pos in c.swap_positions:
        x = pos_map[pos]
        sons = set(tree.children(x))
        for pair in list(eps):
            va, vb = tuple(pair)
            for this, other in ((va, vb), (vb, va)):
                if this[0] == x and other[0] in sons:
                    eps.discard(pair)
                    eps.add(frozenset(((x, 3 - this[1]), other)))
                    break
    for pos, perm in c.series_perms:
        if list(perm) == list(range(len(perm))):
            continue
        x = pos_map[pos]
        sons = list(tree.children(x))
        chain = [((x, 1), (sons[0], 1))]
        chain += [((sons[i], 2), (sons[i + 1], 1)) for i in range(len(sons) - 1)]
        chain += [((sons[-1], 2), (x, 2))]
        for a, b in chain:
            eps.discard(frozenset((a, b)))
        permuted = [sons[i] for i in perm]
        new_chain = [((x, 1), (permuted[0], 1))]
        new_chain += [((permuted[i], 2), (permuted[i + 1], 1)) for i in range(len(permuted) - 1)]
        new_chain += [((permuted[-1], 2), (x, 2))]
        for a, b in new_chain:
            eps.add(frozenset((a, b)))
    return SepGraph(tree, solid, eps, s.leaf_map)


# ---------------------------------------------------------------------------
# Full enumeration of the 2-isomorphism class


def _source_tagged_key(g: TwoGraph):
    def tag(v):
        return 1 if v == g.s1 else 2 if v == g.s2 else 0

    return tuple(
        sorted((tag(v), tuple(sorted_ids(g.graph.incident(v)))) for v in g.graph.vertices)
    )


def underlying_key(g: MultiGraph):
    return tuple(sorted(tuple(sorted_ids(g.incident(v))) for v in g.vertices if g.degree(v)))


def _value_set(t):
    """All values of the recomposition terms of t, deduplicated as
    source-marked undirected graphs."""
    if isinstance(t, EdgeConst):
        vals = [single_edge(t.edge), single_edge(t.edge, reverse=True)]
    else:
        child_vals = [_value_set(a) for a in t.args]
        vals = []
        if isinstance(t, Par):
            for combo in itertools.product(*child_vals):
                vals.append(parallel_graphs(combo))
        elif isinstance(t, Ser):
            for perm in itertools.permutations(range(len(t.args))):
                for combo in itertools.product(*(child_vals[i] for i in perm)):
                    vals.append(series_graphs(combo))
        else:
            for skel in (t.skeleton, t.skeleton.swapped()):
                for combo in itertools.product(*child_vals):
                    ordered = dict(zip(t.edge_order, combo))
                    vals.append(
                        theta_substitute(skel, [ordered[e] for e in sorted_ids(skel.graph.edges)])
                    )
    out = {}
    for v in vals:
        out.setdefault(_source_tagged_key(v), v)
    return list(out.values())


def two_isomorphic_graphs(g: MultiGraph, cap=MATROID_CAP, limit=None):
    """Stream of every multigraph with the cycle matroid of g, as
    underlying undirected multigraphs on the same edge ids, pairwise
    non-isomorphic under edge-identified maps.

    Works through the canonical term from the minimal edge: recomposition
    values are collected bottom up with deduplication at every node, which
    keeps the stream far below the raw term count.
    """
    if len(g.edges) > cap:
        raise CapacityError("2-isomorphism enumeration", len(g.edges), cap)
    if not is_two_connected(g):
        raise PreconditionError("2-isomorphism enumeration needs a 2-connected graph")
    base = min(g.edges, key=sort_key)
    dag, _ = bipolar_orient(g, base)
    term = term_from_factor_tree(factor_tree(dag))
    seen = {}
    for val in _value_set(term):
        und = val.graph.underlying_undirected()
        seen.setdefault(underlying_key(und), und)
    count = 0
    for key in sorted(seen):
        if limit is not None and count >= limit:
            return
        yield seen[key]
        count += 1
