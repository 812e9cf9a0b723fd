import itertools
import random

import pytest

from graphdec.errors import CapacityError, InputError, ValidationError
from graphdec.graphs import SimpleDigraph, digraph_isomorphism, induced_subgraph, undirected_graph
from graphdec.modular import (
    all_modules,
    decomposition_graph,
    graph_from_decomposition,
    is_module,
    md_tree,
    representative,
    substitute,
)
from graphdec.partitive import check_family
from tests.conftest import random_digraph, random_undirected


def transitive_tournament(n):
    return SimpleDigraph(range(n), {(i, j) for i in range(n) for j in range(i + 1, n)})


def p4():
    return undirected_graph("abcd", [("a", "b"), ("b", "c"), ("c", "d")])


def brute_modules(g):
    verts = sorted(g.vertices, key=str)
    out = set()
    for r in range(1, len(verts) + 1):
        for c in itertools.combinations(verts, r):
            m = frozenset(c)
            ok = True
            for z in g.vertices - m:
                if len({(x, z) in g.edges for x in m}) > 1 or len({(z, x) in g.edges for x in m}) > 1:
                    ok = False
                    break
            if ok:
                out.add(m)
    return out


def test_is_module_basics():
    g = p4()
    for v in g.vertices:
        assert is_module(g, {v})
    assert is_module(g, g.vertices)
    assert not is_module(g, {"b", "c"})
    with pytest.raises(InputError):
        is_module(g, {"zz"})


def test_all_modules_k3_i3_p4():
    k3 = undirected_graph("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    i3 = SimpleDigraph("abc")
    assert all_modules(k3).members == frozenset(brute_modules(k3))
    assert len(all_modules(k3)) == 7
    assert len(all_modules(i3)) == 7
    mods = all_modules(p4())
    assert mods.members == frozenset(
        {frozenset("abcd"), frozenset("a"), frozenset("b"), frozenset("c"), frozenset("d")}
    )


def test_all_modules_cap():
    with pytest.raises(CapacityError):
        all_modules(SimpleDigraph(range(20)), cap=16)


def test_module_family_partitivity():
    rng = random.Random(2024)
    for _ in range(25):
        g = random_digraph(rng, rng.randint(1, 7))
        flags = check_family(all_modules(g))
        assert flags.p0prime and flags.weakly_partitive
    for _ in range(25):
        g = random_undirected(rng, rng.randint(1, 7))
        assert check_family(all_modules(g)).partitive


def test_md_tree_transitive_tournament():
    for n in (2, 4, 5):
        mt = md_tree(transitive_tournament(n))
        t = mt.tree
        root_kind = t.kind[t.root]
        assert root_kind.name == "linear"
        assert len(t.children(t.root)) == n
        seq = [t.subtree_union(s) for s in root_kind.order]
        assert seq == [frozenset({i}) for i in range(n)]


def test_md_tree_union_of_joins():
    g = undirected_graph(range(4), [(0, 1), (2, 3)])
    mt = md_tree(g)
    t = mt.tree
    assert t.kind[t.root].name == "complete" and mt.complete_tag[t.root] == "union"
    kids = t.children(t.root)
    assert len(kids) == 2
    for k in kids:
        assert t.kind[k].name == "complete" and mt.complete_tag[k] == "join"


def test_md_tree_p4_prime():
    mt = md_tree(p4())
    t = mt.tree
    assert t.kind[t.root].name == "prime"
    q = mt.quotient[t.root]
    assert digraph_isomorphism(q.relabel({n: representative(t, n) for n in q.vertices}), p4())


def test_md_tree_boxes_internal_empty():
    mt = md_tree(random_digraph(random.Random(4), 7))
    t = mt.tree
    for n in t.internal_nodes():
        assert t.box[n] == frozenset()
    for n in t.leaves():
        assert len(t.box[n]) == 1


def test_md_tree_strong_modules_match_brute_filter():
    rng = random.Random(99)
    for _ in range(20):
        g = random_digraph(rng, rng.randint(1, 7))
        mods = brute_modules(g) | {frozenset({v}) for v in g.vertices}
        strong = {
            m
            for m in mods
            if not any(m & o and not m <= o and not o <= m for o in mods if o != m)
        }
        assert md_tree(g).strong_module_sets() == strong


def test_md_tree_no_same_tag_nesting_and_dag_rule():
    rng = random.Random(123)
    for _ in range(30):
        g = random_digraph(rng, rng.randint(1, 8))
        mt = md_tree(g)  # ModularTree validates the nesting rules itself
        acyclic = True
        # crude cycle check
        color = {}

        def dfs(v):
            nonlocal acyclic
            color[v] = 1
            for w in g.successors(v):
                if color.get(w) == 1:
                    acyclic = False
                elif w not in color:
                    dfs(w)
            color[v] = 2

        for v in g.vertices:
            if v not in color:
                dfs(v)
        if acyclic:
            assert all(tag != "join" for tag in mt.complete_tag.values())


def test_substitute_single_vertex_is_renaming():
    g = p4()
    h = SimpleDigraph({"w"})
    got = substitute(g, "a", h)
    assert got == g.relabel({"a": "w"})


def test_substitute_defines_union_and_join():
    g = random_digraph(random.Random(6), 4)
    h = random_digraph(random.Random(7), 3)
    h = h.relabel({v: f"h{v}" for v in h.vertices})
    k_union = SimpleDigraph({"u", "v"})
    combined = substitute(substitute(k_union, "u", g), "v", h)
    assert combined.vertices == g.vertices | h.vertices
    assert combined.edges == g.edges | h.edges
    k_join = SimpleDigraph({"u", "v"}, {("u", "v"), ("v", "u")})
    joined = substitute(substitute(k_join, "u", g), "v", h)
    cross = {(a, b) for a in g.vertices for b in h.vertices}
    assert joined.edges == g.edges | h.edges | cross | {(b, a) for (a, b) in cross}


def test_substitute_neighborhood_rule():
    rng = random.Random(8)
    for _ in range(20):
        g = random_digraph(rng, 5)
        h = random_digraph(rng, 3).relabel({v: f"h{v}" for v in range(3)})
        u = rng.choice(sorted(g.vertices))
        got = substitute(g, u, h)
        assert got.vertices == (g.vertices - {u}) | h.vertices
        for x in g.vertices - {u}:
            for y in h.vertices:
                assert ((x, y) in got.edges) == ((x, u) in g.edges)
                assert ((y, x) in got.edges) == ((u, x) in g.edges)


def test_substitute_renames_colliding_vertices():
    g = SimpleDigraph({0, 1}, {(0, 1)})
    h = SimpleDigraph({1, 2}, {(1, 2)})
    got = substitute(g, 0, h)
    assert len(got.vertices) == 3
    assert 1 in got.vertices  # the original vertex 1 of g survives


def test_quotient_reconstructs_internal_nodes():
    rng = random.Random(9)
    for _ in range(15):
        g = random_digraph(rng, rng.randint(2, 7))
        mt = md_tree(g)
        t = mt.tree
        for node in t.internal_nodes():
            kind = t.kind[node]
            sons = t.children(node)
            k = len(sons)
            slots = [f"slot{i}" for i in range(k)]
            if kind.name == "complete":
                pairs = set()
                if mt.complete_tag[node] == "join":
                    pairs = {(a, b) for a in slots for b in slots if a != b}
                base = SimpleDigraph(slots, pairs)
                order = list(sons)
            elif kind.name == "linear":
                base = SimpleDigraph(slots, {(slots[i], slots[j]) for i in range(k) for j in range(i + 1, k)})
                order = list(kind.order)
            else:
                q = mt.quotient[node]
                order = list(sons)
                idx = {s: slots[i] for i, s in enumerate(order)}
                base = SimpleDigraph(slots, {(idx[a], idx[b]) for (a, b) in q.edges})
            rebuilt = base
            for i, son in enumerate(order):
                rebuilt = substitute(rebuilt, slots[i], induced_subgraph(g, t.subtree_union(son)))
            assert rebuilt == induced_subgraph(g, t.subtree_union(node))


def test_gdec_counts_for_tournaments():
    for n in range(3, 9):
        d = decomposition_graph(transitive_tournament(n))
        assert len(d.vertices | d.internal) == n + 1
        assert d.edge_count() == 2 * n - 1


def test_gdec_single_vertex():
    d = decomposition_graph(SimpleDigraph({"v"}))
    assert d.vertices == {"v"} and not d.internal and d.edge_count() == 0
    assert graph_from_decomposition(d) == SimpleDigraph({"v"})


def test_gdec_round_trip_random():
    rng = random.Random(10)
    for _ in range(60):
        g = random_digraph(rng, rng.randint(1, 8))
        d = decomposition_graph(g)
        assert graph_from_decomposition(d) == g


def test_gdec_validation_catches_broken_input():
    d = decomposition_graph(p4())
    with pytest.raises(ValidationError):
        type(d)(
            d.vertices,
            d.internal,
            d.root,
            set(list(d.son_edges)[1:]),  # drop a son edge
            d.order_edges,
            d.quotient_edges,
            d.node_type,
        )
