import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphdec.errors import InputError
from graphdec.formats import (
    digraph_from_json,
    digraph_to_json,
    format_edge_list,
    multigraph_from_json,
    multigraph_to_dot,
    multigraph_to_json,
    parse_edge_list,
)
from graphdec.graphs import (
    MultiGraph,
    SimpleDigraph,
    canonical_undirected,
    digraph_isomorphism,
    edge_identified_isomorphism,
    edge_induced,
    induced_subgraph,
    is_connected,
    is_strongly_connected,
    is_two_connected,
    multigraph_isomorphism,
    undirected_graph,
)
from tests.conftest import random_digraph


def k3():
    return undirected_graph("abc", [("a", "b"), ("b", "c"), ("a", "c")])


def test_no_loops():
    with pytest.raises(InputError):
        SimpleDigraph({"a"}, {("a", "a")})
    with pytest.raises(InputError):
        MultiGraph({"a"}, {"e": ("a", "a")})


def test_induced_subgraph_k3():
    g = induced_subgraph(k3(), {"a", "b"})
    assert g.edges == {("a", "b"), ("b", "a")}


def test_induced_subgraph_identity():
    g = random_digraph(random.Random(1), 6)
    assert induced_subgraph(g, g.vertices) == g


def test_induced_subgraph_unknown_vertex():
    with pytest.raises(InputError):
        induced_subgraph(k3(), {"a", "z"})


@given(st.integers(0, 2**20), st.integers(2, 8))
@settings(max_examples=40, deadline=None)
def test_induced_subgraph_matches_filter_oracle(seed, n):
    rng = random.Random(seed)
    g = random_digraph(rng, n)
    xs = {v for v in g.vertices if rng.random() < 0.5}
    sub = induced_subgraph(g, xs)
    assert sub.vertices == frozenset(xs)
    assert sub.edges == {(u, v) for (u, v) in g.edges if u in xs and v in xs}


def test_edge_induced():
    tri = MultiGraph("uvw", {"e1": ("u", "v"), "e2": ("v", "w"), "e3": ("w", "u")})
    assert edge_induced(tri, set()) == MultiGraph()
    assert edge_induced(tri, {"e1", "e2", "e3"}) == tri
    one = edge_induced(tri, {"e1"})
    assert one.vertices == {"u", "v"} and set(one.edges) == {"e1"}
    with pytest.raises(InputError):
        edge_induced(tri, {"nope"})


def test_connectivity():
    assert is_connected(SimpleDigraph({"a"}))
    g = SimpleDigraph({1, 2, 3}, {(1, 2)})
    assert not is_connected(g)
    assert is_connected(SimpleDigraph({1, 2}, {(1, 2)}))
    cycle = SimpleDigraph(range(4), {(i, (i + 1) % 4) for i in range(4)})
    assert is_strongly_connected(cycle)
    assert not is_strongly_connected(SimpleDigraph({1, 2}, {(1, 2)}))


def test_two_connected_parallel_edges():
    bond = MultiGraph({"u", "v"}, {"e1": ("u", "v"), "e2": ("u", "v")})
    assert is_two_connected(bond)
    single = MultiGraph({"u", "v"}, {"e1": ("u", "v")})
    assert is_two_connected(single)


def test_two_connected_path_false():
    path = MultiGraph("uvw", {"e1": ("u", "v"), "e2": ("v", "w")})
    assert not is_two_connected(path)


def test_two_connected_wheatstone():
    g = MultiGraph(
        "abcd",
        {
            "e1": ("a", "b"),
            "e2": ("b", "c"),
            "e3": ("c", "d"),
            "e4": ("a", "c"),
            "e5": ("b", "d"),
        },
    )
    assert is_two_connected(g)


def test_two_connected_brute_force_agreement():
    rng = random.Random(7)
    for _ in range(40):
        n = rng.randint(2, 7)
        edges = {}
        for i in range(rng.randint(1, 12)):
            u = rng.randrange(n)
            v = rng.randrange(n)
            if u != v:
                edges[f"e{i}"] = (u, v)
        verts = set(range(n)) | {x for uv in edges.values() for x in uv}
        g = MultiGraph(verts, edges)

        def brute(g):
            if not g.edges or not is_connected(g) or any(g.degree(v) == 0 for v in g.vertices):
                return False
            return all(is_connected(g.without_vertex(v)) for v in g.vertices)

        assert is_two_connected(g) == brute(g)


def test_isomorphism_reflexive_and_c4_vs_p4():
    g = random_digraph(random.Random(3), 7)
    m = digraph_isomorphism(g, g)
    assert m is not None
    c4 = undirected_graph(range(4), [(0, 1), (1, 2), (2, 3), (3, 0)])
    p4 = undirected_graph(range(4), [(0, 1), (1, 2), (2, 3)])
    assert digraph_isomorphism(c4, p4) is None


@given(st.integers(0, 2**20))
@settings(max_examples=30, deadline=None)
def test_isomorphism_finds_relabeling(seed):
    rng = random.Random(seed)
    g = random_digraph(rng, 7)
    perm = list(g.vertices)
    rng.shuffle(perm)
    mapping = dict(zip(sorted(g.vertices), perm))
    h = g.relabel(mapping)
    found = digraph_isomorphism(g, h)
    assert found is not None
    assert all((found[u], found[v]) in h.edges for (u, v) in g.edges)


def test_isomorphism_fixed_vertices():
    c4 = undirected_graph(range(4), [(0, 1), (1, 2), (2, 3), (3, 0)])
    m = digraph_isomorphism(c4, c4, fixed={0, 1})
    assert m is not None and m[0] == 0 and m[1] == 1


def test_multigraph_isomorphism_counts_parallels():
    a = MultiGraph({1, 2}, {"x": (1, 2), "y": (1, 2)})
    b = MultiGraph({3, 4}, {"p": (3, 4), "q": (3, 4)})
    assert multigraph_isomorphism(a, b) is not None
    c = MultiGraph({3, 4}, {"p": (3, 4), "q": (4, 3)})
    assert multigraph_isomorphism(a, c) is None


def test_edge_identified_isomorphism():
    a = MultiGraph({1, 2, 3}, {"e": (1, 2), "f": (2, 3)})
    b = MultiGraph({9, 8, 7}, {"e": (9, 8), "f": (8, 7)})
    m = edge_identified_isomorphism(a, b)
    assert m == {1: 9, 2: 8, 3: 7}
    c = MultiGraph({9, 8, 7}, {"e": (9, 8), "f": (7, 8)})
    assert edge_identified_isomorphism(a, c) is None
    # undirected edges may flip
    au = MultiGraph({1, 2, 3}, {"e": (1, 2), "f": (2, 3)}, {"e", "f"})
    cu = MultiGraph({9, 8, 7}, {"e": (9, 8), "f": (7, 8)}, {"e", "f"})
    assert edge_identified_isomorphism(au, cu) is not None


def test_canonical_undirected_separates():
    a = MultiGraph(range(4), {"a": (0, 1), "b": (1, 2), "c": (2, 3), "d": (3, 0)})
    b = a.relabel_vertices({0: 9, 1: 8, 2: 7, 3: 6})
    c = MultiGraph(range(4), {"a": (0, 1), "c": (1, 2), "b": (2, 3), "d": (3, 0)})
    assert canonical_undirected(a) == canonical_undirected(b)
    assert canonical_undirected(a) != canonical_undirected(c)


def test_edge_list_round_trip():
    text = """
# a comment
vertex isolated
edge e1 a b directed
edge e2 b c undirected
"""
    g = parse_edge_list(text)
    assert g.vertices == {"isolated", "a", "b", "c"}
    assert g.undirected == {"e2"}
    again = parse_edge_list(format_edge_list(g))
    assert again == g


def test_json_round_trips():
    g = random_digraph(random.Random(5), 5)
    assert digraph_from_json(digraph_to_json(g)) == g
    m = MultiGraph({1, 2}, {"e": (1, 2), "f": (2, 1)}, {"f"})
    assert multigraph_from_json(multigraph_to_json(m)) == m


def test_dot_output_mentions_edges():
    m = MultiGraph({1, 2}, {"e": (1, 2)})
    dot = multigraph_to_dot(m)
    assert '"1" -> "2"' in dot and 'label="e"' in dot
