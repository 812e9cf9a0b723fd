import random

import pytest

from graphdec.graphs import MultiGraph, SimpleDigraph, TwoGraph, undirected_graph


def random_digraph(rng, n, p=0.35):
    vertices = list(range(n))
    edges = set()
    for u in vertices:
        for v in vertices:
            if u != v and rng.random() < p:
                edges.add((u, v))
    return SimpleDigraph(vertices, edges)


def random_undirected(rng, n, p=0.4):
    vertices = list(range(n))
    pairs = [(u, v) for i, u in enumerate(vertices) for v in vertices[i + 1 :] if rng.random() < p]
    return undirected_graph(vertices, pairs)


def random_connected_undirected(rng, n, extra=0.3):
    """Random spanning tree plus extra undirected pairs."""
    vertices = list(range(n))
    pairs = set()
    for i in range(1, n):
        pairs.add((rng.randrange(i), i))
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in pairs and rng.random() < extra:
                pairs.add((i, j))
    return undirected_graph(vertices, pairs)


def random_strongly_connected(rng, n, extra=0.25):
    """Random directed cycle through all vertices plus extra arcs."""
    vertices = list(range(n))
    perm = vertices[:]
    rng.shuffle(perm)
    edges = {(perm[i], perm[(i + 1) % n]) for i in range(n)}
    for u in vertices:
        for v in vertices:
            if u != v and (u, v) not in edges and rng.random() < extra:
                edges.add((u, v))
    return SimpleDigraph(vertices, edges)


def random_two_connected_multigraph(rng, m, max_parallel=3):
    """Random 2-connected loop-free multigraph with m edges, grown by ears."""
    assert m >= 2
    eids = [f"e{i}" for i in range(m)]
    # start from a bond of 2 edges, then attach ears/parallel edges
    edges = {eids[0]: (0, 1), eids[1]: (0, 1)}
    nv = 2
    i = 2
    while i < m:
        verts = list(range(nv))
        u = rng.choice(verts)
        v = rng.choice([x for x in verts if x != u])
        remaining = m - i
        parallel = {e for e, uv in edges.items() if set(uv) == {u, v}}
        pair_full = len(parallel) >= max_parallel
        if remaining >= 2 and (pair_full or rng.random() < 0.5):
            length = rng.randint(2, min(remaining, 3))
        else:
            # a parallel edge; tolerate exceeding the cap when it is the
            # only way to finish
            length = 1
        prev = u
        for k in range(length - 1):
            edges[eids[i]] = (prev, nv)
            prev = nv
            nv += 1
            i += 1
        edges[eids[i]] = (prev, v)
        i += 1
    verts = {x for uv in edges.values() for x in uv}
    return MultiGraph(verts, edges)


def random_two_dag(rng, m):
    """Random 2-dag with m edges built from series/parallel/theta steps."""
    from graphdec.twodag import theta_substitute, single_edge

    def build(edge_ids):
        if len(edge_ids) == 1:
            return single_edge(edge_ids[0])
        if len(edge_ids) >= 5 and rng.random() < 0.3:
            # Wheatstone skeleton with 5 slots
            k = 5
            groups = _split_into(rng, edge_ids, k)
            skel = wheatstone_two_graph()
            return theta_substitute(skel, [build(g) for g in groups])
        k = rng.randint(2, min(3, len(edge_ids)))
        groups = _split_into(rng, edge_ids, k)
        subs = [build(g) for g in groups]
        if rng.random() < 0.5:
            return theta_substitute(parallel_skeleton(k), subs)
        return theta_substitute(series_skeleton(k), subs)

    return build([f"e{i}" for i in range(m)])


def _split_into(rng, items, k):
    items = list(items)
    rng.shuffle(items)
    cuts = sorted(rng.sample(range(1, len(items)), k - 1))
    groups = []
    prev = 0
    for c in cuts + [len(items)]:
        groups.append(items[prev:c])
        prev = c
    return groups


def parallel_skeleton(k):
    edges = {f"_p{i}": ("s", "t") for i in range(k)}
    return TwoGraph(MultiGraph({"s", "t"}, edges), "s", "t")


def series_skeleton(k):
    verts = [f"v{i}" for i in range(k + 1)]
    edges = {f"_s{i}": (verts[i], verts[i + 1]) for i in range(k)}
    return TwoGraph(MultiGraph(verts, edges), verts[0], verts[-1])


def wheatstone_two_graph():
    edges = {
        "_w0": ("a", "b"),
        "_w1": ("b", "c"),
        "_w2": ("c", "d"),
        "_w3": ("a", "c"),
        "_w4": ("b", "d"),
    }
    return TwoGraph(MultiGraph({"a", "b", "c", "d"}, edges), "a", "d")


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
