"""Shared hand-checked fixture graphs used across test modules."""

from graphdec.graphs import MultiGraph, SimpleDigraph, TwoGraph, undirected_graph


def wheatstone_directed():
    """Directed bridge: path a->b->c->d with chords a->c and b->d."""
    return MultiGraph(
        "abcd",
        {
            "e1": ("a", "b"),
            "e2": ("b", "c"),
            "e3": ("c", "d"),
            "e4": ("a", "c"),
            "e5": ("b", "d"),
        },
    )


def whitney_g() -> MultiGraph:
    """A 12-edge 2-connected undirected multigraph with a rich factor
    structure; its canonical term from the edge "a" is
    par(a, ser(par(c, ser(b, f)), theta(g, k, m, h, par(n, p)), par(d, e)))
    with a 4-vertex skeleton missing one of its six vertex pairs."""
    edges = {
        "a": ("A", "B"),
        "b": ("A", "C"),
        "c": ("E", "A"),
        "d": ("B", "D"),
        "e": ("D", "B"),
        "f": ("C", "E"),
        "g": ("M", "E"),
        "h": ("D", "M"),
        "k": ("E", "F"),
        "m": ("F", "M"),
        "n": ("F", "D"),
        "p": ("F", "D"),
    }
    return MultiGraph("ABCDEFM", edges, set(edges))


def whitney_h() -> MultiGraph:
    """A graph with the same cycle matroid as whitney_g but different
    incidences, reachable from it by three twists."""
    edges = {
        "a": ("A", "B"),
        "g": ("B", "D"),
        "h": ("D", "P"),
        "e": ("Q", "A"),
        "c": ("Q", "P"),
        "f": ("Q", "R"),
        "b": ("R", "P"),
        "k": ("B", "C"),
        "m": ("D", "C"),
        "n": ("P", "C"),
        "p": ("P", "C"),
        "d": ("Q", "A"),
    }
    return MultiGraph("ABCDPQR", edges, set(edges))


def split_fig_graph() -> SimpleDigraph:
    """A 12-vertex connected undirected graph whose canonical split
    decomposition mixes triangles, stars and a prime component."""
    pairs = [
        ("b", "h"),
        ("b", "e"),
        ("h", "e"),
        ("e", "g"),
        ("k", "m"),
        ("n", "p"),
        ("n", "c"),
        ("p", "d"),
        ("c", "a"),
        ("d", "a"),
        ("c", "g"),
        ("d", "f"),
        ("k", "p"),
        ("m", "n"),
    ]
    return undirected_graph("abcdefghkmnp", pairs)


def non_weakly_partitive_digraph() -> SimpleDigraph:
    """1<-2->3->4<-5->6 with the extra edge 6->1; its splits
    {{1,2,3},{4,5,6}} and {{2,3,4},{5,6,1}} overlap but {{2,3},{4,5,6,1}}
    is not a split."""
    return SimpleDigraph(
        range(1, 7),
        {(2, 1), (2, 3), (3, 4), (5, 4), (5, 6), (6, 1)},
    )
