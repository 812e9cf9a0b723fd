import functools
import itertools
import random

import pytest

from graphdec.errors import InputError, PreconditionError
from graphdec.graphs import MultiGraph, is_two_connected, two_graphs_equal
from graphdec.twodag import EdgeConst, Par, Ser, contract_sep, eval_term
from graphdec.whitney import (
    TwistChoice,
    all_twist_choices,
    apply_twist_choice,
    matroid_equal,
    matroid_indep,
    nabla_count,
    nabla_terms,
    term_and_sep,
    term_positions,
    twist_sep,
    twistings,
    two_isomorphic_graphs,
    underlying_key,
)
from tests.conftest import random_two_connected_multigraph
from tests.fixtures import whitney_g, whitney_h


def c4(order=("a", "b", "c", "d")):
    verts = list(range(4))
    edges = {e: (verts[i], verts[(i + 1) % 4]) for i, e in enumerate(order)}
    return MultiGraph(verts, edges, set(order))


def test_matroid_indep_basics():
    g = c4()
    assert matroid_indep(g, set())
    assert matroid_indep(g, {"a", "b", "c"})
    assert not matroid_indep(g, {"a", "b", "c", "d"})
    bond = MultiGraph({0, 1}, {"x": (0, 1), "y": (0, 1)})
    assert not matroid_indep(bond, {"x", "y"})
    with pytest.raises(InputError):
        matroid_indep(g, {"zz"})


def test_matroid_equal_edge_reversal_and_forests():
    g = MultiGraph({0, 1, 2}, {"e": (0, 1), "f": (1, 2)})
    h = MultiGraph({0, 1, 2}, {"e": (1, 0), "f": (1, 2)})
    assert matroid_equal(g, h)
    f1 = MultiGraph({0, 1, 2, 3}, {"e": (0, 1), "f": (2, 3)})
    f2 = MultiGraph({0, 1, 2}, {"e": (0, 1), "f": (1, 2)})
    assert matroid_equal(f1, f2)


def test_matroid_equal_c4_reorderings():
    assert matroid_equal(c4(("a", "b", "c", "d")), c4(("a", "c", "b", "d")))
    with pytest.raises(InputError):
        matroid_equal(c4(), MultiGraph({0, 1}, {"x": (0, 1), "y": (0, 1)}))


def test_twistings_directed_triangle():
    tri = MultiGraph("xyz", {"e1": ("x", "y"), "e2": ("y", "z"), "e3": ("z", "x")})
    out = twistings(tri)
    assert out
    for t in out:
        assert underlying_key(t.underlying_undirected()) == underlying_key(tri.underlying_undirected())
        assert matroid_equal(tri, t)


def test_twistings_bond_only_flips():
    bond = MultiGraph({0, 1}, {"e1": (0, 1), "e2": (0, 1), "e3": (0, 1)})
    for t in twistings(bond):
        assert underlying_key(t.underlying_undirected()) == underlying_key(bond.underlying_undirected())


def test_twistings_reach_whitney_h():
    g = whitney_g()
    h = whitney_h()
    seen = {underlying_key(g): g}
    frontier = [g]
    target = underlying_key(h)
    while frontier:
        nxt = []
        for cur in frontier:
            for t in twistings(cur):
                und = t.underlying_undirected()
                k = underlying_key(und)
                if k not in seen:
                    seen[k] = und
                    nxt.append(und)
        frontier = nxt
    assert target in seen


def test_nabla_leaf_and_small_terms():
    leaf = EdgeConst("e")
    terms = list(nabla_terms(leaf))
    assert terms == [EdgeConst("e"), EdgeConst("e", True)]
    ser = Ser([EdgeConst("e"), EdgeConst("f")])
    out = list(nabla_terms(ser))
    assert len(out) == 8 == nabla_count(ser)
    assert len(set(map(repr, out))) == 8
    par = Par([EdgeConst("e"), EdgeConst("f")])
    assert len(list(nabla_terms(par))) == 4 == nabla_count(par)


def test_nabla_count_matches_stream(rng):
    from tests.conftest import random_two_dag
    from graphdec.twodag import canonical_term

    for _ in range(15):
        g = random_two_dag(rng, rng.randint(1, 6))
        t = canonical_term(g)
        n = nabla_count(t)
        if n > 3000:
            continue
        stream = [repr(x) for x in nabla_terms(t)]
        assert len(stream) == n
        assert len(set(stream)) == n


def test_apply_twist_choice_identity_and_membership(rng):
    from tests.conftest import random_two_dag
    from graphdec.twodag import canonical_term

    for _ in range(10):
        g = random_two_dag(rng, rng.randint(2, 6))
        t = canonical_term(g)
        assert apply_twist_choice(t, TwistChoice()) == t
        choices = list(all_twist_choices(t))
        if len(choices) > 4000:
            continue
        pick = rng.choice(choices)
        modified = apply_twist_choice(t, pick)
        assert repr(modified) in {repr(x) for x in nabla_terms(t)}


def test_apply_twist_choice_validates_positions():
    t = Ser([EdgeConst("e"), EdgeConst("f")])
    with pytest.raises(InputError):
        apply_twist_choice(t, TwistChoice(swap_positions=frozenset({()})))
    with pytest.raises(InputError):
        apply_twist_choice(t, TwistChoice(series_perms=(((), (0,)),)))


def test_twist_routes_agree(rng):
    from tests.conftest import random_two_dag

    pairs = 0
    while pairs < 100:
        g = random_two_dag(rng, rng.randint(2, 8))
        term, sep, pos_map = term_and_sep(g)
        assert two_graphs_equal(contract_sep(sep), g)
        choices = list(itertools.islice(all_twist_choices(term), 5000))
        for _ in range(4):
            c = rng.choice(choices)
            via_term = eval_term(apply_twist_choice(term, c))
            via_sep = contract_sep(twist_sep(sep, term, pos_map, c))
            assert two_graphs_equal(via_term, via_sep)
            pairs += 1


def test_two_isomorphic_bond_singleton():
    bond = MultiGraph({0, 1}, {"x": (0, 1), "y": (0, 1)})
    out = list(two_isomorphic_graphs(bond))
    assert len(out) == 1


def test_two_isomorphic_c4_three_graphs():
    out = list(two_isomorphic_graphs(c4()))
    assert len(out) == 3
    keys = {underlying_key(g) for g in out}
    for order in itertools.permutations("abcd"):
        assert underlying_key(c4(order).underlying_undirected()) in keys


def test_two_isomorphic_contains_whitney_h():
    out = list(two_isomorphic_graphs(whitney_g()))
    assert underlying_key(whitney_h().underlying_undirected()) in {underlying_key(g) for g in out}


def twisting_closure(g):
    start = g.underlying_undirected()
    seen = {underlying_key(start): start}
    frontier = [start]
    while frontier:
        nxt = []
        for cur in frontier:
            for t in twistings(cur):
                und = t.underlying_undirected()
                k = underlying_key(und)
                if k not in seen:
                    seen[k] = und
                    nxt.append(und)
        frontier = nxt
    return seen


@functools.lru_cache(maxsize=None)
def all_two_connected_multigraphs(m):
    """Every 2-connected loop-free multigraph on edges e0..e(m-1), up to
    vertex renaming, by partitioning the 2m edge-end slots into vertices."""
    eids = [f"e{i}" for i in range(m)]
    slots = [(e, k) for e in eids for k in (0, 1)]
    results = {}

    def build(classes):
        edges = {}
        for ci, cls in enumerate(classes):
            for (e, _) in cls:
                edges.setdefault(e, []).append(ci)
        mg = MultiGraph(range(len(classes)), {e: tuple(uv) for e, uv in edges.items()},
                        set(edges))
        if is_two_connected(mg):
            results.setdefault(underlying_key(mg), mg)

    def assign(i, classes):
        if i == len(slots):
            if all(len(c) >= 2 for c in classes):
                build(classes)
            return
        slot = slots[i]
        e, k = slot
        remaining = len(slots) - i
        undersized = sum(1 for c in classes if len(c) == 1)
        if undersized > remaining:
            return
        for ci, cls in enumerate(classes):
            if any(e2 == e for (e2, _) in cls):
                continue
            if k == 1:
                # symmetric slots: put the second end in a class not
                # earlier than the first end's class
                first_ci = next(j for j, c in enumerate(classes) if (e, 0) in c)
                if ci < first_ci:
                    continue
            cls.append(slot)
            assign(i + 1, classes)
            cls.pop()
        if len(classes) < m:
            classes.append([slot])
            assign(i + 1, classes)
            classes.pop()

    assign(0, [])
    return dict(results)


def test_exhaustive_oracle_small_counts():
    assert len(all_two_connected_multigraphs(2)) == 1  # the 2-bond
    assert len(all_two_connected_multigraphs(3)) == 2  # triangle and 3-bond


def test_two_isomorphic_matches_twisting_closure_and_matroid(rng):
    for _ in range(12):
        m = rng.randint(2, 7)
        g = random_two_connected_multigraph(rng, m)
        out = list(two_isomorphic_graphs(g))
        keys = {underlying_key(x) for x in out}
        assert keys == set(twisting_closure(g))
        for x in out:
            assert matroid_equal(g, x)


def test_two_isomorphic_complete_at_tiny_scale(rng):
    done = 0
    while done < 8:
        m = rng.randint(2, 6)
        g = random_two_connected_multigraph(rng, m)
        # align edge ids with the oracle's e0..e(m-1) naming
        assert set(g.edges) == {f"e{i}" for i in range(m)}
        out = {underlying_key(x) for x in two_isomorphic_graphs(g)}
        expected = {
            k for k, cand in all_two_connected_multigraphs(m).items() if matroid_equal(g, cand)
        }
        assert out == expected
        done += 1


def test_two_isomorphic_rejects_non_two_connected():
    path = MultiGraph("abc", {"e1": ("a", "b"), "e2": ("b", "c")})
    with pytest.raises(PreconditionError):
        list(two_isomorphic_graphs(path))


def test_paper_style_modification_reaches_h():
    """Flip one series pair, swap the skeleton, rotate the outer chain, and
    land on the second fixture graph."""
    g = whitney_g()
    from graphdec.twodag import bipolar_orient

    dag, _ = bipolar_orient(g, "a")
    term, sep, pos_map = term_and_sep(dag)
    nodes = dict(term_positions(term))
    (bf_pos,) = [
        p
        for p, n in nodes.items()
        if isinstance(n, Ser) and sorted(repr(a) for a in n.args) == ["e:b", "e:f"]
    ]
    (theta_pos,) = [p for p, n in nodes.items() if n.__class__.__name__ == "Theta"]
    (outer_pos,) = [p for p, n in nodes.items() if isinstance(n, Ser) and len(n.args) == 3]
    choice = TwistChoice(
        swap_positions=frozenset({theta_pos}),
        series_perms=((bf_pos, (1, 0)), (outer_pos, (2, 0, 1))),
    )
    via_term = eval_term(apply_twist_choice(term, choice))
    via_sep = contract_sep(twist_sep(sep, term, pos_map, choice))
    assert two_graphs_equal(via_term, via_sep)
    assert underlying_key(via_term.graph.underlying_undirected()) == underlying_key(
        whitney_h().underlying_undirected()
    )
