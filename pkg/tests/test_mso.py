import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphdec.errors import CapacityError, InputError
from graphdec.graphs import RelStructure, digraph_as_structure, rel_structure_isomorphism
from graphdec.modular import all_modules, is_module
from graphdec.mso import (
    And,
    Atom,
    DefinitionScheme,
    Equal,
    Exists,
    FalseF,
    Forall,
    Implies,
    Member,
    Not,
    Or,
    TrueF,
    apply_scheme,
    contract_eps_direct,
    definable_family,
    edge_contraction_scheme,
    eval_formula,
    free_vars,
    module_formula,
    parse_formula,
    print_formula,
    split_block_formula,
    transitive_closure_formula,
)
from graphdec.split import split_family
from tests.conftest import random_connected_undirected, random_digraph, random_strongly_connected


def path_structure(n):
    return RelStructure(range(n), {"edg": (2, {(i, i + 1) for i in range(n - 1)})})


def test_parse_round_trip_example():
    f = parse_formula("exists X (x in X)")
    assert f == Exists("X", Member("x", "X"))
    assert print_formula(f) == "exists X (x in X)"
    assert parse_formula(print_formula(f)) == f


def test_parse_tc_formula_shape():
    f = transitive_closure_formula()
    # one set quantifier, two first-order quantifiers
    counts = {"so": 0, "fo": 0}

    def walk(node):
        if isinstance(node, (Exists, Forall)):
            counts["so" if node.var[0].isupper() else "fo"] += 1
            walk(node.body)
        elif isinstance(node, Not):
            walk(node.sub)
        elif isinstance(node, (And, Or, Implies)):
            walk(node.left)
            walk(node.right)

    walk(f)
    assert counts == {"so": 1, "fo": 2}
    assert free_vars(f) == {"x", "y"}


def test_parse_errors():
    with pytest.raises(InputError):
        parse_formula("exists X (x in X")
    with pytest.raises(InputError):
        parse_formula("x in y")  # membership needs a set variable
    with pytest.raises(InputError):
        parse_formula("and x")


formula_strategy = st.deferred(
    lambda: st.one_of(
        st.sampled_from(
            [
                Atom("edg", ("x", "y")),
                Atom("edg", ("y", "x")),
                Member("x", "X"),
                Member("y", "X"),
                Equal("x", "y"),
                TrueF(),
                FalseF(),
            ]
        ),
        st.builds(Not, formula_strategy),
        st.builds(And, formula_strategy, formula_strategy),
        st.builds(Or, formula_strategy, formula_strategy),
        st.builds(Implies, formula_strategy, formula_strategy),
        st.builds(Exists, st.sampled_from(["x", "y", "z", "X", "Z"]), formula_strategy),
        st.builds(Forall, st.sampled_from(["x", "y", "z", "X", "Z"]), formula_strategy),
    )
)


@given(formula_strategy)
@settings(max_examples=120, deadline=None)
def test_print_parse_inverse(f):
    assert parse_formula(print_formula(f)) == f


def nnf(f, neg=False):
    if isinstance(f, Not):
        return nnf(f.sub, not neg)
    if isinstance(f, And):
        op = Or if neg else And
        return op(nnf(f.left, neg), nnf(f.right, neg))
    if isinstance(f, Or):
        op = And if neg else Or
        return op(nnf(f.left, neg), nnf(f.right, neg))
    if isinstance(f, Implies):
        if neg:
            return And(nnf(f.left, False), nnf(f.right, True))
        return Or(nnf(f.left, True), nnf(f.right, False))
    if isinstance(f, Exists):
        op = Forall if neg else Exists
        return op(f.var, nnf(f.body, neg))
    if isinstance(f, Forall):
        op = Exists if neg else Forall
        return op(f.var, nnf(f.body, neg))
    if isinstance(f, TrueF):
        return FalseF() if neg else f
    if isinstance(f, FalseF):
        return TrueF() if neg else f
    return Not(f) if neg else f


@given(formula_strategy, st.integers(0, 2**20))
@settings(max_examples=60, deadline=None)
def test_negation_normal_form_agrees(f, seed):
    rng = random.Random(seed)
    g = random_digraph(rng, 3)
    s = digraph_as_structure(g)
    verts = sorted(s.domain)
    asg = {}
    for v in free_vars(f):
        if v[0].isupper():
            asg[v] = frozenset(x for x in verts if rng.random() < 0.5)
        else:
            asg[v] = rng.choice(verts)
    assert eval_formula(s, f, asg) == eval_formula(s, nnf(f), asg)


def test_tautology():
    s = path_structure(3)
    assert eval_formula(s, parse_formula("forall x (x = x)"))


def test_tc_on_path():
    s = path_structure(3)
    f = transitive_closure_formula()
    assert eval_formula(s, f, {"x": 0, "y": 2})
    assert not eval_formula(s, f, {"x": 2, "y": 0})


def test_tc_matches_reachability():
    rng = random.Random(3)
    for _ in range(12):
        n = rng.randint(2, 5)
        g = random_digraph(rng, n)
        s = digraph_as_structure(g)
        f = transitive_closure_formula()
        reach = {v: {v} for v in g.vertices}
        for v in g.vertices:
            stack = [v]
            while stack:
                w = stack.pop()
                for z in g.successors(w):
                    if z not in reach[v]:
                        reach[v].add(z)
                        stack.append(z)
        for x in g.vertices:
            for y in g.vertices:
                assert eval_formula(s, f, {"x": x, "y": y}) == (y in reach[x])


def test_module_formula_matches_is_module():
    rng = random.Random(5)
    for _ in range(10):
        g = random_digraph(rng, rng.randint(1, 5))
        s = digraph_as_structure(g)
        fam = definable_family(s, module_formula())
        assert fam.members == all_modules(g).members
        f = module_formula()
        for mask in range(1 << len(g.vertices)):
            verts = sorted(g.vertices)
            sub = frozenset(verts[i] for i in range(len(verts)) if mask >> i & 1)
            expected = bool(sub) and is_module(g, sub)
            assert eval_formula(s, f, {"X": sub}) == expected


def test_definable_family_true_false():
    s = path_structure(3)
    assert len(definable_family(s, FalseF())) == 0
    assert len(definable_family(s, TrueF())) == 8


def test_split_formula_matches_split_blocks():
    rng = random.Random(7)
    done = 0
    while done < 8:
        n = rng.randint(4, 7)
        if rng.random() < 0.5:
            g = random_connected_undirected(rng, n)
        else:
            g = random_strongly_connected(rng, n)
        s = digraph_as_structure(g)
        blocks = definable_family(s, split_block_formula())
        assert blocks.members == split_family(g).blocks()
        done += 1


def test_capacity_guards():
    big = RelStructure(range(16), {"edg": (2, set())})
    with pytest.raises(CapacityError):
        eval_formula(big, parse_formula("exists X (exists x (x in X))"))
    bomb = parse_formula(
        "exists X (exists Y (exists Z (forall x (forall y (forall z (x = x))))))"
    )
    with pytest.raises(CapacityError):
        eval_formula(RelStructure(range(12), {"edg": (2, set())}), bomb, so_cap=14, budget=1 << 20)


def test_identity_scheme():
    s = path_structure(3)
    scheme = DefinitionScheme(
        1,
        TrueF(),
        (TrueF(),),
        {("edg", (1, 1)): Atom("edg", ("x1", "x2"))},
    )
    out = apply_scheme(scheme, s)
    expected = RelStructure(
        {(i, 1) for i in range(3)},
        {"edg": (2, {((0, 1), (1, 1)), ((1, 1), (2, 1))})},
    )
    assert out == expected


def test_scheme_with_false_input_condition():
    s = path_structure(2)
    scheme = DefinitionScheme(1, FalseF(), (TrueF(),), {("edg", (1, 1)): Atom("edg", ("x1", "x2"))})
    assert apply_scheme(scheme, s) is None


def two_sorted_eps_structure(rng, n, eps_p=0.3):
    """Random graph with plain and eps edges, eps kept cycle-free-ish."""
    edges = set()
    eps = set()
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            r = rng.random()
            if r < 0.25:
                edges.add((u, v))
            elif r < 0.25 + eps_p / n:
                eps.add((u, v))
    return RelStructure(range(n), {"edg": (2, edges), "eps": (2, eps)})


def test_edge_contraction_scheme_matches_direct():
    rng = random.Random(11)
    scheme = edge_contraction_scheme()
    for _ in range(8):
        n = rng.randint(2, 5)
        s = two_sorted_eps_structure(rng, n)
        outputs = []
        domain = sorted(s.domain)
        for mask in range(1 << n):
            y = frozenset(domain[i] for i in range(n) if mask >> i & 1)
            out = apply_scheme(scheme, s, {"Y": y})
            if out is not None:
                outputs.append(out)
        assert outputs
        direct = contract_eps_direct(s)
        lifted = RelStructure(
            {(x, 1) for x in direct.domain},
            {"edg": (2, {((a, 1), (b, 1)) for (a, b) in direct.relations["edg"][1]})},
        )
        for out in outputs:
            assert rel_structure_isomorphism(out, lifted) is not None
        for a, b in itertools.combinations(outputs[:6], 2):
            assert rel_structure_isomorphism(a, b) is not None
