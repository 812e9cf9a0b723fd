"""Splits and joins of connected digraphs, circles of transitive
tournaments, the canonical split decomposition as a two-sorted graph with
epsilon edges, elimination and evaluation, and the canonicity checks.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .bipartitions import BipartitionFamily, bip_overlap, good_members, tree_partition
from .errors import CapacityError, InputError, PreconditionError, ValidationError
from .graphs import (
    SimpleDigraph,
    digraph_isomorphism,
    induced_subgraph,
    is_connected,
    is_strongly_connected,
    sort_key,
    sorted_ids,
)

SPLITS_CAP = 15


def is_split(g: SimpleDigraph, pair) -> bool:
    """Both blocks have two or more vertices and the edges between them
    form at most two complete directed bipartite bundles."""
    blocks = [frozenset(b) for b in pair]
    if len(blocks) != 2:
        raise InputError("a split candidate needs exactly two blocks")
    a, b = blocks
    if a | b != g.vertices or a & b:
        raise InputError("blocks must partition the vertex set")
    if len(a) < 2 or len(b) < 2:
        return False
    ab = {(x, y) for (x, y) in g.edges if x in a and y in b}
    ba = {(x, y) for (x, y) in g.edges if x in b and y in a}
    a1 = {x for (x, _) in ab}
    b1 = {y for (_, y) in ab}
    b2 = {x for (x, _) in ba}
    a2 = {y for (_, y) in ba}
    return ab == {(x, y) for x in a1 for y in b1} and ba == {(x, y) for x in b2 for y in a2}


def split_family(g: SimpleDigraph, cap=SPLITS_CAP) -> BipartitionFamily:
    """All splits of a connected graph, by exhaustive bipartition scan."""
    if not is_connected(g):
        raise PreconditionError("splits are defined for connected graphs")
    verts = sorted_ids(g.vertices)
    n = len(verts)
    if n > cap:
        raise CapacityError("split enumeration", n, cap)
    members = []
    for mask in range(1, 1 << (n - 1)) if n else []:
        a = frozenset(verts[i] for i in range(n) if mask >> i & 1)
        b = frozenset(verts) - a
        if len(a) >= 2 and len(b) >= 2 and is_split(g, (a, b)):
            members.append((a, b))
    return BipartitionFamily(g.vertices, members)


def good_splits(g: SimpleDigraph, cap=SPLITS_CAP) -> BipartitionFamily:
    return good_members(split_family(g, cap))


def join_at(h: SimpleDigraph, hm, k: SimpleDigraph, km) -> SimpleDigraph:
    """Glue two marked graphs: drop both markers and run an edge x -> y
    whenever x reached the first marker and the second marker reached y,
    or symmetrically."""
    if h.vertices & k.vertices:
        raise InputError("join operands must be vertex-disjoint")
    if hm not in h.vertices or km not in k.vertices:
        raise InputError("markers must belong to their graphs")
    verts = (h.vertices - {hm}) | (k.vertices - {km})
    edges = set()
    for (x, y) in h.edges:
        if hm not in (x, y):
            edges.add((x, y))
    for (x, y) in k.edges:
        if km not in (x, y):
            edges.add((x, y))
    for x in h.vertices - {hm}:
        if (x, hm) in h.edges:
            edges.update((x, y) for y in k.vertices - {km} if (km, y) in k.edges)
        if (hm, x) in h.edges:
            edges.update((y, x) for y in k.vertices - {km} if (y, km) in k.edges)
    return SimpleDigraph(verts, edges)


def _fresh_marker(base, taken):
    name = base
    while name in taken:
        name += "'"
    return name


def split_parts(g: SimpleDigraph, pair, marker_names=None):
    """The unique pair of marked graphs joining back to g along a split.

    Requires strong connectivity (undirected connected counts); otherwise
    the pair is not unique and the operation refuses.
    """
    if not is_strongly_connected(g):
        raise PreconditionError("split parts are unique for strongly connected graphs only")
    blocks = sorted((frozenset(b) for b in pair), key=lambda s: sorted_ids(s))
    if not is_split(g, blocks):
        raise InputError("not a split")
    a, b = blocks
    if marker_names is None:
        hm = _fresh_marker("!h", g.vertices)
        km = _fresh_marker("!k", g.vertices | {hm})
    else:
        hm, km = marker_names
        if hm in g.vertices or km in g.vertices or hm == km:
            raise InputError("marker names collide")

    def side(block, other, marker):
        sub = induced_subgraph(g, block)
        edges = set(sub.edges)
        for x in block:
            if any((x, u) in g.edges for u in other):
                edges.add((x, marker))
            if any((u, x) in g.edges for u in other):
                edges.add((marker, x))
        return SimpleDigraph(block | {marker}, edges)

    return side(a, b, hm), hm, side(b, a, km), km


# ---------------------------------------------------------------------------
# Circles of transitive tournaments


@dataclass(frozen=True)
class CTTSpec:
    """Hinge positions 0 = p_1 < ... < p_k < n on a circle of n vertices."""

    n: int
    hinges: tuple

    def __post_init__(self):
        if self.n < 3:
            raise InputError("a circle of tournaments needs at least 3 vertices")
        h = tuple(self.hinges)
        if not h or h[0] != 0 or list(h) != sorted(set(h)) or h[-1] >= self.n:
            raise InputError(f"bad hinge sequence {h}")

    @property
    def k(self):
        return len(self.hinges)

    def blocks(self):
        ps = list(self.hinges) + [self.n]
        return [(ps[i], ps[i + 1]) for i in range(self.k)]

    def edge_count(self):
        total = sum((b - a + 1) * (b - a) // 2 for a, b in self.blocks())
        return total - (1 if self.k == 1 else 0)


def ctt_graph(spec: CTTSpec) -> SimpleDigraph:
    """Vertices 0..n-1 on a circle; inside every hinge-to-hinge block all
    forward pairs are edges, indices taken modulo n at the wrap."""
    n = spec.n
    edges = set()
    for a, b in spec.blocks():
        for i in range(a, b + 1):
            for j in range(i + 1, b + 1):
                u, v = i % n, j % n
                if u != v:
                    edges.add((u, v))
    return SimpleDigraph(range(n), edges)


def _compositions(n):
    for mask in range(1 << (n - 1)):
        parts = []
        run = 1
        for i in range(n - 1):
            if mask >> i & 1:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        yield tuple(parts)


def _canonical_rotation(parts):
    rots = [parts[i:] + parts[:i] for i in range(len(parts))]
    return min(rots)


def recognize_ctt(g: SimpleDigraph):
    """A hinge spec whose circle graph is isomorphic to g, or None."""
    n = len(g.vertices)
    if n < 3 or not is_strongly_connected(g) or g.is_undirected():
        return None
    m = len(g.edges)
    degs = sorted((g.out_degree(v), g.in_degree(v)) for v in g.vertices)
    seen = set()
    for parts in _compositions(n):
        parts = _canonical_rotation(parts)
        if parts in seen:
            continue
        seen.add(parts)
        hinges = tuple(itertools.accumulate((0,) + parts[:-1]))
        spec = CTTSpec(n, hinges)
        if spec.edge_count() != m:
            continue
        cand = ctt_graph(spec)
        if sorted((cand.out_degree(v), cand.in_degree(v)) for v in cand.vertices) != degs:
            continue
        if digraph_isomorphism(cand, g) is not None:
            return spec
    return None


def ctt_hinge_vertices(g: SimpleDigraph):
    """The vertices playing hinge roles under some recognition, or None."""
    spec = recognize_ctt(g)
    if spec is None:
        return None
    mapping = digraph_isomorphism(ctt_graph(spec), g)
    return {mapping[p] for p in spec.hinges}


@dataclass(frozen=True)
class ComponentKind:
    kind: str  # "small", "clique", "star", "ctt", "prime", "other"
    n: int = 0
    center: object = None
    spec: CTTSpec = None


def classify_component(c: SimpleDigraph, cap=SPLITS_CAP) -> ComponentKind:
    """Pattern-match a connected graph against the canonical component
    shapes, falling back to a prime test by split enumeration."""
    if not is_connected(c):
        raise PreconditionError("component classification needs a connected graph")
    n = len(c.vertices)
    if n <= 2:
        return ComponentKind("small", n)
    if c.is_undirected():
        pairs = c.undirected_pairs()
        if len(pairs) == n * (n - 1) // 2:
            return ComponentKind("clique", n)
        centers = [v for v in c.vertices if len(c.neighbours(v)) == n - 1]
        if len(centers) == 1 and len(pairs) == n - 1:
            return ComponentKind("star", n, center=centers[0])
        if n == 3 and len(pairs) == 2:
            # a path on three vertices is the 2-star
            center = next(v for v in c.vertices if len(c.neighbours(v)) == 2)
            return ComponentKind("star", n, center=center)
    spec = recognize_ctt(c)
    if spec is not None:
        return ComponentKind("ctt", n, spec=spec)
    if n >= 4 and not split_family(c, cap).members:
        return ComponentKind("prime", n)
    return ComponentKind("other", n)


# ---------------------------------------------------------------------------
# Split decomposition graphs


class SDGraph:
    """Directed solid edges plus undirected epsilon edges; contracting the
    solid edges leaves a tree, so the solid components hang together in a
    tree shape.  The vertices free of epsilon edges are the vertices of
    the evaluated graph, recorded by the origin map."""

    def __init__(self, vertices, solid_edges, eps_edges, origin):
        self.vertices = frozenset(vertices)
        self.solid_edges = frozenset(tuple(e) for e in solid_edges)
        self.eps_edges = frozenset(frozenset(e) for e in eps_edges)
        self.origin = dict(origin)
        self._validate()

    def _validate(self):
        for (u, v) in self.solid_edges:
            if u == v or u not in self.vertices or v not in self.vertices:
                raise ValidationError(f"bad solid edge {u}->{v}")
        eps_touch = {}
        for pair in self.eps_edges:
            if len(pair) != 2 or any(v not in self.vertices for v in pair):
                raise ValidationError(f"bad eps edge {sorted(map(str, pair))}")
            for v in pair:
                if v in eps_touch:
                    raise ValidationError(f"two eps edges meet at {v}")
                eps_touch[v] = pair
        solid_touch = {x for e in self.solid_edges for x in e}
        bare = self.vertices - solid_touch
        if bare and not (len(self.vertices) == 1 and not self.eps_edges):
            raise ValidationError(f"vertices without solid edges: {sorted_ids(bare)}")
        comp = self._solid_components()
        comp_of = {v: i for i, vs in enumerate(comp) for v in vs}
        links = set()
        for pair in self.eps_edges:
            a, b = tuple(pair)
            ca, cb = comp_of[a], comp_of[b]
            if ca == cb:
                raise ValidationError("eps edge inside one solid component")
            link = frozenset((ca, cb))
            if link in links:
                raise ValidationError("two eps edges between the same components")
            links.add(link)
        if len(links) != len(comp) - 1:
            raise ValidationError("eps edges do not tie the components into a tree")
        adj = {i: set() for i in range(len(comp))}
        for link in links:
            x, y = tuple(link)
            adj[x].add(y)
            adj[y].add(x)
        if comp:
            seen = {0}
            stack = [0]
            while stack:
                for w in adj[stack.pop()]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            if len(seen) != len(comp):
                raise ValidationError("solid components are not connected by eps edges")
        eps_free = self.vertices - set(eps_touch)
        if set(self.origin.values()) != eps_free:
            raise ValidationError("origin must map onto exactly the eps-free vertices")
        if len(set(self.origin.values())) != len(self.origin):
            raise ValidationError("origin must be injective")

    def _solid_components(self):
        adj = {v: set() for v in self.vertices}
        for (u, v) in self.solid_edges:
            adj[u].add(v)
            adj[v].add(u)
        comps = []
        left = set(self.vertices)
        while left:
            start = min(left, key=sort_key)
            seen = {start}
            stack = [start]
            while stack:
                for w in adj[stack.pop()]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(frozenset(seen))
            left -= seen
        return comps

    def components(self):
        """The solid components as induced simple digraphs."""
        out = []
        for vs in self._solid_components():
            out.append(SimpleDigraph(vs, {(u, v) for (u, v) in self.solid_edges if u in vs and v in vs}))
        return out

    def eps_partner(self, v):
        for pair in self.eps_edges:
            if v in pair:
                (other,) = pair - {v}
                return other
        return None

    def to_text(self):
        lines = []
        touched = {x for e in self.solid_edges for x in e} | {x for p in self.eps_edges for x in p}
        for v in sorted_ids(self.vertices - touched):
            lines.append(f"vertex {v}")
        for (u, v) in sorted(self.solid_edges, key=lambda e: (str(e[0]), str(e[1]))):
            lines.append(f"edge {u} {v}")
        for pair in sorted((sorted_ids(p) for p in self.eps_edges), key=lambda p: list(map(str, p))):
            lines.append(f"eps {pair[0]} {pair[1]}")
        for o in sorted_ids(self.origin):
            lines.append(f"origin {o} {self.origin[o]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        vertices = set()
        solid = set()
        eps = set()
        origin = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "vertex" and len(parts) == 2:
                vertices.add(parts[1])
            elif parts[0] == "edge" and len(parts) == 3:
                solid.add((parts[1], parts[2]))
                vertices.update(parts[1:])
            elif parts[0] == "eps" and len(parts) == 3:
                eps.add(frozenset(parts[1:]))
                vertices.update(parts[1:])
            elif parts[0] == "origin" and len(parts) == 3:
                origin[parts[1]] = parts[2]
            else:
                raise InputError(f"line {lineno}: unrecognized record {line!r}")
        if not origin:
            eps_touch = {x for p in eps for x in p}
            origin = {v: v for v in vertices - eps_touch}
        return cls(vertices, solid, eps, origin)

    def to_dot(self):
        lines = ["digraph sd {"]
        for v in sorted_ids(self.vertices):
            shape = "circle" if v in set(self.origin.values()) else "point"
            lines.append(f'  "{v}" [shape={shape}];')
        done = set()
        for (u, v) in sorted(self.solid_edges, key=lambda e: (str(e[0]), str(e[1]))):
            if (v, u) in self.solid_edges:
                if (v, u) in done:
                    continue
                done.add((u, v))
                lines.append(f'  "{u}" -> "{v}" [dir=none];')
            else:
                lines.append(f'  "{u}" -> "{v}";')
        for pair in sorted((sorted_ids(p) for p in self.eps_edges), key=lambda p: list(map(str, p))):
            lines.append(f'  "{pair[0]}" -> "{pair[1]}" [dir=none, style=dotted];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def eliminate_eps(h: SDGraph, pair) -> SDGraph:
    """Remove one eps edge u-v, replacing it by the composite solid edges
    x -> y for x -> u, v -> y and for x -> v, u -> y."""
    pair = frozenset(pair)
    if pair not in h.eps_edges:
        raise InputError("not an eps edge")
    u, v = tuple(pair)
    solid = {(x, y) for (x, y) in h.solid_edges if u not in (x, y) and v not in (x, y)}
    for a, b in ((u, v), (v, u)):
        into = [x for (x, y) in h.solid_edges if y == a]
        outof = [y for (x, y) in h.solid_edges if x == b]
        solid.update((x, y) for x in into for y in outof)
    return SDGraph(
        h.vertices - {u, v},
        solid,
        h.eps_edges - {pair},
        h.origin,
    )


def eval_sd(h: SDGraph) -> SimpleDigraph:
    """Eliminate every eps edge, computed directly by following paths that
    alternate between solid steps and eps crossings."""
    eps_free = sorted_ids(set(h.origin.values()))
    succ = {}
    for (x, y) in h.solid_edges:
        succ.setdefault(x, set()).add(y)
    edges = set()
    for x in eps_free:
        seen = set()
        stack = []
        for w in succ.get(x, ()):
            if h.eps_partner(w) is None:
                edges.add((x, w))
            else:
                stack.append(w)
        while stack:
            w = stack.pop()
            if w in seen:
                continue
            seen.add(w)
            w2 = h.eps_partner(w)
            for y in succ.get(w2, ()):
                if h.eps_partner(y) is None:
                    edges.add((x, y))
                elif y not in seen:
                    stack.append(y)
    return SimpleDigraph(frozenset(eps_free), edges)


def split_decompose(g: SimpleDigraph, cap=SPLITS_CAP) -> SDGraph:
    """The canonical split decomposition of a strongly connected graph
    (equivalently a connected undirected one), built from the tree of
    good splits with one marker pair per tree edge."""
    if not is_connected(g):
        raise PreconditionError("split decomposition needs a connected graph")
    if not is_strongly_connected(g):
        raise PreconditionError(
            "directed input must be strongly connected; split decomposition "
            "is not canonical otherwise"
        )
    if len(g.vertices) > cap:
        raise CapacityError("split decomposition", len(g.vertices), cap)
    if len(g.vertices) <= 2:
        return SDGraph(g.vertices, g.edges, set(), {v: v for v in g.vertices})
    tp = tree_partition(good_splits(g, cap))
    edge_name = {}
    for i, e in enumerate(sorted((sorted_ids(e) for e in tp.edges), key=lambda p: list(map(str, p)))):
        edge_name[frozenset(e)] = f"s{i}"
    marker = {}
    for e in tp.edges:
        for x in e:
            marker[(e, x)] = f"({edge_name[e]},{x})"
    vertices = set()
    solid = set()
    for x in tp.nodes:
        box = tp.box[x]
        nbrs = tp.neighbours(x)
        sides = {y: tp.side_block(y, x) for y in nbrs}
        local = set(box) | {marker[(frozenset((x, y)), x)] for y in nbrs}
        vertices |= local
        for u in box:
            for w in box:
                if (u, w) in g.edges:
                    solid.add((u, w))
        for y in nbrs:
            mk = marker[(frozenset((x, y)), x)]
            for u in box:
                if any((u, v) in g.edges for v in sides[y]):
                    solid.add((u, mk))
                if any((v, u) in g.edges for v in sides[y]):
                    solid.add((mk, u))
        for y, z in itertools.combinations(nbrs, 2):
            my = marker[(frozenset((x, y)), x)]
            mz = marker[(frozenset((x, z)), x)]
            if any((u, v) in g.edges for u in sides[y] for v in sides[z]):
                solid.add((my, mz))
            if any((u, v) in g.edges for u in sides[z] for v in sides[y]):
                solid.add((mz, my))
    eps = {
        frozenset((marker[(e, tuple(e)[0])], marker[(e, tuple(e)[1])]))
        for e in tp.edges
    }
    return SDGraph(vertices, solid, eps, {v: v for v in g.vertices})


def iterative_decompose(g: SimpleDigraph, rng: random.Random, cap=SPLITS_CAP) -> SDGraph:
    """Split components along randomly chosen good splits until none is
    left; yields a decomposition graph isomorphic to the canonical one."""
    if not is_strongly_connected(g):
        raise PreconditionError("iterative decomposition needs strong connectivity")
    if len(g.vertices) > cap:
        raise CapacityError("split decomposition", len(g.vertices), cap)
    comps = [g]
    eps = []
    counter = itertools.count()
    while True:
        progress = False
        order = list(range(len(comps)))
        rng.shuffle(order)
        for i in order:
            goods = list(good_members(split_family(comps[i], cap)).members)
            if not goods:
                continue
            pick = rng.choice(sorted(goods, key=lambda p: sorted(sorted_ids(b) for b in p)))
            k = next(counter)
            h, hm, kk, km = split_parts(comps[i], pick, (f"!m{k}a", f"!m{k}b"))
            comps[i : i + 1] = [h, kk]
            eps.append(frozenset((hm, km)))
            progress = True
            break
        if not progress:
            break
    vertices = set()
    solid = set()
    for c in comps:
        vertices |= c.vertices
        solid |= c.edges
    return SDGraph(vertices, solid, eps, {v: v for v in g.vertices})


def sd_isomorphic(h1: SDGraph, h2: SDGraph, fixed=()) -> bool:
    """Isomorphism respecting solid directions and eps edges, fixing the
    listed vertices pointwise."""
    if (
        len(h1.vertices) != len(h2.vertices)
        or len(h1.solid_edges) != len(h2.solid_edges)
        or len(h1.eps_edges) != len(h2.eps_edges)
    ):
        return False
    fixed = frozenset(fixed)

    def sig(h, v):
        out_deg = sum(1 for (a, _) in h.solid_edges if a == v)
        in_deg = sum(1 for (_, b) in h.solid_edges if b == v)
        has_eps = h.eps_partner(v) is not None
        return (out_deg, in_deg, has_eps)

    sig2 = {}
    for w in h2.vertices:
        sig2.setdefault(sig(h2, w), []).append(w)
    order = sorted(h1.vertices, key=lambda v: (len(sig2.get(sig(h1, v), [])), sort_key(v)))
    mapping = {}
    used = set()

    def ok(v, w):
        for x, y in mapping.items():
            if ((v, x) in h1.solid_edges) != ((w, y) in h2.solid_edges):
                return False
            if ((x, v) in h1.solid_edges) != ((y, w) in h2.solid_edges):
                return False
            if (frozenset((v, x)) in h1.eps_edges) != (frozenset((w, y)) in h2.eps_edges):
                return False
        return True

    def extend(i):
        if i == len(order):
            return True
        v = order[i]
        cands = [v] if v in fixed else sig2.get(sig(h1, v), [])
        for w in cands:
            if w in used or (w in fixed and w != v):
                continue
            if ok(v, w):
                mapping[v] = w
                used.add(w)
                if extend(i + 1):
                    return True
                del mapping[v]
                used.remove(w)
        return False

    return extend(0)


def check_canonical(h: SDGraph, cap=SPLITS_CAP):
    """Violations of the canonical-decomposition conditions: a component of
    an unknown shape, two neighbouring cliques, a star center joined to a
    star non-center, or two circles of tournaments merging into one."""
    comps = h.components()
    if len(comps) == 1 and len(h.vertices) <= 2:
        return []
    comp_of = {}
    kinds = {}
    for i, c in enumerate(comps):
        for v in c.vertices:
            comp_of[v] = i
        kinds[i] = classify_component(c, cap)
    violations = []
    for i, c in enumerate(comps):
        if kinds[i].kind in ("other", "small"):
            violations.append(
                {"rule": 1, "detail": f"component {sorted_ids(c.vertices)} is {kinds[i].kind}"}
            )
    for pair in h.eps_edges:
        a, b = tuple(pair)
        ka, kb = kinds[comp_of[a]], kinds[comp_of[b]]
        if ka.kind == "clique" and kb.kind == "clique":
            violations.append({"rule": 2, "detail": f"cliques joined at {a}-{b}"})
        if ka.kind == "star" and kb.kind == "star":
            if (ka.center == a) != (kb.center == b):
                violations.append({"rule": 3, "detail": f"star center joined to non-center at {a}-{b}"})
        if ka.kind == "ctt" and kb.kind == "ctt":
            merged = eliminate_eps(h, pair)
            merged_comp = next(
                c for c in merged.components()
                if (comps[comp_of[a]].vertices - {a}) <= c.vertices
            )
            if recognize_ctt(merged_comp) is not None:
                violations.append({"rule": 4, "detail": f"tournament circles merge at {a}-{b}"})
    return violations
