"""Families of bipartitions of a ground set, their unrooted trees with
boxes, good members, and the complete/circular/prime node typing.

This is the unrooted counterpart of the partitive-set engine; the Tutte
and split decompositions instantiate it with 2-separations and splits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ClassificationError, PreconditionError, ValidationError
from .graphs import sort_key, sorted_ids
from .partitive import SetFamily, tree_from_laminar


def bipartition(a, b, ground=None):
    a, b = frozenset(a), frozenset(b)
    if ground is not None and a | b != frozenset(ground):
        raise ValidationError("blocks must cover the ground set")
    if a & b:
        raise ValidationError("blocks must be disjoint")
    if not a or not b:
        raise ValidationError("no block may be empty")
    return frozenset((a, b))


class BipartitionFamily:
    """A set of unordered bipartitions of a common ground set."""

    def __init__(self, ground, members):
        self.ground = frozenset(ground)
        mem = set()
        for p in members:
            blocks = [frozenset(x) for x in p]
            if len(blocks) != 2:
                raise ValidationError(f"not a bipartition: {p}")
            mem.add(bipartition(blocks[0], blocks[1], self.ground))
        self.members = frozenset(mem)

    def __eq__(self, other):
        return (
            isinstance(other, BipartitionFamily)
            and self.ground == other.ground
            and self.members == other.members
        )

    def __len__(self):
        return len(self.members)

    def __contains__(self, p):
        return frozenset(frozenset(b) for b in p) in self.members

    def __repr__(self):
        return f"BipartitionFamily(|V|={len(self.ground)}, {len(self.members)} members)"

    def blocks(self):
        return {b for p in self.members for b in p}

    def plus(self):
        """Add every bipartition splitting off a single element."""
        extra = {
            bipartition({v}, self.ground - {v})
            for v in self.ground
            if len(self.ground) >= 2
        }
        return BipartitionFamily(self.ground, self.members | extra)

    def to_json(self):
        return {
            "ground": sorted_ids(self.ground),
            "members": sorted(
                sorted(sorted_ids(b) for b in p) for p in self.members
            ),
        }


def bip_overlap(p, q) -> bool:
    """All four block intersections are nonempty."""
    return all(bool(a & b) for a in p for b in q)


@dataclass(frozen=True)
class BipFlags:
    b0: bool
    b1: bool
    weakly_partitive: bool
    partitive: bool


def check_bip_family(f: BipartitionFamily) -> BipFlags:
    b0 = all(
        bipartition({v}, f.ground - {v}) in f.members
        for v in f.ground
    ) if len(f.ground) >= 2 else True
    members = list(f.members)
    b1 = True
    b2 = True
    b3 = True
    for p, q in itertools.combinations(members, 2):
        if not bip_overlap(p, q):
            continue
        b1 = False
        pa, pa2 = tuple(p)
        qa, qa2 = tuple(q)
        for a, a2 in ((pa, pa2), (pa2, pa)):
            for b, b2_ in ((qa, qa2), (qa2, qa)):
                if frozenset((a & b, a2 | b2_)) not in f.members:
                    b2 = False
        if frozenset((pa ^ qa, pa ^ qa2)) not in f.members:
            b3 = False
    return BipFlags(b0, b1, b2, b2 and b3)


def good_members(f: BipartitionFamily) -> BipartitionFamily:
    """The bipartitions overlapping no other member."""
    members = list(f.members)
    good = [p for p in members if not any(bip_overlap(p, q) for q in members if q != p)]
    return BipartitionFamily(f.ground, good)


class TreePartition:
    """Unrooted tree whose node boxes partition the ground set; every edge
    realizes the bipartition splitting the boxes across its two sides."""

    def __init__(self, nodes, edges, box):
        self.nodes = frozenset(nodes)
        self.edges = frozenset(frozenset(e) for e in edges)
        self.box = {n: frozenset(b) for n, b in box.items()}
        self._adj = {n: set() for n in self.nodes}
        for e in self.edges:
            a, b = tuple(e)
            if a == b or a not in self.nodes or b not in self.nodes:
                raise ValidationError(f"bad tree edge {sorted(map(str, e))}")
            self._adj[a].add(b)
            self._adj[b].add(a)
        self._validate()

    def _validate(self):
        if set(self.box) != self.nodes:
            raise ValidationError("every node needs a box")
        if len(self.edges) != len(self.nodes) - 1:
            raise ValidationError("not a tree: wrong edge count")
        if self.nodes:
            start = next(iter(self.nodes))
            seen = {start}
            stack = [start]
            while stack:
                for w in self._adj[stack.pop()]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            if seen != self.nodes:
                raise ValidationError("not a tree: disconnected")
        taken = set()
        for n, b in self.box.items():
            if b & taken:
                raise ValidationError("boxes must be pairwise disjoint")
            taken |= b
        for n in self.nodes:
            if len(self._adj[n]) in (1, 2) and not self.box[n]:
                raise ValidationError(f"node {n} of degree {len(self._adj[n])} has an empty box")

    @property
    def ground(self):
        return frozenset().union(*self.box.values()) if self.box else frozenset()

    def neighbours(self, n):
        return sorted(self._adj[n], key=sort_key)

    def side_nodes(self, x, y):
        """Nodes reachable from x without using the edge x-y, including x."""
        if frozenset((x, y)) not in self.edges:
            raise ValidationError(f"{x}-{y} is not a tree edge")
        seen = {x}
        stack = [x]
        while stack:
            v = stack.pop()
            for w in self._adj[v]:
                if (v, w) in ((x, y), (y, x)):
                    continue
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def side_block(self, x, y):
        return frozenset().union(*(self.box[n] for n in self.side_nodes(x, y)))

    def edge_bipartition(self, e):
        a, b = tuple(e)
        return frozenset((self.side_block(a, b), self.side_block(b, a)))

    def bipartition_family(self) -> BipartitionFamily:
        return BipartitionFamily(self.ground, [self.edge_bipartition(e) for e in self.edges])

    def to_json(self):
        names = {n: i for i, n in enumerate(sorted_ids(self.nodes))}
        return {
            "nodes": [
                {"id": names[n], "label": str(n), "box": sorted_ids(self.box[n])}
                for n in sorted_ids(self.nodes)
            ],
            "edges": sorted(sorted(names[x] for x in e) for e in self.edges),
        }


def tree_partition(f: BipartitionFamily) -> TreePartition:
    """The unique tree-partition realizing an overlap-free bipartition
    family; an empty family gives a single node boxing everything."""
    if not f.ground:
        raise PreconditionError("tree partitions need a nonempty ground set")
    members = list(f.members)
    for p, q in itertools.combinations(members, 2):
        if bip_overlap(p, q):
            raise PreconditionError(
                f"family violates overlap-freeness: {sorted(map(sorted_ids, p))} vs {sorted(map(sorted_ids, q))}"
            )
    if not members:
        return TreePartition({"t0"}, set(), {"t0": f.ground})
    blocks = sorted({b for p in members for b in p}, key=lambda b: (len(b), sorted_ids(b)))
    minimal = [b for b in blocks if not any(b2 < b for b2 in blocks)]
    r_block = minimal[0]
    laminar = SetFamily(
        f.ground - r_block,
        [b for b in blocks if not (r_block <= b)],
    )
    rooted = tree_from_laminar(laminar)
    names = {}
    counter = itertools.count()
    for n in sorted(rooted.nodes, key=lambda m: (len(m), sorted_ids(m))):
        names[n] = f"t{next(counter)}"
    r_name = f"t{next(counter)}"
    nodes = set(names.values()) | {r_name}
    edges = {frozenset((names[c], names[p])) for c, p in rooted.parent.items()}
    edges.add(frozenset((r_name, names[rooted.root])))
    box = {names[n]: rooted.box[n] for n in rooted.nodes}
    box[r_name] = r_block
    tp = TreePartition(nodes, edges, box)
    if tp.bipartition_family() != f:
        raise ValidationError("tree construction does not realize the family")
    return tp


@dataclass(frozen=True)
class BipNodeKind:
    name: str  # "complete", "circular", "prime"
    order: tuple = None  # cyclic neighbour order for circular nodes

    def __repr__(self):
        return self.name if self.order is None else f"{self.name}{list(self.order)}"


def classify_bip_node(f: BipartitionFamily, t: TreePartition, node) -> BipNodeKind:
    """Type an internal node of the good-member tree of a weakly partitive
    family closed under single-element bipartitions.

    The togetherness graph on the neighbours (an edge when the two
    neighbour blocks unite into a member block) is complete for complete
    nodes, a single cycle for circular ones, and empty for prime ones.
    """
    nbrs = t.neighbours(node)
    k = len(nbrs)
    if k < 3:
        raise PreconditionError(f"node {node} has {k} neighbours; typing needs at least 3")
    sides = [t.side_block(y, node) for y in nbrs]
    adj = {i: set() for i in range(k)}
    count = 0
    for i in range(k):
        for j in range(i + 1, k):
            union = sides[i] | sides[j]
            if frozenset((union, f.ground - union)) in f.members:
                adj[i].add(j)
                adj[j].add(i)
                count += 1
    if count == k * (k - 1) // 2:
        return BipNodeKind("complete")
    if count == k and all(len(adj[i]) == 2 for i in range(k)):
        order = [0]
        prev = None
        while len(order) < k:
            nxt = [j for j in adj[order[-1]] if j != prev]
            if not nxt:
                break
            prev = order[-1]
            order.append(min(nxt))
        if len(order) == k and order[0] in adj[order[-1]]:
            return BipNodeKind("circular", tuple(nbrs[i] for i in order))
    if count == 0:
        return BipNodeKind("prime")
    raise ClassificationError(
        f"togetherness graph at {node} is neither complete, a cycle, nor empty; "
        "family is not weakly partitive"
    )
