"""Overlap-free set families, their rooted trees with boxes, strong members,
node typing, and reconstruction of a proper tree from its leaf structure.

This is the generic engine behind the modular and factor decompositions:
those modules only supply a concrete family of subsets and reuse everything
here.  Families are kept as explicit subset collections; all checks are
exhaustive, which keeps every operation usable as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ClassificationError, PreconditionError, ReconstructionError, ValidationError
from .graphs import sort_key, sorted_ids


class SetFamily:
    """A set of subsets (members) of a ground set, stored deduplicated."""

    def __init__(self, ground, members):
        self.ground = frozenset(ground)
        self.members = frozenset(frozenset(m) for m in members)
        for m in self.members:
            if not m <= self.ground:
                raise ValidationError(f"member {sorted_ids(m)} leaves the ground set")

    def __eq__(self, other):
        return (
            isinstance(other, SetFamily)
            and self.ground == other.ground
            and self.members == other.members
        )

    def __len__(self):
        return len(self.members)

    def __contains__(self, m):
        return frozenset(m) in self.members

    def __repr__(self):
        return f"SetFamily(|V|={len(self.ground)}, {len(self.members)} members)"

    def to_json(self):
        return {
            "ground": sorted_ids(self.ground),
            "members": sorted(sorted_ids(m) for m in self.members),
        }

    @classmethod
    def from_json(cls, doc):
        return cls(doc["ground"], [frozenset(m) for m in doc["members"]])


def overlap(a, b):
    """True when the sets meet and are incomparable for inclusion."""
    a, b = frozenset(a), frozenset(b)
    return bool(a & b) and not a <= b and not b <= a


@dataclass(frozen=True)
class FamilyFlags:
    p0: bool
    p0prime: bool
    p1: bool
    weakly_partitive: bool
    partitive: bool


def check_family(f: SetFamily) -> FamilyFlags:
    """Exhaustively test the closure properties of a set family."""
    p0 = f.ground in f.members and frozenset() not in f.members
    p0prime = p0 and all(frozenset((v,)) in f.members for v in f.ground)
    members = list(f.members)
    p1 = True
    p2 = True
    p3 = True
    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            if not overlap(a, b):
                continue
            p1 = False
            if not (a | b in f.members and a & b in f.members
                    and a - b in f.members and b - a in f.members):
                p2 = False
            if (a ^ b) not in f.members:
                p3 = False
    return FamilyFlags(p0, p0prime, p1, p0 and p2, p0 and p2 and p3)


def plus_closure(f: SetFamily) -> SetFamily:
    """Add every singleton of the ground set as a member."""
    if f.ground not in f.members or frozenset() in f.members:
        raise PreconditionError("plus closure needs a family with the ground set and no empty member")
    extra = {frozenset((v,)) for v in f.ground}
    return SetFamily(f.ground, f.members | extra)


def strong_members(f: SetFamily) -> SetFamily:
    """The members that overlap no other member."""
    members = list(f.members)
    strong = [m for m in members if not any(overlap(m, other) for other in members)]
    return SetFamily(f.ground, strong)


@dataclass(frozen=True)
class NodeKind:
    name: str  # "leaf", "complete", "linear", "prime"
    order: tuple = None  # son sequence for linear nodes

    def __repr__(self):
        return self.name if self.order is None else f"{self.name}{list(self.order)}"


class DecompTree:
    """Rooted tree whose nodes carry pairwise disjoint boxes partitioning a
    ground set; node kinds are optional until classified."""

    def __init__(self, nodes, root, parent, box, kind=None, son_order=None):
        self.nodes = frozenset(nodes)
        self.root = root
        self.parent = dict(parent)
        self.box = {n: frozenset(b) for n, b in box.items()}
        self.kind = dict(kind) if kind else {}
        self.son_order = dict(son_order) if son_order else {}
        self._validate()
        self._children = {n: [] for n in self.nodes}
        for n, p in self.parent.items():
            self._children[p].append(n)
        for n in self.nodes:
            if len(self._children[n]) in (0, 1) and not self.box[n]:
                raise ValidationError(
                    f"node {n} of outdegree {len(self._children[n])} has an empty box"
                )
        self._subtree = {}
        self._order_children()

    def _validate(self):
        if self.root not in self.nodes:
            raise ValidationError("root is not a node")
        if set(self.parent) != self.nodes - {self.root}:
            raise ValidationError("parent map must cover exactly the non-root nodes")
        for n, p in self.parent.items():
            if p not in self.nodes:
                raise ValidationError(f"parent of {n} is not a node")
        # acyclicity by walking to the root from every node
        for n in self.nodes:
            seen = set()
            while n != self.root:
                if n in seen:
                    raise ValidationError("parent relation has a cycle")
                seen.add(n)
                n = self.parent[n]
        if set(self.box) != self.nodes:
            raise ValidationError("every node needs a box (possibly empty)")
        taken = set()
        for n, b in self.box.items():
            if b & taken:
                raise ValidationError("boxes must be pairwise disjoint")
            taken |= b

    def _order_children(self):
        def subtree_min(n):
            return min((sort_key(x) for x in self.subtree_union(n)), default=(None, None))

        for n in self.nodes:
            if n in self.son_order:
                if set(self.son_order[n]) != set(self._children[n]):
                    raise ValidationError(f"stored son order of {n} does not list its sons")
                self._children[n] = list(self.son_order[n])
            else:
                self._children[n].sort(key=subtree_min)

    @property
    def ground(self):
        return frozenset().union(*self.box.values()) if self.box else frozenset()

    def children(self, n):
        return tuple(self._children[n])

    def leaves(self):
        return [n for n in self.nodes if not self._children[n]]

    def internal_nodes(self):
        return [n for n in self.nodes if self._children[n]]

    def subtree_union(self, n):
        """The union of boxes in the subtree of n (its represented member)."""
        if n not in self._subtree:
            acc = set(self.box[n])
            for c in self._children[n]:
                acc |= self.subtree_union(c)
            self._subtree[n] = frozenset(acc)
        return self._subtree[n]

    def is_proper(self):
        return all(len(self._children[n]) != 1 for n in self.nodes)

    def check_box_conditions(self):
        for n in self.nodes:
            if len(self._children[n]) in (0, 1) and not self.box[n]:
                raise ValidationError(f"node {n} of outdegree {len(self._children[n])} has an empty box")

    def subtree_leaf_sets(self):
        return {frozenset(self.subtree_union(n)) for n in self.nodes}

    def member_family(self) -> SetFamily:
        return SetFamily(self.ground, [self.subtree_union(n) for n in self.nodes])

    def to_json(self):
        names = {n: i for i, n in enumerate(sorted_ids(self.nodes))}
        out = []
        for n in sorted_ids(self.nodes):
            rec = {
                "id": names[n],
                "label": str(n),
                "parent": names[self.parent[n]] if n != self.root else None,
                "box": sorted_ids(self.box[n]),
            }
            if n in self.kind:
                k = self.kind[n]
                rec["kind"] = k.name
                if k.order is not None:
                    rec["order"] = [names[s] for s in k.order]
            out.append(rec)
        return {"root": names[self.root], "nodes": out}


def trees_isomorphic_fixing_leaves(t1: DecompTree, t2: DecompTree) -> bool:
    """For proper trees with identical leaf boxes: isomorphic by a map that
    is the identity on leaves (equivalently, equal subtree leaf-set families)."""
    m1 = {frozenset(t1.subtree_union(n)) for n in t1.nodes}
    m2 = {frozenset(t2.subtree_union(n)) for n in t2.nodes}
    return t1.ground == t2.ground and m1 == m2


def tree_from_laminar(f: SetFamily) -> DecompTree:
    """The rooted tree of an overlap-free family: nodes are the members,
    the parent is the least proper superset, and the box of a member is
    what remains after removing its proper sub-members."""
    if f.ground not in f.members or frozenset() in f.members:
        raise PreconditionError("family must contain its ground set and not the empty set")
    members = list(f.members)
    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            if overlap(a, b):
                raise PreconditionError(
                    f"family is not laminar: {sorted_ids(a)} overlaps {sorted_ids(b)}"
                )
    parent = {}
    box = {}
    by_size = sorted(members, key=len)
    for m in members:
        supersets = [s for s in members if m < s]
        if supersets:
            parent[m] = min(supersets, key=len)
    for m in members:
        inside = frozenset().union(*[s for s in by_size if s < m]) if any(s < m for s in by_size) else frozenset()
        box[m] = m - inside
    return DecompTree(members, f.ground, parent, box)


def classify_node(f: SetFamily, tree: DecompTree, node) -> NodeKind:
    """Type an internal node of the strong-member tree of a weakly partitive
    family satisfying P'0.

    Builds the togetherness graph on the sons (an edge when the union of two
    sons' ground sets is a member).  A complete graph means every son-subset
    union is a member; a simple path means exactly the interval unions are;
    an empty graph on at least 3 sons means only the trivial unions are.
    Any other shape contradicts weak partitivity.
    """
    sons = tree.children(node)
    k = len(sons)
    if k == 0:
        return NodeKind("leaf")
    if k == 1:
        raise ClassificationError(f"node {node} has a single son; tree is not proper")
    unions = [tree.subtree_union(s) for s in sons]
    adj = {i: set() for i in range(k)}
    edge_count = 0
    for i in range(k):
        for j in range(i + 1, k):
            if unions[i] | unions[j] in f.members:
                adj[i].add(j)
                adj[j].add(i)
                edge_count += 1
    if edge_count == k * (k - 1) // 2:
        return NodeKind("complete")
    degs = sorted(len(adj[i]) for i in range(k))
    if edge_count == k - 1 and degs == [1, 1] + [2] * (k - 2):
        # walk the path from one endpoint
        start = next(i for i in range(k) if len(adj[i]) == 1)
        order = [start]
        prev = None
        while len(order) < k:
            nxt = [j for j in adj[order[-1]] if j != prev]
            if len(nxt) != 1:
                break
            prev = order[-1]
            order.append(nxt[0])
        if len(order) == k:
            seq = [sons[i] for i in order]
            first = min(sort_key(x) for x in unions[order[0]])
            last = min(sort_key(x) for x in unions[order[-1]])
            if last < first:
                seq.reverse()
            return NodeKind("linear", tuple(seq))
    if edge_count == 0 and k >= 3:
        return NodeKind("prime")
    raise ClassificationError(
        f"togetherness graph at {node} is neither complete, a path, nor empty; "
        "family is not weakly partitive"
    )


# ---------------------------------------------------------------------------
# Leaf structures (trees seen through their leaves)


class LeafStructure:
    """The leaves of a proper rooted tree with the ternary relation
    'x is below the join of y and z'."""

    def __init__(self, leaves, triples):
        self.leaves = frozenset(leaves)
        self.triples = frozenset(tuple(t) for t in triples)
        for (x, y, z) in self.triples:
            if x not in self.leaves or y not in self.leaves or z not in self.leaves:
                raise ValidationError(f"triple {(x, y, z)} uses unknown leaves")
            if (x, z, y) not in self.triples:
                raise ValidationError(f"relation is not symmetric in its last two arguments: {(x, y, z)}")
        for y in self.leaves:
            for z in self.leaves:
                if (y, y, z) not in self.triples or (z, y, z) not in self.triples:
                    raise ValidationError(f"missing reflexive triple for ({y}, {z})")

    def __eq__(self, other):
        return (
            isinstance(other, LeafStructure)
            and self.leaves == other.leaves
            and self.triples == other.triples
        )

    def below(self, x, y, z):
        return (x, y, z) in self.triples


def leaf_structure(tree: DecompTree) -> LeafStructure:
    """Compute the leaf structure of a proper rooted tree."""
    if not tree.is_proper():
        raise PreconditionError("tree has a node of outdegree 1")
    leaves = tree.leaves()
    depth = {}

    def get_depth(n):
        if n not in depth:
            depth[n] = 0 if n == tree.root else get_depth(tree.parent[n]) + 1
        return depth[n]

    def ancestors(n):
        chain = [n]
        while chain[-1] != tree.root:
            chain.append(tree.parent[chain[-1]])
        return chain

    leaves_below = {}

    def collect(n):
        if not tree.children(n):
            leaves_below[n] = frozenset((n,))
        else:
            leaves_below[n] = frozenset().union(*(collect(c) for c in tree.children(n)))
        return leaves_below[n]

    collect(tree.root)
    anc = {l: ancestors(l) for l in leaves}
    triples = set()
    for y in leaves:
        for z in leaves:
            chain_y = anc[y]
            set_z = set(anc[z])
            join = next(n for n in chain_y if n in set_z)
            for x in leaves_below[join]:
                triples.add((x, y, z))
    return LeafStructure(leaves, triples)


def reconstruct_tree(ls: LeafStructure, order) -> DecompTree:
    """Rebuild a proper rooted tree from its leaf structure and any total
    order on the leaves.

    Every internal node is recovered as its representing leaf: the
    order-smallest leaf below it that is not below the same son as the
    order-smallest leaf below it.  The result is isomorphic to the original
    tree by a map fixing the leaves, for every choice of order.
    """
    order = list(order)
    if set(order) != set(ls.leaves) or len(order) != len(ls.leaves):
        raise PreconditionError("order must list every leaf exactly once")
    rank = {l: i for i, l in enumerate(order)}
    leaves = sorted(ls.leaves, key=lambda l: rank[l])
    if len(leaves) == 1:
        only = leaves[0]
        return DecompTree({only}, only, {}, {only: {only}})

    def rep_of(y, z):
        below = [x for x in leaves if ls.below(x, y, z)]
        if not below:
            return None
        fl = below[0]
        cands = [v for v in below if v != fl and ls.below(y, fl, v) and ls.below(z, fl, v)]
        return cands[0] if cands else None

    rep = {}
    witness = {}
    for i, y in enumerate(leaves):
        for z in leaves[i + 1 :]:
            r = rep_of(y, z)
            if r is None:
                raise ReconstructionError(f"no representing leaf for the join of {y} and {z}")
            rep[(y, z)] = r
            if r not in witness:
                witness[r] = (y, z)

    int_nodes = {r: ("rep", r) for r in witness}
    internal = frozenset(int_nodes.values())
    nodes = set(leaves) | internal

    def is_below(a, b):
        if a == b:
            return True
        if b not in internal:
            return False
        w, z = witness[b[1]]
        if a not in internal:
            return ls.below(a, w, z)
        u, v = witness[a[1]]
        return ls.below(u, w, z) and ls.below(v, w, z)

    parent = {}
    roots = []
    for n in nodes:
        strict = [m for m in nodes if m != n and is_below(n, m)]
        if not strict:
            roots.append(n)
            continue
        minimal = [m for m in strict if all(is_below(m, m2) for m2 in strict)]
        if len(minimal) != 1:
            raise ReconstructionError("ancestor relation does not form a tree")
        parent[n] = minimal[0]
    if len(roots) != 1:
        raise ReconstructionError("ancestor relation does not have a unique root")
    box = {n: frozenset() for n in nodes}
    for l in leaves:
        box[l] = frozenset((l,))
    try:
        tree = DecompTree(nodes, roots[0], parent, box)
        if not tree.is_proper():
            raise ReconstructionError("reconstructed tree is not proper")
        if leaf_structure(tree) != ls:
            raise ReconstructionError("leaf structure is not realized by the reconstructed tree")
    except ValidationError as exc:
        raise ReconstructionError(str(exc)) from exc
    return tree
