"""Monadic second-order formulas over finite relational structures:
parser and printer, exhaustive evaluation, definable set families, and the
application of definition schemes transforming structures.

First-order variables start with a lowercase letter, set variables with an
uppercase one.  Evaluation expands quantifiers exhaustively: first-order
ones over the domain, set ones over all subsets, behind an explicit work
budget.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .errors import CapacityError, InputError
from .graphs import RelStructure, sorted_ids

SO_DOMAIN_CAP = 14
WORK_BUDGET = 1 << 24


def is_so_var(name) -> bool:
    return bool(name) and name[0].isupper()


@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple


@dataclass(frozen=True)
class Member:
    element: str
    of: str


@dataclass(frozen=True)
class Equal:
    left: str
    right: str


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


@dataclass(frozen=True)
class Not:
    sub: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Implies:
    left: object
    right: object


@dataclass(frozen=True)
class Exists:
    var: str
    body: object


@dataclass(frozen=True)
class Forall:
    var: str
    body: object


def free_vars(f):
    if isinstance(f, Atom):
        return set(f.args)
    if isinstance(f, Member):
        return {f.element, f.of}
    if isinstance(f, Equal):
        return {f.left, f.right}
    if isinstance(f, (TrueF, FalseF)):
        return set()
    if isinstance(f, Not):
        return free_vars(f.sub)
    if isinstance(f, (And, Or, Implies)):
        return free_vars(f.left) | free_vars(f.right)
    return free_vars(f.body) - {f.var}


def substitute_vars(f, mapping):
    """Rename free variables; bound variables shadow the mapping."""
    if isinstance(f, Atom):
        return Atom(f.rel, tuple(mapping.get(a, a) for a in f.args))
    if isinstance(f, Member):
        return Member(mapping.get(f.element, f.element), mapping.get(f.of, f.of))
    if isinstance(f, Equal):
        return Equal(mapping.get(f.left, f.left), mapping.get(f.right, f.right))
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Not):
        return Not(substitute_vars(f.sub, mapping))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(substitute_vars(f.left, mapping), substitute_vars(f.right, mapping))
    inner = {k: v for k, v in mapping.items() if k != f.var}
    if f.var in inner.values():
        raise InputError(f"substitution would capture {f.var}")
    return type(f)(f.var, substitute_vars(f.body, inner))


# ---------------------------------------------------------------------------
# Parsing and printing

_MSO_TOKEN = re.compile(r"\s*(->|[(),=]|[A-Za-z_][A-Za-z0-9_']*)")
_KEYWORDS = {"not", "and", "or", "in", "exists", "forall", "true", "false"}


def parse_formula(text):
    pos = 0

    def error(msg):
        raise InputError(f"formula syntax error at {pos}: {msg}")

    def peek():
        m = _MSO_TOKEN.match(text, pos)
        return m.group(1) if m else None

    def take(expected=None):
        nonlocal pos
        m = _MSO_TOKEN.match(text, pos)
        if not m:
            error("unexpected end of input")
        tok = m.group(1)
        if expected is not None and tok != expected:
            error(f"expected {expected!r}, found {tok!r}")
        pos = m.end()
        return tok

    def parse_implies():
        left = parse_or()
        if peek() == "->":
            take("->")
            return Implies(left, parse_implies())
        return left

    def parse_or():
        out = parse_and()
        while peek() == "or":
            take("or")
            out = Or(out, parse_and())
        return out

    def parse_and():
        out = parse_unary()
        while peek() == "and":
            take("and")
            out = And(out, parse_unary())
        return out

    def parse_unary():
        tok = peek()
        if tok == "not":
            take("not")
            return Not(parse_unary())
        if tok in ("exists", "forall"):
            take(tok)
            var = take()
            if var in _KEYWORDS or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", var):
                error(f"bad variable {var!r}")
            body = parse_unary()
            return (Exists if tok == "exists" else Forall)(var, body)
        return parse_atom()

    def parse_atom():
        tok = take()
        if tok == "(":
            out = parse_implies()
            take(")")
            return out
        if tok == "true":
            return TrueF()
        if tok == "false":
            return FalseF()
        if tok in _KEYWORDS or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok):
            error(f"unexpected token {tok!r}")
        nxt = peek()
        if nxt == "(":
            take("(")
            args = [take()]
            while peek() == ",":
                take(",")
                args.append(take())
            take(")")
            return Atom(tok, tuple(args))
        if nxt == "in":
            take("in")
            of = take()
            if not is_so_var(of):
                error(f"membership needs a set variable, got {of!r}")
            return Member(tok, of)
        if nxt == "=":
            take("=")
            return Equal(tok, take())
        error(f"dangling identifier {tok!r}")

    out = parse_implies()
    if text[pos:].strip():
        error("trailing input")
    return out


def print_formula(f) -> str:
    if isinstance(f, Atom):
        return f"{f.rel}({', '.join(f.args)})"
    if isinstance(f, Member):
        return f"{f.element} in {f.of}"
    if isinstance(f, Equal):
        return f"{f.left} = {f.right}"
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Not):
        return f"not {print_formula(f.sub)}" if _atomic(f.sub) else f"not ({print_formula(f.sub)})"
    if isinstance(f, And):
        return f"({print_formula(f.left)} and {print_formula(f.right)})"
    if isinstance(f, Or):
        return f"({print_formula(f.left)} or {print_formula(f.right)})"
    if isinstance(f, Implies):
        return f"({print_formula(f.left)} -> {print_formula(f.right)})"
    kw = "exists" if isinstance(f, Exists) else "forall"
    return f"{kw} {f.var} ({print_formula(f.body)})"


def _atomic(f):
    return isinstance(f, (Atom, Member, Equal, TrueF, FalseF))


# ---------------------------------------------------------------------------
# Evaluation


def _has_so_quantifier(f):
    if isinstance(f, (Exists, Forall)):
        return is_so_var(f.var) or _has_so_quantifier(f.body)
    if isinstance(f, Not):
        return _has_so_quantifier(f.sub)
    if isinstance(f, (And, Or, Implies)):
        return _has_so_quantifier(f.left) or _has_so_quantifier(f.right)
    return False


def _work(f, d):
    if isinstance(f, Not):
        return 1 + _work(f.sub, d)
    if isinstance(f, (And, Or, Implies)):
        return 1 + _work(f.left, d) + _work(f.right, d)
    if isinstance(f, (Exists, Forall)):
        mult = (1 << d) if is_so_var(f.var) else max(d, 1)
        return 1 + mult * (1 + _work(f.body, d))
    return 1


def eval_formula(s: RelStructure, f, assignment=None, so_cap=SO_DOMAIN_CAP, budget=WORK_BUDGET):
    """Exhaustive truth evaluation under the given assignment of the free
    variables (elements for lowercase, sets for uppercase variables)."""
    env = dict(assignment or {})
    missing = free_vars(f) - set(env)
    if missing:
        raise InputError(f"unbound variables {sorted(missing)}")
    d = len(s.domain)
    if _has_so_quantifier(f) and d > so_cap:
        raise CapacityError("set quantification domain", d, so_cap)
    if _work(f, d) > budget:
        raise CapacityError("quantifier expansion", _work(f, d), budget)
    domain = sorted_ids(s.domain)
    subsets = None

    def rec(node):
        if isinstance(node, Atom):
            if node.rel not in s.relations:
                raise InputError(f"unknown relation {node.rel}")
            arity, tuples = s.relations[node.rel]
            if len(node.args) != arity:
                raise InputError(f"relation {node.rel} has arity {arity}")
            return tuple(env[a] for a in node.args) in tuples
        if isinstance(node, Member):
            return env[node.element] in env[node.of]
        if isinstance(node, Equal):
            return env[node.left] == env[node.right]
        if isinstance(node, TrueF):
            return True
        if isinstance(node, FalseF):
            return False
        if isinstance(node, Not):
            return not rec(node.sub)
        if isinstance(node, And):
            return rec(node.left) and rec(node.right)
        if isinstance(node, Or):
            return rec(node.left) or rec(node.right)
        if isinstance(node, Implies):
            return not rec(node.left) or rec(node.right)
        exists = isinstance(node, Exists)
        old = env.get(node.var, _MISSING)
        try:
            if is_so_var(node.var):
                for mask in range(1 << d):
                    env[node.var] = frozenset(domain[i] for i in range(d) if mask >> i & 1)
                    if rec(node.body) == exists:
                        return exists
            else:
                for x in domain:
                    env[node.var] = x
                    if rec(node.body) == exists:
                        return exists
            return not exists
        finally:
            if old is _MISSING:
                env.pop(node.var, None)
            else:
                env[node.var] = old

    return rec(f)


_MISSING = object()


def definable_family(s: RelStructure, f, var="X", so_cap=SO_DOMAIN_CAP):
    """All subsets satisfying a formula with one free set variable."""
    from .partitive import SetFamily

    if free_vars(f) - {var}:
        raise InputError(f"formula must have {var} as its only free variable")
    d = len(s.domain)
    if d > so_cap:
        raise CapacityError("definable family domain", d, so_cap)
    domain = sorted_ids(s.domain)
    members = []
    for mask in range(1 << d):
        sub = frozenset(domain[i] for i in range(d) if mask >> i & 1)
        if eval_formula(s, f, {var: sub}, so_cap=so_cap):
            members.append(sub)
    return SetFamily(s.domain, members)


# ---------------------------------------------------------------------------
# Definition schemes


@dataclass(frozen=True)
class DefinitionScheme:
    """A structure transformer: the output domain is the set of pairs
    (element, copy index) admitted by the per-copy formulas, and every
    output relation is defined tuple-wise by one formula per index vector.

    Formulas use the argument variables x1, x2, ... for the tuple slots;
    the parameters are free set variables shared by all formulas.
    """

    k: int
    phi: object
    psi: tuple
    theta: dict  # (relation name, index vector) -> formula
    params: tuple = ()
    arities: dict = None  # output relation name -> arity

    def __post_init__(self):
        if self.k < 1 or len(self.psi) != self.k:
            raise InputError("need one domain formula per copy index")
        arities = {}
        for (q, jvec), _ in sorted(self.theta.items(), key=lambda kv: (kv[0][0], kv[0][1])):
            if q in arities:
                if arities[q] != len(jvec):
                    raise InputError(f"inconsistent arities for output relation {q}")
            else:
                arities[q] = len(jvec)
            if any(not (1 <= j <= self.k) for j in jvec):
                raise InputError(f"index vector {jvec} out of range")
        object.__setattr__(self, "arities", arities)


def apply_scheme(scheme: DefinitionScheme, s: RelStructure, gamma=None, so_cap=SO_DOMAIN_CAP):
    """The transformed structure, or None when the input formula rejects
    the given parameter assignment."""
    gamma = dict(gamma or {})
    if set(gamma) != set(scheme.params):
        raise InputError(f"parameter assignment must cover exactly {sorted(scheme.params)}")
    for w, val in gamma.items():
        gamma[w] = frozenset(val)
        if not gamma[w] <= s.domain:
            raise InputError(f"parameter {w} leaves the domain")
    if not eval_formula(s, scheme.phi, gamma, so_cap=so_cap):
        return None
    domain = []
    for d in sorted_ids(s.domain):
        for i in range(1, scheme.k + 1):
            if eval_formula(s, scheme.psi[i - 1], {**gamma, "x1": d}, so_cap=so_cap):
                domain.append((d, i))
    dom_set = set(domain)
    relations = {}
    for q, arity in scheme.arities.items():
        tuples = set()
        for jvec in itertools.product(range(1, scheme.k + 1), repeat=arity):
            formula = scheme.theta.get((q, jvec))
            if formula is None:
                continue
            for elems in itertools.product(sorted_ids(s.domain), repeat=arity):
                out = tuple((elems[t], jvec[t]) for t in range(arity))
                if any(x not in dom_set for x in out):
                    continue
                asg = {**gamma, **{f"x{t + 1}": elems[t] for t in range(arity)}}
                if eval_formula(s, formula, asg, so_cap=so_cap):
                    tuples.add(out)
        relations[q] = (arity, tuples)
    return RelStructure(dom_set, relations)


# ---------------------------------------------------------------------------
# Stock formulas and schemes


def transitive_closure_formula(rel="edg", x="x", y="y"):
    """x reaches y through the reflexive-transitive closure of rel."""
    return parse_formula(
        f"forall X ((({x} in X and forall u (forall v ((u in X and {rel}(u, v)) -> v in X)))) -> {y} in X)"
    )


def module_formula(var="X"):
    """The nonempty sets whose members look alike from outside."""
    return parse_formula(
        f"exists w (w in {var}) and forall x (forall y (forall z ("
        f"(x in {var} and (y in {var} and not z in {var})) -> "
        f"((edg(x, z) -> edg(y, z)) and (edg(z, x) -> edg(z, y))))))"
    )


def split_block_formula(var="X"):
    """The blocks of splits: both sides have two or more elements and the
    cross edges bundle into complete products in each direction."""
    two_in = f"exists a (exists b ((a in {var} and b in {var}) and not a = b))"
    two_out = f"exists a (exists b ((not a in {var} and not b in {var}) and not a = b))"
    bundle = (
        f"forall x (forall xp (forall y (forall yp ("
        f"(((x in {var} and xp in {var}) and (not y in {var} and not yp in {var}))"
        f" and (edg(x, y) and edg(xp, yp))) -> edg(x, yp)))))"
    )
    bundle_rev = (
        f"forall x (forall xp (forall y (forall yp ("
        f"(((x in {var} and xp in {var}) and (not y in {var} and not yp in {var}))"
        f" and (edg(y, x) and edg(yp, xp))) -> edg(yp, x)))))"
    )
    return parse_formula(f"(({two_in} and {two_out}) and ({bundle} and {bundle_rev}))")


def eps_connection_formula(x="x", y="y"):
    """x and y are linked by a path of eps edges; the bound names W, p, q
    are reserved so instances never capture their arguments."""
    return parse_formula(
        f"forall W (({x} in W and forall p (forall q ("
        f"(p in W and (eps(p, q) or eps(q, p))) -> q in W))) -> {y} in W)"
    )


def edge_contraction_scheme() -> DefinitionScheme:
    """Contract all eps edges of a two-sorted-edge graph; the parameter
    picks one representative per contraction class, and all valid choices
    give isomorphic outputs."""
    phi = Forall(
        "x",
        Exists(
            "y",
            And(
                And(Member("y", "Y"), eps_connection_formula("x", "y")),
                Forall(
                    "z",
                    Implies(
                        And(Member("z", "Y"), eps_connection_formula("x", "z")),
                        Equal("z", "y"),
                    ),
                ),
            ),
        ),
    )
    psi = Member("x1", "Y")
    theta = Exists(
        "u",
        Exists(
            "v",
            And(
                And(Member("x1", "Y"), Member("x2", "Y")),
                And(
                    Atom("edg", ("u", "v")),
                    And(eps_connection_formula("x1", "u"), eps_connection_formula("x2", "v")),
                ),
            ),
        ),
    )
    return DefinitionScheme(1, phi, (psi,), {("edg", (1, 1)): theta}, params=("Y",))


def contract_eps_direct(s: RelStructure) -> RelStructure:
    """Plain union-find contraction of the eps relation, for comparison."""
    parent = {x: x for x in s.domain}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    _, eps = s.relations.get("eps", (2, frozenset()))
    for (a, b) in eps:
        parent[find(a)] = find(b)
    rep = {}
    for x in sorted_ids(s.domain):
        r = find(x)
        rep.setdefault(r, x)
    name = {x: rep[find(x)] for x in s.domain}
    _, edges = s.relations.get("edg", (2, frozenset()))
    out = {(name[a], name[b]) for (a, b) in edges}
    return RelStructure(set(rep.values()), {"edg": (2, out)})
