"""Shared generators and brute-force references for the test suite.

Everything here is deterministic given a seeded random.Random instance so
the acceptance runs are reproducible.
"""
from __future__ import annotations

import random
from itertools import permutations, product

from treeterm.syntax import (
    App,
    Arrow,
    Base,
    ConLeaf,
    ConNode,
    ConVar,
    EApp,
    ELam,
    ELeaf,
    ENode,
    ESym,
    EVar,
    ErasedTerm,
    Forall,
    Lam,
    LeafCon,
    NodeCon,
    PatApp,
    PatLam,
    Pattern,
    PBottom,
    PLeaf,
    PNode,
    PVar,
    PWild,
    RefinementType,
    RewriteRule,
    RewriteSystem,
    Signature,
    SymbolInfo,
    SymbolRef,
    TermVar,
)

# ---------------------------------------------------------------------------
# Enumerations

def ground_trees(max_depth: int) -> list[ErasedTerm]:
    """All ground constructor trees of depth at most max_depth."""
    if max_depth <= 0:
        return [ELeaf()]
    smaller = ground_trees(max_depth - 1)
    out: list[ErasedTerm] = [ELeaf()]
    for a, b in product(smaller, smaller):
        out.append(EApp(EApp(ENode(), a), b))
    return out


def closed_patterns(max_depth: int, include_wild: bool = True) -> list[Pattern]:
    """All closed patterns of depth at most max_depth."""
    atoms: list[Pattern] = [PLeaf(), PBottom()]
    if include_wild:
        atoms.append(PWild())
    if max_depth <= 0:
        return atoms
    smaller = closed_patterns(max_depth - 1, include_wild)
    return atoms + [PNode(a, b) for a, b in product(smaller, smaller)]


def term_arity(ty: RefinementType) -> int:
    """Number of term arguments a symbol of this type expects."""
    while isinstance(ty, Forall):
        ty = ty.body
    count = 0
    while isinstance(ty, Arrow):
        count += 1
        ty = ty.cod
    return count


# ---------------------------------------------------------------------------
# Random patterns and types

PVAR_POOL = ("a", "b", "c", "d")
TVAR_POOL = ("x", "y", "z", "w")


def random_pattern(rng: random.Random, depth: int, vars: tuple[str, ...] = PVAR_POOL,
                   wild: bool = True, bottom: bool = True) -> Pattern:
    choices = ["leaf", "var"]
    if wild:
        choices.append("wild")
    if bottom:
        choices.append("bot")
    if depth > 0:
        choices.extend(["node", "node"])
    kind = rng.choice(choices)
    if kind == "leaf":
        return PLeaf()
    if kind == "var":
        return PVar(rng.choice(vars))
    if kind == "wild":
        return PWild()
    if kind == "bot":
        return PBottom()
    return PNode(
        random_pattern(rng, depth - 1, vars, wild, bottom),
        random_pattern(rng, depth - 1, vars, wild, bottom),
    )


def random_closed_pattern(rng: random.Random, depth: int, wild: bool = True,
                          bottom: bool = True) -> Pattern:
    return _closed(rng, depth, wild, bottom)


def _closed(rng: random.Random, depth: int, wild: bool, bottom: bool) -> Pattern:
    choices = ["leaf"]
    if wild:
        choices.append("wild")
    if bottom:
        choices.append("bot")
    if depth > 0:
        choices.extend(["node", "node"])
    kind = rng.choice(choices)
    if kind == "leaf":
        return PLeaf()
    if kind == "wild":
        return PWild()
    if kind == "bot":
        return PBottom()
    return PNode(_closed(rng, depth - 1, wild, bottom), _closed(rng, depth - 1, wild, bottom))


def pattern_below(rng: random.Random, q: Pattern) -> Pattern:
    """Some pattern p with p below q in the subtype order on patterns."""
    if rng.random() < 0.2:
        return PBottom()
    if isinstance(q, PWild):
        return random_pattern(rng, 2)
    if isinstance(q, PNode):
        return PNode(pattern_below(rng, q.left), pattern_below(rng, q.right))
    return q


def pattern_above(rng: random.Random, p: Pattern) -> Pattern:
    """Some pattern q with p below q."""
    if rng.random() < 0.2:
        return PWild()
    if isinstance(p, PBottom):
        return random_pattern(rng, 2)
    if isinstance(p, PNode):
        return PNode(pattern_above(rng, p.left), pattern_above(rng, p.right))
    return p


def closed_pattern_above(rng: random.Random, p: Pattern) -> Pattern:
    """Like pattern_above but never introduces variables (p closed)."""
    if rng.random() < 0.2:
        return PWild()
    if isinstance(p, PBottom):
        return _closed(rng, 2, wild=True, bottom=True)
    if isinstance(p, PNode):
        return PNode(closed_pattern_above(rng, p.left), closed_pattern_above(rng, p.right))
    return p


def random_type(rng: random.Random, depth: int, vars: tuple[str, ...] = PVAR_POOL) -> RefinementType:
    choices = ["base", "base"]
    if depth > 0:
        choices.extend(["arrow", "forall"])
    kind = rng.choice(choices)
    if kind == "base":
        return Base(random_pattern(rng, min(depth, 2), vars))
    if kind == "arrow":
        return Arrow(random_type(rng, depth - 1, vars), random_type(rng, depth - 1, vars))
    binder = rng.choice(vars)
    return Forall(binder, random_type(rng, depth - 1, vars))


def type_below(rng: random.Random, t: RefinementType) -> RefinementType:
    """A subtype of t (contravariant in arrow domains)."""
    if isinstance(t, Base):
        return Base(pattern_below(rng, t.pattern))
    if isinstance(t, Arrow):
        return Arrow(type_above(rng, t.dom), type_below(rng, t.cod))
    return Forall(t.binder, type_below(rng, t.body))


def type_above(rng: random.Random, t: RefinementType) -> RefinementType:
    if isinstance(t, Base):
        return Base(pattern_above(rng, t.pattern))
    if isinstance(t, Arrow):
        return Arrow(type_below(rng, t.dom), type_above(rng, t.cod))
    return Forall(t.binder, type_above(rng, t.body))


# ---------------------------------------------------------------------------
# Embedding-ordered pattern pairs (wildcard-free, closed)

def weakly_above_pattern(rng: random.Random, q: Pattern) -> Pattern:
    if rng.random() < 0.5:
        return q
    return strictly_above_pattern(rng, q)


def strictly_above_pattern(rng: random.Random, q: Pattern) -> Pattern:
    """A wildcard-free pattern strictly embedding q (q wildcard-free)."""
    options = ["wrap-left", "wrap-right"]
    if isinstance(q, PNode):
        options.extend(["comp-left", "comp-right"])
    kind = rng.choice(options)
    junk = _closed(rng, 1, wild=False, bottom=True)
    if kind == "wrap-left":
        return PNode(weakly_above_pattern(rng, q), junk)
    if kind == "wrap-right":
        return PNode(junk, weakly_above_pattern(rng, q))
    assert isinstance(q, PNode)
    if kind == "comp-left":
        return PNode(strictly_above_pattern(rng, q.left), weakly_above_pattern(rng, q.right))
    return PNode(weakly_above_pattern(rng, q.left), strictly_above_pattern(rng, q.right))


# ---------------------------------------------------------------------------
# Erased terms with prescribed shapes

def neutral_normal_form(rng: random.Random) -> ErasedTerm:
    """A neutral erased term with no redex and no rule symbol inside."""
    head = EVar(rng.choice(("n", "m", "k")))
    term: ErasedTerm = head
    for _ in range(rng.randint(0, 2)):
        arg: ErasedTerm = rng.choice((ELeaf(), EVar("q"), ELam("z", EVar("z"))))
        term = EApp(term, arg)
    return term


def term_with_pattern_form(rng: random.Random, p: Pattern) -> ErasedTerm:
    """A normal form v with pattern form exactly p (p closed, wildcard-free)."""
    if isinstance(p, PLeaf):
        return ELeaf()
    if isinstance(p, PBottom):
        return neutral_normal_form(rng)
    if isinstance(p, PNode):
        return EApp(
            EApp(ENode(), term_with_pattern_form(rng, p.left)),
            term_with_pattern_form(rng, p.right),
        )
    raise ValueError(f"unsupported pattern for shaping: {p!r}")


def term_matching_pattern(rng: random.Random, p: Pattern, neutral_anywhere: bool = False) -> ErasedTerm:
    """A normal form v that matches closed pattern p."""
    if neutral_anywhere and rng.random() < 0.3:
        return neutral_normal_form(rng)
    if isinstance(p, PWild):
        return rng.choice((
            ELam("z", EVar("z")),
            ELeaf(),
            EApp(EApp(ENode(), ELeaf()), ELeaf()),
            neutral_normal_form(rng),
        ))
    if isinstance(p, PBottom):
        return neutral_normal_form(rng)
    if isinstance(p, PLeaf):
        return ELeaf()
    assert isinstance(p, PNode)
    return EApp(
        EApp(ENode(), term_matching_pattern(rng, p.left, neutral_anywhere)),
        term_matching_pattern(rng, p.right, neutral_anywhere),
    )


def _is_full_node(t: ErasedTerm) -> bool:
    return isinstance(t, EApp) and isinstance(t.fun, EApp) and isinstance(t.fun.fun, ENode)


def tree_like_normal_form(rng: random.Random, depth: int) -> ErasedTerm:
    """A normal form shaped like a tree: leaf, neutral, or node of such."""
    return term_matching_pattern(rng, _closed(rng, depth, wild=False, bottom=True))


def weakly_embedding_term(rng: random.Random, u: ErasedTerm) -> ErasedTerm:
    if rng.random() < 0.5:
        return u
    return strictly_embedding_term(rng, u)


def strictly_embedding_term(rng: random.Random, u: ErasedTerm) -> ErasedTerm:
    """A normal form strictly embedding u (u tree-like, never a lambda)."""
    options = ["wrap-left", "wrap-right"]
    if _is_full_node(u):
        options.extend(["comp-left", "comp-right"])
    kind = rng.choice(options)
    junk = tree_like_normal_form(rng, 1) if rng.random() < 0.8 else ELam("z", EVar("z"))
    if kind == "wrap-left":
        return EApp(EApp(ENode(), weakly_embedding_term(rng, u)), junk)
    if kind == "wrap-right":
        return EApp(EApp(ENode(), junk), weakly_embedding_term(rng, u))
    u1, u2 = u.fun.arg, u.arg
    if kind == "comp-left":
        return EApp(EApp(ENode(), strictly_embedding_term(rng, u1)), weakly_embedding_term(rng, u2))
    return EApp(EApp(ENode(), weakly_embedding_term(rng, u1)), strictly_embedding_term(rng, u2))


def random_valuation(rng: random.Random, names: frozenset[str], depth: int = 2) -> dict[str, frozenset[Pattern]]:
    return {
        name: frozenset(
            _closed(rng, depth, wild=True, bottom=True)
            for _ in range(rng.randint(1, 3))
        )
        for name in names
    }


def random_erased_term(rng: random.Random, symbols: tuple[str, ...], depth: int,
                       bound: tuple[str, ...] = ()) -> ErasedTerm:
    choices = ["leaf", "tree"]
    if bound:
        choices.append("var")
    if symbols:
        choices.append("sym")
    if depth > 0:
        choices.extend(["app", "lam", "node"])
    kind = rng.choice(choices)
    if kind == "leaf":
        return ELeaf()
    if kind == "tree":
        return rng.choice(ground_trees(2))
    if kind == "var":
        return EVar(rng.choice(bound))
    if kind == "sym":
        return ESym(rng.choice(symbols))
    if kind == "app":
        return EApp(
            random_erased_term(rng, symbols, depth - 1, bound),
            random_erased_term(rng, symbols, depth - 1, bound),
        )
    if kind == "lam":
        binder = f"x{len(bound)}"
        return ELam(binder, random_erased_term(rng, symbols, depth - 1, bound + (binder,)))
    return EApp(
        EApp(ENode(), random_erased_term(rng, symbols, depth - 1, bound)),
        random_erased_term(rng, symbols, depth - 1, bound),
    )


# ---------------------------------------------------------------------------
# Random well-formed system syntax (for parser round-trips)

SYMBOL_POOL = ("s", "t0", "u0", "fn", "gn", "aux", "step1", "walk")


def random_constructor(rng: random.Random, depth: int) -> ConLeaf | ConVar | ConNode:
    kinds = ["var", "leaf"]
    if depth > 0:
        kinds.extend(["node", "node"])
    kind = rng.choice(kinds)
    if kind == "var":
        return ConVar(rng.choice(TVAR_POOL))
    if kind == "leaf":
        return ConLeaf()
    if rng.random() < 0.5:
        ann_left, ann_right = None, None
    else:
        ann_left = random_pattern(rng, 1)
        ann_right = random_pattern(rng, 1)
    return ConNode(ann_left, ann_right,
                   random_constructor(rng, depth - 1),
                   random_constructor(rng, depth - 1))


def random_annotated_term(rng: random.Random, symbols: tuple[str, ...], depth: int,
                          bound: tuple[str, ...] = ()) -> object:
    choices = ["leaf", "node"]
    if bound:
        choices.extend(["var", "var"])
    if symbols:
        choices.append("sym")
    if depth > 0:
        choices.extend(["app", "lam", "patlam", "patapp"])
    kind = rng.choice(choices)
    if kind == "leaf":
        return LeafCon()
    if kind == "node":
        return NodeCon()
    if kind == "var":
        return TermVar(rng.choice(bound))
    if kind == "sym":
        return SymbolRef(rng.choice(symbols))
    if kind == "app":
        return App(
            random_annotated_term(rng, symbols, depth - 1, bound),
            random_annotated_term(rng, symbols, depth - 1, bound),
        )
    if kind == "lam":
        binder = rng.choice(TVAR_POOL)
        return Lam(binder, random_type(rng, 1),
                   random_annotated_term(rng, symbols, depth - 1, bound + (binder,)))
    if kind == "patlam":
        return PatLam(rng.choice(PVAR_POOL),
                      random_annotated_term(rng, symbols, depth - 1, bound))
    return PatApp(
        random_annotated_term(rng, symbols, depth - 1, bound),
        random_pattern(rng, 1),
    )


def random_system(rng: random.Random) -> RewriteSystem:
    """A syntactically well-formed system; not necessarily type-correct."""
    names = tuple(rng.sample(SYMBOL_POOL, rng.randint(1, 3)))
    signature = Signature()
    for name in names:
        k = rng.randint(0, 2)
        extra = rng.randint(0, 1)
        quants = tuple(f"a{i}" for i in range(k + extra))
        tail: RefinementType = Base(random_pattern(rng, 2, quants or PVAR_POOL))
        ty = tail
        for q in reversed(quants[:k]):
            ty = Arrow(Base(PVar(q)), ty)
        for q in reversed(quants):
            ty = Forall(q, ty)
        signature.entries[name] = SymbolInfo(ty, k, len(quants))
    rules = []
    for _ in range(rng.randint(0, 3)):
        head = rng.choice(names)
        info = signature.entries[head]
        pats = tuple(random_pattern(rng, 2) for _ in range(info.quantifier_count))
        cons = tuple(random_constructor(rng, 1) for _ in range(rng.randint(0, 2)))
        rhs = random_annotated_term(rng, names, 3)
        rules.append(RewriteRule(head, pats, cons, rhs))
    return RewriteSystem(signature, tuple(rules))


# ---------------------------------------------------------------------------
# Brute-force graph reference

def has_simple_cycle(nodes: list[int], edges: frozenset[tuple[int, int]]) -> bool:
    """Exhaustive simple-cycle existence among the given nodes."""
    allowed = list(nodes)
    for length in range(1, len(allowed) + 1):
        for tup in permutations(allowed, length):
            closed = all(
                (tup[i], tup[(i + 1) % length]) in edges for i in range(length)
            )
            if closed:
                return True
    return False


def random_digraph(rng: random.Random, n: int, density: float = 0.3) -> frozenset[tuple[int, int]]:
    return frozenset(
        (i, j)
        for i in range(n)
        for j in range(n)
        if rng.random() < density
    )
