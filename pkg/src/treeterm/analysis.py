"""Termination analysis via type-level dependency pairs.

Each call from a rule's left-hand side to a defined symbol in its right-hand
side yields a dependency pair over the pattern arguments involved.  Pairs are
connected in a graph when the callee patterns can describe a common tree, and
termination follows when every cycle of every strongly connected component
strictly shrinks some recursive argument position.
"""
from __future__ import annotations

import itertools
import string
from dataclasses import dataclass, field

from .syntax import (
    AnnotatedTerm,
    App,
    Lam,
    PatApp,
    PatLam,
    Pattern,
    PBottom,
    PLeaf,
    PNode,
    PVar,
    PWild,
    SymbolRef,
    pattern_subst,
    print_pattern,
)
from .typecheck import ValidatedSystem


# ---------------------------------------------------------------------------
# Dependency pairs

@dataclass(frozen=True)
class DependencyPair:
    lhs_symbol: str
    lhs_args: tuple[Pattern, ...]
    rhs_symbol: str
    rhs_args: tuple[Pattern, ...]
    rule_index: int = field(default=0, compare=False)


def dp_label(dp: DependencyPair) -> str:
    def side(symbol: str, args: tuple[Pattern, ...]) -> str:
        rendered = ",".join(print_pattern(p) for p in args)
        return f"{symbol}♯({rendered})" if args else f"{symbol}♯"

    return f"{side(dp.lhs_symbol, dp.lhs_args)} -> {side(dp.rhs_symbol, dp.rhs_args)}"


def _call_sites(t: AnnotatedTerm) -> list[tuple[str, tuple[Pattern, ...]]]:
    out: list[tuple[str, tuple[Pattern, ...]]] = []

    def visit(u: AnnotatedTerm, acc: tuple[Pattern, ...]) -> None:
        if isinstance(u, SymbolRef):
            out.append((u.name, acc))
        elif isinstance(u, PatApp):
            visit(u.fun, (u.pattern,) + acc)
        elif isinstance(u, App):
            visit(u.fun, ())
            visit(u.arg, ())
        elif isinstance(u, (Lam, PatLam)):
            visit(u.body, ())

    visit(t, ())
    return out


def _canonical_name(i: int) -> str:
    letters = string.ascii_lowercase
    return letters[i] if i < len(letters) else f"x{i}"


def _canonicalize(
    lhs_args: tuple[Pattern, ...], rhs_args: tuple[Pattern, ...]
) -> tuple[tuple[Pattern, ...], tuple[Pattern, ...]]:
    mapping: dict[str, Pattern] = {}

    def scan(p: Pattern) -> None:
        if isinstance(p, PVar):
            if p.name not in mapping:
                mapping[p.name] = PVar(_canonical_name(len(mapping)))
        elif isinstance(p, PNode):
            scan(p.left)
            scan(p.right)

    for p in lhs_args + rhs_args:
        scan(p)
    return (
        tuple(pattern_subst(p, mapping) for p in lhs_args),
        tuple(pattern_subst(p, mapping) for p in rhs_args),
    )


def extract_dps(vsys: ValidatedSystem) -> tuple[DependencyPair, ...]:
    """One pair per defined-symbol call in a right-hand side, deduplicated
    after canonical variable renaming."""
    pairs: list[DependencyPair] = []
    seen: set[DependencyPair] = set()
    for vr in vsys.rules:
        for callee, args in _call_sites(vr.rule.rhs):
            if vsys.signature.get(callee) is None:
                continue
            lhs, rhs = _canonicalize(vr.min.recursive_patterns, args)
            dp = DependencyPair(vr.rule.head, lhs, callee, rhs, rule_index=vr.index)
            if dp not in seen:
                seen.add(dp)
                pairs.append(dp)
    return tuple(pairs)


# ---------------------------------------------------------------------------
# Pattern unification

def _assert_no_wildcard(p: Pattern) -> None:
    if isinstance(p, PWild):
        raise ValueError("unification input must not contain wildcards")
    if isinstance(p, PNode):
        _assert_no_wildcard(p.left)
        _assert_no_wildcard(p.right)


def _occurs(name: str, p: Pattern) -> bool:
    if isinstance(p, PVar):
        return p.name == name
    if isinstance(p, PNode):
        return _occurs(name, p.left) or _occurs(name, p.right)
    return False


def unify_patterns(p: Pattern, q: Pattern) -> dict[str, Pattern] | None:
    """Most general unifier of two wildcard-free patterns, or None.

    The empty pattern is an ordinary constant here, and binding a variable
    to a pattern containing it fails the occurs check.
    """
    _assert_no_wildcard(p)
    _assert_no_wildcard(q)
    subst: dict[str, Pattern] = {}

    def bind(name: str, value: Pattern) -> bool:
        value = pattern_subst(value, subst)
        if isinstance(value, PVar) and value.name == name:
            return True
        if _occurs(name, value):
            return False
        for key in list(subst):
            subst[key] = pattern_subst(subst[key], {name: value})
        subst[name] = value
        return True

    work = [(p, q)]
    while work:
        a, b = work.pop()
        a = pattern_subst(a, subst)
        b = pattern_subst(b, subst)
        if isinstance(a, PVar):
            if not bind(a.name, b):
                return None
        elif isinstance(b, PVar):
            if not bind(b.name, a):
                return None
        elif isinstance(a, PNode) and isinstance(b, PNode):
            work.append((a.left, b.left))
            work.append((a.right, b.right))
        elif type(a) is not type(b):
            return None
    return subst


def _freshen_linear(p: Pattern, counter: itertools.count) -> Pattern:
    """Replace every variable and wildcard occurrence by a distinct fresh variable."""
    if isinstance(p, (PVar, PWild)):
        return PVar(f"u{next(counter)}")
    if isinstance(p, PNode):
        left = _freshen_linear(p.left, counter)
        return PNode(left, _freshen_linear(p.right, counter))
    return p


def pattern_unifiable(p: Pattern, q: Pattern) -> bool:
    """Compatibility of two pattern shapes, reading each variable and wildcard
    occurrence as independently arbitrary."""
    counter = itertools.count()
    return unify_patterns(_freshen_linear(p, counter), _freshen_linear(q, counter)) is not None


# ---------------------------------------------------------------------------
# Dependency graph

@dataclass(frozen=True)
class DependencyGraph:
    nodes: tuple[DependencyPair, ...]
    edges: frozenset[tuple[int, int]]

    def successors(self, i: int) -> list[int]:
        return sorted(j for (a, j) in self.edges if a == i)


def build_graph(dps: tuple[DependencyPair, ...]) -> DependencyGraph:
    """Draw an edge when a pair's callee can be the next pair's caller:
    same symbol, same arity, and componentwise compatible patterns."""
    edges = set()
    for i, a in enumerate(dps):
        for j, b in enumerate(dps):
            if a.rhs_symbol != b.lhs_symbol:
                continue
            if len(a.rhs_args) != len(b.lhs_args):
                continue
            if all(pattern_unifiable(pa, pb) for pa, pb in zip(a.rhs_args, b.lhs_args)):
                edges.add((i, j))
    return DependencyGraph(dps, frozenset(edges))


def sccs(g: DependencyGraph) -> list[tuple[int, ...]]:
    """Strongly connected components, each sorted, listed by smallest member."""
    n = len(g.nodes)
    index_of: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    counter = itertools.count()
    out: list[tuple[int, ...]] = []

    def strongconnect(v: int) -> None:
        index_of[v] = low[v] = next(counter)
        stack.append(v)
        on_stack.add(v)
        for w in g.successors(v):
            if w not in index_of:
                strongconnect(w)
                low[v] = min(low[v], low[w])
            elif w in on_stack:
                low[v] = min(low[v], index_of[w])
        if low[v] == index_of[v]:
            component = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                component.append(w)
                if w == v:
                    break
            out.append(tuple(sorted(component)))

    for v in range(n):
        if v not in index_of:
            strongconnect(v)
    return sorted(out, key=lambda c: c[0])


def is_nontrivial(scc: tuple[int, ...], g: DependencyGraph) -> bool:
    """A component matters only if it contains an edge."""
    if len(scc) > 1:
        return True
    (v,) = scc
    return (v, v) in g.edges


# ---------------------------------------------------------------------------
# Pattern embedding

def _has_wildcard(p: Pattern) -> bool:
    if isinstance(p, PWild):
        return True
    if isinstance(p, PNode):
        return _has_wildcard(p.left) or _has_wildcard(p.right)
    return False


def embeds_strict(p: Pattern, q: Pattern) -> bool:
    """p strictly embeds q: q fits inside a proper sub-shape of p.

    Wildcards stand for unknown shapes, so any wildcard occurrence defeats
    the strict relation.
    """
    if _has_wildcard(p) or _has_wildcard(q):
        return False
    if not isinstance(p, PNode):
        return False
    if embeds_weak(p.left, q) or embeds_weak(p.right, q):
        return True
    if isinstance(q, PNode):
        return (
            embeds_strict(p.left, q.left) and embeds_weak(p.right, q.right)
        ) or (
            embeds_weak(p.left, q.left) and embeds_strict(p.right, q.right)
        )
    return False


def embeds_weak(p: Pattern, q: Pattern) -> bool:
    """Syntactic equality or strict embedding."""
    return p == q or embeds_strict(p, q)


# ---------------------------------------------------------------------------
# Cycle criterion

IndexAssignment = dict[str, int]


@dataclass(frozen=True)
class SccCheck:
    ok: bool
    strict: tuple[int, ...]
    weak: tuple[int, ...]
    failing_node: int | None = None
    cycle: tuple[int, ...] | None = None


def find_cycle(nodes: list[int], edges: frozenset[tuple[int, int]]) -> tuple[int, ...] | None:
    """Some cycle lying entirely within the given node set, or None."""
    allowed = set(nodes)
    color: dict[int, int] = {}
    parent: dict[int, int] = {}

    def successors(v: int) -> list[int]:
        return sorted(w for (a, w) in edges if a == v and w in allowed)

    for start in sorted(allowed):
        if color.get(start):
            continue
        stack = [(start, iter(successors(start)))]
        color[start] = 1
        while stack:
            v, it = stack[-1]
            advanced = False
            for w in it:
                if color.get(w, 0) == 0:
                    color[w] = 1
                    parent[w] = v
                    stack.append((w, iter(successors(w))))
                    advanced = True
                    break
                if color.get(w) == 1:
                    cycle = [v]
                    u = v
                    while u != w:
                        u = parent[u]
                        cycle.append(u)
                    cycle.reverse()
                    return tuple(cycle)
            if not advanced:
                color[v] = 2
                stack.pop()
    return None


def check_scc(scc: tuple[int, ...], g: DependencyGraph, indices: IndexAssignment) -> SccCheck:
    """Decide the decrease condition for one component under an index choice.

    Every node must weakly decrease from its caller index to its callee
    index, and after removing strictly decreasing nodes no cycle may remain.
    """
    strict: list[int] = []
    weak: list[int] = []
    for i in scc:
        dp = g.nodes[i]
        for symbol in (dp.lhs_symbol, dp.rhs_symbol):
            if symbol not in indices:
                raise ValueError(f"index assignment lacks symbol {symbol!r}")
        fi = indices[dp.lhs_symbol]
        gi = indices[dp.rhs_symbol]
        if not (1 <= fi <= len(dp.lhs_args)) or not (1 <= gi <= len(dp.rhs_args)):
            raise ValueError(f"index assignment out of range for node {i}")
        p = dp.lhs_args[fi - 1]
        q = dp.rhs_args[gi - 1]
        if embeds_strict(p, q):
            strict.append(i)
        elif embeds_weak(p, q):
            weak.append(i)
        else:
            return SccCheck(False, tuple(strict), tuple(weak), failing_node=i)
    cycle = find_cycle(weak, frozenset((a, b) for (a, b) in g.edges if a in scc and b in scc))
    if cycle is not None:
        return SccCheck(False, tuple(strict), tuple(weak), cycle=cycle)
    return SccCheck(True, tuple(strict), tuple(weak))


@dataclass(frozen=True)
class IndexSearchFailure:
    search_space: int
    best_indices: IndexAssignment | None = None
    best_check: SccCheck | None = None


def find_indices(
    scc: tuple[int, ...], g: DependencyGraph
) -> tuple[IndexAssignment, SccCheck] | IndexSearchFailure:
    """Search recursive-argument indices for the component, smallest first.

    Candidate counts come from the caller arities seen in the component; a
    symbol without recursive arguments leaves nothing to search.
    """
    arity: dict[str, int] = {}
    for i in scc:
        dp = g.nodes[i]
        arity.setdefault(dp.lhs_symbol, len(dp.lhs_args))
    for i in scc:
        dp = g.nodes[i]
        if dp.rhs_symbol not in arity:
            # cannot happen for a component with internal edges
            raise ValueError(f"symbol {dp.rhs_symbol!r} never occurs as a caller in the component")
    symbols = sorted(arity)
    space = 1
    for s in symbols:
        space *= arity[s]
    if space == 0:
        return IndexSearchFailure(search_space=0)
    best: tuple[IndexAssignment, SccCheck] | None = None
    for combo in itertools.product(*(range(1, arity[s] + 1) for s in symbols)):
        indices = dict(zip(symbols, combo))
        result = check_scc(scc, g, indices)
        if result.ok:
            return indices, result
        if best is None or len(result.strict) + len(result.weak) > len(best[1].strict) + len(best[1].weak):
            best = (indices, result)
    assert best is not None
    return IndexSearchFailure(search_space=space, best_indices=best[0], best_check=best[1])


# ---------------------------------------------------------------------------
# Verdict

@dataclass(frozen=True)
class SccCertificate:
    nodes: tuple[int, ...]
    indices: tuple[tuple[str, int], ...]
    strict: tuple[int, ...]
    weak: tuple[int, ...]


@dataclass(frozen=True)
class CriterionFailure:
    scc: tuple[int, ...]
    search_space: int
    message: str
    best_indices: tuple[tuple[str, int], ...] | None = None
    failing_node: int | None = None
    cycle: tuple[int, ...] | None = None


@dataclass(frozen=True)
class Verdict:
    terminating: bool
    graph: DependencyGraph
    components: tuple[tuple[int, ...], ...]
    certificates: tuple[SccCertificate, ...]
    failure: CriterionFailure | None = None


def check_criterion(vsys: ValidatedSystem) -> Verdict:
    """Run the whole pipeline on a validated system and certify or give up.

    Components are processed independently and deterministically; the result
    is a function of the system alone.
    """
    graph = build_graph(extract_dps(vsys))
    components = tuple(sccs(graph))
    certificates: list[SccCertificate] = []
    for scc in components:
        if not is_nontrivial(scc, graph):
            continue
        found = find_indices(scc, graph)
        if isinstance(found, IndexSearchFailure):
            if found.search_space == 0:
                message = (
                    "a symbol in the component has no recursive argument positions"
                )
            elif found.best_check is not None and found.best_check.failing_node is not None:
                label = dp_label(graph.nodes[found.best_check.failing_node])
                message = (
                    f"no index assignment works; closest candidate fails at node "
                    f"{found.best_check.failing_node} ({label}), which does not "
                    "weakly decrease"
                )
            else:
                assert found.best_check is not None
                cyc = found.best_check.cycle or ()
                message = (
                    "no index assignment works; closest candidate leaves the cycle "
                    f"{' -> '.join(str(i) for i in cyc)} without a strict decrease"
                )
            return Verdict(
                terminating=False,
                graph=graph,
                components=components,
                certificates=tuple(certificates),
                failure=CriterionFailure(
                    scc=scc,
                    search_space=found.search_space,
                    message=message,
                    best_indices=tuple(sorted(found.best_indices.items())) if found.best_indices else None,
                    failing_node=found.best_check.failing_node if found.best_check else None,
                    cycle=found.best_check.cycle if found.best_check else None,
                ),
            )
        indices, result = found
        certificates.append(SccCertificate(
            nodes=scc,
            indices=tuple(sorted(indices.items())),
            strict=result.strict,
            weak=result.weak,
        ))
    return Verdict(
        terminating=True,
        graph=graph,
        components=components,
        certificates=tuple(certificates),
    )


# ---------------------------------------------------------------------------
# DOT export

_PALETTE = ("lightblue", "lightsalmon", "palegreen", "khaki", "plum", "lightgrey")


def to_dot(g: DependencyGraph, verdict: Verdict | None = None) -> str:
    """Render the graph deterministically; byte-identical across runs."""
    lines = ["digraph dependency_pairs {"]
    color_of: dict[int, str] = {}
    nontrivial = [scc for scc in sccs(g) if is_nontrivial(scc, g)]
    for rank, scc in enumerate(nontrivial):
        for i in scc:
            color_of[i] = _PALETTE[rank % len(_PALETTE)]
    strict_nodes = set()
    if verdict is not None:
        for cert in verdict.certificates:
            strict_nodes.update(cert.strict)
    for i, dp in enumerate(g.nodes):
        attrs = [f'label="{dp_label(dp)}"']
        if i in color_of:
            attrs.append(f'style=filled fillcolor="{color_of[i]}"')
        if i in strict_nodes:
            attrs.append("penwidth=2")
        lines.append(f"  n{i} [{' '.join(attrs)}];")
    for a, b in sorted(g.edges):
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
