"""Termination checking for tree rewrite systems with pattern-refinement types.

The pipeline: parse a system (`syntax`), validate signatures and rules
(`typecheck`), extract type-level dependency pairs and decide the cycle
decrease criterion (`analysis`), and optionally execute terms (`rewrite`)
or cross-check against the semantic constructions (`oracle`).
"""
from .syntax import (
    ParseError,
    Pattern,
    RefinementType,
    RewriteRule,
    RewriteSystem,
    Signature,
    parse_erased_term,
    parse_pattern,
    parse_system,
    parse_term,
    parse_type,
    print_erased,
    print_pattern,
    print_rule,
    print_system,
    print_term,
    print_type,
)
from .typecheck import (
    Diagnostic,
    TypeCheckError,
    ValidatedSystem,
    check,
    min_type_lhs,
    pattern_sub,
    synthesize,
    type_sub,
    validate_system,
)
from .analysis import (
    DependencyGraph,
    DependencyPair,
    Verdict,
    build_graph,
    check_criterion,
    extract_dps,
    find_indices,
    pattern_unifiable,
    sccs,
    to_dot,
    unify_patterns,
)
from .rewrite import (
    FuelExhausted,
    NormalForms,
    match_lhs,
    normalize,
    step,
)
from .cli import main

__version__ = "0.1.0"

__all__ = [
    "ParseError",
    "Pattern",
    "RefinementType",
    "RewriteRule",
    "RewriteSystem",
    "Signature",
    "parse_erased_term",
    "parse_pattern",
    "parse_system",
    "parse_term",
    "parse_type",
    "print_erased",
    "print_pattern",
    "print_rule",
    "print_system",
    "print_term",
    "print_type",
    "Diagnostic",
    "TypeCheckError",
    "ValidatedSystem",
    "check",
    "min_type_lhs",
    "pattern_sub",
    "synthesize",
    "type_sub",
    "validate_system",
    "DependencyGraph",
    "DependencyPair",
    "Verdict",
    "build_graph",
    "check_criterion",
    "extract_dps",
    "find_indices",
    "pattern_unifiable",
    "sccs",
    "to_dot",
    "unify_patterns",
    "FuelExhausted",
    "NormalForms",
    "match_lhs",
    "normalize",
    "step",
    "main",
    "__version__",
]
