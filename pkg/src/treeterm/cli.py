"""Command-line interface: check, graph, reduce, typecheck.

Exit codes are uniform across commands: 0 for success (termination proved,
or the requested output produced), 1 when the criterion or the reducer runs
out of road (inconclusive verdict, spent fuel), 2 for validation and typing
errors, 3 for unparsable input.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .analysis import Verdict, check_criterion, dp_label, is_nontrivial, to_dot
from .oracle import pattern_form
from .report import (
    build_report,
    diagnostic_to_dict,
    parse_error_to_dict,
    report_to_json,
)
from .rewrite import FuelExhausted, normalize
from .syntax import (
    ParseError,
    RewriteSystem,
    parse_erased_term,
    parse_system,
    print_erased,
    print_pattern,
    print_rule,
    print_type,
)
from .typecheck import validate_system

EXIT_OK = 0
EXIT_UNKNOWN = 1
EXIT_INVALID = 2
EXIT_PARSE = 3


class _Console:
    """Stdout stays clean for machine consumption when the JSON report is
    routed there."""

    def __init__(self, json_to_stdout: bool):
        self.quiet = json_to_stdout

    def say(self, message: str = "") -> None:
        if not self.quiet:
            print(message)


def _emit_json(dest: str | None, report: dict) -> None:
    if dest is None:
        return
    text = report_to_json(report)
    if dest == "-":
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text, encoding="utf-8")


def _load_text(path: str) -> str | None:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None


def _format_indices(indices: tuple[tuple[str, int], ...]) -> str:
    return ", ".join(f"ι[{sym}]={i}" for sym, i in indices)


def _print_verdict(console: _Console, path: str, verdict: Verdict, rule_count: int, symbol_count: int) -> None:
    graph = verdict.graph
    nontrivial = [c for c in verdict.components if is_nontrivial(c, graph)]
    console.say(("TERMINATING: " if verdict.terminating else "UNKNOWN: ") + path)
    console.say(f"  rules: {rule_count}, symbols: {symbol_count}")
    console.say(f"  dependency pairs: {len(graph.nodes)}, edges: {len(graph.edges)}")
    console.say(f"  nontrivial SCCs: {len(nontrivial)}")
    for cert in verdict.certificates:
        nodes = "{" + ", ".join(map(str, cert.nodes)) + "}"
        line = f"  SCC {nodes}: {_format_indices(cert.indices)}; strict: {list(cert.strict)}"
        if cert.weak:
            line += f"; weak: {list(cert.weak)}"
        console.say(line)
    if verdict.failure is not None:
        f = verdict.failure
        nodes = "{" + ", ".join(map(str, f.scc)) + "}"
        console.say(f"  failing SCC {nodes} ({f.search_space} assignments tried)")
        console.say(f"  reason: {f.message}")
        if f.cycle:
            console.say("  residual cycle: " + " -> ".join(map(str, f.cycle)))
        for i in f.scc:
            console.say(f"    node {i}: {dp_label(graph.nodes[i])}")


def _render_png(graph, verdict, path: str) -> None:
    from .viz import render_graph_png

    render_graph_png(graph, path, verdict)


def cmd_check(args: argparse.Namespace) -> int:
    console = _Console(args.json == "-")
    started = time.perf_counter()
    text = _load_text(args.path)
    if text is None:
        return EXIT_PARSE
    try:
        system = parse_system(text)
    except ParseError as exc:
        console.say(f"PARSE ERROR: {args.path}: {exc}")
        _emit_json(args.json, build_report(
            args.path, "parse-error",
            diagnostics=(parse_error_to_dict(exc),),
            elapsed=time.perf_counter() - started,
        ))
        return EXIT_PARSE
    validated = validate_system(system)
    if isinstance(validated, list):
        console.say(f"INVALID: {args.path}")
        for diag in validated:
            console.say(f"  {diag}")
        _emit_json(args.json, build_report(
            args.path, "invalid", system=system,
            diagnostics=tuple(diagnostic_to_dict(d) for d in validated),
            elapsed=time.perf_counter() - started,
        ))
        return EXIT_INVALID
    verdict = check_criterion(validated)
    elapsed = time.perf_counter() - started
    _print_verdict(console, args.path, verdict, len(system.rules), len(list(system.signature)))
    if args.dot:
        Path(args.dot).write_text(to_dot(verdict.graph, verdict), encoding="utf-8")
        console.say(f"  wrote DOT to {args.dot}")
    if args.png:
        _render_png(verdict.graph, verdict, args.png)
        console.say(f"  wrote PNG to {args.png}")
    outcome = "terminating" if verdict.terminating else "unknown"
    _emit_json(args.json, build_report(
        args.path, outcome, system=system, validated=validated,
        verdict=verdict, elapsed=elapsed,
    ))
    return EXIT_OK if verdict.terminating else EXIT_UNKNOWN


def cmd_graph(args: argparse.Namespace) -> int:
    console = _Console(False)
    text = _load_text(args.path)
    if text is None:
        return EXIT_PARSE
    try:
        system = parse_system(text)
    except ParseError as exc:
        console.say(f"PARSE ERROR: {args.path}: {exc}")
        return EXIT_PARSE
    validated = validate_system(system)
    if isinstance(validated, list):
        console.say(f"INVALID: {args.path}")
        for diag in validated:
            console.say(f"  {diag}")
        return EXIT_INVALID
    verdict = check_criterion(validated)
    dot = to_dot(verdict.graph, verdict)
    if args.dot:
        Path(args.dot).write_text(dot, encoding="utf-8")
        console.say(f"wrote DOT to {args.dot} ({len(verdict.graph.nodes)} nodes, {len(verdict.graph.edges)} edges)")
    else:
        sys.stdout.write(dot)
    if args.png:
        _render_png(verdict.graph, verdict, args.png)
        console.say(f"wrote PNG to {args.png}")
    return EXIT_OK


def cmd_reduce(args: argparse.Namespace) -> int:
    text = _load_text(args.path)
    if text is None:
        return EXIT_PARSE
    try:
        system = parse_system(text)
    except ParseError as exc:
        print(f"PARSE ERROR: {args.path}: {exc}")
        return EXIT_PARSE
    symbols = frozenset(name for name, _ in system.signature)
    try:
        term = parse_erased_term(args.term, symbols)
    except ParseError as exc:
        print(f"PARSE ERROR: --term: {exc}")
        return EXIT_PARSE
    outcome = normalize(term, system, args.fuel)
    if isinstance(outcome, FuelExhausted):
        print(f"FUEL EXHAUSTED after {outcome.steps} expanded states (budget {args.fuel})")
        for t in outcome.frontier[:5]:
            print(f"  still reducing: {print_erased(t)}")
        return EXIT_UNKNOWN
    forms = sorted(outcome.forms, key=print_erased)
    shown = forms if args.all else forms[:1]
    for v in shown:
        line = print_erased(v)
        if args.oracle:
            line += f"    # pattern form: {print_pattern(pattern_form(v))}"
        print(line)
    if args.all:
        print(f"{len(forms)} normal form(s)")
    return EXIT_OK


def cmd_typecheck(args: argparse.Namespace) -> int:
    text = _load_text(args.path)
    if text is None:
        return EXIT_PARSE
    try:
        system = parse_system(text)
    except ParseError as exc:
        print(f"PARSE ERROR: {args.path}: {exc}")
        return EXIT_PARSE
    validated = validate_system(system)
    if isinstance(validated, list):
        print(f"INVALID: {args.path}")
        for diag in validated:
            print(f"  {diag}")
        return EXIT_INVALID
    for vr in validated.rules:
        print(f"rule {vr.index}: {print_rule(vr.rule)}")
        context = str(vr.min.context)
        print(f"  context: {context if context else '(empty)'}")
        print(f"  lhs type: {print_type(vr.min.lhs_type)}")
        print("  rhs: ok")
    print(f"ok: {len(validated.rules)} rule(s), {len(list(system.signature))} symbol(s)")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="treeterm",
        description="Termination checker for tree rewrite systems with pattern-refinement types",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="validate a system and run the termination criterion")
    p_check.add_argument("path", help="rewrite system file")
    p_check.add_argument("--fuel", type=int, default=10000,
                         help="reduction budget (accepted for symmetry; the criterion itself does not reduce)")
    p_check.add_argument("--json", metavar="PATH",
                         help="write a JSON report to PATH ('-' for stdout, silencing the text output)")
    p_check.add_argument("--dot", metavar="PATH", help="write the dependency graph in DOT format")
    p_check.add_argument("--png", metavar="PATH", help="render the dependency graph to a PNG file")
    p_check.set_defaults(func=cmd_check)

    p_graph = sub.add_parser("graph", help="export the dependency graph")
    p_graph.add_argument("path", help="rewrite system file")
    p_graph.add_argument("--dot", metavar="PATH", help="write DOT to PATH instead of stdout")
    p_graph.add_argument("--png", metavar="PATH", help="render the graph to a PNG file")
    p_graph.set_defaults(func=cmd_graph)

    p_reduce = sub.add_parser("reduce", help="normalize a term under a system's rules")
    p_reduce.add_argument("path", help="rewrite system file")
    p_reduce.add_argument("--term", required=True, help="erased term to reduce")
    p_reduce.add_argument("--fuel", type=int, default=10000, help="maximum states to expand")
    p_reduce.add_argument("--all", action="store_true", help="print every normal form, not just one")
    p_reduce.add_argument("--oracle", action="store_true",
                          help="annotate each printed normal form with its pattern form")
    p_reduce.set_defaults(func=cmd_reduce)

    p_tc = sub.add_parser("typecheck", help="print each rule's context, lhs type and rhs status")
    p_tc.add_argument("path", help="rewrite system file")
    p_tc.set_defaults(func=cmd_typecheck)

    args = parser.parse_args(argv)
    return args.func(args)


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
