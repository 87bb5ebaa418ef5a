"""Command-line driver.

    c2tools c2 --gen zigzag:3:completed --q 7 --method four-valent
    c2tools verify theorem3
    c2tools reduce --gen k:5 --trace out.json

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import counting, reduction, suites
from .counting import DivisibilityError, get_field, CountingError
from .graphs import Graph, GraphError, complete_graph, zigzag
from .polyring import PolynomialError, from_text

OK, FAILED, USAGE = 0, 1, 2
METHODS = ("bruteforce", "three-valent", "four-valent", "denominator", "slr")


class UsageError(Exception):
    pass


def parse_gen(spec: str) -> Graph:
    """``zigzag:h[:completed]`` or ``k:n``."""
    parts = spec.split(":")
    try:
        if parts[0] == "zigzag" and len(parts) in (2, 3):
            if len(parts) == 3 and parts[2] != "completed":
                raise UsageError(f"unknown zigzag flag {parts[2]!r}")
            return zigzag(int(parts[1]), completed=len(parts) == 3)
        if parts[0] == "k" and len(parts) == 2:
            return complete_graph(int(parts[1]))
    except (ValueError, GraphError) as exc:
        raise UsageError(f"bad generator {spec!r}: {exc}") from None
    raise UsageError(f"bad generator {spec!r}; use zigzag:h[:completed] or k:n")


def load_graph(args) -> Graph:
    if args.graph and args.gen:
        raise UsageError("give either --graph or --gen")
    if args.gen:
        return parse_gen(args.gen)
    if args.graph:
        try:
            return Graph.from_json(Path(args.graph).read_text())
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read graph {args.graph}: {exc}") from None
    raise UsageError("a graph is required (--graph PATH or --gen SPEC)")


def parse_qs(text: str) -> list[int]:
    try:
        qs = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad q list {text!r}") from None
    for q in qs:
        try:
            get_field(q)
        except CountingError as exc:
            raise UsageError(str(exc)) from None
    if not qs:
        raise UsageError("empty q list")
    return qs


def _vertex(g: Graph, valency: int, given: int | None) -> int:
    if given is not None:
        if given not in g.vertices or g.degree(given) != valency:
            raise UsageError(f"vertex {given} is not {valency}-valent")
        return given
    for v in g.vertices:
        if g.degree(v) == valency:
            return v
    raise UsageError(f"method needs a {valency}-valent vertex")


def emit(report: dict, as_json: bool, lines: list[str]) -> None:
    if as_json:
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        print("\n".join(lines))


# ---------------------------------------------------------------------------
# commands


def cmd_c2(args) -> int:
    g = load_graph(args)
    qs = parse_qs(args.q)
    method = args.method
    report: dict = {"command": "c2", "method": method, "q": qs, "ambient": list(g.labels)}
    residues: dict[str, int] = {}
    lines = []
    if method == "bruteforce":
        from .kirchhoff import graph_polynomial

        if g.n_vertices < 3:
            raise UsageError("c2 needs at least 3 vertices")
        psi = graph_polynomial(g)
        counts = {}
        for q in qs:
            n = counting.count_parallel([psi], g.labels, q, shards=args.threads, threads=args.threads).count
            if n % (q * q):
                raise DivisibilityError(f"[Psi]_{q} = {n} is not divisible by q^2")
            counts[str(q)] = n
            residues[str(q)] = (n // (q * q)) % q
        report["count"] = counts
    elif method == "three-valent":
        v = _vertex(g, 3, args.vertex)
        for q in qs:
            residues[str(q)] = reduction.c2_three_valent(g, v, q)
    elif method == "denominator":
        try:
            run = reduction.denominator_reduce(g)
        except GraphError as exc:
            raise UsageError(str(exc)) from None
        report["status"] = run.status
        report["order"] = list(run.order)
        lines.append(f"denominator reduction: {run.status}, order {list(run.order)}")
        for q in qs:
            residues[str(q)] = run.c2(q)
    elif method in ("four-valent", "slr"):
        deg = g.degrees()
        if method == "four-valent":
            v = _vertex(g, 4, args.vertex)
            if g.n_vertices < 5:
                raise UsageError("the 4-valent formula needs at least 5 vertices")
            for q in qs:
                residues[str(q)] = reduction.c2_four_valent(g, v, q, mode="count")
        else:
            v = args.vertex
            if v is None and not any(d in (3, 4) for d in deg.values()):
                raise UsageError("slr needs a vertex of valency 3 or 4")
        try:
            rep = reduction.c2_slr(g, qs, v=v, strategy=args.strategy)
        except reduction.ReductionError as exc:
            report["slr_failure"] = str(exc)
            lines.append(f"SLR incomplete: {exc}")
            if method == "slr":
                report["residues"] = residues
                emit(report, args.json, lines)
                return FAILED
        else:
            if method == "slr":
                residues = {str(q): r for q, r in rep.residues.items()}
            elif any(residues[str(q)] != rep.residues[q] for q in qs):
                report["consistent"] = False
                lines.append("count mode and SLR disagree")
            report["c"] = rep.c
            report["bad_prime_candidates"] = rep.candidates
            report["verified_bad_primes"] = rep.verified_bad
            report["bound_ok"] = rep.bound_ok
            lines.append(f"c = {rep.c}  (c2 = -c)")
            lines.append(f"bad prime candidates: {rep.candidates or 'none'}")
            if not rep.bound_ok:
                lines.append("bound |c| < 4^h / 2 violated")
                report["residues"] = residues
                emit(report, args.json, lines)
                return FAILED
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown method {method}")
    report["residues"] = residues
    lines = [f"q={q} c2={residues[str(q)]}" for q in qs] + lines
    emit(report, args.json, lines)
    return FAILED if report.get("consistent") is False else OK


def cmd_verify(args) -> int:
    if args.suite not in suites.SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {sorted(suites.SUITES)}")
    checks = suites.SUITES[args.suite]()
    failed = [c for c in checks if not c.ok]
    if args.json:
        print(json.dumps({"suite": args.suite, "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in checks]}, sort_keys=True, indent=2))
    else:
        for c in checks:
            print(("PASS " if c.ok else "FAIL ") + c.name + ("" if c.ok else f"  [{c.detail}]"))
        print(f"{len(checks) - len(failed)}/{len(checks)} passed")
    return FAILED if failed else OK


def cmd_reduce(args) -> int:
    if not args.trace:
        raise UsageError("--trace PATH is required")
    if args.poly:
        try:
            polys = [from_text(t) for t in args.poly]
        except PolynomialError as exc:
            raise UsageError(str(exc)) from None
        targets = [(tuple(polys), None)]
    else:
        g = load_graph(args)
        v = args.vertex
        if v is None:
            v = next((u for u in g.vertices if g.degree(u) == 4), None)
        if v is None or g.degree(v) != 4:
            v3 = args.vertex if args.vertex is not None else next((u for u in g.vertices if g.degree(u) == 3), None)
            if v3 is None:
                raise UsageError("graph has no vertex of valency 3 or 4")
            targets = [reduction.three_valent_pair(g, v3)]
        else:
            targets = [reduction.four_valent_pair(g, v)]
    polys, amb = targets[0]
    try:
        tree = reduction.slr_reduce(polys, amb, strategy=args.strategy)
    except PolynomialError as exc:
        raise UsageError(str(exc)) from None
    text = tree.to_json()
    try:
        Path(args.trace).write_text(text + "\n")
    except OSError as exc:
        raise UsageError(f"cannot write trace: {exc}") from None
    replayed = reduction.ReductionTree.from_json(text)
    problems = reduction.replay_check(replayed)
    report = {"command": "reduce", "complete": tree.complete, "nodes": len(tree.reachable()), "replay_problems": problems}
    lines = [f"trace written to {args.trace} ({len(tree.reachable())} nodes)"]
    if tree.complete:
        report["value"] = reduction.evaluate_tree(tree, None)
        lines.append(f"complete; generic value {report['value']}")
    else:
        report["failure"] = tree.failure_summary()
        lines.append(f"failure-at-node: {report['failure']}")
    if problems:
        lines += [f"replay: {p}" for p in problems]
    emit(report, args.json, lines)
    return OK if tree.complete and not problems else FAILED


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="c2tools", description="c2 invariants of Feynman graphs")
    sub = ap.add_subparsers(dest="command", required=True)

    def graph_opts(p):
        p.add_argument("--graph", help="graph JSON file")
        p.add_argument("--gen", help="generator: zigzag:h[:completed] or k:n")
        p.add_argument("--vertex", type=int, help="vertex used by the vertex formulas")
        p.add_argument("--json", action="store_true", help="machine-readable report")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--strategy", choices=("greedy", "label"), default="greedy")

    p = sub.add_parser("c2", help="c2 residues of a graph")
    graph_opts(p)
    p.add_argument("--q", default="2,3,5", help="comma-separated field sizes")
    p.add_argument("--method", choices=METHODS, default="bruteforce")
    p.add_argument("--trace", help="unused for c2; accepted for symmetry")
    p.set_defaults(func=cmd_c2)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("suite")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce", help="semilinear reduction trace")
    graph_opts(p)
    p.add_argument("--poly", action="append", help="target polynomial text (give twice for a pair)")
    p.add_argument("--trace", help="output JSON path")
    p.set_defaults(func=cmd_reduce)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except DivisibilityError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
