"""Command-line surface.

Exit codes: 0 success / verdict holds, 1 verdict fails (a counterexample or
witness was found where none should exist, or a claimed equivalence does not
hold), 2 usage or input error, 3 inconclusive (state-space truncation or an
otherwise undecidable instance).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .canonical import canonicalize
from .election import parse_network, maximal_executions_graph, verify_electoral
from .encoding import PolarityAssignment, correspondence_report, encode
from .enumeration import Budget, ast_size, property_campaign
from .equivalences import coupled_similar, weakly_bisimilar
from .parser import ParseError, parse
from .patterns import find_pattern_m, find_pattern_star
from .render import render
from .semantics import (
    DEFAULT_MAX_DEPTH, DEFAULT_MAX_STATES, TruncatedError, barbs,
    dump_json, enumerate_steps, graph_dot, graph_json, reduction_graph,
    weak_barbs,
)
from .terms import CMV, CMVP, PI, TermError

_CALCULI = (PI, CMVP, CMV)


class _Usage(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    p = Path(path)
    if not p.exists():
        raise _Usage(f"no such file: {path}")
    return p.read_text()


def _parse_file(calculus: str, path: str):
    return parse(calculus, _read(path))


def _steps_json(steps):
    return [
        {"target": render(s.target), "kind": s.footprint.kind,
         "endpoints": sorted(str(n) for n in s.footprint.endpoints)}
        for s in steps
    ]


def _graph_limits(args) -> tuple[int, int]:
    ms = args.max_states if args.max_states else DEFAULT_MAX_STATES
    md = args.max_depth if args.max_depth else DEFAULT_MAX_DEPTH
    return ms, md


# --- commands --------------------------------------------------------------

def _cmd_parse(args) -> int:
    result = _parse_file(args.calculus, args.file)
    t = result.term
    if args.json:
        payload = {
            "calculus": args.calculus,
            "term": render(t),
            "canonical": render(canonicalize(t)),
            "size": ast_size(t),
            "annotations": {str(n): r for n, r in result.annotations.items()},
        }
        sys.stdout.write(dump_json(payload))
    else:
        print(render(t))
    return 0


def _cmd_steps(args) -> int:
    result = _parse_file(args.calculus, args.file)
    steps = enumerate_steps(args.calculus, result.term)
    if args.json:
        sys.stdout.write(dump_json({"steps": _steps_json(steps)}))
    else:
        for i, s in enumerate(steps):
            eps = " ".join(sorted(str(n) for n in s.footprint.endpoints))
            print(f"{i}: [{s.footprint.kind} {eps}] -> {render(s.target)}")
        if not steps:
            print("no steps")
    return 0


def _cmd_graph(args) -> int:
    result = _parse_file(args.calculus, args.file)
    ms, md = _graph_limits(args)
    g = reduction_graph(args.calculus, result.term, max_states=ms,
                        max_depth=md)
    payload = graph_json(g)
    if args.report:
        from .report import write_graph_report
        write_graph_report(g, args.report)
    if args.dot:
        print(graph_dot(g))
    elif args.json:
        sys.stdout.write(dump_json(payload))
    else:
        print(f"{len(g.terms)} states, {len(g.edges)} edges"
              + (" (truncated)" if g.truncated else ""))
    return 3 if g.truncated else 0


def _cmd_barbs(args) -> int:
    result = _parse_file(args.calculus, args.file)
    if args.weak:
        ms, _ = _graph_limits(args)
        bs = weak_barbs(args.calculus, result.term, max_states=ms)
    else:
        bs = barbs(args.calculus, result.term)
    texts = sorted(b.text() for b in bs)
    if args.json:
        sys.stdout.write(dump_json({"barbs": texts,
                                    "weak": bool(args.weak)}))
    else:
        print(" ".join(texts) if texts else "none")
    return 0


def _two_graphs(args):
    ca = args.calculus
    cb = args.calculus2 or ca
    ra = _parse_file(ca, args.file)
    rb = _parse_file(cb, args.file2)
    ms, md = _graph_limits(args)
    ga = reduction_graph(ca, ra.term, max_states=ms, max_depth=md)
    gb = reduction_graph(cb, rb.term, max_states=ms, max_depth=md)
    return ga, gb


def _cmd_bisim(args) -> int:
    ga, gb = _two_graphs(args)
    ok, witness = weakly_bisimilar(ga, gb, 0, 0)
    if args.json:
        payload = {"bisimilar": ok,
                   "witness": witness.to_json() if witness else None}
        sys.stdout.write(dump_json(payload))
    else:
        print("weakly bisimilar" if ok else "not weakly bisimilar")
    return 0 if ok else 1


def _cmd_coupledsim(args) -> int:
    ga, gb = _two_graphs(args)
    ok, witnesses = coupled_similar(ga, gb, 0, 0)
    if args.json:
        payload = {
            "coupled-similar": ok,
            "witnesses": ([w.to_json() for w in witnesses]
                          if witnesses else None),
        }
        sys.stdout.write(dump_json(payload))
    else:
        print("coupled similar" if ok else "not coupled similar")
    return 0 if ok else 1


def _cmd_find_pattern(args) -> int:
    if args.m == args.star:
        raise _Usage("pick exactly one of --m or --star")
    result = _parse_file(args.calculus, args.file)
    t = result.term
    finder = find_pattern_m if args.m else find_pattern_star
    w = finder(args.calculus, t)
    if w is None:
        if args.json:
            sys.stdout.write(dump_json({"witness": None}))
        else:
            print("no witness")
        return 1
    steps = list(enumerate_steps(args.calculus, t))
    ids = [steps.index(s) for s in w.steps]
    if args.json:
        sys.stdout.write(dump_json({"witness": w.to_json(ids)}))
    else:
        print(f"pattern {w.kind}")
        for local, (i, s) in enumerate(zip(ids, w.steps)):
            eps = " ".join(sorted(str(n) for n in s.footprint.endpoints))
            print(f"  step {local} (#{i}) [{eps}] -> {render(s.target)}")
        print("  conflicts: "
              + " ".join(f"{i}-{j}" for i, j in w.conflicts))
        print("  distributable: "
              + " ".join(f"{i}-{j}" for i, j in w.distributable_pairs))
    return 0


def _election_payload(verdict) -> dict:
    payload = {
        "status": verdict.status,
        "reason": verdict.reason,
        "leader-table": [
            {"execution": list(path), "leader": str(leader)}
            for path, leader in verdict.leader_table
        ],
        "counterexample": (list(verdict.counterexample)
                           if verdict.counterexample is not None else None),
    }
    if verdict.status == "electoral":
        payload["executions"] = len(verdict.leader_table)
    return payload


def _cmd_electoral(args) -> int:
    net, _auto = parse_network(_read(args.file), calculus=args.calculus)
    ms, _ = _graph_limits(args)
    verdict = verify_electoral(net, max_states=ms)
    payload = _election_payload(verdict)
    if args.report:
        from .report import write_electoral_report
        write_electoral_report(payload, args.report)
    if args.json:
        sys.stdout.write(dump_json(payload))
    else:
        print(f"verdict: {verdict.status}"
              + (f" ({verdict.reason})" if verdict.reason else ""))
        if verdict.status == "electoral":
            print(f"{len(verdict.leader_table)} maximal executions")
            for path, leader in verdict.leader_table:
                print(f"  {' '.join(str(e) for e in path) or '(empty)'}"
                      f" -> leader {leader}")
    match verdict.status:
        case "electoral":
            return 0
        case "not-electoral":
            return 1
        case _:
            return 3


def _cmd_encode(args) -> int:
    result = _parse_file(CMVP, args.file)
    pa = PolarityAssignment(dict(result.annotations)).complete(result.term)
    target = encode(result.term, pa)
    if args.json:
        payload = {"source": render(result.term), "target": render(target)}
        sys.stdout.write(dump_json(payload))
    else:
        print(render(target))
    return 0


def _cmd_correspondence(args) -> int:
    result = _parse_file(CMVP, args.file)
    pa = PolarityAssignment(dict(result.annotations))
    ms, _ = _graph_limits(args)
    report = correspondence_report(result.term, pa, max_states=ms)
    payload = report.to_json()
    if args.json:
        sys.stdout.write(dump_json(payload))
    else:
        for key in ("completeness", "soundness-gorla", "soundness-weak",
                    "barb-sensitivity", "divergence-reflection", "coupled"):
            print(f"{key}: {'pass' if payload[key] else 'FAIL'}")
        print(f"intermediate states: {payload['intermediate-states']}")
    return 0 if report.passed() else 1


def _cmd_campaign(args) -> int:
    ms = args.max_states if args.max_states else DEFAULT_MAX_STATES
    budget = Budget(args.budget, max_names=args.names,
                    max_labels=args.labels, max_states=ms)
    rep = property_campaign(args.property, budget, calculus=args.calculus,
                            stop_after=args.stop_after, seed=args.seed)
    payload = rep.to_json()
    if args.report:
        from .report import write_campaign_report
        write_campaign_report(payload, args.report)
    if args.json:
        sys.stdout.write(dump_json(payload))
    else:
        print(f"campaign {rep.property}: checked {rep.checked}, "
              f"witnesses {len(rep.witnesses)}, "
              f"failures {len(rep.failures)}, "
              f"inconclusive {rep.inconclusive}")
    return 1 if rep.witnesses or rep.failures else 0


# --- argument parsing ------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="mixsep",
        description="Workbench for mixed and separate choice process calculi")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, calculus=True, limits=True, json_flag=True):
        if calculus:
            p.add_argument("--calculus", choices=_CALCULI, default=CMVP)
        if limits:
            p.add_argument("--max-states", type=int, default=0,
                           help="state cap (default: MIXSEP_MAX_STATES)")
            p.add_argument("--max-depth", type=int, default=0)
        if json_flag:
            p.add_argument("--json", action="store_true",
                           help="machine-readable, byte-stable output")

    p = sub.add_parser("parse", help="parse a term and echo it back")
    common(p, limits=False)
    p.add_argument("file")
    p.set_defaults(fn=_cmd_parse)

    p = sub.add_parser("steps", help="list the one-step reductions")
    common(p, limits=False)
    p.add_argument("file")
    p.set_defaults(fn=_cmd_steps)

    p = sub.add_parser("graph", help="explore the reduction graph")
    common(p)
    p.add_argument("--dot", action="store_true")
    p.add_argument("--report", metavar="DIR",
                   help="write JSON, CSV and PNG into DIR")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_graph)

    p = sub.add_parser("barbs", help="observables of a term")
    common(p)
    p.add_argument("--weak", action="store_true",
                   help="barbs of all reachable states")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_barbs)

    for name, fn in (("bisim", _cmd_bisim), ("coupledsim", _cmd_coupledsim)):
        p = sub.add_parser(name, help=f"check {name} of two terms")
        common(p)
        p.add_argument("--calculus2", choices=_CALCULI, default=None,
                       help="calculus of the second term (default: same)")
        p.add_argument("file")
        p.add_argument("file2")
        p.set_defaults(fn=fn)

    p = sub.add_parser("find-pattern",
                       help="search for a synchronisation pattern")
    common(p, limits=False)
    p.add_argument("--m", action="store_true")
    p.add_argument("--star", action="store_true")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_find_pattern)

    p = sub.add_parser("electoral", help="verify a leader-election network")
    common(p)
    p.set_defaults(calculus=None)
    p.add_argument("--report", metavar="DIR")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_electoral)

    p = sub.add_parser("encode",
                       help="translate mixed sessions to separate sessions")
    common(p, calculus=False, limits=False)
    p.add_argument("file")
    p.set_defaults(fn=_cmd_encode)

    p = sub.add_parser("correspondence",
                       help="operational correspondence of the translation")
    common(p, calculus=False)
    p.add_argument("file")
    p.set_defaults(fn=_cmd_correspondence)

    p = sub.add_parser("campaign", help="exhaustive property evidence")
    common(p, limits=False)
    p.add_argument("property",
                   choices=("no-star", "confluence", "correspondence",
                            "no-electoral"))
    p.add_argument("--budget", type=int, required=True,
                   help="AST-size bound for generated terms")
    p.add_argument("--names", type=int, default=2)
    p.add_argument("--labels", type=int, default=2)
    p.add_argument("--max-states", type=int, default=0)
    p.add_argument("--stop-after", type=int, default=None,
                   help="stop after this many witnesses/failures")
    p.add_argument("--seed", type=int, default=None,
                   help="shuffle the corpus order deterministically")
    p.add_argument("--report", metavar="DIR")
    p.set_defaults(fn=_cmd_campaign)

    return top


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.fn(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except _Usage as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except TermError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except TruncatedError as e:
        print(f"inconclusive: {e}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
