"""``dualmind`` command line."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Optional, Sequence

from ..bench import (
    RecordLine,
    SuiteError,
    engine_from_spec,
    format_winprob,
    interpret_ratio,
    leela_factor,
    leela_ratio,
    load_manifest,
    load_suite,
    render_report,
    run_trial,
)
from ..bench.engines import mcts_lines
from ..bench.manifest import EngineSpec, ManifestError
from ..board.notation import san
from ..board.perft import divide, perft
from ..board.position import STARTING_FEN, FenError, generate_moves, parse_fen
from ..evalcore.score import cp_to_winprob
from ..oracle import OracleBudgetError, Solver, q_values_csv
from ..search.ab import AlphaBetaSearcher, HeuristicToggles, SearchLimits
from ..search.mcts import HeuristicEvaluator, MctsSearcher, PuctParams, visit_csv
from .client import EngineError
from .uci import uci_serve

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("dualmind")


def _position(text: str):
    return parse_fen(STARTING_FEN if text == "startpos" else text)


def _lines_table(pos, lines: list[RecordLine]) -> str:
    lines = sorted(lines, key=lambda ln: ln.score.sort_key(), reverse=True)
    width = max([8] + [len(ln.san) for ln in lines])
    rows = [
        "Move".ljust(16) + "".join(ln.san.rjust(width + 2) for ln in lines),
        "Q-value".ljust(16) + "".join(ln.score.display().rjust(width + 2) for ln in lines),
        "Win Probability".ljust(16) + "".join(format_winprob(ln.winprob).rjust(width + 2) for ln in lines),
    ]
    return "\n".join(rows)


def cmd_analyze(args) -> int:
    pos = _position(args.fen)
    moves = generate_moves(pos)
    if not moves:
        print("position is terminal", file=sys.stderr)
        return EXIT_FAILURE
    if args.engine == "ab":
        limits = SearchLimits(
            max_depth=args.depth if args.depth or args.nodes or args.movetime else 8,
            max_nodes=args.nodes,
            max_time_ms=args.movetime,
            multipv=args.multipv,
        )
        result = AlphaBetaSearcher(HeuristicToggles()).search(pos, limits)
        lines = [RecordLine(ln.move, san(pos, ln.move, moves), ln.score, cp_to_winprob(ln.score)) for ln in result.lines]
        summary = f"depth {result.nominal_depth}, nodes {result.nodes}, time {result.elapsed_ms:.0f} ms"
    else:
        params = PuctParams(args.cbase, args.cinit, args.fpu)
        searcher = MctsSearcher(params, HeuristicEvaluator(), args.seed)
        result = searcher.search(pos, args.sims, max_time_ms=args.movetime)
        lines = [
            RecordLine(m, san(pos, m, moves), s, cp_to_winprob(s)) for m, s in mcts_lines(result, args.multipv)
        ]
        summary = f"simulations {result.simulations}, time {result.elapsed_ms:.0f} ms"
    print(_lines_table(pos, lines))
    print(summary)
    if args.engine == "mcts" and args.visits:
        print()
        print(visit_csv(pos, result), end="")
    return EXIT_OK


def cmd_bench(args) -> int:
    suite = load_suite(args.suite)
    specs = load_manifest(args.manifest) if args.manifest else [EngineSpec("ab", "internal:ab")]
    for spec in specs:
        if spec.target == "internal:mcts":
            spec.options.setdefault("Seed", str(args.seed))
    engines = [engine_from_spec(s) for s in specs]
    limits = SearchLimits(
        max_depth=args.depth if args.depth or args.nodes or args.movetime else 6,
        max_nodes=args.nodes,
        max_time_ms=args.movetime,
        multipv=args.multipv,
    )
    entries = [e for e in suite if not args.only or e.id in args.only]
    records = [run_trial(engine, entry, limits) for engine in engines for entry in entries]
    text = render_report(records, args.report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="" if text.endswith("\n") else "\n")
    return EXIT_FAILURE if any(r.failed for r in records) else EXIT_OK


def cmd_oracle(args) -> int:
    pos = _position(args.fen)
    try:
        sol = Solver(args.budget).solve(pos, args.horizon)
    except OracleBudgetError as exc:
        print(f"oracle: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    print(q_values_csv(pos, sol), end="")
    log.info("value %.1f resolved %s nodes %d", sol.value, sol.resolved, sol.nodes)
    return EXIT_OK


def cmd_ratio(args) -> int:
    try:
        f = leela_factor(args.sf_nps, args.lc_nps)
        r = leela_ratio(f, args.lc_nodes, args.sf_nodes)
    except (ZeroDivisionError, ValueError) as exc:
        print(f"ratio: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"F = {f:.2f}")
    print(f"R = {r:.1f}")
    print(interpret_ratio(r))
    return EXIT_OK


def cmd_perft(args) -> int:
    pos = _position(args.fen)
    if args.divide:
        counts = divide(pos, args.depth)
        for m in sorted(counts):
            print(f"{m}: {counts[m]}")
        print(f"total: {sum(counts.values())}")
    else:
        print(perft(pos, args.depth))
    return EXIT_OK


def cmd_serve(args) -> int:
    uci_serve(args.engine)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dualmind", description="Chess study analysis with alpha-beta and PUCT engines.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="top moves with Q-values and win probabilities")
    p.add_argument("fen", help="FEN string or 'startpos'")
    p.add_argument("--engine", choices=["ab", "mcts"], default="ab")
    p.add_argument("--depth", type=int)
    p.add_argument("--nodes", type=int)
    p.add_argument("--movetime", type=float, help="milliseconds")
    p.add_argument("--sims", type=int, default=10_000)
    p.add_argument("--multipv", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cinit", type=float, default=1.25)
    p.add_argument("--cbase", type=float, default=19652.0)
    p.add_argument("--fpu", type=float, default=0.2)
    p.add_argument("--visits", action="store_true", help="also print the root visit CSV (mcts)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bench", help="run engines over a study suite")
    p.add_argument("--suite", default="studies", help="EPD path or built-in name (studies, mates)")
    p.add_argument("--manifest", help="engine manifest file (default: internal alpha-beta)")
    p.add_argument("--report", choices=["markdown", "csv"], default="markdown")
    p.add_argument("--depth", type=int)
    p.add_argument("--nodes", type=int)
    p.add_argument("--movetime", type=float)
    p.add_argument("--multipv", type=int, default=5)
    p.add_argument("--only", nargs="*", help="study ids to run")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="exact Q-values at a ply horizon, as CSV")
    p.add_argument("fen")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--budget", type=int, default=10**8)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("ratio", help="Leela Ratio arithmetic")
    for name in ("--sf-nps", "--lc-nps", "--sf-nodes", "--lc-nodes"):
        p.add_argument(name, type=float, required=True)
    p.set_defaults(func=cmd_ratio)

    p = sub.add_parser("perft", help="count leaf nodes of the legal move tree")
    p.add_argument("fen")
    p.add_argument("depth", type=int)
    p.add_argument("--divide", action="store_true")
    p.set_defaults(func=cmd_perft)

    p = sub.add_parser("serve-uci", help="speak UCI on stdin/stdout")
    p.add_argument("--engine", choices=["ab", "mcts"], default="ab")
    p.set_defaults(func=cmd_serve)
    return ap


def _configure_logging():
    level = os.environ.get("DUALMIND_LOG")
    if level:
        logging.basicConfig(stream=sys.stderr, level=level.upper(), format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if getattr(args, "depth", None) is not None and args.depth < (0 if args.command == "perft" else 1):
        parser.print_usage(sys.stderr)
        print("dualmind: depth out of range", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (FenError, SuiteError, ManifestError, ValueError, FileNotFoundError) as exc:
        print(f"dualmind: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EngineError, OSError) as exc:
        print(f"dualmind: {exc}", file=sys.stderr)
        return EXIT_FAILURE
