"""Analyse the three Plaskett study positions with the alpha-beta engine.

Prints the top-5 table (move, Q-value, win probability) per position and a
short summary. The mate is far beyond what a Python search reaches in minutes;
raise --nodes to push further.

    python3 scripts/run_plaskett.py [--nodes 200000] [--multipv 5] [--csv]
"""

import argparse

from dualmind.bench import InternalAbEngine, load_suite, render_report, run_trial
from dualmind.search.ab import SearchLimits


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=200_000)
    ap.add_argument("--multipv", type=int, default=5)
    ap.add_argument("--csv", action="store_true")
    args = ap.parse_args()

    engine = InternalAbEngine()
    limits = SearchLimits(max_nodes=args.nodes, multipv=args.multipv)
    records = [run_trial(engine, entry, limits) for entry in load_suite("studies")]
    print(render_report(records, "csv" if args.csv else "markdown"), end="")


if __name__ == "__main__":
    main()
