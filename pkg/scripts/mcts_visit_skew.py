"""Show how PUCT spreads visits over the corrected Plaskett position.

With the heuristic evaluator the search has no idea that Nf6+ mates, so the
visit share of the winning move stays small: the same skew an untrained or
misled policy produces. Prints the root visit CSV every --every simulations.

    python3 scripts/mcts_visit_skew.py [--sims 20000] [--every 5000] [--seed 0]
"""

import argparse

from dualmind.board import PLASKETT_H8_FEN, Move, parse_fen
from dualmind.search.mcts import HeuristicEvaluator, MctsSearcher, PuctParams, visit_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sims", type=int, default=20_000)
    ap.add_argument("--every", type=int, default=5_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--fpu", type=float, default=0.2)
    args = ap.parse_args()

    pos = parse_fen(PLASKETT_H8_FEN)
    nf6 = Move.from_uci("g4f6")

    def progress(r):
        print(f"{r.simulations:>8} sims: Nf6+ has {r.fractions[nf6]:.2%} of visits, best {r.best_move.uci()}")

    searcher = MctsSearcher(PuctParams(fpu=args.fpu), HeuristicEvaluator(), args.seed)
    result = searcher.search(pos, args.sims, on_progress=progress, progress_every=args.every)
    print()
    print(visit_csv(pos, result), end="")


if __name__ == "__main__":
    main()
