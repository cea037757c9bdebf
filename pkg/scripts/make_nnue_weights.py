"""Write a seeded random network in the binary weight format.

No trained weights ship with the package; this produces a file that loads and
evaluates deterministically, for plumbing tests and timing.

    python3 scripts/make_nnue_weights.py OUT [--seed N] [--l1 256 --l2 32 --l3 32]
"""

import argparse
from pathlib import Path

from dualmind.evalcore import load_nnue, nnue_evaluate, nnue_refresh, random_network, save_nnue
from dualmind.board import start_position


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", type=Path)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--l1", type=int, default=256)
    ap.add_argument("--l2", type=int, default=32)
    ap.add_argument("--l3", type=int, default=32)
    args = ap.parse_args()

    data = save_nnue(random_network(args.seed, args.l1, args.l2, args.l3))
    args.out.write_bytes(data)
    net = load_nnue(args.out.read_bytes())
    pos = start_position()
    score = nnue_evaluate(nnue_refresh(pos, net), net, pos.stm)
    print(f"wrote {args.out} ({len(data)} bytes); start position evaluates to {score.display()}")


if __name__ == "__main__":
    main()
