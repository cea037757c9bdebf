"""Leela Ratio for the Plaskett comparison, plus the rounding caveat.

F = Stockfish nps / LCZero nps and R = LCZero nodes * F / Stockfish nodes.
With the rounded speeds 1.5e8 and 1.4e5 the factor is 1071.43; the quoted
factor of 1084 cannot be recovered from those operands, so both are shown.
"""

import argparse

from dualmind.bench import PRINTED_FACTOR, RatioInputs, interpret_ratio, leela_ratio


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sf-nps", type=float, default=1.5e8)
    ap.add_argument("--lc-nps", type=float, default=1.4e5)
    ap.add_argument("--sf-nodes", type=float, default=1.897e9)
    ap.add_argument("--lc-nodes", type=float, default=6.0e7)
    args = ap.parse_args()

    r = RatioInputs(args.sf_nps, args.lc_nps, args.sf_nodes, args.lc_nodes)
    print(f"F = {r.factor:.2f}  R = {r.ratio:.2f}  {interpret_ratio(r.ratio)}")
    quoted = leela_ratio(PRINTED_FACTOR, args.lc_nodes, args.sf_nodes)
    print(f"with the quoted factor {PRINTED_FACTOR:g}: R = {quoted:.2f}")


if __name__ == "__main__":
    main()
