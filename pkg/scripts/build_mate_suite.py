"""Generate the oracle-verified forced-mate suite (20 positions, dm <= 3).

Positions are sampled from sparse material configurations with a fixed seed,
kept only when the oracle proves the exact mate distance, and written as EPD
with ``bm`` (every oracle-optimal first move), ``dm`` and ``id``.

    python scripts/build_mate_suite.py [--out PATH] [--seed N]
"""

from __future__ import annotations

import argparse
import random
from pathlib import Path

from dualmind.board import Position, generate_moves, in_check, parse_fen, san
from dualmind.board.position import FenError, _position_from_fields
from dualmind.oracle import OracleBudgetError, Solver

TARGETS = {1: 8, 2: 7, 3: 5}
BACK_RANK = "6k1/5ppp/8/8/8/8/8/4R2K w - - 0 1"

# (white pieces, black pieces) besides the kings
MATERIAL = [
    ("Q", ""),
    ("R", ""),
    ("Q", "p"),
    ("R", "pp"),
    ("RR", ""),
    ("QN", "p"),
    ("RB", "p"),
    ("QR", "n"),
    ("RN", "pp"),
    ("BBN", ""),
]

DEFAULT_OUT = Path(__file__).resolve().parents[1] / "src/dualmind/bench/data/mates.epd"


def random_position(rng: random.Random) -> Position | None:
    white, black = rng.choice(MATERIAL)
    board: dict[int, str] = {}
    for sym in "K" + white + "k" + black:
        while True:
            sq = rng.randrange(64)
            if sq in board:
                continue
            if sym in "Pp" and sq // 8 in (0, 7):
                continue
            board[sq] = sym
            break
    rows = []
    for rank in range(7, -1, -1):
        row, empty = "", 0
        for file in range(8):
            sym = board.get(rank * 8 + file)
            if sym is None:
                empty += 1
                continue
            if empty:
                row += str(empty)
                empty = 0
            row += sym
        rows.append(row + (str(empty) if empty else ""))
    try:
        pos = _position_from_fields(["/".join(rows), "w", "-", "-"], "0", "1")
    except FenError:
        return None
    if in_check(pos) or not generate_moves(pos):
        return None
    return pos


def certify(pos: Position, budget: int) -> tuple[int, list] | None:
    """(dm, optimal moves) if the side to move mates within 3, else None."""
    solver = Solver(budget)
    try:
        dm = solver.mate_distance(pos, 3)
        if dm is None:
            return None
        sol = solver.solve(pos, 2 * dm - 1)
    except OracleBudgetError:
        return None
    assert sol.value == 1.0
    return dm, sorted(sol.optimal)


def epd_line(pos: Position, dm: int, optimal, ident: str) -> str:
    moves = generate_moves(pos)
    bm = " ".join(san(pos, m, moves) for m in optimal)
    fen4 = " ".join(pos.fen().split()[:4])
    return f'{fen4} bm {bm}; dm {dm}; id "{ident}";'


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    ap.add_argument("--seed", type=int, default=20211)
    ap.add_argument("--budget", type=int, default=300_000)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    found: dict[int, list[str]] = {1: [], 2: [], 3: []}
    seen: set[int] = set()

    back_rank = parse_fen(BACK_RANK)
    dm, optimal = certify(back_rank, args.budget)
    found[dm].append(epd_line(back_rank, dm, optimal, "mate-back-rank"))
    seen.add(back_rank.key)

    tries = 0
    while any(len(found[d]) < n for d, n in TARGETS.items()):
        tries += 1
        pos = random_position(rng)
        if pos is None or pos.key in seen:
            continue
        seen.add(pos.key)
        cert = certify(pos, args.budget)
        if cert is None:
            continue
        dm, optimal = cert
        # Prefer puzzles with a unique or near-unique key move.
        if len(found[dm]) >= TARGETS[dm] or len(optimal) > 2:
            continue
        ident = f"mate{dm}-{len(found[dm]) + 1:02d}"
        found[dm].append(epd_line(pos, dm, optimal, ident))
        print(f"[{tries}] {found[dm][-1]}", flush=True)

    lines = [ln for d in (1, 2, 3) for ln in found[d]]
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines)} positions to {args.out} after {tries} samples")


if __name__ == "__main__":
    main()
