"""Precomputed attack tables for 64-bit bitboards held in Python ints.

Square numbering is a1=0, b1=1, ..., h8=63. Slider attacks use one lookup
dict per square and per line (rank, file, diagonal, anti-diagonal), keyed by
the occupancy of that line with the square itself removed.
"""

from __future__ import annotations

FULL = (1 << 64) - 1

FILE_A = 0x0101010101010101
FILE_H = FILE_A << 7
RANK_1 = 0xFF
RANK_2 = RANK_1 << 8
RANK_3 = RANK_1 << 16
RANK_6 = RANK_1 << 40
RANK_7 = RANK_1 << 48
RANK_8 = RANK_1 << 56
NOT_FILE_A = FULL ^ FILE_A
NOT_FILE_H = FULL ^ FILE_H

BIT = [1 << s for s in range(64)]


def lsb(bb: int) -> int:
    return (bb & -bb).bit_length() - 1


def popcount(bb: int) -> int:
    return bb.bit_count()


def squares(bb: int):
    while bb:
        low = bb & -bb
        yield low.bit_length() - 1
        bb ^= low


def _on_board(f: int, r: int) -> bool:
    return 0 <= f < 8 and 0 <= r < 8


def _step_table(deltas):
    table = []
    for sq in range(64):
        f, r = sq & 7, sq >> 3
        bb = 0
        for df, dr in deltas:
            if _on_board(f + df, r + dr):
                bb |= 1 << ((r + dr) * 8 + f + df)
        table.append(bb)
    return table


KNIGHT_ATTACKS = _step_table(
    [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)]
)
KING_ATTACKS = _step_table(
    [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
)
# PAWN_ATTACKS[color][sq]: squares a pawn of `color` on sq attacks.
PAWN_ATTACKS = [_step_table([(-1, 1), (1, 1)]), _step_table([(-1, -1), (1, -1)])]

_LINE_DIRS = (
    ((1, 0), (-1, 0)),  # rank
    ((0, 1), (0, -1)),  # file
    ((1, 1), (-1, -1)),  # diagonal
    ((1, -1), (-1, 1)),  # anti-diagonal
)


def _ray(sq: int, df: int, dr: int, occ: int = 0) -> int:
    f, r = sq & 7, sq >> 3
    bb = 0
    f, r = f + df, r + dr
    while _on_board(f, r):
        bit = 1 << (r * 8 + f)
        bb |= bit
        if occ & bit:
            break
        f, r = f + df, r + dr
    return bb


def _build_lines():
    masks = [[0] * 64 for _ in range(4)]
    tables = [[None] * 64 for _ in range(4)]
    for li, dirs in enumerate(_LINE_DIRS):
        for sq in range(64):
            mask = 0
            for df, dr in dirs:
                mask |= _ray(sq, df, dr)
            masks[li][sq] = mask
            table = {}
            sub = 0
            while True:
                att = 0
                for df, dr in dirs:
                    att |= _ray(sq, df, dr, sub)
                table[sub] = att
                sub = (sub - mask) & mask
                if sub == 0:
                    break
            tables[li][sq] = table
    return masks, tables


_MASKS, _TABLES = _build_lines()
RANK_MASK, FILE_MASK, DIAG_MASK, ANTI_MASK = _MASKS
RANK_TABLE, FILE_TABLE, DIAG_TABLE, ANTI_TABLE = _TABLES

ROOK_RAYS = [RANK_MASK[s] | FILE_MASK[s] for s in range(64)]
BISHOP_RAYS = [DIAG_MASK[s] | ANTI_MASK[s] for s in range(64)]


def rook_attacks(sq: int, occ: int) -> int:
    return RANK_TABLE[sq][occ & RANK_MASK[sq]] | FILE_TABLE[sq][occ & FILE_MASK[sq]]


def bishop_attacks(sq: int, occ: int) -> int:
    return DIAG_TABLE[sq][occ & DIAG_MASK[sq]] | ANTI_TABLE[sq][occ & ANTI_MASK[sq]]


def _between_and_line():
    between = [[0] * 64 for _ in range(64)]
    line = [[0] * 64 for _ in range(64)]
    for a in range(64):
        for df, dr in ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)):
            f, r = (a & 7) + df, (a >> 3) + dr
            path = 0
            full = _ray(a, df, dr) | _ray(a, -df, -dr) | (1 << a)
            while _on_board(f, r):
                b = r * 8 + f
                between[a][b] = path
                line[a][b] = full
                path |= 1 << b
                f, r = f + df, r + dr
    return between, line


# BETWEEN[a][b]: squares strictly between a and b on a shared line, else 0.
# LINE[a][b]: the whole board line through a and b (both included), else 0.
BETWEEN, LINE = _between_and_line()
