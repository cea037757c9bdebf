"""8x8x73 policy-plane move codec.

Planes are read from the side to move's point of view (Black's moves are
mirrored vertically first), and the square is the oriented from-square:

* 0-55: queen-like moves, ``direction * 7 + (distance - 1)`` with directions
  N, NE, E, SE, S, SW, W, NW. Queen promotions use these planes.
* 56-63: knight moves in the order of ``KNIGHT_DELTAS``.
* 64-72: underpromotions, ``64 + 3 * piece + direction`` with pieces
  (knight, bishop, rook) and directions (capture west, straight, capture east).

The flat index is ``plane * 64 + square`` and is always below 4672.
"""

from __future__ import annotations

from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from ..board.position import BISHOP, BLACK, KNIGHT, PAWN, QUEEN, ROOK, Move, Position

NUM_PLANES = 73
POLICY_SIZE = NUM_PLANES * 64

QUEEN_DIRECTIONS = [(0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1)]  # (df, dr)
KNIGHT_DELTAS = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)]
UNDERPROMOTIONS = [KNIGHT, BISHOP, ROOK]


class PolicyPlaneIndex(NamedTuple):
    plane: int
    square: int

    @property
    def index(self) -> int:
        return self.plane * 64 + self.square


def _orient(sq: int, stm: int) -> int:
    return sq ^ 56 if stm == BLACK else sq


def encode_move(pos: Position, m: Move) -> PolicyPlaneIndex:
    fr, to = _orient(m.from_sq, pos.stm), _orient(m.to_sq, pos.stm)
    df, dr = (to & 7) - (fr & 7), (to >> 3) - (fr >> 3)
    if m.promotion and m.promotion != QUEEN:
        if dr != 1 or abs(df) > 1:
            raise ValueError(f"{m.uci()} is not a pawn promotion step")
        return PolicyPlaneIndex(64 + 3 * UNDERPROMOTIONS.index(m.promotion) + df + 1, fr)
    if (df, dr) in KNIGHT_DELTAS:
        return PolicyPlaneIndex(56 + KNIGHT_DELTAS.index((df, dr)), fr)
    dist = max(abs(df), abs(dr))
    if dist == 0 or (df and dr and abs(df) != abs(dr)):
        raise ValueError(f"{m.uci()} is not representable")
    direction = QUEEN_DIRECTIONS.index((df // dist, dr // dist))
    return PolicyPlaneIndex(direction * 7 + dist - 1, fr)


def move_index(pos: Position, m: Move) -> int:
    return encode_move(pos, m).index


def decode_move(pos: Position, index: int | PolicyPlaneIndex) -> Move:
    """Inverse of :func:`encode_move` for moves legal in ``pos``."""
    if isinstance(index, PolicyPlaneIndex):
        plane, fr = index
    else:
        if not 0 <= index < POLICY_SIZE:
            raise ValueError(f"index {index} out of range")
        plane, fr = divmod(index, 64)
    promotion = 0
    if plane < 56:
        (df, dr), dist = QUEEN_DIRECTIONS[plane // 7], plane % 7 + 1
        df, dr = df * dist, dr * dist
    elif plane < 64:
        df, dr = KNIGHT_DELTAS[plane - 56]
    else:
        piece, d = divmod(plane - 64, 3)
        df, dr, promotion = d - 1, 1, UNDERPROMOTIONS[piece]
    f, r = (fr & 7) + df, (fr >> 3) + dr
    if not (0 <= f < 8 and 0 <= r < 8):
        raise ValueError(f"plane {plane} leaves the board from square {fr}")
    to = r * 8 + f
    real_fr, real_to = _orient(fr, pos.stm), _orient(to, pos.stm)
    if not promotion and r == 7 and (pos.board[real_fr] & 7) == PAWN:
        promotion = QUEEN
    return Move(real_fr, real_to, promotion)


def mask_and_normalize(
    raw: Sequence[float] | np.ndarray | Mapping[int, float],
    legal: Iterable[Move],
    pos: Position,
) -> dict[Move, float]:
    """Softmax of ``raw`` over the indices of the legal moves only."""
    legal = list(legal)
    if not legal:
        raise ValueError("no legal moves")
    idx = [move_index(pos, m) for m in legal]
    if isinstance(raw, Mapping):
        logits = np.array([raw.get(i, 0.0) for i in idx], dtype=np.float64)
    else:
        logits = np.asarray(raw, dtype=np.float64)[idx]
    logits -= logits.max()
    w = np.exp(logits)
    w /= w.sum()
    return dict(zip(legal, w.tolist()))
