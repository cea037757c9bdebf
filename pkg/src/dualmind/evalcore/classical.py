"""Hand-crafted evaluation: material plus tapered piece-square tables."""

from __future__ import annotations

from importlib import resources

from ..board.position import (
    BISHOP,
    BLACK,
    KING,
    KNIGHT,
    PAWN,
    QUEEN,
    ROOK,
    WHITE,
    Position,
    generate_moves,
    piece_code,
)
from .score import Score

PIECE_VALUES = {PAWN: 100, KNIGHT: 320, BISHOP: 330, ROOK: 500, QUEEN: 900, KING: 0}
PHASE_WEIGHTS = {PAWN: 0, KNIGHT: 1, BISHOP: 1, ROOK: 2, QUEEN: 4, KING: 0}
MAX_PHASE = 24
BISHOP_PAIR = 30

_KIND_NAMES = {"pawn": PAWN, "knight": KNIGHT, "bishop": BISHOP, "rook": ROOK, "queen": QUEEN, "king": KING}


class TerminalPositionError(ValueError):
    pass


def load_tables(text: str | None = None) -> dict[tuple[int, str], list[int]]:
    """Parse the PST data file into {(kind, "mg"|"eg"): 64 values indexed by square}."""
    if text is None:
        text = resources.files("dualmind.evalcore").joinpath("data/pst.txt").read_text()
    tables: dict[tuple[int, str], list[int]] = {}
    current = None
    rows: list[list[int]] = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            name, phase = line.strip("[]").split()
            current = (_KIND_NAMES[name], phase)
            rows = []
            continue
        rows.append([int(v) for v in line.split()])
        if len(rows) == 8:
            values = [0] * 64
            for i, row in enumerate(rows):
                if len(row) != 8:
                    raise ValueError(f"PST {current} row {i} has {len(row)} entries")
                for f, v in enumerate(row):
                    values[(7 - i) * 8 + f] = v
            tables[current] = values
    missing = {(k, ph) for k in _KIND_NAMES.values() for ph in ("mg", "eg")} - set(tables)
    if missing:
        raise ValueError(f"missing piece-square tables: {sorted(missing)}")
    return tables


def _signed_tables(tables):
    # MG[code][sq] / EG[code][sq]: signed (white-positive) material + PST.
    mg = [[0] * 64 for _ in range(16)]
    eg = [[0] * 64 for _ in range(16)]
    for kind in PIECE_VALUES:
        for sq in range(64):
            mg[piece_code(WHITE, kind)][sq] = PIECE_VALUES[kind] + tables[(kind, "mg")][sq]
            eg[piece_code(WHITE, kind)][sq] = PIECE_VALUES[kind] + tables[(kind, "eg")][sq]
            mg[piece_code(BLACK, kind)][sq] = -(PIECE_VALUES[kind] + tables[(kind, "mg")][sq ^ 56])
            eg[piece_code(BLACK, kind)][sq] = -(PIECE_VALUES[kind] + tables[(kind, "eg")][sq ^ 56])
    return mg, eg


_MG, _EG = _signed_tables(load_tables())
_PHASE = [PHASE_WEIGHTS.get(code & 7, 0) if 1 <= code & 7 <= 6 else 0 for code in range(16)]


def evaluate_white(pos: Position) -> int:
    """Static evaluation in centipawns from White's point of view."""
    mg = eg = phase = 0
    board = pos.board
    for sq in range(64):
        code = board[sq]
        if code:
            mg += _MG[code][sq]
            eg += _EG[code][sq]
            phase += _PHASE[code]
    bb = pos.bb
    if bb[BISHOP] & (bb[BISHOP] - 1):
        mg += BISHOP_PAIR
        eg += BISHOP_PAIR
    if bb[8 | BISHOP] & (bb[8 | BISHOP] - 1):
        mg -= BISHOP_PAIR
        eg -= BISHOP_PAIR
    if phase > MAX_PHASE:
        phase = MAX_PHASE
    total = mg * phase + eg * (MAX_PHASE - phase)
    # Truncate toward zero so mirrored positions give exactly negated values.
    return total // MAX_PHASE if total >= 0 else -((-total) // MAX_PHASE)


def static_eval(pos: Position) -> int:
    """Centipawns from the side to move's view; no terminal check."""
    v = evaluate_white(pos)
    return v if pos.stm == WHITE else -v


def evaluate_classical(pos: Position) -> Score:
    if not generate_moves(pos):
        raise TerminalPositionError("position is checkmate or stalemate; use game_result")
    return Score.cp(static_eval(pos))
