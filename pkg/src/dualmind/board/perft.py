"""Leaf counting over the legal move tree."""

from __future__ import annotations

from .position import Position, generate_moves, make_move


def perft(pos: Position, depth: int) -> int:
    """Number of leaf nodes exactly ``depth`` plies below ``pos``."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth == 0:
        return 1
    moves = generate_moves(pos)
    if depth == 1:
        return len(moves)
    return sum(perft(make_move(pos, m), depth - 1) for m in moves)


def divide(pos: Position, depth: int) -> dict[str, int]:
    """Per-root-move perft counts keyed by UCI text."""
    return {m.uci(): perft(make_move(pos, m), depth - 1) for m in sorted(generate_moves(pos))}
