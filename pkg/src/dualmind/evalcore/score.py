"""Scores and their mapping to win probabilities."""

from __future__ import annotations

import math
from dataclasses import dataclass

CENTIPAWNS = "cp"
MATE = "mate"

MAX_CP = 32000

# Inverse-tangent scale used by LCZero to print Q as centipawns.
LC0_CP_SCALE = 90.0
LC0_Q_SCALE = 1.5637541897


@dataclass(frozen=True, order=False)
class Score:
    """Centipawns or a full-move mate distance, from the side to move's view.

    For mate scores ``value > 0`` means the side to move mates in ``value``
    moves; ``value < 0`` means it is mated in ``-value`` moves.
    """

    kind: str
    value: int

    def __post_init__(self):
        if self.kind == MATE:
            if self.value == 0:
                raise ValueError("mate distance cannot be 0")
        elif self.kind == CENTIPAWNS:
            if abs(self.value) > MAX_CP:
                raise ValueError(f"centipawn magnitude {self.value} exceeds {MAX_CP}")
        else:
            raise ValueError(f"unknown score kind {self.kind!r}")

    @classmethod
    def cp(cls, value: int) -> "Score":
        return cls(CENTIPAWNS, int(value))

    @classmethod
    def mate(cls, moves: int) -> "Score":
        return cls(MATE, int(moves))

    @property
    def is_mate(self) -> bool:
        return self.kind == MATE

    def pawns(self) -> float:
        """Centipawns / 100; mate scores map to +/- infinity."""
        if self.is_mate:
            return math.inf if self.value > 0 else -math.inf
        return self.value / 100.0

    def sort_key(self) -> float:
        # Quicker mates rank higher; slower losses rank higher than quick ones.
        if self.is_mate:
            return 1e9 - self.value if self.value > 0 else -1e9 - self.value
        return float(self.value)

    def __neg__(self) -> "Score":
        return Score(self.kind, -self.value)

    def __lt__(self, other: "Score") -> bool:
        return self.sort_key() < other.sort_key()

    def __le__(self, other: "Score") -> bool:
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other: "Score") -> bool:
        return self.sort_key() > other.sort_key()

    def __ge__(self, other: "Score") -> bool:
        return self.sort_key() >= other.sort_key()

    def display(self) -> str:
        """Pawn units with two decimals, or ``#n`` for mates."""
        if self.is_mate:
            return f"#{self.value}"
        return f"{self.value / 100:+.2f}"

    def __str__(self) -> str:
        return f"mate {self.value}" if self.is_mate else f"cp {self.value}"


def cp_to_winprob(score: Score | int | float) -> float:
    """Win probability 1 / (1 + 10^(-cp/400)); mates map to 1 or 0."""
    if isinstance(score, Score):
        if score.is_mate:
            return 1.0 if score.value > 0 else 0.0
        cp = score.value
    else:
        cp = score
    return 1.0 / (1.0 + 10.0 ** (-cp / 400.0))


def winprob_to_cp(p: float) -> float:
    """Inverse of :func:`cp_to_winprob`; infinite at the endpoints."""
    if p <= 0.0:
        return -math.inf
    if p >= 1.0:
        return math.inf
    return -400.0 * math.log10(1.0 / p - 1.0)


def lc0_cp_to_winprob(cp: float) -> float:
    """LCZero's display mapping: cp = 90 tan(1.5637541897 q), winprob = (1+q)/2."""
    q = math.atan(cp / LC0_CP_SCALE) / LC0_Q_SCALE
    return (1.0 + q) / 2.0


def lc0_winprob_to_cp(p: float) -> float:
    q = 2.0 * p - 1.0
    if abs(q) >= 1.0:
        return math.copysign(math.inf, q)
    return LC0_CP_SCALE * math.tan(LC0_Q_SCALE * q)


def value_to_winprob(v: float) -> float:
    """Map a search value in [-1, 1] to a win probability."""
    return (v + 1.0) / 2.0
