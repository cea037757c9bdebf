"""Exact horizon-bounded backward induction.

Every value is the side to move's win probability: a delivered mate is worth
1 to the mover, being mated 0, stalemate and rule draws 0.5. A node reached
with no horizon left is valued 0.5. The opponent's reply is valued as one
minus its own best value, so a move's Q is ``1 - V(child)`` and
``V = max Q``.

Values can only be 0, 0.5 or 1, so the recursion is an alpha-beta walk over
that three-point domain: it returns exactly the backward-induction value
while skipping subtrees that provably cannot change it. A result is
*resolved* when no horizon cutoff was touched anywhere in the explored tree,
which makes it independent of the horizon; 0 and 1 are always resolved.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .board.notation import san
from .board.position import Move, Position, generate_moves, in_check, is_capture, make_move
from .search.ab import is_rule_draw

DRAW = 0.5
DEFAULT_NODE_BUDGET = 10**8
_LO, _HI = -0.5, 1.5  # a window wider than any value


class OracleBudgetError(RuntimeError):
    pass


@dataclass
class ExactSolution:
    value: float
    q: dict[Move, float]
    optimal: frozenset[Move]
    horizon: int
    resolved: bool
    q_resolved: dict[Move, bool] = field(default_factory=dict)
    nodes: int = 0


class Solver:
    """Backward-induction solver with a memo shared across calls.

    Memo entries hold value bounds per (hash, horizon). A result computed
    without touching the horizon is also reused at any horizon at least as
    deep as the plies its proof used, so answers never depend on call order.
    """

    def __init__(self, node_budget: int = DEFAULT_NODE_BUDGET):
        self.node_budget = node_budget
        self.nodes = 0
        self._memo: dict[tuple[int, int], tuple[float, float, bool, int]] = {}
        self._free: dict[int, tuple[float, float, int]] = {}

    def _children(self, pos: Position, moves: list[Move]):
        out = []
        for m in moves:
            child = make_move(pos, m)
            # Checks and captures first: they settle mates soonest.
            out.append((not in_check(child), not is_capture(pos, m), m, child))
        out.sort(key=lambda t: (t[0], t[1], t[2]))
        return out

    def _search(
        self, pos: Position, h: int, alpha: float, beta: float, keys: list[int]
    ) -> tuple[float, bool, int]:
        """Fail-soft value for the side to move, a touched-horizon flag, and plies used."""
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise OracleBudgetError(f"oracle exceeded {self.node_budget} nodes")
        moves = generate_moves(pos)
        if not moves:
            return (0.0 if in_check(pos) else DRAW), False, 0
        if is_rule_draw(pos, keys):
            return DRAW, False, 0
        key = pos.key
        free = self._free.get(key)
        if free is not None:
            lo, hi, used = free
            if used <= h and (lo == hi or lo >= beta or hi <= alpha):
                return (lo if lo >= beta or lo == hi else hi), False, used
        if h <= 0:
            return DRAW, True, 0
        hit = self._memo.get((key, h))
        if hit is not None:
            lo, hi, touched, used = hit
            if lo == hi or lo >= beta or hi <= alpha:
                return (lo if lo >= beta or lo == hi else hi), touched, used
        a = alpha
        best = -1.0
        touched = False
        used = 0
        keys.append(key)
        try:
            for _, _, m, child in self._children(pos, moves):
                v, t, u = self._search(child, h - 1, 1.0 - beta, 1.0 - a, keys)
                q = 1.0 - v
                touched = touched or t
                if u + 1 > used:
                    used = u + 1
                if q > best:
                    best = q
                    if best > a:
                        a = best
                if best >= beta or best == 1.0:
                    break
        finally:
            keys.pop()
        if best == 1.0:
            lo = hi = 1.0
        elif best <= alpha:
            lo, hi = 0.0, best
        elif best >= beta:
            lo, hi = best, 1.0
        else:
            lo = hi = best
        if not touched:
            self._free[key] = (lo, hi, used)
        self._memo[(key, h)] = (lo, hi, touched, used)
        return best, touched, used

    def value(self, pos: Position, horizon: int, history: list[int] | tuple[int, ...] = ()) -> tuple[float, bool]:
        """Exact value and resolved flag of ``pos`` at ``horizon``."""
        v, touched, _ = self._search(pos, horizon, _LO, _HI, list(history))
        return v, (not touched) or v != DRAW

    def q_values(
        self, pos: Position, horizon: int, history: list[int] | tuple[int, ...] = ()
    ) -> tuple[dict[Move, float], dict[Move, bool]]:
        moves = sorted(generate_moves(pos))
        if horizon <= 0:
            return {m: DRAW for m in moves}, {m: False for m in moves}
        q: dict[Move, float] = {}
        resolved: dict[Move, bool] = {}
        keys = list(history) + [pos.key]
        for m in moves:
            v, touched, _ = self._search(make_move(pos, m), horizon - 1, _LO, _HI, keys)
            q[m] = 1.0 - v
            resolved[m] = (not touched) or v != DRAW
        return q, resolved

    def solve(self, pos: Position, horizon: int, history: list[int] | tuple[int, ...] = ()) -> ExactSolution:
        if horizon < 0:
            raise ValueError("horizon must be >= 0")
        start_nodes = self.nodes
        if not generate_moves(pos):
            value = 0.0 if in_check(pos) else DRAW
            return ExactSolution(value, {}, frozenset(), horizon, True, {}, 1)
        if is_rule_draw(pos, list(history)):
            return ExactSolution(DRAW, {}, frozenset(), horizon, True, {}, 1)
        q, q_resolved = self.q_values(pos, horizon, history)
        value = max(q.values())
        optimal = frozenset(m for m, v in q.items() if v == value)
        resolved = value == 1.0 or all(q_resolved.values())
        return ExactSolution(value, q, optimal, horizon, resolved, q_resolved, self.nodes - start_nodes)

    def wins_within(self, pos: Position, horizon: int) -> bool:
        """Null-window test: does the side to move force mate within ``horizon`` plies?"""
        v, _, _ = self._search(pos, horizon, 0.75, 1.0, [])
        return v >= 1.0

    def mate_distance(self, pos: Position, max_moves: int) -> int | None:
        """Smallest n <= max_moves such that the side to move mates in n."""
        for n in range(1, max_moves + 1):
            if self.wins_within(pos, 2 * n - 1):
                return n
        return None


def solve(pos: Position, horizon: int, node_budget: int = DEFAULT_NODE_BUDGET) -> ExactSolution:
    return Solver(node_budget).solve(pos, horizon)


def q_values(pos: Position, horizon: int, node_budget: int = DEFAULT_NODE_BUDGET) -> dict[Move, float]:
    return Solver(node_budget).q_values(pos, horizon)[0]


def q_values_csv(pos: Position, solution: ExactSolution) -> str:
    """CSV with columns ``move,q,resolved``, moves in SAN, best first."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["move", "q", "resolved"])
    moves = generate_moves(pos)
    for m in sorted(solution.q, key=lambda m: (-solution.q[m], m)):
        writer.writerow([san(pos, m, moves), f"{solution.q[m]:.3f}", str(solution.q_resolved.get(m, False)).lower()])
    return out.getvalue()
