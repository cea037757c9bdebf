"""Alpha-beta search with iterative deepening.

Node accounting: one node is one call of the main search or the quiescence
search; each such call either generates moves or evaluates a position.

Internal scores are centipawns from the side to move's view. A mate found
``n`` plies below the root scores ``MATE - n`` (``-(MATE - n)`` when mated).
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..board.position import (
    KING,
    PAWN,
    Move,
    Position,
    generate_moves,
    in_check,
    insufficient_material,
    make_move,
)
from ..evalcore.classical import static_eval
from ..evalcore.nnue import NnueNetwork, nnue_apply, nnue_evaluate, nnue_refresh
from ..evalcore.score import MAX_CP, Score

MATE = 32000
MATE_BOUND = MATE - 1000
INF = MATE + 1
MAX_PLY = 128

EXACT, LOWER, UPPER = 0, 1, 2

FUTILITY_MARGIN_PER_PLY = 150
FUTILITY_DEPTH_CAP = 8
LMR_EXEMPT_MOVES = 3
LMR_DIVISOR = 2.25
TT_ENTRY_BYTES = 32

_VICTIM = [0, 100, 320, 330, 500, 900, 20000, 0]


@dataclass
class SearchLimits:
    max_depth: Optional[int] = None
    max_nodes: Optional[int] = None
    max_time_ms: Optional[float] = None
    multipv: int = 1

    def __post_init__(self):
        if self.multipv < 1:
            raise ValueError("multipv must be >= 1")
        if self.max_depth is None and self.max_nodes is None and self.max_time_ms is None:
            raise ValueError("at least one limit must be finite")
        for name in ("max_depth", "max_nodes", "max_time_ms"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class HeuristicToggles:
    futility: bool = True
    lmr: bool = True
    tt: bool = True
    tt_size_mib: int = 64
    killers: bool = True
    history: bool = True

    @classmethod
    def pure(cls) -> "HeuristicToggles":
        """No forward pruning, reductions or transposition cutoffs."""
        return cls(futility=False, lmr=False, tt=False)


@dataclass
class PvLine:
    move: Move
    score: Score
    pv: list[Move]


@dataclass
class Iteration:
    depth: int
    lines: list[PvLine]
    nodes: int
    elapsed_ms: float


@dataclass
class SearchResult:
    lines: list[PvLine]
    nominal_depth: int
    nodes: int
    elapsed_ms: float
    iterations: list[Iteration] = field(default_factory=list)

    @property
    def best(self) -> PvLine:
        return self.lines[0]


class SearchError(ValueError):
    pass


class _Stop(Exception):
    pass


def futility_prune(static_eval: int | Score, depth: int, alpha: int | Score) -> bool:
    """True when a quiet move at this node can be skipped.

    Applies only below ``FUTILITY_DEPTH_CAP``; the margin is
    ``FUTILITY_MARGIN_PER_PLY * depth`` centipawns.
    """
    if isinstance(static_eval, Score):
        static_eval = static_eval.value
    if isinstance(alpha, Score):
        alpha = alpha.value
    if depth >= FUTILITY_DEPTH_CAP or depth < 1:
        return False
    return static_eval + FUTILITY_MARGIN_PER_PLY * depth <= alpha


def lmr_reduction(move_index: int, depth: int, is_quiet: bool) -> int:
    """Plies to cut from a late quiet move; the reduced depth stays >= 1."""
    if not is_quiet or move_index < LMR_EXEMPT_MOVES or depth < 3:
        return 0
    r = int(math.floor(0.5 + math.log(depth) * math.log(move_index) / LMR_DIVISOR))
    return max(0, min(r, depth - 2))


def score_from_internal(v: int) -> Score:
    if v >= MATE_BOUND:
        return Score.mate((MATE - v + 1) // 2)
    if v <= -MATE_BOUND:
        return Score.mate(-((MATE + v) // 2))
    return Score.cp(max(-MAX_CP, min(MAX_CP, v)))


def score_to_internal(s: Score) -> int:
    if s.is_mate:
        plies = 2 * s.value - 1 if s.value > 0 else -2 * s.value
        return MATE - plies if s.value > 0 else -(MATE - plies)
    return s.value


def is_rule_draw(pos: Position, keys: list[int]) -> bool:
    """Fifty-move rule, insufficient material, or a repeat of an earlier key.

    ``keys`` lists the hashes of the positions before ``pos`` on the game and
    search path, oldest first. Any single earlier occurrence counts as a draw.
    """
    if pos.halfmove >= 100 or insufficient_material(pos):
        return True
    n = min(pos.halfmove, len(keys))
    k = pos.key
    for i in range(len(keys) - 2, len(keys) - n - 1, -2):
        if keys[i] == k:
            return True
    return False


class TranspositionTable:
    """Open addressing over two adjacent slots, replace-by-depth."""

    def __init__(self, size_mib: int = 64):
        slots = max(2, (size_mib * 1024 * 1024) // TT_ENTRY_BYTES)
        self.size = 1 << (slots.bit_length() - 1)
        self.mask = self.size - 1
        self.slots: list = [None] * self.size

    def clear(self):
        self.slots = [None] * self.size

    def probe(self, key: int):
        i = key & self.mask
        e = self.slots[i]
        if e is not None and e[0] == key:
            return e
        e = self.slots[i ^ 1]
        if e is not None and e[0] == key:
            return e
        return None

    def store(self, key: int, depth: int, value: int, bound: int, move: Optional[Move]):
        i = key & self.mask
        slots = self.slots
        e = slots[i]
        if e is None or e[0] == key or depth >= e[1]:
            if e is not None and e[0] == key and move is None:
                move = e[4]
            slots[i] = (key, depth, value, bound, move)
            return
        j = i ^ 1
        e = slots[j]
        if e is not None and e[0] == key and move is None:
            move = e[4]
        slots[j] = (key, depth, value, bound, move)


def _to_tt(v: int, ply: int) -> int:
    if v >= MATE_BOUND:
        return v + ply
    if v <= -MATE_BOUND:
        return v - ply
    return v


def _from_tt(v: int, ply: int) -> int:
    if v >= MATE_BOUND:
        return v - ply
    if v <= -MATE_BOUND:
        return v + ply
    return v


class AlphaBetaSearcher:
    """Iterative-deepening alpha-beta engine.

    ``evaluator`` maps a position to centipawns for the side to move; it
    defaults to the classical evaluator. Passing ``net`` switches leaves to
    NNUE with accumulators updated incrementally along the search path.
    """

    def __init__(
        self,
        toggles: Optional[HeuristicToggles] = None,
        evaluator: Optional[Callable[[Position], int]] = None,
        net: Optional[NnueNetwork] = None,
    ):
        self.toggles = toggles or HeuristicToggles()
        self.evaluator = evaluator or static_eval
        self.net = net
        self.tt = TranspositionTable(self.toggles.tt_size_mib) if self.toggles.tt else None
        self.stop_event = threading.Event()
        self.nodes = 0

    def new_game(self):
        if self.tt is not None:
            self.tt.clear()

    def stop(self):
        self.stop_event.set()

    # -- public entry ------------------------------------------------------

    def search(
        self,
        pos: Position,
        limits: SearchLimits,
        history: tuple[int, ...] | list[int] = (),
        on_iteration: Optional[Callable[[Iteration], None]] = None,
    ) -> SearchResult:
        root_moves = generate_moves(pos)
        if not root_moves:
            raise SearchError("cannot search a terminal position")
        self.stop_event.clear()
        self.nodes = 0
        self._limits = limits
        self._start = time.perf_counter()
        self._deadline = None if limits.max_time_ms is None else self._start + limits.max_time_ms / 1000.0
        self._keys = list(history)
        self._killers = [[None, None] for _ in range(MAX_PLY + 2)]
        self._history = {}
        self._pv: list[list[Move]] = [[] for _ in range(MAX_PLY + 2)]
        self._may_stop = False

        multipv = min(limits.multipv, len(root_moves))
        max_depth = limits.max_depth or MAX_PLY - 1
        iterations: list[Iteration] = []
        order = sorted(root_moves)
        root_acc = nnue_refresh(pos, self.net) if self.net is not None else None
        for depth in range(1, max_depth + 1):
            lines: list[PvLine] = []
            excluded: list[Move] = []
            try:
                for _ in range(multipv):
                    v, pv = self._root(pos, depth, order, excluded, root_acc)
                    lines.append(PvLine(pv[0], score_from_internal(v), pv))
                    excluded.append(pv[0])
            except _Stop:
                break
            finally:
                self._may_stop = True
            lines.sort(key=lambda ln: ln.score.sort_key(), reverse=True)
            elapsed = (time.perf_counter() - self._start) * 1000.0
            it = Iteration(depth, lines, self.nodes, elapsed)
            iterations.append(it)
            if on_iteration is not None:
                on_iteration(it)
            best_first = [ln.move for ln in lines]
            order = best_first + [m for m in order if m not in best_first]
            top = lines[0].score
            if top.is_mate and top.value > 0 and multipv == 1 and depth >= 2 * top.value + 1:
                break
            if self._out_of_budget():
                break
        last = iterations[-1]
        return SearchResult(
            lines=last.lines,
            nominal_depth=last.depth,
            nodes=self.nodes,
            elapsed_ms=(time.perf_counter() - self._start) * 1000.0,
            iterations=iterations,
        )

    def _out_of_budget(self) -> bool:
        if self.stop_event.is_set():
            return True
        lim = self._limits
        if lim.max_nodes is not None and self.nodes >= lim.max_nodes:
            return True
        return self._deadline is not None and time.perf_counter() >= self._deadline

    def _tick(self):
        self.nodes += 1
        if self._may_stop:
            # The stop flag is cheap to test, so it is honoured at every node.
            if self.stop_event.is_set():
                raise _Stop
            if (self.nodes & 255 == 0 or self._limits.max_nodes is not None) and self._out_of_budget():
                raise _Stop

    # -- root --------------------------------------------------------------

    def _root(self, pos, depth, order, excluded, acc):
        alpha, beta = -INF, INF
        best_v = -INF
        best_pv: list[Move] = []
        self._keys.append(pos.key)
        try:
            for m in order:
                if m in excluded:
                    continue
                child = make_move(pos, m)
                child_acc = nnue_apply(acc, pos, m, self.net) if acc is not None else None
                if depth - 1 <= 0:
                    v = 0 if is_rule_draw(child, self._keys) else -self._qsearch(child, -beta, -alpha, 1, child_acc)
                    self._pv[1] = []
                else:
                    v = -self._negamax(child, depth - 1, -beta, -alpha, 1, child_acc)
                if v > best_v:
                    best_v = v
                    best_pv = [m] + self._pv[1]
                    if v > alpha:
                        alpha = v
        finally:
            self._keys.pop()
        if self.tt is not None and best_pv:
            self.tt.store(pos.key, depth, _to_tt(best_v, 0), EXACT, best_pv[0])
        return best_v, best_pv

    # -- interior ----------------------------------------------------------

    def _evaluate(self, pos, acc) -> int:
        if acc is not None:
            return nnue_evaluate(acc, self.net, pos.stm).value
        return self.evaluator(pos)

    def _negamax(self, pos: Position, depth: int, alpha: int, beta: int, ply: int, acc) -> int:
        self._tick()
        pv = self._pv
        pv[ply] = []
        keys = self._keys
        if is_rule_draw(pos, keys):
            return 0
        moves = generate_moves(pos)
        checked = in_check(pos)
        if not moves:
            return -(MATE - ply) if checked else 0
        if ply >= MAX_PLY:
            return self._evaluate(pos, acc)

        tog = self.toggles
        tt = self.tt
        tt_move = None
        if tt is not None:
            entry = tt.probe(pos.key)
            if entry is not None:
                tt_move = entry[4]
                if entry[1] >= depth:
                    v = _from_tt(entry[2], ply)
                    bound = entry[3]
                    if bound == EXACT or (bound == LOWER and v >= beta) or (bound == UPPER and v <= alpha):
                        if tt_move is not None and tt_move in moves:
                            pv[ply] = self._tt_line(pos, tt_move, ply)
                        return v

        # Futility needs a static eval; skip it when mate scores are in play.
        static = None
        if (
            tog.futility
            and depth < FUTILITY_DEPTH_CAP
            and not checked
            and -MATE_BOUND < alpha < MATE_BOUND
            and -MATE_BOUND < beta < MATE_BOUND
        ):
            static = self._evaluate(pos, acc)

        moves = self._order(pos, moves, tt_move, ply)
        board = pos.board
        ep = pos.ep
        killers = self._killers[ply]
        alpha0 = alpha
        best_v = -INF
        best_move = None
        keys.append(pos.key)
        try:
            for i, m in enumerate(moves):
                fr, to, promo = m
                capture = bool(board[to]) or (to == ep and board[fr] & 7 == PAWN)
                quiet = not capture and not promo
                child = make_move(pos, m)
                gives_check = in_check(child)
                if (
                    static is not None
                    and quiet
                    and not gives_check
                    and i > 0
                    and futility_prune(static, depth, alpha)
                ):
                    continue
                child_acc = nnue_apply(acc, pos, m, self.net) if acc is not None else None
                new_depth = depth - 1
                r = 0
                if tog.lmr and quiet and not checked and not gives_check and m not in killers:
                    r = lmr_reduction(i, depth, True)
                if r:
                    v = -self._negamax(child, new_depth - r, -beta, -alpha, ply + 1, child_acc)
                    if v > alpha:
                        v = self._child(child, new_depth, alpha, beta, ply, child_acc)
                else:
                    v = self._child(child, new_depth, alpha, beta, ply, child_acc)
                if v > best_v:
                    best_v = v
                    best_move = m
                    if v > alpha:
                        alpha = v
                        pv[ply] = [m] + pv[ply + 1]
                        if v >= beta:
                            if quiet:
                                self._record_cutoff(m, depth, ply)
                            break
        finally:
            keys.pop()

        if best_v == -INF:
            # Every move was pruned; fall back to the static bound.
            best_v = static if static is not None else alpha
        if tt is not None:
            bound = LOWER if best_v >= beta else (EXACT if best_v > alpha0 else UPPER)
            tt.store(pos.key, depth, _to_tt(best_v, ply), bound, best_move)
        return best_v

    def _child(self, child, depth, alpha, beta, ply, acc) -> int:
        if depth <= 0:
            self._pv[ply + 1] = []
            if is_rule_draw(child, self._keys):
                return 0
            return -self._qsearch(child, -beta, -alpha, ply + 1, acc)
        return -self._negamax(child, depth, -beta, -alpha, ply + 1, acc)

    def _record_cutoff(self, m: Move, depth: int, ply: int):
        tog = self.toggles
        if tog.killers:
            k = self._killers[ply]
            if k[0] != m:
                k[1] = k[0]
                k[0] = m
        if tog.history:
            key = (m[0], m[1])
            self._history[key] = self._history.get(key, 0) + depth * depth

    def _order(self, pos: Position, moves: list[Move], tt_move, ply: int) -> list[Move]:
        board = pos.board
        killers = self._killers[ply]
        hist = self._history
        scored = []
        for m in moves:
            fr, to, promo = m
            if m == tt_move:
                s = 10_000_000
            else:
                victim = board[to] & 7
                if victim or (to == pos.ep and board[fr] & 7 == PAWN):
                    s = 1_000_000 + 10 * _VICTIM[victim or PAWN] - _VICTIM[board[fr] & 7] // 10
                elif promo:
                    s = 900_000 + promo
                elif m == killers[0]:
                    s = 800_000
                elif m == killers[1]:
                    s = 799_000
                else:
                    s = hist.get((fr, to), 0)
                    if s > 700_000:
                        s = 700_000
            scored.append((s, m))
        scored.sort(key=lambda t: t[0], reverse=True)
        return [m for _, m in scored]

    def _tt_line(self, pos: Position, first: Move, ply: int) -> list[Move]:
        line = [first]
        seen = {pos.key}
        p = make_move(pos, first)
        while len(line) + ply < MAX_PLY and self.tt is not None:
            e = self.tt.probe(p.key)
            if e is None or e[4] is None or p.key in seen:
                break
            if e[4] not in generate_moves(p):
                break
            seen.add(p.key)
            line.append(e[4])
            p = make_move(p, e[4])
        return line

    # -- quiescence --------------------------------------------------------

    def _qsearch(self, pos: Position, alpha: int, beta: int, ply: int, acc) -> int:
        self._tick()
        if insufficient_material(pos):
            return 0
        moves = generate_moves(pos)
        checked = in_check(pos)
        if not moves:
            return -(MATE - ply) if checked else 0
        if checked:
            best = -INF
            candidates = self._order(pos, moves, None, min(ply, MAX_PLY))
        else:
            stand = self._evaluate(pos, acc)
            if stand >= beta or ply >= MAX_PLY:
                return stand
            best = stand
            if stand > alpha:
                alpha = stand
            board = pos.board
            ep = pos.ep
            candidates = [
                m
                for m in moves
                if board[m[1]] or m[2] or (m[1] == ep and board[m[0]] & 7 == PAWN)
            ]
            candidates.sort(key=lambda m: (_VICTIM[board[m[1]] & 7 or PAWN] * 10 + m[2] * 1000 - _VICTIM[board[m[0]] & 7] // 10), reverse=True)
        for m in candidates:
            child = make_move(pos, m)
            child_acc = nnue_apply(acc, pos, m, self.net) if acc is not None else None
            v = -self._qsearch(child, -beta, -alpha, ply + 1, child_acc)
            if v > best:
                best = v
                if v > alpha:
                    alpha = v
                    if v >= beta:
                        break
        return best


def search(
    pos: Position,
    limits: SearchLimits,
    opts: Optional[HeuristicToggles] = None,
    history: tuple[int, ...] | list[int] = (),
    **kwargs,
) -> SearchResult:
    return AlphaBetaSearcher(opts, **kwargs).search(pos, limits, history=history)


def quiescence(pos: Position, alpha: int = -INF, beta: int = INF, evaluator=None) -> int:
    """Stand-pat capture search from ``pos``; centipawns for the side to move."""
    s = AlphaBetaSearcher(HeuristicToggles.pure(), evaluator=evaluator)
    s._limits = SearchLimits(max_depth=1)
    s._may_stop = False
    s._killers = [[None, None] for _ in range(MAX_PLY + 2)]
    s._history = {}
    return s._qsearch(pos, alpha, beta, 0, None)
