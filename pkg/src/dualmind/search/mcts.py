"""PUCT Monte-Carlo tree search.

Values live in [-1, 1] from the side to move's point of view. Each edge keeps
visit count ``N``, total value ``W`` and prior ``P``; a simulation descends by
``argmax Q + U`` with

    U(s, a) = C(s) * P(s, a) * sqrt(sum_b N(s, b)) / (1 + N(s, a))
    C(s)    = log((1 + N(s) + c_base) / c_base) + c_init

expands and evaluates one leaf, then backs its value up, negating per ply.
Unvisited edges use first-play urgency ``Q = Q(s) - fpu``. Children are kept
in policy-index order and ties go to the lowest index.
"""

from __future__ import annotations

import csv
import io
import math
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol

from ..board.notation import san
from ..board.position import Move, Position, generate_moves, in_check, make_move
from ..evalcore.classical import static_eval
from ..evalcore.score import cp_to_winprob, winprob_to_cp
from ..oracle import Solver
from .ab import is_rule_draw
from .policy import move_index


@dataclass(frozen=True)
class PuctParams:
    c_base: float = 19652.0
    c_init: float = 1.25
    fpu: float = 0.2

    def __post_init__(self):
        if self.c_base <= 0:
            raise ValueError("c_base must be positive")
        if self.c_init < 0:
            raise ValueError("c_init must be non-negative")


@dataclass
class Evaluation:
    """Leaf value in [-1, 1] for the side to move and a policy over legal moves.

    ``exact`` marks a proven value; such leaves are never expanded.
    """

    value: float
    policy: dict[Move, float]
    exact: bool = False


class Evaluator(Protocol):
    def __call__(self, pos: Position, ply: int) -> Evaluation:
        """Evaluate ``pos``, reached ``ply`` half-moves below the search root."""
        ...


class MctsNode:
    __slots__ = ("pos", "keys", "moves", "P", "N", "W", "children", "visits", "value_sum", "terminal", "expanded")

    def __init__(self, pos: Position, keys: tuple[int, ...]):
        self.pos = pos
        self.keys = keys  # positions before this one on the game path
        self.moves: list[Move] = []
        self.P: list[float] = []
        self.N: list[int] = []
        self.W: list[float] = []
        self.children: list[Optional[MctsNode]] = []
        self.visits = 0
        self.value_sum = 0.0
        self.terminal: Optional[float] = None
        self.expanded = False

    def q(self, i: int) -> float:
        return self.W[i] / self.N[i]

    @property
    def mean_value(self) -> float:
        return self.value_sum / self.visits if self.visits else 0.0


def exploration_rate(parent_visits: int, params: PuctParams) -> float:
    return math.log((1 + parent_visits + params.c_base) / params.c_base) + params.c_init


def puct_scores(node: MctsNode, params: PuctParams) -> list[tuple[float, float]]:
    """(Q, U) per child, with first-play urgency for unvisited children."""
    if not node.expanded or not node.moves:
        raise ValueError("puct selection needs an expanded node with children")
    total = sum(node.N)
    c = exploration_rate(node.visits, params)
    sqrt_total = math.sqrt(total)
    fpu_q = node.mean_value - params.fpu
    out = []
    for p, n, w in zip(node.P, node.N, node.W):
        q = w / n if n else fpu_q
        out.append((q, c * p * sqrt_total / (1 + n)))
    return out


def puct_select(node: MctsNode, params: PuctParams) -> int:
    best, best_i = -math.inf, 0
    for i, (q, u) in enumerate(puct_scores(node, params)):
        if q + u > best:
            best, best_i = q + u, i
    return best_i


# -- evaluators --------------------------------------------------------------


def uniform_policy(moves: list[Move]) -> dict[Move, float]:
    return {m: 1.0 / len(moves) for m in moves}


class HeuristicEvaluator:
    """Classical eval squashed to [-1, 1]; policy is a softmax over 1-ply evals in pawns."""

    def __init__(self, temperature: float = 1.0):
        if temperature <= 0:
            raise ValueError("temperature must be positive")
        self.temperature = temperature

    def __call__(self, pos: Position, ply: int = 0) -> Evaluation:
        value = 2.0 * cp_to_winprob(static_eval(pos)) - 1.0
        moves = generate_moves(pos)
        logits = [-static_eval(make_move(pos, m)) / 100.0 / self.temperature for m in moves]
        top = max(logits)
        w = [math.exp(x - top) for x in logits]
        s = sum(w)
        return Evaluation(value, {m: x / s for m, x in zip(moves, w)})


class OracleEvaluator:
    """Exact values of the game truncated ``horizon`` plies below the root.

    A leaf at ply k gets the backward-induction value with ``horizon - k``
    plies left, which is exact for that bounded game, so leaves are never
    expanded. The policy is uniform; the solver memo is shared across calls.
    """

    def __init__(self, horizon: int = 5, solver: Optional[Solver] = None):
        self.horizon = horizon
        self.solver = solver or Solver()

    def __call__(self, pos: Position, ply: int = 0) -> Evaluation:
        v, _ = self.solver.value(pos, max(self.horizon - ply, 0))
        return Evaluation(2.0 * v - 1.0, uniform_policy(generate_moves(pos)), exact=True)


# -- search ------------------------------------------------------------------


@dataclass
class MctsResult:
    best_move: Move
    visits: dict[Move, int]
    q: dict[Move, float]
    prior: dict[Move, float]
    pv: list[Move]
    simulations: int
    elapsed_ms: float
    root_value: float

    @property
    def fractions(self) -> dict[Move, float]:
        total = sum(self.visits.values())
        return {m: (n / total if total else 0.0) for m, n in self.visits.items()}

    def winprob(self, m: Move) -> float:
        return (self.q[m] + 1.0) / 2.0

    def pawns(self, m: Move) -> float:
        """Q shown as pawns via the inverse of the centipawn logistic."""
        return winprob_to_cp(self.winprob(m)) / 100.0


@dataclass
class MctsSearcher:
    params: PuctParams = field(default_factory=PuctParams)
    evaluator: Evaluator = field(default_factory=HeuristicEvaluator)
    seed: int = 0

    def __post_init__(self):
        # Selection ties go to the lowest index, so runs are reproducible
        # from (seed, budget) without consuming randomness.
        self.stop_event = threading.Event()

    def stop(self):
        self.stop_event.set()

    def _terminal_value(self, pos: Position, keys: tuple[int, ...]) -> Optional[float]:
        if not generate_moves(pos):
            return -1.0 if in_check(pos) else 0.0
        if is_rule_draw(pos, list(keys)):
            return 0.0
        return None

    def _expand(self, node: MctsNode, ply: int, allow_exact: bool = True) -> float:
        """Expand ``node`` and return its value for the side to move."""
        ev = self.evaluator(node.pos, ply)
        if ev.exact and allow_exact:
            node.terminal = ev.value
            return ev.value
        moves = sorted(generate_moves(node.pos), key=lambda m: move_index(node.pos, m))
        total = sum(ev.policy.get(m, 0.0) for m in moves)
        node.moves = moves
        node.P = [ev.policy.get(m, 0.0) / total if total > 0 else 1.0 / len(moves) for m in moves]
        node.N = [0] * len(moves)
        node.W = [0.0] * len(moves)
        node.children = [None] * len(moves)
        node.expanded = True
        return ev.value

    def _simulate(self, root: MctsNode):
        path: list[tuple[MctsNode, int]] = []
        node = root
        while node.expanded and node.terminal is None:
            i = puct_select(node, self.params)
            path.append((node, i))
            child = node.children[i]
            if child is None:
                keys = node.keys + (node.pos.key,)
                child = MctsNode(make_move(node.pos, node.moves[i]), keys)
                child.terminal = self._terminal_value(child.pos, keys)
                node.children[i] = child
            node = child
        value = node.terminal if node.terminal is not None else self._expand(node, len(path))
        node.visits += 1
        node.value_sum += value
        for parent, i in reversed(path):
            value = -value
            parent.N[i] += 1
            parent.W[i] += value
            parent.visits += 1
            parent.value_sum += value

    def search(
        self,
        pos: Position,
        simulations: int,
        history: tuple[int, ...] | list[int] = (),
        max_time_ms: Optional[float] = None,
        on_progress: Optional[Callable[["MctsResult"], None]] = None,
        progress_every: int = 1000,
    ) -> MctsResult:
        if simulations < 1:
            raise ValueError("simulations must be >= 1")
        keys = tuple(history)
        if self._terminal_value(pos, keys) is not None:
            raise ValueError("cannot search a terminal position")
        self.stop_event.clear()
        start = time.perf_counter()
        deadline = None if max_time_ms is None else start + max_time_ms / 1000.0
        root = MctsNode(pos, keys)
        # The first simulation is the root expansion.
        root.value_sum = self._expand(root, 0, allow_exact=False)
        root.visits = 1
        done = 1
        while done < simulations:
            if self.stop_event.is_set() or (deadline is not None and time.perf_counter() >= deadline):
                break
            self._simulate(root)
            done += 1
            if on_progress is not None and done % progress_every == 0:
                on_progress(self._result(root, done, start))
        self.root = root
        return self._result(root, done, start)

    def _result(self, root: MctsNode, sims: int, start: float) -> MctsResult:
        visits = dict(zip(root.moves, root.N))
        q = {m: (root.q(i) if root.N[i] else math.nan) for i, m in enumerate(root.moves)}
        prior = dict(zip(root.moves, root.P))
        best_i = max(
            range(len(root.moves)),
            key=lambda i: (root.N[i], root.q(i) if root.N[i] else -math.inf, root.P[i], -i),
        )
        return MctsResult(
            best_move=root.moves[best_i],
            visits=visits,
            q=q,
            prior=prior,
            pv=principal_variation(root, best_i),
            simulations=sims,
            elapsed_ms=(time.perf_counter() - start) * 1000.0,
            root_value=root.mean_value,
        )


def principal_variation(root: MctsNode, first: int) -> list[Move]:
    pv = [root.moves[first]]
    node = root.children[first]
    while node is not None and node.expanded and any(node.N):
        i = max(range(len(node.moves)), key=lambda j: (node.N[j], -j))
        pv.append(node.moves[i])
        node = node.children[i]
    return pv


def run_search(
    pos: Position,
    simulations: int,
    evaluator: Optional[Evaluator] = None,
    params: Optional[PuctParams] = None,
    seed: int = 0,
    history: tuple[int, ...] | list[int] = (),
) -> MctsResult:
    searcher = MctsSearcher(params or PuctParams(), evaluator or HeuristicEvaluator(), seed)
    return searcher.search(pos, simulations, history=history)


def visit_csv(pos: Position, result: MctsResult) -> str:
    """Root visit distribution as CSV ``move,visits,fraction,Q,prior``, most visited first."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["move", "visits", "fraction", "Q", "prior"])
    moves = generate_moves(pos)
    frac = result.fractions
    for m in sorted(result.visits, key=lambda m: (-result.visits[m], move_index(pos, m))):
        q = result.q[m]
        writer.writerow(
            [
                san(pos, m, moves),
                result.visits[m],
                f"{frac[m]:.4f}",
                "" if math.isnan(q) else f"{q:.4f}",
                f"{result.prior[m]:.4f}",
            ]
        )
    return out.getvalue()
