"""Engine trials on suite entries and the records they produce."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol, Sequence

from ..board.notation import san
from ..board.position import Move, Position, generate_moves
from ..evalcore.score import Score, cp_to_winprob
from ..search.ab import SearchLimits
from .suite import StudyEntry

log = logging.getLogger(__name__)


@dataclass
class Sample:
    """One reporting point of a running search: an iteration or a progress tick."""

    depth: int
    nodes: int
    elapsed_ms: float
    lines: list[tuple[Move, Score]]  # best first


class SolveRule(Protocol):
    def __call__(self, study: StudyEntry, samples: Sequence[Sample]) -> bool: ...


@dataclass(frozen=True)
class BestMoveStable:
    """A best move ranked first for ``iterations`` consecutive samples."""

    iterations: int = 3

    def __call__(self, study: StudyEntry, samples: Sequence[Sample]) -> bool:
        tail = samples[-self.iterations :]
        return len(tail) == self.iterations and all(s.lines and s.lines[0][0] in study.best_moves for s in tail)


@dataclass(frozen=True)
class MateWithin:
    """The engine reports a mate no longer than the study's mate distance."""

    def __call__(self, study: StudyEntry, samples: Sequence[Sample]) -> bool:
        if study.mate_distance is None or not samples or not samples[-1].lines:
            return False
        score = samples[-1].lines[0][1]
        return score.is_mate and 0 < score.value <= study.mate_distance


@dataclass(frozen=True)
class AnyOf:
    rules: tuple

    def __call__(self, study: StudyEntry, samples: Sequence[Sample]) -> bool:
        return any(rule(study, samples) for rule in self.rules)


DEFAULT_RULE = AnyOf((BestMoveStable(3), MateWithin()))


class EngineHandle(Protocol):
    id: str
    family: str  # "ab" or "mcts"
    source: str  # "internal" or "uci"

    def analyse(self, pos: Position, limits: SearchLimits, on_sample: Callable[[Sample], bool]) -> None:
        """Search ``pos``; ``on_sample`` returning True asks the engine to stop."""
        ...


@dataclass
class RecordLine:
    move: Move
    san: str
    score: Score
    winprob: float


@dataclass
class SuiteRecord:
    study: str
    engine: str
    family: str
    limits: str
    solved: bool
    solution_move: Optional[Move]
    nodes: int
    elapsed_ms: float
    depth: int
    lines: list[RecordLine] = field(default_factory=list)
    source: str = "internal"
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    @property
    def nps(self) -> float:
        return self.nodes / (self.elapsed_ms / 1000.0) if self.elapsed_ms > 0 else 0.0


def describe_limits(limits: SearchLimits) -> str:
    parts = []
    if limits.max_depth is not None:
        parts.append(f"depth={limits.max_depth}")
    if limits.max_nodes is not None:
        parts.append(f"nodes={limits.max_nodes}")
    if limits.max_time_ms is not None:
        parts.append(f"ms={limits.max_time_ms:g}")
    parts.append(f"multipv={limits.multipv}")
    return " ".join(parts)


def run_trial(
    engine: EngineHandle,
    study: StudyEntry,
    limits: SearchLimits,
    solve_rule: SolveRule = DEFAULT_RULE,
) -> SuiteRecord:
    """Run one engine on one study and record the first solving sample.

    Engine failures produce a record with ``error`` set instead of raising.
    """
    samples: list[Sample] = []
    solved_at: list[Sample] = []

    def on_sample(s: Sample) -> bool:
        samples.append(s)
        if not solved_at and solve_rule(study, samples):
            solved_at.append(s)
            return True
        return False

    base = dict(study=study.id, engine=engine.id, family=engine.family, limits=describe_limits(limits), source=engine.source)
    try:
        engine.analyse(study.position, limits, on_sample)
    except Exception as exc:  # harness keeps going
        log.warning("engine %s failed on %s: %s", engine.id, study.id, exc)
        return SuiteRecord(**base, solved=False, solution_move=None, nodes=0, elapsed_ms=0.0, depth=0, error=str(exc) or type(exc).__name__)
    if not samples:
        return SuiteRecord(**base, solved=False, solution_move=None, nodes=0, elapsed_ms=0.0, depth=0, error="engine produced no analysis")
    final = solved_at[0] if solved_at else samples[-1]
    moves = generate_moves(study.position)
    lines = [RecordLine(m, san(study.position, m, moves), s, cp_to_winprob(s)) for m, s in final.lines]
    return SuiteRecord(
        **base,
        solved=bool(solved_at),
        solution_move=final.lines[0][0] if final.lines else None,
        nodes=final.nodes,
        elapsed_ms=final.elapsed_ms,
        depth=final.depth,
        lines=lines,
    )
