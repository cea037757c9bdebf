"""Engine handles: the internal searchers and external UCI processes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..board.position import Position
from ..evalcore.score import MAX_CP, Score, winprob_to_cp
from ..search.ab import AlphaBetaSearcher, HeuristicToggles, Iteration, SearchLimits
from ..search.mcts import HeuristicEvaluator, MctsResult, MctsSearcher, PuctParams
from .manifest import EngineSpec
from .trial import Sample

DEFAULT_SIMULATIONS = 10_000


def _truthy(v: str) -> bool:
    return v.strip().lower() in ("1", "true", "yes", "on")


@dataclass
class InternalAbEngine:
    id: str = "ab"
    toggles: HeuristicToggles = field(default_factory=HeuristicToggles)
    family: str = "ab"
    source: str = "internal"

    def analyse(self, pos: Position, limits: SearchLimits, on_sample: Callable[[Sample], bool]) -> None:
        # A fresh searcher per trial keeps trials independent of each other.
        searcher = AlphaBetaSearcher(self.toggles)

        def on_iteration(it: Iteration):
            lines = [(ln.move, ln.score) for ln in it.lines]
            if on_sample(Sample(it.depth, it.nodes, it.elapsed_ms, lines)):
                searcher.stop()

        searcher.search(pos, limits, on_iteration=on_iteration)


def mcts_score(q: float) -> Score:
    """Root Q in [-1, 1] shown as centipawns through the inverse logistic."""
    cp = winprob_to_cp((q + 1.0) / 2.0)
    if math.isinf(cp):
        return Score.cp(int(math.copysign(MAX_CP, cp)))
    return Score.cp(max(-MAX_CP, min(MAX_CP, round(cp))))


def mcts_lines(result: MctsResult, k: int) -> list[tuple]:
    ranked = sorted(result.visits, key=lambda m: (-result.visits[m], -(result.q[m] if result.visits[m] else -2)))
    ranked.remove(result.best_move)
    ranked.insert(0, result.best_move)
    return [(m, mcts_score(result.q[m] if result.visits[m] else -1.0)) for m in ranked[:k]]


@dataclass
class InternalMctsEngine:
    id: str = "mcts"
    params: PuctParams = field(default_factory=PuctParams)
    evaluator_factory: Callable = HeuristicEvaluator
    seed: int = 0
    progress_every: int = 1000
    simulations: int = DEFAULT_SIMULATIONS  # used when the limits carry no node count
    family: str = "mcts"
    source: str = "internal"

    def analyse(self, pos: Position, limits: SearchLimits, on_sample: Callable[[Sample], bool]) -> None:
        searcher = MctsSearcher(self.params, self.evaluator_factory(), self.seed)
        sims = limits.max_nodes or self.simulations

        def sample(r: MctsResult) -> Sample:
            return Sample(r.simulations, r.simulations, r.elapsed_ms, mcts_lines(r, limits.multipv))

        def on_progress(r: MctsResult):
            if on_sample(sample(r)):
                searcher.stop()

        result = searcher.search(pos, sims, max_time_ms=limits.max_time_ms, on_progress=on_progress, progress_every=self.progress_every)
        if result.simulations % self.progress_every:
            on_sample(sample(result))


@dataclass
class UciEngine:
    """An external engine driven over UCI."""

    id: str
    command: str
    options: dict[str, str] = field(default_factory=dict)
    workdir: Optional[str] = None
    family: str = "ab"
    source: str = "uci"
    timeout: float = 10.0

    def analyse(self, pos: Position, limits: SearchLimits, on_sample: Callable[[Sample], bool]) -> None:
        from ..cli.client import UciClient

        with UciClient(self.command, self.options, workdir=self.workdir, timeout=self.timeout) as client:
            client.new_game()
            client.analyse(pos, limits, on_sample)


def engine_from_spec(spec: EngineSpec):
    target = spec.target
    if target.startswith("internal:"):
        name = target.split(":", 1)[1]
        opts = spec.options
        if name == "ab":
            toggles = HeuristicToggles(
                futility=_truthy(opts.get("FutilityPruning", "true")),
                lmr=_truthy(opts.get("LMR", "true")),
                tt_size_mib=int(opts.get("TTSizeMiB", 64)),
            )
            return InternalAbEngine(spec.id, toggles)
        if name == "mcts":
            params = PuctParams(
                c_base=float(opts.get("CBase", 19652)),
                c_init=float(opts.get("CInit", 1.25)),
                fpu=float(opts.get("FPU", 0.2)),
            )
            return InternalMctsEngine(
                spec.id,
                params,
                seed=int(opts.get("Seed", 0)),
                simulations=int(opts.get("Simulations", DEFAULT_SIMULATIONS)),
            )
        raise ValueError(f"unknown internal engine {name!r}")
    return UciEngine(spec.id, target, dict(spec.options), spec.workdir, spec.family or "ab")
