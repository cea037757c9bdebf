"""Study-suite benchmark harness."""

from .engines import InternalAbEngine, InternalMctsEngine, UciEngine, engine_from_spec, mcts_score
from .manifest import EngineSpec, ManifestError, load_manifest, parse_manifest
from .ratio import PRINTED_FACTOR, RatioInputs, interpret_ratio, leela_factor, leela_ratio
from .report import CSV_COLUMNS, format_winprob, render_report
from .suite import StudyEntry, StudySuite, SuiteError, load_suite, parse_suite
from .trial import (
    DEFAULT_RULE,
    AnyOf,
    BestMoveStable,
    MateWithin,
    RecordLine,
    Sample,
    SuiteRecord,
    run_trial,
)

__all__ = [
    "AnyOf",
    "BestMoveStable",
    "CSV_COLUMNS",
    "DEFAULT_RULE",
    "EngineSpec",
    "InternalAbEngine",
    "InternalMctsEngine",
    "ManifestError",
    "MateWithin",
    "PRINTED_FACTOR",
    "RatioInputs",
    "RecordLine",
    "Sample",
    "StudyEntry",
    "StudySuite",
    "SuiteError",
    "SuiteRecord",
    "UciEngine",
    "engine_from_spec",
    "format_winprob",
    "interpret_ratio",
    "leela_factor",
    "leela_ratio",
    "load_manifest",
    "load_suite",
    "mcts_score",
    "parse_manifest",
    "parse_suite",
    "render_report",
    "run_trial",
]
