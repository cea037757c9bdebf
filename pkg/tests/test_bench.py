import sys
import time
from pathlib import Path

import pytest

from dualmind.bench import (
    CSV_COLUMNS,
    PRINTED_FACTOR,
    InternalAbEngine,
    InternalMctsEngine,
    ManifestError,
    RatioInputs,
    RecordLine,
    SuiteError,
    SuiteRecord,
    UciEngine,
    engine_from_spec,
    format_winprob,
    interpret_ratio,
    leela_factor,
    leela_ratio,
    load_suite,
    parse_manifest,
    parse_suite,
    render_report,
    run_trial,
)
from dualmind.bench.trial import BestMoveStable, MateWithin, Sample
from dualmind.board import PLASKETT_H8_FEN, Move
from dualmind.cli.client import EngineError, UciClient
from dualmind.evalcore import Score
from dualmind.search.ab import SearchLimits

FIXTURES = Path(__file__).parent / "fixtures"
FAKE = [sys.executable, str(FIXTURES / "fake_uci_engine.py"), str(FIXTURES / "fake_engine_transcript.txt")]


# -- ratio ----------------------------------------------------------------------


def test_factor_examples():
    assert leela_factor(1.5e8, 1.4e5) == pytest.approx(1071.4285714, abs=1e-6)
    assert leela_factor(7.0, 7.0) == 1.0
    assert round(leela_factor(3.0e8, 1.4e5), 2) == 2142.86
    with pytest.raises(ZeroDivisionError):
        leela_factor(1.5e8, 0)


def test_ratio_examples():
    assert round(leela_ratio(PRINTED_FACTOR, 6.0e7, 1.897e9), 1) == 34.3
    assert round(leela_ratio(leela_factor(1.5e8, 1.4e5), 6.0e7, 1.897e9), 1) == 33.9
    with pytest.raises(ZeroDivisionError):
        leela_ratio(1071.43, 6.0e7, 0)
    with pytest.raises(ValueError):
        leela_ratio(1071.43, 0, 1.897e9)


def test_ratio_inputs():
    r = RatioInputs(1.5e8, 1.4e5, 1.897e9, 6.0e7)
    assert r.factor == leela_factor(1.5e8, 1.4e5)
    assert r.ratio == leela_ratio(r.factor, 6.0e7, 1.897e9)
    with pytest.raises(ValueError):
        RatioInputs(1.5e8, 1.4e5, 0, 6.0e7)


def test_interpretation():
    assert interpret_ratio(33.9) == "LCZero received 33.9x more effective compute"
    assert interpret_ratio(0.5) == "Stockfish received 2.0x more effective compute"


# -- suites ---------------------------------------------------------------------


def test_shipped_suites():
    studies = load_suite("studies")
    assert [e.id for e in studies] == ["plaskett-original", "plaskett-corrected", "plaskett-e5"]
    assert studies["plaskett-corrected"].mate_distance == 15
    assert studies["plaskett-corrected"].best_moves == (Move.from_uci("g4f6"),)
    mates = load_suite("mates")
    assert len(mates) == 20
    assert {e.mate_distance for e in mates} == {1, 2, 3}


@pytest.mark.parametrize(
    "text",
    [
        '6k1/5ppp/8/8/8/8/8/4R2K w - - bm Re8#; id "a";\n6k1/5ppp/8/8/8/8/8/4R2K w - - bm Re8#; id "a";',
        '6k1/5ppp/8/8/8/8/8/4R2K w - - bm Kd8; id "a";',
        '6k1/5ppp/8/8/8/8/8/4R2K w - - bm Re8#; dm 0; id "a";',
        '6k1/5ppp/8/8/8/8/8/4R2K w - - dm 1; id "a";',
        "not a position at all",
    ],
)
def test_suite_validation(text):
    with pytest.raises(SuiteError):
        parse_suite(text)


def test_suite_skips_comments_and_blank_lines():
    suite = parse_suite('# comment\n\n6k1/5ppp/8/8/8/8/8/4R2K w - - bm Re8#; dm 1; id "x";\n')
    assert len(suite) == 1 and suite["x"].mate_distance == 1
    assert [e.id for e in parse_suite('6k1/5ppp/8/8/8/8/8/4R2K w - - bm Re8#;')] == ["line1"]


def test_unknown_study_id():
    with pytest.raises(KeyError):
        load_suite("studies")["nope"]


# -- manifests --------------------------------------------------------------------


def test_manifest_parsing():
    specs = parse_manifest(
        """
        # engines
        ab = internal:ab
        option FutilityPruning=false
        option TTSizeMiB=8
        leela = /opt/lc0 --weights=net.pb
        workdir /tmp
        family mcts
        option Threads=1
        """
    )
    assert [s.id for s in specs] == ["ab", "leela"]
    assert specs[0].family == "ab" and specs[0].options == {"FutilityPruning": "false", "TTSizeMiB": "8"}
    assert specs[1].target == "/opt/lc0 --weights=net.pb" and specs[1].workdir == "/tmp"
    assert specs[1].family == "mcts" and specs[1].options == {"Threads": "1"}
    ab = engine_from_spec(specs[0])
    assert isinstance(ab, InternalAbEngine) and not ab.toggles.futility and ab.toggles.tt_size_mib == 8
    uci = engine_from_spec(specs[1])
    assert isinstance(uci, UciEngine) and uci.family == "mcts"


@pytest.mark.parametrize(
    "text",
    ["option X=1", "ab = internal:ab\nab = internal:mcts", "ab = internal:ab\noption X", "= internal:ab", "ab = internal:ab\nfamily chess"],
)
def test_manifest_errors(text):
    with pytest.raises(ManifestError):
        parse_manifest(text)


def test_mcts_manifest_options():
    spec = parse_manifest("mc = internal:mcts\noption Simulations=300\noption FPU=0.5\noption Seed=4")[0]
    engine = engine_from_spec(spec)
    assert (engine.simulations, engine.params.fpu, engine.seed) == (300, 0.5, 4)
    samples = []
    engine.analyse(load_suite("mates")["mate1-02"].position, SearchLimits(max_depth=3), lambda s: samples.append(s) or False)
    assert samples[-1].depth == 300


def test_unknown_internal_engine():
    with pytest.raises(ValueError):
        engine_from_spec(parse_manifest("x = internal:nope")[0])


# -- trials ------------------------------------------------------------------------


def test_mate_in_two_solves_fast():
    entry = load_suite("mates")["mate2-01"]
    t0 = time.perf_counter()
    rec = run_trial(InternalAbEngine(), entry, SearchLimits(max_depth=5))
    assert time.perf_counter() - t0 < 1.0
    assert rec.solved and rec.solution_move in entry.best_moves
    assert rec.lines[0].score == Score.mate(2)
    assert rec.lines[0].winprob == 1.0


def test_solve_rules():
    entry = load_suite("studies")["plaskett-corrected"]
    nf6 = Move.from_uci("g4f6")
    other = Move.from_uci("d7d8q")
    s = lambda m, sc: Sample(1, 1, 1.0, [(m, sc)])  # noqa: E731
    assert not BestMoveStable(3)(entry, [s(nf6, Score.cp(0))] * 2)
    assert BestMoveStable(3)(entry, [s(other, Score.cp(0))] + [s(nf6, Score.cp(0))] * 3)
    assert not BestMoveStable(3)(entry, [s(nf6, Score.cp(0))] * 2 + [s(other, Score.cp(0))])
    assert MateWithin()(entry, [s(nf6, Score.mate(15))])
    assert not MateWithin()(entry, [s(nf6, Score.mate(16))])
    assert not MateWithin()(entry, [s(nf6, Score.mate(-3))])


class Exploding:
    id, family, source = "boom", "ab", "internal"

    def analyse(self, pos, limits, on_sample):
        raise RuntimeError("engine fell over")


def test_failing_engine_yields_record():
    entry = load_suite("mates")["mate1-02"]
    rec = run_trial(Exploding(), entry, SearchLimits(max_depth=2))
    assert rec.failed and "fell over" in rec.error and not rec.solved
    assert "failed: engine fell over" in render_report([rec])


def _comparable(rec):
    return (rec.study, rec.engine, rec.solved, rec.solution_move, rec.nodes, rec.depth, [(ln.move, ln.score) for ln in rec.lines])


def test_trials_are_isolated_from_order():
    suite = load_suite("mates")
    entries = [suite[i] for i in ("mate1-02", "mate2-01", "mate2-03", "mate1-05")]
    engines = [InternalAbEngine(), InternalMctsEngine(seed=3, progress_every=100)]
    limits = SearchLimits(max_depth=4, max_nodes=400, multipv=2)
    forward = {(r.study, r.engine): _comparable(r) for e in engines for s in entries for r in [run_trial(e, s, limits)]}
    backward = {(r.study, r.engine): _comparable(r) for e in reversed(engines) for s in reversed(entries) for r in [run_trial(e, s, limits)]}
    assert forward == backward


def test_fake_uci_engine_trial():
    study = parse_suite(f'{PLASKETT_H8_FEN[:-4]} bm Nf6+; dm 15; id "h8";')["h8"]
    rec = run_trial(UciEngine("fake", FAKE), study, SearchLimits(max_depth=20, multipv=2))
    assert not rec.failed, rec.error
    assert rec.source == "uci"
    assert rec.solved and rec.solution_move == Move.from_uci("g4f6")
    assert (rec.depth, rec.nodes, rec.elapsed_ms) == (3, 900, 3.0)
    assert [(ln.san, ln.score) for ln in rec.lines] == [("Nf6+", Score.mate(15)), ("d8=Q", Score.cp(-140))]


def test_fake_uci_engine_without_solution():
    study = parse_suite(f'{PLASKETT_H8_FEN[:-4]} bm Nf6+; dm 1; id "h8";')["h8"]
    rec = run_trial(UciEngine("fake", FAKE), study, SearchLimits(max_depth=20, multipv=2))
    assert not rec.solved and rec.depth == 3  # mate 15 exceeds dm 1; only two Nf6+ samples


def test_crashing_uci_engine():
    study = load_suite("studies")["plaskett-corrected"]
    rec = run_trial(UciEngine("crash", FAKE + ["--crash-on-go"]), study, SearchLimits(max_depth=3))
    assert rec.failed and "exited" in rec.error


def test_nonexistent_engine_path():
    with pytest.raises(EngineError):
        UciClient("/nonexistent/engine-binary")
    rec = run_trial(UciEngine("ghost", "/nonexistent/engine-binary"), load_suite("mates")["mate1-02"], SearchLimits(max_depth=2))
    assert rec.failed and "cannot start" in rec.error


# -- reports ------------------------------------------------------------------------


def record(study="s", engine="ab", family="ab", lines=(), source="internal", nodes=1000, ms=10.0, solved=True):
    return SuiteRecord(study, engine, family, "depth=5 multipv=5", solved, lines[0].move if lines else None, nodes, ms, 5, list(lines), source)


def line(uci, san, score):
    from dualmind.evalcore import cp_to_winprob

    return RecordLine(Move.from_uci(uci), san, score, cp_to_winprob(score))


def test_empty_report():
    text = render_report([])
    assert text.startswith("# Benchmark report") and "no trials" in text


def test_markdown_table_shape():
    lines = [
        line("d7d8q", "d8=Q", Score.cp(-284)),
        line("g4f6", "Nf6+", Score.mate(15)),
        line("g4e5", "Ne5", Score.cp(-292)),
    ]
    text = render_report([record(lines=lines)])
    assert "| | **Nf6+** | **d8=Q** | **Ne5** |" in text
    assert "| **Q-value** | #15 | -2.84 | -2.92 |" in text
    assert "| **Win Probability** | 100% | 16.3% | 15.7% |" in text


def test_winprob_display():
    assert format_winprob(0.0823) == "8.23%"
    assert format_winprob(0.909) == "90.9%"
    assert format_winprob(1.0) == "100%"


def test_report_is_byte_identical():
    recs = [record(lines=[line("g4f6", "Nf6+", Score.cp(399))]), record(engine="mc", family="mcts", nodes=50, ms=100.0)]
    assert render_report(recs) == render_report(recs)
    assert render_report(recs, "csv") == render_report(recs, "csv")


def test_leela_ratio_in_summary():
    ab = record(nodes=10_000, ms=100.0)
    mc = record(engine="mc", family="mcts", nodes=100, ms=100.0, lines=[line("g4f6", "Nf6+", Score.cp(10))])
    text = render_report([ab, mc])
    assert "Leela Ratio: F = 100.00, R = 1.00" in text
    assert "mixed sources" not in text
    assert "mixed sources" in render_report([ab, record(engine="lc", family="mcts", nodes=10, ms=5.0, source="uci")])
    assert "Leela Ratio" not in render_report([ab])


def test_csv_report():
    text = render_report([record(lines=[line("g4f6", "Nf6+", Score.mate(15)), line("d7d8q", "d8=Q", Score.cp(-284))])], "csv")
    rows = text.splitlines()
    assert rows[0].split(",") == CSV_COLUMNS
    assert rows[1] == "s,ab,Nf6+,#15,1.0000,1000,10,5,true"
    assert rows[2] == "s,ab,d8=Q,-2.84,0.1632,1000,10,5,true"
    with pytest.raises(ValueError):
        render_report([], "html")
