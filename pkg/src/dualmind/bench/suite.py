"""Endgame-study suites stored as EPD."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterator, Optional

from ..board.notation import EpdError, SanError, parse_epd
from ..board.position import FenError, Move, Position, generate_moves

BUILTIN_SUITES = {"studies": "studies.epd", "mates": "mates.epd"}


class SuiteError(ValueError):
    pass


@dataclass(frozen=True)
class StudyEntry:
    id: str
    position: Position
    best_moves: tuple[Move, ...]
    mate_distance: Optional[int] = None
    note: str = ""


@dataclass
class StudySuite:
    entries: list[StudyEntry]

    def __post_init__(self):
        self.validate()

    def validate(self):
        seen = set()
        for e in self.entries:
            if e.id in seen:
                raise SuiteError(f"duplicate study id {e.id!r}")
            seen.add(e.id)
            if not e.best_moves:
                raise SuiteError(f"{e.id}: no best move")
            legal = set(generate_moves(e.position))
            for m in e.best_moves:
                if m not in legal:
                    raise SuiteError(f"{e.id}: best move {m.uci()} is illegal")
            if e.mate_distance is not None and e.mate_distance < 1:
                raise SuiteError(f"{e.id}: mate distance must be >= 1")

    def __iter__(self) -> Iterator[StudyEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, study_id: str) -> StudyEntry:
        for e in self.entries:
            if e.id == study_id:
                return e
        raise KeyError(study_id)


def parse_suite(text: str) -> StudySuite:
    entries = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            pos, ops = parse_epd(line)
        except (EpdError, SanError, FenError) as exc:
            raise SuiteError(f"line {n}: {exc}") from exc
        if "bm" not in ops:
            raise SuiteError(f"line {n}: missing bm opcode")
        entries.append(
            StudyEntry(
                id=ops.get("id", f"line{n}"),
                position=pos,
                best_moves=tuple(ops["bm"]),
                mate_distance=ops.get("dm"),
                note=str(ops.get("c0", "")).strip('"'),
            )
        )
    return StudySuite(entries)


def load_suite(source: str | Path) -> StudySuite:
    """Load a suite from a path or a built-in name (``studies``, ``mates``)."""
    if str(source) in BUILTIN_SUITES:
        text = resources.files("dualmind.bench").joinpath("data", BUILTIN_SUITES[str(source)]).read_text()
    else:
        text = Path(source).read_text()
    return parse_suite(text)
