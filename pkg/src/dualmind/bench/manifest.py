"""Engine manifest files.

::

    # one engine per "id = target" line; following lines configure it
    ab = internal:ab
    option FutilityPruning=false
    sf = /usr/local/bin/stockfish
    workdir /tmp
    family ab
    option Threads=1
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional


class ManifestError(ValueError):
    pass


@dataclass
class EngineSpec:
    id: str
    target: str  # executable command or internal:<name>
    options: dict[str, str] = field(default_factory=dict)
    workdir: Optional[str] = None
    family: Optional[str] = None

    def __post_init__(self):
        if self.family is None and self.target.startswith("internal:"):
            self.family = self.target.split(":", 1)[1]


def parse_manifest(text: str) -> list[EngineSpec]:
    specs: list[EngineSpec] = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        keyword, _, rest = line.partition(" ")
        if keyword in ("option", "workdir", "family"):
            if not specs:
                raise ManifestError(f"line {n}: {keyword} before any engine")
            rest = rest.strip()
            if keyword == "option":
                name, eq, value = rest.partition("=")
                if not eq or not name.strip():
                    raise ManifestError(f"line {n}: expected option NAME=VALUE")
                specs[-1].options[name.strip()] = value.strip()
            elif keyword == "workdir":
                specs[-1].workdir = rest
            else:
                if rest not in ("ab", "mcts"):
                    raise ManifestError(f"line {n}: family must be ab or mcts")
                specs[-1].family = rest
            continue
        ident, eq, target = line.partition("=")
        if not eq or not ident.strip() or not target.strip():
            raise ManifestError(f"line {n}: expected 'id = path' or 'id = internal:<name>'")
        if any(s.id == ident.strip() for s in specs):
            raise ManifestError(f"line {n}: duplicate engine id {ident.strip()!r}")
        specs.append(EngineSpec(ident.strip(), target.strip()))
    return specs


def load_manifest(path: str | Path) -> list[EngineSpec]:
    return parse_manifest(Path(path).read_text())
