"""UCI protocol: info-line codec and a threaded server for the internal engines."""

from __future__ import annotations

import logging
import sys
import threading
from dataclasses import dataclass, field
from typing import Optional, TextIO

from ..board.notation import parse_uci_move
from ..board.position import Position, make_move, parse_fen, start_position
from ..evalcore.score import Score
from ..search.ab import MAX_PLY, AlphaBetaSearcher, HeuristicToggles, Iteration, SearchLimits
from ..search.mcts import HeuristicEvaluator, MctsResult, MctsSearcher, PuctParams

log = logging.getLogger(__name__)

ENGINE_NAME = "dualmind"
ENGINE_AUTHOR = "the dualmind developers"


@dataclass
class InfoLine:
    depth: int
    score: Score
    multipv: int = 1
    nodes: Optional[int] = None
    nps: Optional[int] = None
    time_ms: Optional[int] = None
    seldepth: Optional[int] = None
    pv: list[str] = field(default_factory=list)


def format_info(info: InfoLine) -> str:
    parts = ["info", "depth", str(info.depth)]
    if info.seldepth is not None:
        parts += ["seldepth", str(info.seldepth)]
    parts += ["multipv", str(info.multipv), "score", info.score.kind, str(info.score.value)]
    for key, value in (("nodes", info.nodes), ("nps", info.nps), ("time", info.time_ms)):
        if value is not None:
            parts += [key, str(value)]
    if info.pv:
        parts += ["pv", *info.pv]
    return " ".join(parts)


_INT_FIELDS = {"depth": "depth", "seldepth": "seldepth", "multipv": "multipv", "nodes": "nodes", "nps": "nps", "time": "time_ms"}
_SKIP_ONE = {"hashfull", "tbhits", "currmove", "currmovenumber", "cpuload", "sbhits"}


def parse_info(line: str) -> Optional[InfoLine]:
    """Parse an ``info`` line carrying a score; other lines give None."""
    tokens = line.split()
    if not tokens or tokens[0] != "info":
        return None
    values: dict = {}
    score = None
    pv: list[str] = []
    i = 1
    try:
        while i < len(tokens):
            tok = tokens[i]
            if tok in _INT_FIELDS:
                values[_INT_FIELDS[tok]] = int(tokens[i + 1])
                i += 2
            elif tok == "score":
                score = Score(tokens[i + 1], int(tokens[i + 2]))
                i += 3
                while i < len(tokens) and tokens[i] in ("lowerbound", "upperbound"):
                    i += 1
            elif tok == "pv":
                pv = tokens[i + 1 :]
                break
            elif tok == "string":
                break
            elif tok in _SKIP_ONE:
                i += 2
            else:
                i += 1
    except (IndexError, ValueError):
        return None
    if score is None or "depth" not in values:
        return None
    return InfoLine(score=score, pv=pv, **values)


AB_OPTIONS = {
    "FutilityPruning": ("check", "true"),
    "LMR": ("check", "true"),
    "TTSizeMiB": ("spin", "64", 1, 4096),
    "MultiPV": ("spin", "1", 1, 64),
}
MCTS_OPTIONS = {
    "Simulations": ("spin", "10000", 1, 1_000_000_000),
    "CInit": ("string", "1.25"),
    "CBase": ("string", "19652"),
    "FPU": ("string", "0.2"),
    "Seed": ("spin", "0", 0, 2**31 - 1),
    "MultiPV": ("spin", "1", 1, 64),
}


def _as_bool(v: str) -> bool:
    return v.strip().lower() in ("true", "1", "yes", "on")


class UciServer:
    """One UCI session. ``handle`` processes a line; searches run on a worker thread."""

    def __init__(self, engine: str = "ab", out: TextIO = sys.stdout):
        if engine not in ("ab", "mcts"):
            raise ValueError(f"unknown engine {engine!r}")
        self.engine = engine
        self.out = out
        self.declared = AB_OPTIONS if engine == "ab" else MCTS_OPTIONS
        self.options = {name: spec[1] for name, spec in self.declared.items()}
        self.state = "boot"
        self.position: Position = start_position()
        self.history: list[int] = []
        self._out_lock = threading.Lock()
        self._worker: Optional[threading.Thread] = None
        self._searcher = None
        self._stop = threading.Event()
        self._ab: Optional[AlphaBetaSearcher] = None

    # -- output ------------------------------------------------------------

    def send(self, line: str):
        with self._out_lock:
            self.out.write(line + "\n")
            self.out.flush()

    # -- commands ------------------------------------------------------------

    def handle(self, line: str) -> bool:
        """Process one command line; False means quit."""
        tokens = line.split()
        if not tokens:
            return True
        cmd, args = tokens[0], tokens[1:]
        if cmd == "quit":
            self.stop()
            return False
        handler = getattr(self, f"_cmd_{cmd}", None)
        if handler is None:
            log.warning("ignoring unknown command %r", line.strip())
            return True
        try:
            handler(args)
        except (ValueError, IndexError, KeyError) as exc:
            log.warning("ignoring malformed command %r: %s", line.strip(), exc)
        return True

    def _cmd_uci(self, args):
        self.send(f"id name {ENGINE_NAME}-{self.engine}")
        self.send(f"id author {ENGINE_AUTHOR}")
        for name, spec in self.declared.items():
            kind, default = spec[0], spec[1]
            extra = f" min {spec[2]} max {spec[3]}" if kind == "spin" else ""
            self.send(f"option name {name} type {kind} default {default}{extra}")
        self.send("uciok")
        if self.state == "boot":
            self.state = "idle"

    def _cmd_isready(self, args):
        self.send("readyok")

    def _cmd_setoption(self, args):
        if self.state == "searching":
            log.warning("setoption ignored during search")
            return
        if not args or args[0] != "name":
            raise ValueError("expected setoption name <id> [value <x>]")
        if "value" in args:
            k = args.index("value")
            name, value = " ".join(args[1:k]), " ".join(args[k + 1 :])
        else:
            name, value = " ".join(args[1:]), ""
        if name not in self.declared:
            raise KeyError(f"unknown option {name!r}")
        spec = self.declared[name]
        if spec[0] == "spin":
            v = int(value)
            if not spec[2] <= v <= spec[3]:
                raise ValueError(f"{name} out of range")
        elif spec[0] == "check":
            if value.lower() not in ("true", "false"):
                raise ValueError(f"{name} expects true or false")
        elif name in ("CInit", "CBase", "FPU"):
            float(value)
        self.options[name] = value
        if name in ("TTSizeMiB", "FutilityPruning", "LMR"):
            self._ab = None

    def _cmd_ucinewgame(self, args):
        if self.state == "searching":
            log.warning("ucinewgame ignored during search")
            return
        if self._ab is not None:
            self._ab.new_game()
        self.position = start_position()
        self.history = []

    def _cmd_position(self, args):
        if self.state == "searching":
            log.warning("position ignored during search")
            return
        if not args:
            raise ValueError("position needs startpos or fen")
        if args[0] == "startpos":
            pos, rest = start_position(), args[1:]
        elif args[0] == "fen":
            k = args.index("moves") if "moves" in args else len(args)
            pos, rest = parse_fen(" ".join(args[1:k])), args[k:]
        else:
            raise ValueError(f"unknown position kind {args[0]!r}")
        history: list[int] = []
        if rest:
            if rest[0] != "moves":
                raise ValueError("expected moves")
            for tok in rest[1:]:
                m = parse_uci_move(pos, tok)
                history.append(pos.key)
                pos = make_move(pos, m)
        self.position, self.history = pos, history

    def _cmd_go(self, args):
        if self.state != "idle":
            log.warning("go ignored in state %s", self.state)
            return
        params = self._parse_go(args)
        self.state = "searching"
        self._stop.clear()
        target = self._run_ab if self.engine == "ab" else self._run_mcts
        self._worker = threading.Thread(target=self._run, args=(target, params), daemon=True)
        self._worker.start()

    def _cmd_stop(self, args):
        self.stop()

    def stop(self):
        self._stop.set()
        worker = self._worker
        # Searches clear their flag on entry, so keep signalling until the worker exits.
        while worker is not None and worker.is_alive():
            searcher = self._searcher
            if searcher is not None:
                searcher.stop()
            worker.join(0.001)

    def wait(self, timeout: Optional[float] = None):
        """Block until the running search (if any) has emitted bestmove."""
        worker = self._worker
        if worker is not None:
            worker.join(timeout)

    # -- search ------------------------------------------------------------

    def _parse_go(self, args) -> dict:
        params: dict = {"infinite": False}
        i = 0
        while i < len(args):
            tok = args[i]
            if tok == "infinite":
                params["infinite"] = True
                i += 1
            elif tok in ("depth", "nodes", "movetime", "wtime", "btime", "winc", "binc", "movestogo"):
                params[tok] = int(args[i + 1])
                i += 2
            else:
                log.warning("ignoring go argument %r", tok)
                i += 1
        stm_time = params.get("wtime" if self.position.stm == 0 else "btime")
        if "movetime" not in params and stm_time is not None:
            inc = params.get("winc" if self.position.stm == 0 else "binc", 0)
            params["movetime"] = max(10, stm_time // params.get("movestogo", 30) + inc // 2)
        return params

    def _run(self, target, params):
        try:
            best = target(params)
        except Exception:  # keep the session alive and honour the bestmove contract
            log.exception("search failed")
            best = None
        if params["infinite"]:
            self._stop.wait()
        self.state = "idle"
        self._searcher = None
        self.send(f"bestmove {best.uci() if best else '0000'}")

    def _run_ab(self, params) -> Optional[object]:
        if self._ab is None:
            toggles = HeuristicToggles(
                futility=_as_bool(self.options["FutilityPruning"]),
                lmr=_as_bool(self.options["LMR"]),
                tt_size_mib=int(self.options["TTSizeMiB"]),
            )
            self._ab = AlphaBetaSearcher(toggles)
        searcher = self._searcher = self._ab
        depth = params.get("depth")
        if depth is None and "nodes" not in params and "movetime" not in params:
            depth = MAX_PLY - 1
        limits = SearchLimits(
            max_depth=depth,
            max_nodes=params.get("nodes"),
            max_time_ms=params.get("movetime"),
            multipv=int(self.options["MultiPV"]),
        )

        def on_iteration(it: Iteration):
            nps = int(it.nodes * 1000 / it.elapsed_ms) if it.elapsed_ms > 0 else 0
            for k, line in enumerate(it.lines, 1):
                info = InfoLine(it.depth, line.score, k, it.nodes, nps, int(it.elapsed_ms), None, [m.uci() for m in line.pv])
                self.send(format_info(info))

        # A stop that raced ahead of the worker still yields a legal move.
        if self._stop.is_set():
            limits = SearchLimits(max_depth=1, multipv=limits.multipv)
        result = searcher.search(self.position, limits, history=self.history, on_iteration=on_iteration)
        return result.best.move

    def _run_mcts(self, params):
        from ..bench.engines import mcts_lines

        o = self.options
        searcher = MctsSearcher(
            PuctParams(float(o["CBase"]), float(o["CInit"]), float(o["FPU"])), HeuristicEvaluator(), int(o["Seed"])
        )
        self._searcher = searcher
        sims = params.get("nodes") or (10**9 if params["infinite"] else int(o["Simulations"]))
        multipv = int(o["MultiPV"])

        def report(r: MctsResult):
            nps = int(r.simulations * 1000 / r.elapsed_ms) if r.elapsed_ms > 0 else 0
            for k, (m, score) in enumerate(mcts_lines(r, multipv), 1):
                pv = r.pv if m == r.best_move else [m]
                info = InfoLine(len(r.pv), score, k, r.simulations, nps, int(r.elapsed_ms), None, [x.uci() for x in pv])
                self.send(format_info(info))

        if self._stop.is_set():
            sims = 1
        result = searcher.search(
            self.position, sims, history=self.history, max_time_ms=params.get("movetime"), on_progress=report
        )
        report(result)
        return result.best_move

    # -- loop --------------------------------------------------------------

    def serve(self, inp: TextIO = sys.stdin):
        try:
            for line in inp:
                if not self.handle(line):
                    break
        finally:
            self.stop()


def uci_serve(engine: str = "ab", inp: TextIO = sys.stdin, out: TextIO = sys.stdout) -> None:
    UciServer(engine, out).serve(inp)
