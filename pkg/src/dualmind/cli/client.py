"""Drive an external UCI engine as a subprocess."""

from __future__ import annotations

import logging
import queue
import shlex
import subprocess
import threading
from typing import Callable, Optional, Sequence

from ..board.notation import parse_uci_move
from ..board.position import Position
from ..search.ab import SearchLimits
from .uci import parse_info

log = logging.getLogger(__name__)


class EngineError(RuntimeError):
    pass


class UciClient:
    """Handshake on construction (``uci``/``uciok``, options, ``isready``/``readyok``)."""

    def __init__(
        self,
        command: str | Sequence[str],
        options: Optional[dict[str, str]] = None,
        workdir: Optional[str] = None,
        timeout: float = 10.0,
    ):
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        if not argv:
            raise EngineError("empty engine command")
        self.timeout = timeout
        self.name: Optional[str] = None
        self.option_names: set[str] = set()
        try:
            self.proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                bufsize=1,
                cwd=workdir,
            )
        except OSError as exc:
            raise EngineError(f"cannot start {argv[0]}: {exc}") from exc
        self._lines: queue.Queue[Optional[str]] = queue.Queue()
        threading.Thread(target=self._pump, daemon=True).start()
        try:
            self._handshake(options or {})
        except Exception:
            self.close()
            raise

    def _pump(self):
        for line in self.proc.stdout:
            self._lines.put(line.rstrip("\r\n"))
        self._lines.put(None)

    def send(self, line: str):
        log.debug(">> %s", line)
        try:
            self.proc.stdin.write(line + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise EngineError(f"engine input closed: {exc}") from exc

    def read(self, timeout: Optional[float]) -> str:
        try:
            line = self._lines.get(timeout=timeout)
        except queue.Empty:
            raise EngineError(f"engine timed out after {timeout} s") from None
        if line is None:
            raise EngineError(f"engine exited with code {self.proc.poll()}")
        log.debug("<< %s", line)
        return line

    def wait_for(self, token: str, timeout: Optional[float] = None) -> list[str]:
        seen = []
        while True:
            line = self.read(self.timeout if timeout is None else timeout)
            seen.append(line)
            if line.split()[:1] == [token]:
                return seen

    def _handshake(self, options: dict[str, str]):
        self.send("uci")
        for line in self.wait_for("uciok"):
            if line.startswith("id name "):
                self.name = line[len("id name ") :]
            elif line.startswith("option name "):
                rest = line[len("option name ") :]
                self.option_names.add(rest.split(" type ")[0])
        for name, value in options.items():
            self.set_option(name, value)
        self.ready()

    def set_option(self, name: str, value: str):
        if self.option_names and name not in self.option_names:
            log.warning("engine %s does not declare option %s", self.name, name)
        self.send(f"setoption name {name} value {value}")

    def ready(self):
        self.send("isready")
        self.wait_for("readyok")

    def new_game(self):
        self.send("ucinewgame")
        self.ready()

    def analyse(
        self,
        pos: Position,
        limits: SearchLimits,
        on_sample: Callable,
        search_timeout: Optional[float] = None,
    ) -> str:
        """Run ``go`` and feed one sample per completed depth; returns the bestmove token."""
        from ..bench.trial import Sample

        if limits.multipv > 1 or "MultiPV" in self.option_names:
            self.set_option("MultiPV", str(limits.multipv))
        self.send(f"position fen {pos.fen()}")
        go = ["go"]
        if limits.max_depth is not None:
            go += ["depth", str(limits.max_depth)]
        if limits.max_nodes is not None:
            go += ["nodes", str(limits.max_nodes)]
        if limits.max_time_ms is not None:
            go += ["movetime", str(int(limits.max_time_ms))]
        self.send(" ".join(go))
        if search_timeout is None and limits.max_time_ms is not None:
            search_timeout = limits.max_time_ms / 1000.0 + self.timeout

        depth, lines, nodes, ms = None, {}, 0, 0.0
        stopped = False

        def flush():
            nonlocal stopped
            if 1 in lines:
                s = Sample(depth, nodes, ms, [lines[k] for k in sorted(lines)])
                if on_sample(s) and not stopped:
                    self.send("stop")
                    stopped = True

        while True:
            line = self.read(search_timeout)
            if line.startswith("bestmove"):
                flush()
                parts = line.split()
                return parts[1] if len(parts) > 1 else "0000"
            if "lowerbound" in line or "upperbound" in line:
                continue
            info = parse_info(line)
            if info is None or not info.pv:
                continue
            if info.depth != depth:
                flush()
                depth, lines = info.depth, {}
            try:
                move = parse_uci_move(pos, info.pv[0])
            except ValueError:
                log.warning("engine reported an illegal pv move %s", info.pv[0])
                continue
            lines[info.multipv] = (move, info.score)
            nodes = info.nodes or nodes
            ms = float(info.time_ms) if info.time_ms is not None else ms

    def close(self):
        if self.proc.poll() is None:
            try:
                self.send("quit")
                self.proc.wait(timeout=2)
            except (EngineError, subprocess.TimeoutExpired):
                self.proc.kill()
                self.proc.wait()

    def __enter__(self) -> "UciClient":
        return self

    def __exit__(self, *exc):
        self.close()


def uci_client(path: str | Sequence[str], options: Optional[dict[str, str]] = None, **kwargs) -> UciClient:
    return UciClient(path, options, **kwargs)
