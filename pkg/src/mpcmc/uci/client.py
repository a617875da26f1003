"""UCI engine processes: handshake, queries and score extraction.

An :class:`EngineHandle` owns one engine, either a subprocess or the
built-in stub running on a thread (``path=BUILTIN_STUB``).  Everything sent
and received is kept in ``handle.transcript`` with ``> `` / ``< `` prefixes.
"""
from __future__ import annotations

import io
import itertools
import logging
import os
import queue
import shlex
import subprocess
import threading
import time
from dataclasses import dataclass, field, replace
from typing import IO

from ..game import chess as ch
from ..game.chess import Move
from ..game.trajectory import Trajectory
from ..game.types import Color
from .score import Score, terminal_score

log = logging.getLogger(__name__)

BUILTIN_STUB = "builtin:stub"

BUDGET_KINDS = ("movetime", "depth", "nodes")
RESET_POLICIES = ("newgame_per_query", "restart_per_query", "persistent")
DEFAULT_OPTIONS = {"Threads": "1", "Hash": "1"}


class EngineError(Exception):
    pass


class SpawnFailed(EngineError):
    pass


class HandshakeTimeout(EngineError):
    pass


class UnsupportedOption(EngineError):
    pass


class EngineCrashed(EngineError):
    pass


class ProtocolViolation(EngineError):
    pass


class IllegalBestMove(EngineError):
    pass


class Timeout(EngineError):
    pass


@dataclass(frozen=True)
class Budget:
    kind: str
    amount: int

    def __post_init__(self):
        if self.kind not in BUDGET_KINDS:
            raise ValueError(f"budget kind must be one of {BUDGET_KINDS}, got {self.kind!r}")
        if self.amount <= 0:
            raise ValueError("budget amount must be positive")

    def go_command(self) -> str:
        return f"go {self.kind} {self.amount}"


@dataclass(frozen=True)
class EngineConfig:
    path: str
    args: tuple[str, ...] = ()
    options: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_OPTIONS))
    budget_kind: str = "movetime"
    budget: int = 100
    reset_policy: str = "newgame_per_query"
    name: str | None = None
    handshake_timeout: float = 10.0
    grace: float = 5.0
    # wall-clock cap for depth/nodes budgets, which have no natural deadline
    query_timeout: float = 120.0

    def __post_init__(self):
        Budget(self.budget_kind, self.budget)
        if self.reset_policy not in RESET_POLICIES:
            raise ValueError(f"reset_policy must be one of {RESET_POLICIES}")
        if any(not str(k).strip() for k in self.options):
            raise ValueError("option names must be nonempty")
        object.__setattr__(self, "args", tuple(self.args))
        object.__setattr__(self, "options", {str(k): str(v) for k, v in self.options.items()})

    @property
    def default_budget(self) -> Budget:
        return Budget(self.budget_kind, self.budget)

    @property
    def display_name(self) -> str:
        if self.name:
            return self.name
        return "stub" if self.path == BUILTIN_STUB else os.path.basename(self.path)

    def with_budget(self, kind: str, amount: int) -> "EngineConfig":
        return replace(self, budget_kind=kind, budget=amount)

    def to_dict(self) -> dict:
        return {"path": self.path, "args": list(self.args), "options": dict(self.options),
                "budget_kind": self.budget_kind, "budget": self.budget,
                "reset_policy": self.reset_policy, "name": self.name}

    @classmethod
    def from_dict(cls, data: dict) -> "EngineConfig":
        data = dict(data)
        if isinstance(data.get("args"), str):
            data["args"] = shlex.split(data["args"])
        return cls(**data)


def stub_config(depth: int = 1, *, in_process: bool = True, fault: str | None = None,
                reset_policy: str = "newgame_per_query", name: str | None = None) -> EngineConfig:
    """Config for the bundled stub engine with a ``depth`` budget."""
    args = ["--depth", str(depth)]
    if fault:
        args += ["--fault", fault]
    if in_process:
        path = BUILTIN_STUB
    else:
        import sys
        path, args = sys.executable, ["-m", "mpcmc.stub"] + args
    return EngineConfig(path, tuple(args), budget_kind="depth", budget=depth,
                        reset_policy=reset_policy, name=name or f"stub-d{depth}")


@dataclass(frozen=True)
class SearchResult:
    best_move: Move
    score: Score
    depth: int = 0
    nodes: int = 0
    pv: tuple[Move, ...] = ()


# --- transports -----------------------------------------------------------


class _Transport:
    """Line pipes to a running engine plus a reader thread feeding a queue."""

    def __init__(self, writer: IO[str], reader: IO[str]):
        self.writer = writer
        self.lines: queue.Queue[str | None] = queue.Queue()
        self._reader = threading.Thread(target=self._pump, args=(reader,), daemon=True)
        self._reader.start()

    def _pump(self, reader: IO[str]) -> None:
        try:
            for line in reader:
                self.lines.put(line.rstrip("\r\n"))
        except (OSError, ValueError):
            pass
        finally:
            self.lines.put(None)

    def send(self, line: str) -> None:
        self.writer.write(line + "\n")
        self.writer.flush()

    def alive(self) -> bool:
        raise NotImplementedError

    def close(self, grace: float) -> int | None:
        raise NotImplementedError


class _ProcessTransport(_Transport):
    def __init__(self, argv: list[str]):
        try:
            self.proc = subprocess.Popen(
                argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, stderr=subprocess.DEVNULL,
                text=True, bufsize=1,
            )
        except OSError as exc:
            raise SpawnFailed(f"cannot start {argv[0]!r}: {exc}") from exc
        super().__init__(self.proc.stdin, self.proc.stdout)

    def alive(self) -> bool:
        return self.proc.poll() is None

    def close(self, grace: float) -> int | None:
        try:
            self.proc.stdin.close()
        except OSError:
            pass
        try:
            return self.proc.wait(timeout=grace)
        except subprocess.TimeoutExpired:
            self.proc.kill()
            return self.proc.wait()


class _ThreadTransport(_Transport):
    """The stub's UCI loop on a daemon thread, connected through OS pipes."""

    def __init__(self, args: tuple[str, ...]):
        from ..stub.__main__ import params_from_args
        from ..stub.loop import uci_loop

        try:
            params = params_from_args(list(args))
        except (SystemExit, ValueError) as exc:
            raise SpawnFailed(f"bad stub arguments {args!r}") from exc
        in_r, in_w = os.pipe()
        out_r, out_w = os.pipe()
        engine_in = io.open(in_r, "r", encoding="utf-8")
        engine_out = io.open(out_w, "w", encoding="utf-8")

        def run():
            try:
                uci_loop(engine_in, engine_out, params)
            except Exception:  # a crashing stub must look like a crashed process
                log.exception("in-process stub failed")
            finally:
                engine_out.close()
                engine_in.close()

        self.thread = threading.Thread(target=run, daemon=True, name="stub-engine")
        self.thread.start()
        super().__init__(io.open(in_w, "w", encoding="utf-8"), io.open(out_r, "r", encoding="utf-8"))

    def alive(self) -> bool:
        return self.thread.is_alive()

    def close(self, grace: float) -> int | None:
        try:
            self.writer.close()
        except OSError:
            pass
        self.thread.join(timeout=grace)
        return 0 if not self.thread.is_alive() else None


# --- handles --------------------------------------------------------------

_ids = itertools.count(1)


class EngineHandle:
    """One live engine.  Not thread-safe: one query in flight at a time."""

    def __init__(self, config: EngineConfig):
        self.config = config
        self.id = next(_ids)
        self.engine_name: str | None = None
        self.advertised: set[str] = set()
        self.transcript: list[str] = []
        self.queries = 0
        self.closed = False
        self.exit_code: int | None = None
        self._transport: _Transport | None = None

    def __repr__(self) -> str:
        return f"EngineHandle(#{self.id} {self.config.display_name})"

    # low-level I/O

    def _send(self, line: str) -> None:
        if self._transport is None or self.closed:
            raise EngineCrashed(f"{self!r} is not running")
        self.transcript.append("> " + line)
        try:
            self._transport.send(line)
        except (BrokenPipeError, OSError, ValueError) as exc:
            raise EngineCrashed(f"{self!r} stopped accepting input") from exc

    def _recv(self, deadline: float, on_timeout=Timeout) -> str:
        remaining = deadline - time.monotonic()
        try:
            line = self._transport.lines.get(timeout=max(remaining, 0.0))
        except queue.Empty:
            raise on_timeout(f"{self!r} did not answer in time") from None
        if line is None:
            raise EngineCrashed(f"{self!r} exited unexpectedly")
        self.transcript.append("< " + line)
        return line

    def _expect(self, token: str, timeout: float, on_timeout=Timeout) -> list[str]:
        deadline = time.monotonic() + timeout
        seen = []
        while True:
            line = self._recv(deadline, on_timeout)
            seen.append(line)
            if line.strip() == token:
                return seen

    # lifecycle

    def _start(self) -> None:
        cfg = self.config
        if cfg.path == BUILTIN_STUB:
            self._transport = _ThreadTransport(cfg.args)
        else:
            if not os.path.exists(cfg.path) and not _on_path(cfg.path):
                raise SpawnFailed(f"engine executable not found: {cfg.path!r}")
            self._transport = _ProcessTransport([cfg.path, *cfg.args])
        self.closed = False
        self._send("uci")
        for line in self._expect("uciok", cfg.handshake_timeout, HandshakeTimeout):
            parts = line.split()
            if line.startswith("id name "):
                self.engine_name = line[len("id name "):].strip()
            elif parts[:2] == ["option", "name"]:
                rest = line.split(" name ", 1)[1]
                self.advertised.add(rest.split(" type ", 1)[0].strip().lower())
        for name, value in cfg.options.items():
            if name.lower() not in self.advertised:
                self.shutdown()
                raise UnsupportedOption(f"{self.engine_name or cfg.path} has no option {name!r}")
            self._send(f"setoption name {name} value {value}")
        self._send("isready")
        self._expect("readyok", cfg.handshake_timeout, HandshakeTimeout)

    def restart(self) -> None:
        self.shutdown()
        self._start()

    def shutdown(self) -> None:
        """Send ``quit`` and reap the engine; safe to call repeatedly or after a crash."""
        if self._transport is None or self.closed:
            self.closed = True
            return
        try:
            if self._transport.alive():
                self._send("quit")
        except EngineCrashed:
            pass
        self.exit_code = self._transport.close(self.config.grace)
        self.closed = True

    # queries

    def search(self, trajectory: Trajectory, budget: Budget | None = None) -> SearchResult:
        return search(self, trajectory, budget)

    def evaluate(self, trajectory: Trajectory, budget: Budget | None = None) -> Score:
        return evaluate_position(self, trajectory, budget)


def _on_path(name: str) -> bool:
    import shutil
    return os.sep not in name and shutil.which(name) is not None


def launch_engine(config: EngineConfig) -> EngineHandle:
    handle = EngineHandle(config)
    try:
        handle._start()
    except EngineError:
        handle.shutdown()
        raise
    return handle


def shutdown(handle: EngineHandle) -> None:
    handle.shutdown()


def _parse_info(tokens: list[str]) -> dict:
    info: dict = {}
    i = 1
    while i < len(tokens):
        tok = tokens[i]
        if tok in ("depth", "nodes", "seldepth", "time", "nps", "multipv") and i + 1 < len(tokens):
            try:
                info[tok] = int(tokens[i + 1])
            except ValueError:
                raise ProtocolViolation(f"bad {tok} value in info line") from None
            i += 2
        elif tok == "score" and i + 2 < len(tokens):
            try:
                info["score"] = (tokens[i + 1], int(tokens[i + 2]))
            except ValueError:
                raise ProtocolViolation("bad score value in info line") from None
            i += 3
            if i < len(tokens) and tokens[i] in ("lowerbound", "upperbound"):
                info["bound"] = tokens[i]
                i += 1
        elif tok == "pv":
            info["pv"] = tokens[i + 1:]
            break
        elif tok == "string":
            break
        else:
            i += 1
    return info


def search(handle: EngineHandle, trajectory: Trajectory, budget: Budget | None = None) -> SearchResult:
    """Ask the engine for its best move and score at the end of ``trajectory``."""
    final = trajectory.final
    status = ch.terminal_status(final)
    if status.is_terminal:
        raise ValueError(f"cannot search a finished game ({status})")
    cfg = handle.config
    budget = budget or cfg.default_budget

    if cfg.reset_policy == "restart_per_query" and handle.queries > 0:
        handle.restart()
    elif cfg.reset_policy == "newgame_per_query":
        handle._send("ucinewgame")
        handle._send("isready")
        handle._expect("readyok", cfg.handshake_timeout)
    handle.queries += 1

    handle._send(trajectory.position_command())
    handle._send(budget.go_command())
    if budget.kind == "movetime":
        timeout = budget.amount / 1000.0 + cfg.grace
    else:
        timeout = cfg.query_timeout + cfg.grace
    deadline = time.monotonic() + timeout

    last_exact, last_any = None, None
    while True:
        line = handle._recv(deadline)
        tokens = line.split()
        if not tokens:
            continue
        if tokens[0] == "info":
            info = _parse_info(tokens)
            if "score" in info:
                last_any = info
                if "bound" not in info:
                    last_exact = info
        elif tokens[0] == "bestmove":
            if len(tokens) < 2:
                raise ProtocolViolation("bestmove without a move")
            text = tokens[1]
            break
    info = last_exact or last_any
    if info is None:
        raise ProtocolViolation(f"{handle!r} sent bestmove without any score")
    try:
        move = Move.from_uci(text)
    except ValueError:
        raise ProtocolViolation(f"unparseable bestmove {text!r}") from None
    if move not in ch.legal_moves(final):
        raise IllegalBestMove(f"{handle!r} played illegal {text} in {ch.to_fen(final)}")

    side = Color(final.turn)
    kind, value = info["score"]
    try:
        score = Score.from_uci(kind, value, side)
    except ValueError as exc:
        raise ProtocolViolation(str(exc)) from None
    pv = []
    for t in info.get("pv", []):
        try:
            pv.append(Move.from_uci(t))
        except ValueError:
            break
    return SearchResult(move, score, info.get("depth", 0), info.get("nodes", 0), tuple(pv))


def evaluate_position(handle: EngineHandle, trajectory: Trajectory, budget: Budget | None = None) -> Score:
    """E(x): terminal positions are scored directly, others by the engine's own search."""
    final = trajectory.final
    status = ch.terminal_status(final)
    if status.is_terminal:
        return terminal_score(status, Color(final.turn))
    return search(handle, trajectory, budget).score
