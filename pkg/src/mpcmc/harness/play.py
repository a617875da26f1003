"""Playing one game between two players and recording it."""
from __future__ import annotations

import logging
import time
from contextlib import ExitStack
from dataclasses import dataclass, field
from typing import Any

from ..game.chess import CHESS, apply_moves, parse_fen, to_fen
from ..game.trajectory import Trajectory
from ..game.types import Color, DrawReason, TerminalStatus, draw, win
from ..policy.lookahead import BranchFailed, MoveDecision, select
from ..uci.client import Budget, EngineError, launch_engine
from ..uci.pool import EnginePool
from .config import MatchConfig, Opening, PlayerSpec

log = logging.getLogger(__name__)


def result_text(status: TerminalStatus) -> str:
    if status.kind == "win":
        return "1-0" if status.winner is Color.WHITE else "0-1"
    if status.kind == "draw":
        return "1/2-1/2"
    return "*"


@dataclass
class Prediction:
    ply: int
    predicted: str | None
    actual: str


@dataclass
class GameRecord:
    index: int
    white: str
    black: str
    opening: Opening
    moves: list[str] = field(default_factory=list)
    decisions: dict[int, MoveDecision] = field(default_factory=dict)
    predictions: list[Prediction] = field(default_factory=list)
    wall_times: list[float] = field(default_factory=list)
    status: TerminalStatus | None = None
    # None for games ended by the rules; "ply_cap" or "forfeit" otherwise
    adjudication: str | None = None
    diagnostic: str | None = None
    a_is_white: bool = True

    @property
    def result(self) -> str:
        return result_text(self.status)

    @property
    def game_moves(self) -> list[str]:
        return self.moves[len(self.opening.moves):]

    def score_for_a(self) -> float:
        value = self.status.value_for(Color.WHITE if self.a_is_white else Color.BLACK)
        return (value + 1) / 2

    def replay(self, max_plies: int | None = None) -> TerminalStatus:
        """Re-derive the status from the move list alone (plus the recorded forfeit, if any)."""
        pos = apply_moves(parse_fen(self.opening.fen), self.moves)
        status = CHESS.terminal_status(pos)
        if status.is_terminal:
            return status
        if self.adjudication == "forfeit":
            return self.status
        if max_plies is not None and len(self.game_moves) >= max_plies:
            return draw(DrawReason.ADJUDICATED)
        return status

    def final_fen(self) -> str:
        return to_fen(apply_moves(parse_fen(self.opening.fen), self.moves))

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "white": self.white,
            "black": self.black,
            "opening": self.opening.to_dict(),
            "moves": self.moves,
            "result": self.result,
            "status": str(self.status),
            "adjudication": self.adjudication,
            "diagnostic": self.diagnostic,
            "a_is_white": self.a_is_white,
            "wall_times": [round(t, 6) for t in self.wall_times],
            "decisions": {
                str(ply): {"move": str(d.move), "variant": d.variant, "engine_calls": d.engine_calls,
                           "fortification": None if d.fortification is None else d.fortification.outcome}
                for ply, d in self.decisions.items()
            },
            "predictions": [vars(p) for p in self.predictions],
        }

    def trace_rows(self) -> list[dict]:
        rows = []
        for ply, decision in sorted(self.decisions.items()):
            rows.extend(decision.trace_records(str, game=self.index, ply=ply,
                                               player=decision.player.name.lower()))
        return rows


class _RawPlayer:
    def __init__(self, pool: EnginePool, budget: Budget | None):
        self.pool = pool
        self.budget = budget

    def choose(self, traj: Trajectory) -> tuple[Any, MoveDecision | None]:
        with self.pool.acquire() as engine:
            return engine.search(traj, self.budget).best_move, None


class _MpcPlayer:
    def __init__(self, spec: PlayerSpec, evaluator: EnginePool, nominal: EnginePool | None):
        self.spec = spec
        self.evaluator = evaluator
        self.nominal = nominal

    def choose(self, traj: Trajectory) -> tuple[Any, MoveDecision | None]:
        decision = select(traj, self.evaluator, self.nominal, self.spec.lookahead)
        return decision.move, decision


class _LaunchFailed(Exception):
    def __init__(self, color: Color, cause: EngineError):
        super().__init__(f"{type(cause).__name__}: {cause}")
        self.color = color


def _build_players(white: PlayerSpec, black: PlayerSpec, mode: str, stack: ExitStack, launcher):
    owner = Color.WHITE

    def pool(config, size=1):
        try:
            return stack.enter_context(EnginePool.launch(config, size, launcher))
        except EngineError as exc:
            raise _LaunchFailed(owner, exc) from exc

    built: dict[Color, Any] = {}
    shared: dict[Color, EnginePool] = {}
    for color, spec in ((Color.WHITE, white), (Color.BLACK, black)):
        owner = color
        if spec.is_mpc:
            width = spec.lookahead.parallelism
            nominal = pool(spec.nominal, width) if spec.lookahead.uses_nominal else None
            built[color] = _MpcPlayer(spec, pool(spec.evaluator, width), nominal)
            if nominal is not None:
                shared[color.opposite] = nominal
    for color, spec in ((Color.WHITE, white), (Color.BLACK, black)):
        if spec.is_mpc:
            continue
        owner = color
        mpc_opponent = built.get(color.opposite)
        if mode == "deterministic" and color in shared:
            # the nominal engine itself plays, so every prediction is the real reply
            built[color] = _RawPlayer(shared[color], mpc_opponent.spec.nominal_budget)
        else:
            built[color] = _RawPlayer(pool(spec.engine), spec.engine.default_budget)
    return built


def play_game(white: PlayerSpec, black: PlayerSpec, opening: Opening, config: MatchConfig,
              index: int = 0, a_is_white: bool = True, launcher=launch_engine) -> GameRecord:
    """Play from ``opening`` until the rules end the game, the ply cap, or a forfeit."""
    opening = Opening.from_value(opening)
    record = GameRecord(index, white.display_name, black.display_name, opening,
                        moves=list(opening.moves), a_is_white=a_is_white)
    traj = Trajectory.from_fen(opening.fen, opening.moves)
    status = CHESS.terminal_status(traj.final)
    with ExitStack() as stack:
        try:
            players = _build_players(white, black, config.mode, stack, launcher)
        except _LaunchFailed as exc:
            record.status, record.adjudication = win(exc.color.opposite), "forfeit"
            record.diagnostic = f"{exc.color.name.lower()} forfeits: launch failed: {exc}"
            return record
        pending: tuple[int, Any] | None = None
        ply = 0
        while not status.is_terminal:
            if ply >= config.max_plies:
                status = draw(DrawReason.ADJUDICATED)
                record.adjudication = "ply_cap"
                break
            mover = CHESS.side_to_move(traj.final)
            started = time.perf_counter()
            try:
                move, decision = players[mover].choose(traj)
            except (EngineError, BranchFailed) as exc:
                status = win(mover.opposite)
                record.adjudication = "forfeit"
                record.diagnostic = f"{mover.name.lower()} forfeits: {type(exc).__name__}: {exc}"
                log.warning("game %d: %s", index, record.diagnostic)
                break
            record.wall_times.append(time.perf_counter() - started)
            text = CHESS.move_text(move)
            if pending is not None:
                record.predictions.append(Prediction(pending[0], pending[1], text))
                pending = None
            if decision is not None:
                record.decisions[len(record.moves)] = decision
                # forced moves and game-ending moves carry no predicted reply
                reply = decision.chosen_branch.reply
                if reply is not None:
                    pending = (len(record.moves), CHESS.move_text(reply))
            record.moves.append(text)
            traj = traj.extend(move)
            status = CHESS.terminal_status(traj.final)
            ply += 1
    record.status = status
    return record

