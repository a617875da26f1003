"""Opening generation, match scheduling and scoring."""
from __future__ import annotations

import json
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..game.chess import CHESS, START_FEN
from ..game.trajectory import Trajectory
from ..uci.client import EngineConfig, launch_engine
from .config import MatchConfig, Opening, materialize
from .pgn import export_pgn
from .play import GameRecord, play_game

log = logging.getLogger(__name__)


class DuplicateExhaustion(Exception):
    pass


def _perturbed(config: EngineConfig, attempt: int) -> EngineConfig:
    if attempt == 0:
        return config
    if config.budget_kind == "depth":
        amount = config.budget + attempt
    else:
        amount = max(config.budget + attempt, round(config.budget * (1 + 0.1 * attempt)))
    return config.with_budget(config.budget_kind, amount)


def generate_openings(engine: EngineConfig, count: int, plies: int = 24, max_attempts: int = 8,
                      launcher=launch_engine) -> list[tuple[str, ...]]:
    """``count`` distinct move sequences of ``plies`` half-moves from the engine playing itself.

    A duplicate (or a game that ends early) is thrown away and replayed with a
    perturbed budget, up to ``max_attempts`` times per opening.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if plies < 0 or plies % 2:
        raise ValueError("plies must be even and >= 0")
    if plies == 0:
        return [()]
    found: list[tuple[str, ...]] = []
    seen: set[tuple[str, ...]] = set()
    for _ in range(count):
        for attempt in range(max_attempts):
            cfg = _perturbed(engine, attempt)
            line = _self_play(cfg, plies, launcher)
            if line is not None and line not in seen:
                seen.add(line)
                found.append(line)
                break
        else:
            raise DuplicateExhaustion(
                f"no new opening after {max_attempts} attempts ({len(found)} of {count} found)")
    return found


def _self_play(config: EngineConfig, plies: int, launcher) -> tuple[str, ...] | None:
    handle = launcher(config)
    try:
        traj = Trajectory.from_fen(START_FEN)
        for _ in range(plies):
            if CHESS.terminal_status(traj.final).is_terminal:
                return None
            traj = traj.extend(handle.search(traj, config.default_budget).best_move)
        if CHESS.terminal_status(traj.final).is_terminal:
            return None
        return tuple(CHESS.move_text(m) for m in traj.moves)
    finally:
        handle.shutdown()


@dataclass
class MatchScore:
    """Points for players A and B; ``wins``/``draws``/``losses`` are from A's side."""

    points_a: float = 0.0
    points_b: float = 0.0
    wins: int = 0
    draws: int = 0
    losses: int = 0
    results: list[dict] = field(default_factory=list)

    @classmethod
    def from_outcomes(cls, outcomes) -> "MatchScore":
        """Build from A's per-game outcomes: 1 win, 0.5 draw, 0 loss."""
        score = cls()
        for i, o in enumerate(outcomes):
            score.add(i, float(o))
        return score

    def add(self, index: int, points_a: float, **info) -> None:
        if points_a == 1:
            self.wins += 1
        elif points_a == 0.5:
            self.draws += 1
        elif points_a == 0:
            self.losses += 1
        else:
            raise ValueError(f"a game scores 1, 0.5 or 0, not {points_a}")
        self.points_a += points_a
        self.points_b += 1 - points_a
        self.results.append({"index": index, "points_a": points_a, **info})

    @property
    def games(self) -> int:
        return self.wins + self.draws + self.losses

    @property
    def tally(self) -> str:
        return f"{self.points_a:g}-{self.points_b:g}"

    def __str__(self) -> str:
        return f"{self.tally} (+{self.wins} ={self.draws} -{self.losses})"


@dataclass
class MatchResult:
    score: MatchScore
    records: list[GameRecord]
    config: MatchConfig


def schedule(config: MatchConfig, openings: list[Opening]) -> list[tuple[int, Opening, bool]]:
    """(game index, opening, A plays white) for every game.

    With alternation, games 2i and 2i+1 share an opening with colors swapped.
    The seed only shuffles which opening each pair receives.
    """
    order = list(range(len(openings)))
    random.Random(config.seed).shuffle(order)
    plan = []
    for i in range(config.games):
        slot = i // 2 if config.alternate_colors else i
        a_white = not (config.alternate_colors and i % 2)
        plan.append((i, openings[order[slot % len(order)]], a_white))
    return plan


def resolve_openings(config: MatchConfig, launcher=launch_engine) -> list[Opening]:
    if config.opening_policy == "fixed":
        return list(config.openings)
    engine = config.opening_engine
    if engine is None:
        a = config.white
        engine = a.evaluator if a.is_mpc else a.engine
    lines = generate_openings(engine, config.opening_count, config.opening_plies, launcher=launcher)
    return [Opening(START_FEN, line) for line in lines]


def run_match(config: MatchConfig, launcher=launch_engine) -> MatchResult:
    """Play every scheduled game, score it 1 / 0.5 / 0 and write the configured outputs."""
    config = materialize(config)
    plan = schedule(config, resolve_openings(config, launcher))

    def one(item) -> GameRecord:
        index, opening, a_white = item
        a, b = config.white, config.black
        white, black = (a, b) if a_white else (b, a)
        return play_game(white, black, opening, config, index=index, a_is_white=a_white,
                         launcher=launcher)

    if config.parallel_games == 1:
        records = [one(item) for item in plan]
    else:
        with ThreadPoolExecutor(max_workers=config.parallel_games) as pool:
            records = list(pool.map(one, plan))
    records.sort(key=lambda r: r.index)

    score = MatchScore()
    for r in records:
        score.add(r.index, r.score_for_a(), result=r.result, a_is_white=r.a_is_white,
                  termination=r.adjudication or "normal")
    _persist(config, records)
    return MatchResult(score, records, config)


def _persist(config: MatchConfig, records: list[GameRecord]) -> None:
    if config.pgn_path:
        export_pgn(records, config.pgn_path, config.event)
    if config.trace_path:
        with open(config.trace_path, "w") as fh:
            for r in records:
                for row in r.trace_rows():
                    fh.write(json.dumps(row, sort_keys=True) + "\n")
    if config.records_path:
        with open(config.records_path, "w") as fh:
            for r in records:
                fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")
