"""Move selection by exact first-step lookahead over all legal moves.

Two engine roles are used: a *nominal opponent* predicts the reply to each of
our candidate moves, and a *position evaluator* scores the resulting
positions.  The first layer of lookahead is always exhaustive; pruning only
ever applies to deeper layers.

Engines are taken from :class:`~mpcmc.uci.EnginePool` objects whose members
implement ``search(trajectory, budget)`` and ``evaluate(trajectory, budget)``.
Every value is converted to the mover's (the "player's") point of view with
larger meaning better; mates are measured in plies from the decision point.
"""
from __future__ import annotations

import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Sequence

from ..game.trajectory import Trajectory
from ..game.types import Color
from ..uci.client import Budget
from ..uci.score import Score, root_relative, terminal_score

VARIANTS = ("half_step", "one_step", "multi_step")


class NoLegalMoves(Exception):
    pass


class BranchFailed(Exception):
    """An engine call failed while expanding one branch."""

    def __init__(self, path: Sequence[str], cause: BaseException):
        self.path = list(path)
        self.cause = cause
        super().__init__(f"branch {' '.join(self.path)}: {type(cause).__name__}: {cause}")


@dataclass(frozen=True)
class LookaheadSpec:
    variant: str = "one_step"
    depth: int = 1
    fortified: bool = False
    prune_width: int = 4
    evaluator_budget: Budget | None = None
    nominal_budget: Budget | None = None
    parallelism: int = 1

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.variant == "multi_step" and self.depth < 2:
            raise ValueError("multi_step lookahead needs depth >= 2")
        if self.variant == "one_step" and self.depth != 1:
            object.__setattr__(self, "depth", 1)
        if self.variant == "half_step":
            object.__setattr__(self, "depth", 0)
        if self.prune_width < 1:
            raise ValueError("prune_width must be >= 1")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")

    @classmethod
    def half_step(cls, **kw) -> "LookaheadSpec":
        return cls(variant="half_step", **kw)

    @classmethod
    def one_step(cls, **kw) -> "LookaheadSpec":
        return cls(variant="one_step", **kw)

    @classmethod
    def multi_step(cls, depth: int = 2, **kw) -> "LookaheadSpec":
        return cls(variant="multi_step", depth=depth, **kw)

    @property
    def uses_nominal(self) -> bool:
        return self.variant != "half_step"


@dataclass
class BranchTrace:
    move: Any
    reply: Any = None
    state_key: str = ""
    evaluation: int | None = None
    raw_score: Score | None = None
    nominal_score: Score | None = None
    nominal_value: int | None = None
    terminal: str | None = None
    pruned: bool = False
    chosen: bool = False
    children: list["BranchTrace"] = field(default_factory=list)


@dataclass(frozen=True)
class FortificationRecord:
    base_move: Any
    base_score: Score | None
    base_value: int | None
    candidate_move: Any
    candidate_value: int | None
    outcome: str  # "tie", "base" (evaluator's move played) or "lookahead"


@dataclass
class MoveDecision:
    move: Any
    player: Color
    variant: str
    branches: list[BranchTrace]
    fortification: FortificationRecord | None = None
    engine_calls: int = 0
    wall_time: float = 0.0

    @property
    def chosen_branch(self) -> BranchTrace:
        return next(b for b in self.branches if b.chosen)

    @property
    def lookahead_move(self) -> Any:
        """The lookahead's own choice, before any fortification override."""
        if self.fortification is not None:
            return self.fortification.candidate_move
        return self.move

    @property
    def predicted_reply(self) -> Any:
        return self.chosen_branch.reply

    def branch(self, move: Any) -> BranchTrace:
        return next(b for b in self.branches if b.move == move)

    def trace_records(self, game_text: Callable[[Any], str] = str, **extra) -> list[dict]:
        """Flat, JSON-ready rows, one per branch at every layer."""
        rows: list[dict] = []

        def walk(branches, path, layer):
            for b in branches:
                rows.append({
                    **extra,
                    "layer": layer,
                    "path": path,
                    "move": game_text(b.move),
                    "reply": None if b.reply is None else game_text(b.reply),
                    "raw_score": None if b.raw_score is None else str(b.raw_score),
                    "normalized": b.evaluation,
                    "nominal_normalized": b.nominal_value,
                    "terminal": b.terminal,
                    "pruned": b.pruned,
                    "chosen": b.chosen,
                })
                sub = path + [game_text(b.move)] + ([game_text(b.reply)] if b.reply is not None else [])
                walk(b.children, sub, layer + 1)

        walk(self.branches, [], 1)
        return rows

    def to_json(self, game_text: Callable[[Any], str] = str) -> str:
        doc = {
            "move": game_text(self.move),
            "player": self.player.name.lower(),
            "variant": self.variant,
            "engine_calls": self.engine_calls,
            "branches": self.trace_records(game_text),
        }
        if self.fortification is not None:
            f = self.fortification
            doc["fortification"] = {
                "base_move": game_text(f.base_move),
                "base_score": None if f.base_score is None else str(f.base_score),
                "base_value": f.base_value,
                "candidate_move": game_text(f.candidate_move),
                "candidate_value": f.candidate_value,
                "outcome": f.outcome,
            }
        return json.dumps(doc, indent=2)


# --- machinery ------------------------------------------------------------


class _Session:
    """Engine access and bookkeeping for one select call."""

    def __init__(self, evaluator, nominal, spec: LookaheadSpec, player: Color):
        self.evaluator = evaluator
        self.nominal = nominal
        self.spec = spec
        self.player = player
        self.calls = 0
        self._lock = threading.Lock()

    def _count(self) -> None:
        with self._lock:
            self.calls += 1

    def reply(self, traj: Trajectory):
        with self.nominal.acquire() as engine:
            result = engine.search(traj, self.spec.nominal_budget)
        self._count()
        return result

    def evaluate(self, traj: Trajectory) -> Score:
        with self.evaluator.acquire() as engine:
            score = engine.evaluate(traj, self.spec.evaluator_budget)
        self._count()
        return score

    def best(self, traj: Trajectory):
        with self.evaluator.acquire() as engine:
            result = engine.search(traj, self.spec.evaluator_budget)
        self._count()
        return result

    def run(self, fn: Callable, items: Sequence, paths: Sequence[Sequence[str]]) -> list:
        """Apply ``fn`` to every item, possibly concurrently; results keep input order."""
        def guarded(args):
            item, path = args
            try:
                return fn(item)
            except BranchFailed:
                raise
            except Exception as exc:
                raise BranchFailed(path, exc) from exc

        pairs = list(zip(items, paths))
        if self.spec.parallelism == 1 or len(pairs) <= 1:
            return [guarded(p) for p in pairs]
        with ThreadPoolExecutor(max_workers=self.spec.parallelism) as pool:
            return list(pool.map(guarded, pairs))


def _score_terminal(game, state, player: Color, plies: int) -> tuple[Score, int, str]:
    status = game.terminal_status(state)
    raw = terminal_score(status, game.side_to_move(state))
    return raw, root_relative(raw, player, plies, game.side_to_move(state)), str(status)


def _argmax(branches: Iterable[BranchTrace]) -> BranchTrace | None:
    best = None
    for b in branches:
        if b.pruned or b.evaluation is None:
            continue
        if best is None or b.evaluation > best.evaluation:
            best = b
    return best


def _prepare(trajectory: Trajectory, spec: LookaheadSpec, variant: str):
    if spec.variant != variant:
        raise ValueError(f"spec variant is {spec.variant!r}, expected {variant!r}")
    game = trajectory.game
    state = trajectory.final
    if game.terminal_status(state).is_terminal:
        raise NoLegalMoves("the game is already over")
    moves = list(game.legal_moves(state))
    if not moves:
        raise NoLegalMoves("no legal moves")
    return game, state, moves


def _forced(trajectory: Trajectory, move, player: Color, variant: str, started: float) -> MoveDecision:
    game = trajectory.game
    branch = BranchTrace(move, state_key=str(game.state_key(game.apply_move(trajectory.final, move))),
                         chosen=True)
    return MoveDecision(move, player, variant, [branch], wall_time=time.perf_counter() - started)


# --- selection ------------------------------------------------------------


def select_half_step(trajectory: Trajectory, evaluator, spec: LookaheadSpec) -> MoveDecision:
    """Pick the move whose resulting position the evaluator likes least for the opponent."""
    started = time.perf_counter()
    game, state, moves = _prepare(trajectory, spec, "half_step")
    player = game.side_to_move(state)
    if len(moves) == 1:
        return _forced(trajectory, moves[0], player, "half_step", started)
    session = _Session(evaluator, None, spec, player)
    text = game.move_text

    def expand(move) -> BranchTrace:
        t1 = trajectory.extend(move)
        s1 = t1.final
        branch = BranchTrace(move, state_key=str(game.state_key(s1)))
        if game.terminal_status(s1).is_terminal:
            branch.raw_score, branch.evaluation, branch.terminal = _score_terminal(game, s1, player, 1)
        else:
            branch.raw_score = session.evaluate(t1)
            branch.evaluation = root_relative(branch.raw_score, player, 1, game.side_to_move(s1))
        return branch

    branches = session.run(expand, moves, [[text(m)] for m in moves])
    _argmax(branches).chosen = True
    chosen = next(b for b in branches if b.chosen)
    return MoveDecision(chosen.move, player, "half_step", branches, engine_calls=session.calls,
                        wall_time=time.perf_counter() - started)


def select_one_step(trajectory: Trajectory, evaluator, nominal, spec: LookaheadSpec) -> MoveDecision:
    """Predict the reply to every legal move, evaluate the position after it, pick the best."""
    started = time.perf_counter()
    _prepare(trajectory, spec, "one_step")
    return _select_layers(trajectory, evaluator, nominal, spec, 1, "one_step", started)


def select_multistep(trajectory: Trajectory, evaluator, nominal, spec: LookaheadSpec) -> MoveDecision:
    """``spec.depth`` move pairs of lookahead; layers below the first are pruned to ``prune_width``."""
    started = time.perf_counter()
    _prepare(trajectory, spec, "multi_step")
    return _select_layers(trajectory, evaluator, nominal, spec, spec.depth, "multi_step", started)


@dataclass
class _Node:
    traj: Trajectory
    branch: BranchTrace | None
    path: list[str]


def _select_layers(trajectory: Trajectory, evaluator, nominal, spec: LookaheadSpec,
                   pairs: int, variant: str, started: float) -> MoveDecision:
    game = trajectory.game
    state = trajectory.final
    player = game.side_to_move(state)
    moves = list(game.legal_moves(state))
    if len(moves) == 1:
        return _forced(trajectory, moves[0], player, variant, started)
    session = _Session(evaluator, nominal, spec, player)
    text = game.move_text

    root = BranchTrace(move=None)
    frontier = [_Node(trajectory, root, [])]
    for layer in range(pairs):
        base_ply = 2 * layer
        # every (node, move) pair at this layer, in canonical order
        pending: list[tuple[_Node, BranchTrace, Trajectory]] = []
        for node in frontier:
            for move in game.legal_moves(node.traj.final):
                t1 = node.traj.extend(move)
                branch = BranchTrace(move, state_key=str(game.state_key(t1.final)))
                node.branch.children.append(branch)
                pending.append((node, branch, t1))

        need_reply = []
        for node, branch, t1 in pending:
            s1 = t1.final
            if game.terminal_status(s1).is_terminal:
                branch.raw_score, branch.evaluation, branch.terminal = _score_terminal(
                    game, s1, player, base_ply + 1)
            else:
                need_reply.append((node, branch, t1))
        replies = session.run(lambda item: session.reply(item[2]), need_reply,
                              [n.path + [text(b.move)] for n, b, _ in need_reply])

        after: list[tuple[_Node, BranchTrace, Trajectory]] = []
        for (node, branch, t1), result in zip(need_reply, replies):
            branch.reply = result.best_move
            branch.nominal_score = result.score
            branch.nominal_value = root_relative(result.score, player, base_ply + 1,
                                                 game.side_to_move(t1.final))
            t2 = t1.extend(result.best_move)
            s2 = t2.final
            branch.state_key = str(game.state_key(s2))
            if game.terminal_status(s2).is_terminal:
                branch.raw_score, branch.evaluation, branch.terminal = _score_terminal(
                    game, s2, player, base_ply + 2)
            else:
                after.append((node, branch, t2))

        if layer == pairs - 1:
            scores = session.run(lambda item: session.evaluate(item[2]), after,
                                 [n.path + [text(b.move), text(b.reply)] for n, b, _ in after])
            for (node, branch, t2), score in zip(after, scores):
                branch.raw_score = score
                branch.evaluation = root_relative(score, player, base_ply + 2,
                                                  game.side_to_move(t2.final))
            break

        # keep the best prune_width continuations of each parent for deeper expansion
        frontier = []
        by_parent: dict[int, list[tuple[BranchTrace, Trajectory, list[str]]]] = {}
        for node, branch, t2 in after:
            by_parent.setdefault(id(node), []).append(
                (branch, t2, node.path + [text(branch.move), text(branch.reply)]))
        for group in by_parent.values():
            ranked = sorted(range(len(group)), key=lambda i: -group[i][0].nominal_value)
            keep = set(ranked[: spec.prune_width])
            for i, (branch, t2, path) in enumerate(group):
                if i in keep:
                    frontier.append(_Node(t2, branch, path))
                else:
                    branch.pruned = True

    def backup(branch: BranchTrace) -> None:
        if not branch.children:
            return
        for child in branch.children:
            backup(child)
        best = _argmax(branch.children)
        if best is not None:
            branch.evaluation = best.evaluation
            best.chosen = True

    for b in root.children:
        backup(b)
    chosen = _argmax(root.children)
    chosen.chosen = True
    return MoveDecision(chosen.move, player, variant, root.children, engine_calls=session.calls,
                        wall_time=time.perf_counter() - started)


def select(trajectory: Trajectory, evaluator, nominal, spec: LookaheadSpec) -> MoveDecision:
    """Dispatch on ``spec.variant`` and apply fortification when requested."""
    if spec.variant == "half_step":
        decision = select_half_step(trajectory, evaluator, spec)
    elif spec.variant == "one_step":
        decision = select_one_step(trajectory, evaluator, nominal, spec)
    else:
        decision = select_multistep(trajectory, evaluator, nominal, spec)
    if spec.fortified:
        decision = fortify(trajectory, decision, evaluator, spec)
    return decision


def fortify(trajectory: Trajectory, candidate: MoveDecision, evaluator, spec: LookaheadSpec) -> MoveDecision:
    """Play the evaluator's own move instead when its score strictly beats the lookahead's.

    Both sides of the comparison come from the same evaluator at the same
    budget and are measured in the same root-relative units.
    """
    started = time.perf_counter()
    game = trajectory.game
    state = trajectory.final
    player = game.side_to_move(state)
    chosen = candidate.chosen_branch
    if len(candidate.branches) == 1:
        record = FortificationRecord(candidate.move, None, None, candidate.move, chosen.evaluation, "tie")
        return replace(candidate, fortification=record)

    session = _Session(evaluator, None, spec, player)
    result = session.best(trajectory)
    base_move, base_score = result.best_move, result.score
    base_value = root_relative(base_score, player, 0, player)
    if base_move == candidate.move:
        outcome = "tie"
    elif chosen.evaluation is None or base_value > chosen.evaluation:
        outcome = "base"
    else:
        outcome = "lookahead"
    record = FortificationRecord(base_move, base_score, base_value, candidate.move,
                                 chosen.evaluation, outcome)
    branches = candidate.branches
    move = candidate.move
    if outcome == "base":
        move = base_move
        branches = [replace(b, chosen=b.move == base_move) for b in branches]
    return replace(candidate, move=move, branches=branches, fortification=record,
                   engine_calls=candidate.engine_calls + session.calls,
                   wall_time=candidate.wall_time + time.perf_counter() - started)
