"""Exact dynamic programming on small games.

Values are +1 / 0 / -1 for the table's ``perspective`` color, with the number
of plies to the end of the game kept alongside.  Outcomes are ranked win >
draw > loss, faster wins and slower losses first.
"""
from __future__ import annotations

import json
import random
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable

from ..game.types import Color, Game


class StateSpaceExceeded(Exception):
    pass


class CycleDetected(Exception):
    pass


DEFAULT_LIMIT = 10**7


def rank(value: int, distance: int) -> tuple[int, int]:
    """Sort key for an outcome: larger is better for the perspective color."""
    if value > 0:
        return (1, -distance)
    if value < 0:
        return (-1, distance)
    return (0, 0)


@dataclass
class ValueTable:
    perspective: Color
    values: dict[Hashable, int] = field(default_factory=dict)
    distance: dict[Hashable, int] = field(default_factory=dict)
    states: dict[Hashable, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.values)

    def __contains__(self, key) -> bool:
        return key in self.values

    def set(self, key, state, value: int, distance: int) -> None:
        self.values[key] = value
        self.distance[key] = distance
        self.states[key] = state

    def value(self, key) -> int:
        return self.values[key]

    def rank(self, key) -> tuple[int, int]:
        return rank(self.values[key], self.distance[key])

    def export(self, path) -> None:
        """Write ``{"perspective", "states": [{"key", "value", "distance"}, ...]}`` as JSON."""
        doc = {
            "perspective": self.perspective.name.lower(),
            "states": [
                {"key": str(k), "value": self.values[k], "distance": self.distance[k]}
                for k in sorted(self.values, key=str)
            ],
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ValueTable":
        with open(path) as fh:
            doc = json.load(fh)
        table = cls(Color.WHITE if doc["perspective"] == "white" else Color.BLACK)
        for row in doc["states"]:
            table.values[row["key"]] = row["value"]
            table.distance[row["key"]] = row["distance"]
        return table


@dataclass
class DeterministicPolicy:
    """A fixed move choice for every reachable, ongoing state where ``color`` is to move."""

    game: Game
    color: Color
    moves: dict[Hashable, Any]
    name: str = "policy"

    def __call__(self, state) -> Any:
        return self.moves[self.game.state_key(state)]

    def __len__(self) -> int:
        return len(self.moves)


def reachable_states(game: Game, root=None, limit: int = DEFAULT_LIMIT) -> dict[Hashable, Any]:
    """Every state reachable from ``root`` under any play, keyed by ``game.state_key``."""
    root = game.initial_state() if root is None else root
    seen = {game.state_key(root): root}
    stack = [root]
    while stack:
        state = stack.pop()
        if game.terminal_status(state).is_terminal:
            continue
        for m in game.legal_moves(state):
            child = game.apply_move(state, m)
            key = game.state_key(child)
            if key not in seen:
                seen[key] = child
                if len(seen) > limit:
                    raise StateSpaceExceeded(f"more than {limit} states")
                stack.append(child)
    return seen


def make_policy(game: Game, color: Color, chooser: Callable[[Any], Any], name: str = "policy",
                root=None) -> DeterministicPolicy:
    moves = {}
    for key, state in reachable_states(game, root).items():
        if game.side_to_move(state) == color and not game.terminal_status(state).is_terminal:
            moves[key] = chooser(state)
    return DeterministicPolicy(game, color, moves, name)


class _Recursion:
    def __enter__(self):
        self.old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(self.old, 10_000))

    def __exit__(self, *exc):
        sys.setrecursionlimit(self.old)


def _terminal(game: Game, state, perspective: Color):
    status = game.terminal_status(state)
    if status.is_terminal:
        return status.value_for(perspective)
    return None


def solve_minimax(game: Game, root=None, perspective: Color = Color.WHITE,
                  limit: int = DEFAULT_LIMIT) -> ValueTable:
    """Game-theoretic value of every state reachable from ``root``, both sides playing best."""
    root = game.initial_state() if root is None else root
    table = ValueTable(perspective)

    def solve(state):
        key = game.state_key(state)
        if key in table.values:
            return table.rank(key)
        v = _terminal(game, state, perspective)
        if v is not None:
            table.set(key, state, v, 0)
        else:
            maximize = game.side_to_move(state) == perspective
            best = None
            for m in game.legal_moves(state):
                child = game.apply_move(state, m)
                solve(child)
                ck = game.state_key(child)
                cand = (table.values[ck], table.distance[ck] + 1)
                if best is None or (rank(*cand) > rank(*best) if maximize else rank(*cand) < rank(*best)):
                    best = cand
            table.set(key, state, *best)
        if len(table) > limit:
            raise StateSpaceExceeded(f"more than {limit} states")
        return table.rank(key)

    with _Recursion():
        solve(root)
    return table


def solve_fixed_opponent(game: Game, opponent: DeterministicPolicy, player: Color, root=None,
                         limit: int = DEFAULT_LIMIT) -> ValueTable:
    """Optimal values for ``player`` when the opponent always plays ``opponent``.

    Covers every state reachable with arbitrary player moves and the fixed
    opponent's replies.
    """
    root = game.initial_state() if root is None else root
    table = ValueTable(player)

    def solve(state):
        key = game.state_key(state)
        if key in table.values:
            return
        v = _terminal(game, state, player)
        if v is not None:
            table.set(key, state, v, 0)
        elif game.side_to_move(state) == player:
            best = None
            for m in game.legal_moves(state):
                child = game.apply_move(state, m)
                solve(child)
                ck = game.state_key(child)
                cand = (table.values[ck], table.distance[ck] + 1)
                if best is None or rank(*cand) > rank(*best):
                    best = cand
            table.set(key, state, *best)
        else:
            child = game.apply_move(state, opponent(state))
            solve(child)
            ck = game.state_key(child)
            table.set(key, state, table.values[ck], table.distance[ck] + 1)
        if len(table) > limit:
            raise StateSpaceExceeded(f"more than {limit} states")

    with _Recursion():
        solve(root)
    return table


def policy_value(game: Game, policy: DeterministicPolicy, opponent: DeterministicPolicy,
                 player: Color | None = None, root=None, limit: int = DEFAULT_LIMIT) -> ValueTable:
    """Outcome of ``policy`` vs ``opponent`` from every reachable state, for ``policy.color``."""
    player = policy.color if player is None else player
    table = ValueTable(player)
    states = reachable_states(game, root, limit)

    def follow(state):
        path = []
        on_path = set()
        while True:
            key = game.state_key(state)
            if key in table.values:
                v, d = table.values[key], table.distance[key]
                break
            if key in on_path:
                raise CycleDetected(f"closed loop revisits {key}")
            v = _terminal(game, state, player)
            if v is not None:
                d = 0
                table.set(key, state, v, 0)
                break
            path.append((key, state))
            on_path.add(key)
            mover = policy if game.side_to_move(state) == policy.color else opponent
            state = game.apply_move(state, mover(state))
        for key, st in reversed(path):
            d += 1
            table.set(key, st, v, d)

    for state in states.values():
        follow(state)
    return table


def _one_pair(game: Game, state, move, opponent: DeterministicPolicy):
    """Apply ``move`` and, unless the game ended, the opponent's reply; returns (state, plies)."""
    s1 = game.apply_move(state, move)
    if game.terminal_status(s1).is_terminal:
        return s1, 1
    return game.apply_move(s1, opponent(s1)), 2


def exact_rollout_policy(game: Game, base: DeterministicPolicy, opponent: DeterministicPolicy,
                         player: Color | None = None, root=None, depth: int = 1,
                         base_values: ValueTable | None = None) -> DeterministicPolicy:
    """Rollout of ``base``: at each state pick the move whose predicted continuation the base policy scores best.

    ``depth`` move pairs are expanded exhaustively (with the opponent's fixed
    replies) before the base policy's exact value is used.  Ties go to the
    first move in canonical order.
    """
    player = base.color if player is None else player
    values = base_values or policy_value(game, base, opponent, player, root)

    def lookahead(state, pairs_left: int, plies: int) -> tuple[int, int]:
        best = None
        for m in game.legal_moves(state):
            r = _pair_rank(state, m, pairs_left, plies)
            if best is None or r > best:
                best = r
        return best

    def _pair_rank(state, move, pairs_left: int, plies: int) -> tuple[int, int]:
        nxt, used = _one_pair(game, state, move, opponent)
        status = game.terminal_status(nxt)
        if status.is_terminal:
            return rank(status.value_for(player), plies + used)
        if pairs_left == 1:
            key = game.state_key(nxt)
            return rank(values.values[key], plies + used + values.distance[key])
        return lookahead(nxt, pairs_left - 1, plies + used)

    def choose(state):
        best_move, best = None, None
        for m in game.legal_moves(state):
            r = _pair_rank(state, m, depth, 0)
            if best is None or r > best:
                best_move, best = m, r
        return best_move

    name = f"rollout({base.name})" if depth == 1 else f"rollout{depth}({base.name})"
    return make_policy(game, player, choose, name, root)


# --- stock policies for toy games -----------------------------------------


def first_legal_policy(game: Game, color: Color, root=None) -> DeterministicPolicy:
    return make_policy(game, color, lambda s: game.legal_moves(s)[0], "first-legal", root)


def random_policy(game: Game, color: Color, seed: int = 0, root=None) -> DeterministicPolicy:
    """A fixed policy drawn once at random; the same seed gives the same policy."""
    rng = random.Random(seed)
    states = reachable_states(game, root)
    moves = {}
    for key in sorted(states, key=str):
        state = states[key]
        if game.side_to_move(state) == color and not game.terminal_status(state).is_terminal:
            moves[key] = rng.choice(list(game.legal_moves(state)))
    return DeterministicPolicy(game, color, moves, f"random({seed})")


def greedy_policy(game: Game, color: Color, root=None) -> DeterministicPolicy:
    """One-ply greedy: win now if possible, else stop an immediate loss, else the first move."""

    def choose(state):
        moves = list(game.legal_moves(state))
        for m in moves:
            if game.terminal_status(game.apply_move(state, m)).value_for(color) > 0:
                return m
        for m in moves:
            after = game.apply_move(state, m)
            if game.terminal_status(after).is_terminal:
                continue
            if not any(game.terminal_status(game.apply_move(after, r)).value_for(color) < 0
                       for r in game.legal_moves(after)):
                return m
        return moves[0]

    return make_policy(game, color, choose, "greedy", root)


def minimax_policy(game: Game, color: Color, root=None, table: ValueTable | None = None) -> DeterministicPolicy:
    """Best play by the minimax table: fastest win, else draw, else slowest loss."""
    table = table or solve_minimax(game, root, perspective=color)

    def choose(state):
        best_move, best = None, None
        for m in game.legal_moves(state):
            key = game.state_key(game.apply_move(state, m))
            r = rank(table.values[key], table.distance[key] + 1)
            if best is None or r > best:
                best_move, best = m, r
        return best_move

    return make_policy(game, color, choose, "minimax", root)
