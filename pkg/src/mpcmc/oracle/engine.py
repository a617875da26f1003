"""A table-backed engine so the lookahead policies can run on toy games."""
from __future__ import annotations

from ..game.trajectory import Trajectory
from ..game.types import Color
from ..uci.client import SearchResult
from ..uci.score import Score
from .solve import DeterministicPolicy, ValueTable, rank


def table_score(table: ValueTable, key, side_to_move: Color) -> Score:
    """Express an exact (value, distance) entry as an engine score.

    A forced win in ``d`` plies becomes a mate announcement whose ply count
    reproduces ``d`` exactly.
    """
    value, dist = table.values[key], table.distance[key]
    if value == 0:
        return Score.cp(0, side_to_move)
    winner = table.perspective if value > 0 else table.perspective.opposite
    moves = (dist + 1) // 2 if winner == side_to_move else dist // 2
    return Score.mate(moves, winner)


class ExactToyEngine:
    """Answers ``search`` with a fixed policy's move and scores positions from an exact table.

    States where ``policy`` has no entry fall back to the table's own best
    move for the side to move.
    """

    def __init__(self, table: ValueTable, policy: DeterministicPolicy | None = None, name: str = "exact"):
        self.table = table
        self.policy = policy
        self.name = name
        self.queries = 0

    def _key(self, traj: Trajectory):
        return traj.game.state_key(traj.final)

    def evaluate(self, traj: Trajectory, budget=None) -> Score:
        self.queries += 1
        return table_score(self.table, self._key(traj), traj.game.side_to_move(traj.final))

    def search(self, traj: Trajectory, budget=None) -> SearchResult:
        self.queries += 1
        game, state = traj.game, traj.final
        key = self._key(traj)
        stm = game.side_to_move(state)
        if self.policy is not None and key in self.policy.moves:
            move = self.policy.moves[key]
        else:
            move = self._table_move(game, state, stm)
        return SearchResult(move, table_score(self.table, key, stm))

    def _table_move(self, game, state, stm: Color):
        sign = 1 if stm == self.table.perspective else -1
        best_move, best = None, None
        for m in game.legal_moves(state):
            k = game.state_key(game.apply_move(state, m))
            r = rank(sign * self.table.values[k], self.table.distance[k] + 1)
            if best is None or r > best:
                best_move, best = m, r
        return best_move

    def shutdown(self) -> None:
        pass
