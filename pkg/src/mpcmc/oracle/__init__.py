"""Exact solutions of small games, used to check the lookahead policies."""
from .engine import ExactToyEngine, table_score
from .solve import (
    CycleDetected,
    DeterministicPolicy,
    StateSpaceExceeded,
    ValueTable,
    exact_rollout_policy,
    first_legal_policy,
    greedy_policy,
    make_policy,
    minimax_policy,
    policy_value,
    random_policy,
    rank,
    reachable_states,
    solve_fixed_opponent,
    solve_minimax,
)

__all__ = [
    "ExactToyEngine", "table_score", "CycleDetected", "DeterministicPolicy", "StateSpaceExceeded",
    "ValueTable", "exact_rollout_policy", "first_legal_policy", "greedy_policy", "make_policy",
    "minimax_policy", "policy_value", "random_policy", "rank", "reachable_states",
    "solve_fixed_opponent", "solve_minimax",
]
