from .lookahead import (
    VARIANTS,
    BranchFailed,
    BranchTrace,
    FortificationRecord,
    LookaheadSpec,
    MoveDecision,
    NoLegalMoves,
    fortify,
    select,
    select_half_step,
    select_multistep,
    select_one_step,
)

__all__ = [
    "VARIANTS", "BranchFailed", "BranchTrace", "FortificationRecord", "LookaheadSpec",
    "MoveDecision", "NoLegalMoves", "fortify", "select", "select_half_step",
    "select_multistep", "select_one_step",
]
