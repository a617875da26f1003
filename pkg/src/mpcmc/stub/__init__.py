"""Deterministic, hermetic UCI engine: material evaluation plus exact fixed-depth search."""
from .loop import uci_loop
from .search import DEFAULT_VALUES, StubParams, StubResult, material_eval, negamax_value, search_fixed_depth

__all__ = ["uci_loop", "DEFAULT_VALUES", "StubParams", "StubResult", "material_eval",
           "negamax_value", "search_fixed_depth"]
