"""Player and match configuration, with a JSON file form whose keys mirror the fields."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from ..game.chess import START_FEN, apply_moves, parse_fen
from ..policy.lookahead import LookaheadSpec
from ..uci.client import Budget, EngineConfig

PLAYER_KINDS = ("raw_engine", "mpc")
MODES = ("deterministic", "stochastic")
BUDGET_RULES = ("as_configured", "per_branch_match")
OPENING_POLICIES = ("fixed", "generated")


class ConfigError(ValueError):
    pass


def _budget_dict(b: Budget | None):
    return None if b is None else {"kind": b.kind, "amount": b.amount}


def _budget_from(data) -> Budget | None:
    return None if data is None else Budget(data["kind"], int(data["amount"]))


def lookahead_to_dict(spec: LookaheadSpec) -> dict:
    return {
        "variant": spec.variant,
        "depth": spec.depth,
        "fortified": spec.fortified,
        "prune_width": spec.prune_width,
        "evaluator_budget": _budget_dict(spec.evaluator_budget),
        "nominal_budget": _budget_dict(spec.nominal_budget),
        "parallelism": spec.parallelism,
    }


def lookahead_from_dict(data: dict) -> LookaheadSpec:
    data = dict(data)
    for key in ("evaluator_budget", "nominal_budget"):
        data[key] = _budget_from(data.get(key))
    return LookaheadSpec(**data)


@dataclass(frozen=True)
class PlayerSpec:
    """Either a raw engine or an MPC player built from an evaluator and a nominal opponent."""

    kind: str
    engine: EngineConfig | None = None
    lookahead: LookaheadSpec | None = None
    evaluator: EngineConfig | None = None
    nominal: EngineConfig | None = None
    name: str | None = None

    def __post_init__(self):
        if self.kind not in PLAYER_KINDS:
            raise ConfigError(f"player kind must be one of {PLAYER_KINDS}")
        if self.kind == "raw_engine":
            if self.engine is None:
                raise ConfigError("a raw_engine player needs an engine config")
            if self.lookahead or self.evaluator or self.nominal:
                raise ConfigError("a raw_engine player takes no lookahead, evaluator or nominal")
            return
        if self.lookahead is None or self.evaluator is None:
            raise ConfigError("an mpc player needs a lookahead spec and an evaluator")
        if self.engine is not None:
            raise ConfigError("an mpc player takes evaluator/nominal configs, not engine")
        if self.lookahead.uses_nominal and self.nominal is None:
            raise ConfigError(f"{self.lookahead.variant} needs a nominal opponent engine")
        if not self.lookahead.uses_nominal and self.nominal is not None:
            raise ConfigError("half_step players must not define a nominal engine")

    @classmethod
    def raw(cls, engine: EngineConfig, name: str | None = None) -> "PlayerSpec":
        return cls("raw_engine", engine=engine, name=name)

    @classmethod
    def mpc(cls, lookahead: LookaheadSpec, evaluator: EngineConfig,
            nominal: EngineConfig | None = None, name: str | None = None) -> "PlayerSpec":
        return cls("mpc", lookahead=lookahead, evaluator=evaluator, nominal=nominal, name=name)

    @property
    def is_mpc(self) -> bool:
        return self.kind == "mpc"

    @property
    def display_name(self) -> str:
        if self.name:
            return self.name
        if not self.is_mpc:
            return self.engine.display_name
        tag = {"half_step": "half", "one_step": "one"}.get(self.lookahead.variant,
                                                           f"multi{self.lookahead.depth}")
        fort = "+F" if self.lookahead.fortified else ""
        return f"MPC-{tag}{fort}({self.evaluator.display_name})"

    @property
    def branch_budget(self) -> Budget:
        """The evaluator budget spent on one candidate move."""
        return self.lookahead.evaluator_budget or self.evaluator.default_budget

    @property
    def nominal_budget(self) -> Budget:
        return self.lookahead.nominal_budget or self.nominal.default_budget

    def to_dict(self) -> dict:
        doc: dict = {"kind": self.kind, "name": self.name}
        if self.is_mpc:
            doc["lookahead"] = lookahead_to_dict(self.lookahead)
            doc["evaluator"] = self.evaluator.to_dict()
            doc["nominal"] = None if self.nominal is None else self.nominal.to_dict()
        else:
            doc["engine"] = self.engine.to_dict()
        return doc

    @classmethod
    def from_dict(cls, data: dict) -> "PlayerSpec":
        def cfg(key):
            return None if data.get(key) is None else EngineConfig.from_dict(data[key])

        look = data.get("lookahead")
        return cls(data["kind"], engine=cfg("engine"),
                   lookahead=None if look is None else lookahead_from_dict(look),
                   evaluator=cfg("evaluator"), nominal=cfg("nominal"), name=data.get("name"))


@dataclass(frozen=True)
class Opening:
    """A start FEN plus moves (UCI text) played before the players take over."""

    fen: str = START_FEN
    moves: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(self.moves))
        apply_moves(parse_fen(self.fen), self.moves)  # raises on illegal input

    def to_dict(self) -> dict:
        return {"fen": self.fen, "moves": list(self.moves)}

    @classmethod
    def from_value(cls, value) -> "Opening":
        if isinstance(value, Opening):
            return value
        if isinstance(value, str):
            return cls(START_FEN if value == "startpos" else value)
        if isinstance(value, dict):
            return cls(value.get("fen", START_FEN), tuple(value.get("moves", ())))
        return cls(START_FEN, tuple(value))


@dataclass(frozen=True)
class MatchConfig:
    """Player A is ``white`` and player B is ``black`` in the first game of each pair."""

    white: PlayerSpec
    black: PlayerSpec
    games: int = 2
    alternate_colors: bool = True
    opening_policy: str = "fixed"
    openings: tuple[Opening, ...] = (Opening(),)
    opening_plies: int = 24
    opening_engine: EngineConfig | None = None
    max_plies: int = 400
    mode: str = "deterministic"
    budget_rule: str = "as_configured"
    parallel_games: int = 1
    seed: int = 0
    event: str = "MPC-MC match"
    pgn_path: str | None = None
    trace_path: str | None = None
    records_path: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "openings", tuple(Opening.from_value(o) for o in self.openings))
        if self.games < 1:
            raise ConfigError("games must be >= 1")
        if self.max_plies < 2:
            raise ConfigError("max_plies must be >= 2")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.budget_rule not in BUDGET_RULES:
            raise ConfigError(f"budget_rule must be one of {BUDGET_RULES}")
        if self.opening_policy not in OPENING_POLICIES:
            raise ConfigError(f"opening_policy must be one of {OPENING_POLICIES}")
        if self.opening_policy == "fixed" and not self.openings:
            raise ConfigError("a fixed opening policy needs at least one opening")
        if self.opening_policy == "generated" and (self.opening_plies < 0 or self.opening_plies % 2):
            raise ConfigError("opening_plies must be even and >= 0")
        if self.parallel_games < 1:
            raise ConfigError("parallel_games must be >= 1")
        if self.budget_rule == "per_branch_match":
            if self.white.is_mpc == self.black.is_mpc:
                raise ConfigError("per_branch_match needs exactly one mpc player and one raw engine")
            if self.mode == "deterministic":
                raise ConfigError("per_branch_match applies to the stochastic mode; in deterministic "
                                  "mode the opponent plays at the nominal budget")
        if self.mode == "deterministic" and self.white.is_mpc != self.black.is_mpc:
            mpc, raw = (self.white, self.black) if self.white.is_mpc else (self.black, self.white)
            if mpc.nominal is not None and not _same_engine(mpc.nominal, raw.engine):
                raise ConfigError("deterministic mode needs the raw opponent to be the mpc "
                                  "player's nominal engine")

    @property
    def opening_count(self) -> int:
        """Distinct openings needed: one per color-swapped pair, or one per game."""
        return (self.games + 1) // 2 if self.alternate_colors else self.games

    def to_dict(self) -> dict:
        doc = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, PlayerSpec):
                value = value.to_dict()
            elif isinstance(value, EngineConfig):
                value = value.to_dict()
            elif f.name == "openings":
                value = [o.to_dict() for o in value]
            doc[f.name] = value
        return doc

    @classmethod
    def from_dict(cls, data: dict) -> "MatchConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        data = dict(data)
        try:
            data["white"] = PlayerSpec.from_dict(data["white"])
            data["black"] = PlayerSpec.from_dict(data["black"])
        except KeyError as exc:
            raise ConfigError(f"missing config key {exc}") from None
        if data.get("opening_engine") is not None:
            data["opening_engine"] = EngineConfig.from_dict(data["opening_engine"])
        if "openings" in data:
            data["openings"] = tuple(Opening.from_value(o) for o in data["openings"])
        return cls(**data)


def _same_engine(a: EngineConfig, b: EngineConfig) -> bool:
    return (a.path, a.args, a.options) == (b.path, b.args, b.options)


def load_config(path) -> MatchConfig:
    """Read a JSON match config; relative output paths resolve against the file's directory."""
    path = Path(path)
    with path.open() as fh:
        data = json.load(fh)
    for key in ("pgn_path", "trace_path", "records_path"):
        if data.get(key):
            data[key] = str(path.parent / data[key])
    return MatchConfig.from_dict(data)


def save_config(config: MatchConfig, path) -> None:
    with open(path, "w") as fh:
        json.dump(config.to_dict(), fh, indent=2)
        fh.write("\n")


def materialize(config: MatchConfig) -> MatchConfig:
    """Apply the budget rule: under per_branch_match the raw engine gets one branch's evaluator budget."""
    if config.budget_rule != "per_branch_match":
        return config
    if config.white.is_mpc:
        budget = config.white.branch_budget
        raw = config.black
    else:
        budget = config.black.branch_budget
        raw = config.white
    matched = replace(raw, engine=raw.engine.with_budget(budget.kind, budget.amount))
    if raw is config.white:
        return replace(config, white=matched)
    return replace(config, black=matched)
