"""Command line: ``mpcmc perft|bestmove|match|openings|selfcheck``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from .game.chess import IllegalPosition, MalformedFen, divide, parse_fen, perft
from .game.tictactoe import TICTACTOE
from .game.trajectory import Trajectory
from .game.types import Color, GameError
from .harness.config import ConfigError, load_config
from .harness.match import DuplicateExhaustion, generate_openings, run_match
from .oracle import solve
from .oracle.engine import ExactToyEngine
from .policy.lookahead import BranchFailed, LookaheadSpec, select
from .uci.client import EngineConfig, EngineError, stub_config
from .uci.pool import EnginePool


class UsageError(Exception):
    pass


def engine_arg(text: str, budget_kind: str | None, budget: int | None) -> EngineConfig:
    """``stub`` or ``stub:D`` for the bundled engine, otherwise an executable path."""
    if text == "stub" or text.startswith("stub:"):
        depth = int(text.partition(":")[2] or 1)
        cfg = stub_config(depth)
        if budget_kind == "depth" and budget:
            cfg = cfg.with_budget("depth", budget)
        return cfg
    return EngineConfig(text, budget_kind=budget_kind or "movetime", budget=budget or 100)


def cmd_perft(args) -> int:
    pos = parse_fen(args.fen)
    started = time.perf_counter()
    if args.divide:
        rows = divide(pos, args.depth)
        for move, count in sorted(rows.items(), key=lambda kv: str(kv[0])):
            print(f"{move}: {count}")
        total = sum(rows.values())
    else:
        total = perft(pos, args.depth)
    print(total)
    if args.verbose:
        print(f"# {time.perf_counter() - started:.2f}s", file=sys.stderr)
    return 0


def cmd_bestmove(args) -> int:
    evaluator = engine_arg(args.evaluator, args.budget_kind, args.budget)
    nominal = engine_arg(args.nominal or args.evaluator, args.budget_kind, args.budget)
    kw = dict(fortified=args.fortified, parallelism=args.parallelism, prune_width=args.prune_width)
    if args.variant == "multi_step":
        spec = LookaheadSpec.multi_step(args.depth, **kw)
    else:
        spec = LookaheadSpec(variant=args.variant, **kw)
    traj = Trajectory.from_fen(args.fen, args.moves)
    with EnginePool.launch(evaluator, args.parallelism) as ev:
        if spec.uses_nominal:
            with EnginePool.launch(nominal, args.parallelism) as nom:
                decision = select(traj, ev, nom, spec)
        else:
            decision = select(traj, ev, None, spec)
    if args.json:
        print(decision.to_json())
    else:
        print(f"bestmove {decision.move}")
        chosen = decision.chosen_branch
        print(f"value {chosen.evaluation} reply {chosen.reply} calls {decision.engine_calls}")
        if decision.fortification is not None:
            f = decision.fortification
            print(f"fortify {f.outcome} base {f.base_move} ({f.base_value}) "
                  f"lookahead {f.candidate_move} ({f.candidate_value})")
    return 0


def cmd_match(args) -> int:
    try:
        config = load_config(args.config)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {args.config}")
    except (json.JSONDecodeError, ConfigError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad config {args.config}: {exc}")
    result = run_match(config)
    for r in result.records:
        line = f"game {r.index + 1}: {r.white} vs {r.black} {r.result} ({r.status})"
        if r.diagnostic:
            line += f" [{r.diagnostic}]"
        print(line)
    print(f"score {result.config.white.display_name} vs {result.config.black.display_name}: {result.score}")
    return 0


def cmd_openings(args) -> int:
    engine = engine_arg(args.engine, args.budget_kind, args.budget)
    for line in generate_openings(engine, args.count, args.plies):
        print(" ".join(line))
    return 0


def selfcheck_report() -> list[tuple[str, bool]]:
    """Exact checks on tic-tac-toe: rollout improvement and lookahead/oracle agreement."""
    g = TICTACTOE
    root = g.initial_state()
    out = []
    mm = solve.solve_minimax(g)
    out.append(("minimax value of the empty board is a draw", mm.values[g.state_key(root)] == 0))
    opponents = [solve.minimax_policy(g, Color.BLACK), solve.first_legal_policy(g, Color.BLACK)]
    bases = [solve.first_legal_policy(g, Color.WHITE), solve.greedy_policy(g, Color.WHITE),
             solve.random_policy(g, Color.WHITE, seed=1)]
    for base in bases:
        for opp in opponents:
            jb = solve.policy_value(g, base, opp)
            roll = solve.exact_rollout_policy(g, base, opp, base_values=jb)
            jr = solve.policy_value(g, roll, opp)
            ok = all(jr.rank(k) >= jb.rank(k) for k in jb.values)
            strict = any(jr.rank(k) > jb.rank(k) for k in jb.values)
            out.append((f"rollout of {base.name} vs {opp.name} never worse", ok))
            out.append((f"rollout of {base.name} vs {opp.name} strictly better somewhere", strict))
    base, opp = bases[0], opponents[0]
    jb = solve.policy_value(g, base, opp)
    roll = solve.exact_rollout_policy(g, base, opp, base_values=jb)
    ev, nom = EnginePool([ExactToyEngine(jb, base)]), EnginePool([ExactToyEngine(jb, opp)])
    spec = LookaheadSpec.one_step()
    agree = all(select(Trajectory(jb.states[k], (), g), ev, nom, spec).move == m
                for k, m in roll.moves.items())
    out.append(("one-step lookahead reproduces the exact rollout", agree))
    return out


def cmd_selfcheck(args) -> int:
    report = selfcheck_report()
    for name, ok in report:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return 0 if all(ok for _, ok in report) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mpcmc", description="MPC-MC meta chess engine")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def budget_opts(sp):
        sp.add_argument("--budget-kind", choices=("movetime", "depth", "nodes"))
        sp.add_argument("--budget", type=int, help="amount for --budget-kind")

    sp = sub.add_parser("perft", help="count leaf nodes of the legal move tree")
    sp.add_argument("--fen", default="startpos")
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--divide", action="store_true", help="per-move counts")
    sp.set_defaults(func=cmd_perft)

    sp = sub.add_parser("bestmove", help="one MPC-MC decision for a position")
    sp.add_argument("--fen", default="startpos")
    sp.add_argument("--moves", nargs="*", default=[], help="UCI moves played from --fen")
    sp.add_argument("--variant", choices=("half_step", "one_step", "multi_step"), default="one_step")
    sp.add_argument("--depth", type=int, default=2, help="move pairs for multi_step")
    sp.add_argument("--prune-width", type=int, default=4)
    sp.add_argument("--fortified", action="store_true")
    sp.add_argument("--evaluator", default="stub", help="'stub', 'stub:DEPTH' or an engine path")
    sp.add_argument("--nominal", help="defaults to the evaluator")
    sp.add_argument("--parallelism", type=int, default=1)
    sp.add_argument("--json", action="store_true", help="print the full decision trace")
    budget_opts(sp)
    sp.set_defaults(func=cmd_bestmove)

    sp = sub.add_parser("match", help="run a match from a JSON config file")
    sp.add_argument("--config", required=True)
    sp.set_defaults(func=cmd_match)

    sp = sub.add_parser("openings", help="generate opening lines by engine self-play")
    sp.add_argument("--engine", default="stub")
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--plies", type=int, default=24)
    budget_opts(sp)
    sp.set_defaults(func=cmd_openings)

    sp = sub.add_parser("selfcheck", help="exact oracle checks on tic-tac-toe")
    sp.set_defaults(func=cmd_selfcheck)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"mpcmc: error: {exc}", file=sys.stderr)
        return 2
    except (MalformedFen, IllegalPosition, GameError, ValueError) as exc:
        print(f"mpcmc: error: {exc}", file=sys.stderr)
        return 2
    except (EngineError, BranchFailed, DuplicateExhaustion, OSError) as exc:
        print(f"mpcmc: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
