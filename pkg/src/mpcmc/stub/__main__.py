import argparse
import sys

from .loop import uci_loop
from .search import StubParams


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mpcmc-stub", description="Deterministic UCI stub engine.")
    parser.add_argument("--depth", type=int, default=2, help="search depth used for go movetime/nodes")
    parser.add_argument("--name", default="mpcmc-stub")
    parser.add_argument("--fault", choices=["illegal", "garbage", "crash", "noscore"],
                        help="misbehave on every go (for client tests)")
    return parser


def params_from_args(argv) -> StubParams:
    ns = build_parser().parse_args(argv)
    return StubParams(depth=ns.depth, name=ns.name, fault=ns.fault)


def main(argv=None) -> int:
    uci_loop(sys.stdin, sys.stdout, params_from_args(argv))
    return 0


if __name__ == "__main__":
    sys.exit(main())
