import random

import pytest

from mpcmc.game import apply_move, legal_moves, start_position, terminal_status
from mpcmc.uci import EnginePool, stub_config

# acceptance criterion number -> (status, detail); printed after the run
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {status} - {detail}")


def random_positions(count, seed=0, min_plies=4, max_plies=60):
    """Ongoing positions reached by uniformly random play from the start."""
    rng = random.Random(seed)
    found = []
    while len(found) < count:
        pos = start_position()
        for _ in range(rng.randint(min_plies, max_plies)):
            moves = legal_moves(pos)
            if not moves:
                break
            pos = apply_move(pos, rng.choice(moves))
        if not terminal_status(pos).is_terminal:
            found.append(pos)
    return found


@pytest.fixture(scope="session")
def stub1():
    return stub_config(1)


@pytest.fixture(scope="module")
def stub_pools(stub1):
    with EnginePool.launch(stub1, 2) as ev, EnginePool.launch(stub1, 2) as nom:
        yield ev, nom
