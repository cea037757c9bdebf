import os
import random
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("thorough", max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_RESULTS: dict[int, tuple[str, str, str]] = {}


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run tests marked slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="slow; run with --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 11):
        if n not in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(f"criterion {n:>2} NOT RUN (slow criteria need --runslow)")
            continue
        status, name, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:>2} {status}: {name} ({detail})")


def random_walk(seed: int, plies: int):
    """Position reached by ``plies`` uniformly random legal moves from the start."""
    from dualmind.board import generate_moves, make_move, start_position

    rng = random.Random(seed)
    pos = start_position()
    for _ in range(plies):
        moves = generate_moves(pos)
        if not moves:
            break
        pos = make_move(pos, rng.choice(sorted(moves)))
    return pos
