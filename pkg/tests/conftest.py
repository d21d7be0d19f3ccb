from decimal import Decimal

import pytest

from hubplatoon.fleet import PredictionBoard, TruckSpec, TruckState
from hubplatoon.network import build_network, build_partner_index, make_route
from hubplatoon.simulator import Scenario

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def line_net():
    """A -> B -> C with 60-minute legs (A=1, B=2, C=3)."""
    return build_network([1, 2, 3], [(1, 2, 60), (2, 3, 60)])


@pytest.fixture
def example_one(line_net):
    """Truck 1 at A at tick 0; the board says truck 2 leaves A at 10 and B at 80."""
    r1 = make_route(line_net, 1, [1, 2, 3])
    r2 = make_route(line_net, 2, [1, 2, 3])
    spec = TruckSpec(1, r1, start_tick=0, deadline_tick=180, wait_max_per_hub=30,
                     wait_budget_total=60, xi_per_min=Decimal("0.96"), eps_per_min=Decimal("0.75"))
    board = PredictionBoard()
    board.add_truck(r1, [0, 60])
    board.add_truck(r2, [10, 80])
    return spec, TruckState(0, 0), board, build_partner_index([r1, r2])


def two_truck_scenario():
    """End-to-end version of ``example_one``.

    Truck 2 must dwell at least 10 minutes at every hub, so its initial board
    entries (A at 10, B at 80) are exactly the predictions of the solver example.
    """
    net = build_network([1, 2, 3], [(1, 2, 60), (2, 3, 60)])
    t1 = TruckSpec(1, make_route(net, 1, [1, 2, 3]), 0, 180, 30, 60)
    t2 = TruckSpec(2, make_route(net, 2, [1, 2, 3]), 0, 180, 30, 60, wait_min=10)
    return Scenario(net, (t1, t2), seed=0)


@pytest.fixture
def two_trucks():
    return two_truck_scenario()
