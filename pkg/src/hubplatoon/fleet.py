"""Truck specifications, hub-to-hub arrival dynamics and the shared prediction board."""

from __future__ import annotations

import copy
from dataclasses import dataclass
from decimal import Decimal
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .errors import InfeasiblePlan, InvalidTruckSpec
from .network import HubId, Pair, Route, TruckId


@dataclass(frozen=True)
class TruckSpec:
    id: TruckId
    route: Route
    start_tick: int
    deadline_tick: int
    wait_max_per_hub: int = 30
    wait_budget_total: int = 60
    xi_per_min: Decimal = Decimal("0.96")
    eps_per_min: Decimal = Decimal("0.75")
    wait_min: int = 0

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise InvalidTruckSpec(f"truck {self.id}: " + "; ".join(problems))

    def violations(self) -> List[str]:
        out = []
        n_dec = self.route.n_hubs - 1
        if self.route.truck != self.id:
            out.append(f"route belongs to truck {self.route.truck}")
        if self.start_tick < 0:
            out.append("start_tick must be non-negative")
        if self.wait_min < 0:
            out.append("wait_min must be non-negative")
        if self.wait_min > self.wait_max_per_hub:
            out.append("wait_min exceeds wait_max_per_hub")
        if self.wait_budget_total < n_dec * self.wait_min:
            out.append("wait_budget_total below the mandatory minimum waits")
        if self.xi_per_min < 0 or self.eps_per_min < 0:
            out.append("cost rates must be non-negative")
        earliest = self.start_tick + self.route.travel_minutes + n_dec * self.wait_min
        if self.deadline_tick < earliest:
            out.append(
                f"deadline_tick {self.deadline_tick} before earliest possible arrival {earliest}"
            )
        return out

    @property
    def n_decisions(self) -> int:
        return self.route.n_hubs - 1


@dataclass
class TruckState:
    hub_index: int
    arrival_tick: int
    wait_used: int = 0
    committed_departure: Optional[int] = None


def advance(arrival: int, wait: int, travel: int) -> int:
    """Arrival tick at the next hub given arrival, wait and travel at the current one."""
    if wait < 0 or travel <= 0:
        raise ValueError("wait must be >= 0 and travel > 0")
    return arrival + wait + travel


def roll_forward(route: Route, k: int, arrival: int, waits: Sequence[int]) -> List[int]:
    """Departure ticks at hubs k, k+1, ... implied by ``waits``."""
    out = []
    t = arrival
    for h, u in enumerate(waits):
        out.append(t + u)
        if k + h < route.n_hubs - 2:
            t = advance(t, u, route.segment_minutes[k + h])
    return out


def zero_wait_trajectory(spec: TruckSpec) -> List[Tuple[HubId, int, HubId]]:
    route = spec.route
    deps = roll_forward(route, 0, spec.start_tick, [0] * spec.n_decisions)
    return [(route.hubs[k], d, route.hubs[k + 1]) for k, d in enumerate(deps)]


def minimum_wait_plan(spec: TruckSpec, k: int = 0) -> Tuple[int, ...]:
    return (spec.wait_min,) * (spec.n_decisions - k)


def plan_violations(spec: TruckSpec, k: int, state: TruckState, waits: Sequence[int]) -> List[str]:
    out = []
    if len(waits) != spec.n_decisions - k:
        out.append(f"plan has {len(waits)} waits, expected {spec.n_decisions - k}")
        return out
    for h, u in enumerate(waits):
        if not spec.wait_min <= u <= spec.wait_max_per_hub:
            out.append(f"wait {u} at hub index {k + h} outside [{spec.wait_min}, {spec.wait_max_per_hub}]")
    if state.wait_used + sum(waits) > spec.wait_budget_total:
        out.append(f"total wait {state.wait_used + sum(waits)} exceeds budget {spec.wait_budget_total}")
    final = state.arrival_tick + sum(waits) + sum(spec.route.segment_minutes[k:])
    if final > spec.deadline_tick:
        out.append(f"final arrival {final} after deadline {spec.deadline_tick}")
    return out


def check_plan(spec: TruckSpec, k: int, state: TruckState, waits: Sequence[int]) -> None:
    problems = plan_violations(spec, k, state, waits)
    if problems:
        raise InfeasiblePlan(f"truck {spec.id}: " + "; ".join(problems))


@dataclass
class BoardEntry:
    hub: HubId
    next_hub: HubId
    departure: int
    realized: bool = False


class PredictionBoard:
    """Predicted (and realized) hub departure ticks of every truck.

    Public keys are ``(truck, hub, ordinal)`` where ``ordinal`` counts earlier
    visits of the same hub along the truck's route. Internally entries are
    stored by route position and indexed by directed hub pair.
    """

    def __init__(self):
        self._routes: Dict[TruckId, Route] = {}
        self._rows: Dict[TruckId, List[BoardEntry]] = {}
        self._by_pair: Dict[Pair, Dict[TruckId, int]] = {}

    @classmethod
    def initial(cls, specs: Sequence[TruckSpec]) -> "PredictionBoard":
        """Board seeded with every truck's minimum-wait trajectory (all zeros by default)."""
        board = cls()
        for spec in specs:
            board.add_truck(spec.route, roll_forward(spec.route, 0, spec.start_tick, minimum_wait_plan(spec)))
        return board

    def add_truck(self, route: Route, departures: Sequence[int]) -> None:
        if len(departures) != route.n_hubs - 1:
            raise ValueError("one departure per non-destination hub required")
        truck = route.truck
        self._routes[truck] = route
        self._rows[truck] = [
            BoardEntry(route.hubs[k], route.hubs[k + 1], d) for k, d in enumerate(departures)
        ]
        for k, d in enumerate(departures):
            self._by_pair.setdefault(route.pair(k), {})[truck] = d

    def set_departure(self, truck: TruckId, k: int, tick: int) -> None:
        entry = self._rows[truck][k]
        if entry.realized:
            raise InfeasiblePlan(f"truck {truck} already left hub index {k}")
        entry.departure = tick
        self._by_pair[(entry.hub, entry.next_hub)][truck] = tick

    def mark_realized(self, truck: TruckId, k: int) -> None:
        self._rows[truck][k].realized = True

    def row(self, truck: TruckId) -> List[BoardEntry]:
        return self._rows[truck]

    def departure_at(self, truck: TruckId, k: int) -> int:
        return self._rows[truck][k].departure

    def departures_on(self, pair: Pair) -> Dict[TruckId, int]:
        """Board departure tick of every truck whose route contains ``pair``."""
        return self._by_pair.get(pair, {})

    def entries(self) -> Dict[Tuple[TruckId, HubId, int], BoardEntry]:
        out = {}
        for truck, row in self._rows.items():
            seen: Dict[HubId, int] = {}
            for e in row:
                ordinal = seen.get(e.hub, 0)
                seen[e.hub] = ordinal + 1
                out[(truck, e.hub, ordinal)] = e
        return out

    def __iter__(self) -> Iterator[TruckId]:
        return iter(self._rows)

    def snapshot(self) -> "PredictionBoard":
        return copy.deepcopy(self)


def board_update(
    board: PredictionBoard,
    spec: TruckSpec,
    current_k: int,
    arrival: int,
    plan: Sequence[int],
    wait_used: int = 0,
) -> PredictionBoard:
    """Overwrite the truck's entries from ``current_k`` onward with the plan's departures."""
    state = TruckState(current_k, arrival, wait_used)
    check_plan(spec, current_k, state, plan)
    for h, d in enumerate(roll_forward(spec.route, current_k, arrival, plan)):
        board.set_departure(spec.id, current_k + h, d)
    return board


def departure_of(
    board: PredictionBoard,
    truck: TruckId,
    hub: HubId,
    toward: Optional[HubId] = None,
    window: Optional[Tuple[int, int]] = None,
) -> Optional[int]:
    """Board departure of ``truck`` from ``hub`` (toward ``toward`` if given), optionally within ``window``.

    When the truck passes ``hub`` more than once, the first occurrence whose
    departure lies inside the inclusive ``window`` is returned.
    """
    if truck not in board._rows:
        return None
    for e in board.row(truck):
        if e.hub != hub or (toward is not None and e.next_hub != toward):
            continue
        if window is None or window[0] <= e.departure <= window[1]:
            return e.departure
    return None
