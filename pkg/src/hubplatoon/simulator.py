"""Event-triggered coordination loop.

The clock advances one minute per step. Within a tick the order is fixed:
arrivals are recorded, every truck standing at a non-destination hub it
reached this tick solves its plan (ascending truck id, each solve seeing the
board updates of earlier solves in the same tick), then all departures
scheduled for the tick are executed and platoons formed.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import ScenarioInvalid, TruckNotFinished, ZeroTravelTime
from .fleet import PredictionBoard, TruckSpec, TruckState, board_update
from .money import ZERO, Money, money, to_cents
from .network import HubId, Network, PartnerIndex, TruckId, build_partner_index
from .solver import solve_mpc
from .utility import PartnerSetPrediction, WaitPlan, segment_reward

log = logging.getLogger(__name__)

ARRIVE = "ARRIVE"
DECIDE = "DECIDE"
DEPART = "DEPART"
PLATOON_FORM = "PLATOON_FORM"
FINISH = "FINISH"


@dataclass(frozen=True)
class Scenario:
    network: Network
    trucks: Tuple[TruckSpec, ...]
    seed: int = 0


@dataclass(frozen=True)
class Event:
    tick: int
    kind: str
    trucks: Tuple[TruckId, ...]
    hubs: Tuple[HubId, ...]
    solve_ms: Optional[float] = None
    utility_cents: Optional[int] = None


@dataclass(frozen=True)
class Departure:
    truck: TruckId
    hub: HubId
    tick: int
    next_hub: HubId


@dataclass(frozen=True)
class Decision:
    tick: int
    truck: TruckId
    hub_index: int
    plan: WaitPlan
    utility: Money
    partner_sets: PartnerSetPrediction
    solve_ms: float


@dataclass(frozen=True)
class PlatoonRecord:
    segment: Tuple[HubId, HubId]
    departure_tick: int
    members: frozenset
    travel_minutes: int


@dataclass
class TruckMetrics:
    truck: TruckId
    realized_utility: Money = ZERO
    total_wait: int = 0
    travel_minutes: int = 0
    platoon_minutes: int = 0
    solve_durations: List[float] = field(default_factory=list)
    final_arrival: Optional[int] = None

    @property
    def finished(self) -> bool:
        return self.final_arrival is not None

    @property
    def mean_solve_ms(self) -> float:
        d = self.solve_durations
        return sum(d) / len(d) if d else 0.0


@dataclass
class SimulationLog:
    events: List[Event] = field(default_factory=list)
    departures: List[Departure] = field(default_factory=list)
    decisions: List[Decision] = field(default_factory=list)
    platoons: List[PlatoonRecord] = field(default_factory=list)
    trucks: Dict[TruckId, TruckMetrics] = field(default_factory=dict)


@dataclass
class World:
    t_sys: int
    specs: Dict[TruckId, TruckSpec]
    states: Dict[TruckId, TruckState]
    board: PredictionBoard
    index: PartnerIndex
    log: SimulationLog
    rng_seed: int = 0
    timing: bool = True
    arrivals: Dict[int, List[Tuple[TruckId, int]]] = field(default_factory=dict)
    departures: Dict[int, List[TruckId]] = field(default_factory=dict)
    unfinished: set = field(default_factory=set)

    @property
    def finished(self) -> bool:
        return not self.unfinished


def validate_scenario(scenario: Scenario) -> None:
    seen = set()
    for spec in scenario.trucks:
        if spec.id in seen:
            raise ScenarioInvalid(f"duplicate truck id {spec.id}")
        seen.add(spec.id)
        problems = spec.violations()
        for a, b in spec.route.pairs():
            seg = scenario.network.segments.get((a, b))
            if seg is None:
                problems.append(f"route segment {a}->{b} not in network")
        if problems:
            raise ScenarioInvalid(f"truck {spec.id}: " + "; ".join(problems))
        for k, (a, b) in enumerate(spec.route.pairs()):
            if scenario.network.segments[(a, b)].travel_minutes != spec.route.segment_minutes[k]:
                raise ScenarioInvalid(f"truck {spec.id}: travel time on {a}->{b} disagrees with network")


def init_world(scenario: Scenario, timing: bool = True) -> World:
    validate_scenario(scenario)
    specs = {s.id: s for s in sorted(scenario.trucks, key=lambda s: s.id)}
    states = {i: TruckState(0, s.start_tick) for i, s in specs.items()}
    board = PredictionBoard.initial(list(specs.values()))
    index = build_partner_index(s.route for s in specs.values())
    slog = SimulationLog(trucks={i: TruckMetrics(i) for i in specs})
    t0 = min((s.start_tick for s in specs.values()), default=0) - 1
    world = World(t0, specs, states, board, index, slog, scenario.seed, timing)
    for i, s in specs.items():
        world.arrivals.setdefault(s.start_tick, []).append((i, 0))
    world.unfinished = set(specs)
    return world


def decision_set(world: World) -> List[TruckId]:
    out = []
    for i, st in world.states.items():
        if st.arrival_tick == world.t_sys and st.hub_index != world.specs[i].route.n_hubs - 1:
            out.append(i)
    return sorted(out)


def _decide(world: World, i: TruckId) -> None:
    spec, st = world.specs[i], world.states[i]
    res = solve_mpc(spec, st.hub_index, st, world.board, world.index)
    solve_ms = res.solve_ms if world.timing else 0.0
    board_update(world.board, spec, st.hub_index, st.arrival_tick, res.plan, st.wait_used)
    st.committed_departure = st.arrival_tick + res.plan[0]
    world.departures.setdefault(st.committed_departure, []).append(i)
    world.log.trucks[i].solve_durations.append(solve_ms)
    world.log.decisions.append(
        Decision(world.t_sys, i, st.hub_index, res.plan, res.utility, res.partner_sets, solve_ms)
    )
    world.log.events.append(
        Event(world.t_sys, DECIDE, (i,), (spec.route.hubs[st.hub_index],), solve_ms, to_cents(res.utility))
    )


def step(world: World) -> World:
    world.t_sys += 1
    t = world.t_sys
    events = world.log.events

    for i, k in sorted(world.arrivals.pop(t, [])):
        spec, st = world.specs[i], world.states[i]
        st.hub_index, st.arrival_tick, st.committed_departure = k, t, None
        hub = spec.route.hubs[k]
        events.append(Event(t, ARRIVE, (i,), (hub,)))
        if k == spec.route.n_hubs - 1:
            events.append(Event(t, FINISH, (i,), (hub,)))
            world.log.trucks[i].final_arrival = t
            world.unfinished.discard(i)

    for i in decision_set(world):
        _decide(world, i)

    leaving = sorted(world.departures.pop(t, []))
    groups: Dict[Tuple[HubId, HubId], List[TruckId]] = defaultdict(list)
    for i in leaving:
        spec, st = world.specs[i], world.states[i]
        k = st.hub_index
        a, b = spec.route.pair(k)
        st.wait_used += t - st.arrival_tick
        world.board.mark_realized(i, k)
        world.log.departures.append(Departure(i, a, t, b))
        events.append(Event(t, DEPART, (i,), (a, b)))
        world.arrivals.setdefault(t + spec.route.segment_minutes[k], []).append((i, k + 1))
        groups[(a, b)].append(i)
    for pair in sorted(groups):
        if len(groups[pair]) >= 2:
            events.append(Event(t, PLATOON_FORM, tuple(groups[pair]), pair))
    return world


def realize_platoons(departures: Iterable[Departure], network: Optional[Network] = None) -> List[PlatoonRecord]:
    """Group departures by (hub, next hub, tick); groups of two or more are platoons."""
    groups: Dict[Tuple[HubId, HubId, int], set] = defaultdict(set)
    for d in departures:
        groups[(d.hub, d.next_hub, d.tick)].add(d.truck)
    out = []
    for (a, b, tick), members in sorted(groups.items(), key=lambda kv: (kv[0][2], kv[0][0], kv[0][1])):
        if len(members) < 2:
            continue
        minutes = network.segments[(a, b)].travel_minutes if network is not None else 0
        out.append(PlatoonRecord((a, b), tick, frozenset(members), minutes))
    return out


def _platoon_sizes(log: SimulationLog) -> Dict[Tuple[HubId, HubId, int], int]:
    sizes: Dict[Tuple[HubId, HubId, int], int] = defaultdict(int)
    for d in log.departures:
        sizes[(d.hub, d.next_hub, d.tick)] += 1
    return sizes


def realized_utility(spec: TruckSpec, log: SimulationLog) -> Money:
    """Realized platooning share minus waiting cost over the completed trip."""
    metrics = log.trucks.get(spec.id)
    if metrics is None or not metrics.finished:
        raise TruckNotFinished(f"truck {spec.id} has not reached its destination")
    sizes = _platoon_sizes(log)
    minutes = dict(zip(spec.route.pairs(), spec.route.segment_minutes))
    reward = ZERO
    for d in log.departures:
        if d.truck == spec.id:
            n = sizes[(d.hub, d.next_hub, d.tick)]
            reward += segment_reward(spec.xi_per_min, minutes[(d.hub, d.next_hub)], n - 1)
    return reward - money(spec.eps_per_min * metrics.total_wait)


def platooning_rate(spec: TruckSpec, log: SimulationLog) -> float:
    metrics = log.trucks.get(spec.id)
    if metrics is None or not metrics.finished:
        raise TruckNotFinished(f"truck {spec.id} has not reached its destination")
    if metrics.travel_minutes == 0:
        raise ZeroTravelTime(f"truck {spec.id} travelled zero minutes")
    return metrics.platoon_minutes / metrics.travel_minutes


def _finalize(world: World, network: Network) -> SimulationLog:
    slog = world.log
    slog.platoons = realize_platoons(slog.departures, network)
    sizes = _platoon_sizes(slog)
    for i, spec in world.specs.items():
        m = slog.trucks[i]
        if not m.finished:
            continue
        minutes = dict(zip(spec.route.pairs(), spec.route.segment_minutes))
        m.travel_minutes = spec.route.travel_minutes
        m.total_wait = world.states[i].wait_used
        m.platoon_minutes = sum(
            minutes[(d.hub, d.next_hub)]
            for d in slog.departures
            if d.truck == i and sizes[(d.hub, d.next_hub, d.tick)] >= 2
        )
        m.realized_utility = realized_utility(spec, slog)
    return slog


def run_world(scenario: Scenario, timing: bool = True) -> World:
    world = init_world(scenario, timing)
    horizon = max((s.deadline_tick for s in scenario.trucks), default=world.t_sys)
    while not world.finished and world.t_sys < horizon:
        step(world)
    if not world.finished:
        log.warning("clock reached %d with %d trucks en route", horizon, len(world.unfinished))
    _finalize(world, scenario.network)
    return world


def run(scenario: Scenario, timing: bool = True) -> SimulationLog:
    return run_world(scenario, timing).log


# -- log audit --------------------------------------------------------------

def audit(scenario: Scenario, slog: SimulationLog) -> List[str]:
    """List every constraint or bookkeeping violation found in a finished log."""
    specs = {s.id: s for s in scenario.trucks}
    index = build_partner_index(s.route for s in specs.values())
    problems: List[str] = []

    deps: Dict[TruckId, List[Departure]] = defaultdict(list)
    for d in slog.departures:
        deps[d.truck].append(d)
    arrivals: Dict[TruckId, List[Tuple[int, HubId]]] = defaultdict(list)
    for e in slog.events:
        if e.kind == ARRIVE:
            arrivals[e.trucks[0]].append((e.tick, e.hubs[0]))
    decides: Dict[TruckId, List[Decision]] = defaultdict(list)
    for dec in slog.decisions:
        decides[dec.truck].append(dec)

    for i, spec in specs.items():
        route = spec.route
        m = slog.trucks.get(i)
        if m is None or not m.finished:
            problems.append(f"truck {i}: did not finish")
            continue
        arr, dep = arrivals[i], deps[i]
        if [h for _, h in arr] != list(route.hubs):
            problems.append(f"truck {i}: arrival hubs {[h for _, h in arr]} differ from route")
            continue
        if [(d.hub, d.next_hub) for d in dep] != route.pairs():
            problems.append(f"truck {i}: departures do not follow route")
            continue
        if arr[0][0] != spec.start_tick:
            problems.append(f"truck {i}: first arrival {arr[0][0]} != start {spec.start_tick}")
        waits = [d.tick - a for d, (a, _) in zip(dep, arr)]
        for k, u in enumerate(waits):
            if not spec.wait_min <= u <= spec.wait_max_per_hub:
                problems.append(f"truck {i}: wait {u} at hub index {k} out of bounds")
            if arr[k + 1][0] != arr[k][0] + u + route.segment_minutes[k]:
                problems.append(f"truck {i}: arrival recurrence broken at hub index {k}")
        if sum(waits) > spec.wait_budget_total:
            problems.append(f"truck {i}: total wait {sum(waits)} over budget")
        if sum(waits) != m.total_wait:
            problems.append(f"truck {i}: logged total wait {m.total_wait} != {sum(waits)}")
        if arr[-1][0] > spec.deadline_tick:
            problems.append(f"truck {i}: arrived {arr[-1][0]} after deadline {spec.deadline_tick}")
        if m.final_arrival - spec.start_tick - m.travel_minutes != m.total_wait:
            problems.append(f"truck {i}: time conservation broken")
        if m.platoon_minutes > m.travel_minutes:
            problems.append(f"truck {i}: platoon minutes exceed travel minutes")

        dec = decides[i]
        if [(x.tick, x.hub_index) for x in dec] != [(arr[k][0], k) for k in range(route.n_hubs - 1)]:
            problems.append(f"truck {i}: decisions do not match one per non-destination arrival")
        for x in dec:
            for h, members in enumerate(x.partner_sets):
                if not members <= set(index.partners(i, x.hub_index + h)):
                    problems.append(f"truck {i}: predicted partners {sorted(members)} not potential partners")

    membership: Dict[TruckId, set] = defaultdict(set)
    for p in slog.platoons:
        for a in p.members:
            membership[a].add((p.segment, p.departure_tick, p.members))
    for p in slog.platoons:
        for a in p.members:
            for b in p.members:
                if (p.segment, p.departure_tick, p.members) not in membership[b]:
                    problems.append(f"platoon symmetry broken between {a} and {b}")
    if slog.platoons != realize_platoons(slog.departures, scenario.network):
        problems.append("platoon records differ from departure grouping")
    return problems
