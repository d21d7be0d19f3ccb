"""Hub graph, fixed truck routes and the offline potential-partner index.

Routes are stored as sequences of physical hub ids, so the k-th hub of a
truck's route is simply ``route.hubs[k]``.
"""

from __future__ import annotations

import heapq
import json
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import (
    DuplicateHub,
    IndexOutOfRange,
    InvalidRoute,
    NonPositiveTravelTime,
    UnknownEndpoint,
    Unreachable,
)

HubId = int
TruckId = int
Pair = Tuple[HubId, HubId]


@dataclass(frozen=True)
class Hub:
    id: HubId
    name: str = ""
    lat: Optional[float] = None
    lon: Optional[float] = None


@dataclass(frozen=True)
class Segment:
    src: HubId
    dst: HubId
    travel_minutes: int


@dataclass(frozen=True)
class Network:
    hubs: Mapping[HubId, Hub]
    segments: Mapping[Pair, Segment]
    _out: Mapping[HubId, Tuple[Tuple[HubId, int], ...]] = field(
        default=None, repr=False, compare=False
    )

    def __contains__(self, hub: HubId) -> bool:
        return hub in self.hubs

    def travel(self, src: HubId, dst: HubId) -> int:
        try:
            return self.segments[(src, dst)].travel_minutes
        except KeyError:
            raise InvalidRoute(f"no segment {src}->{dst} in network") from None

    def successors(self, hub: HubId) -> Tuple[Tuple[HubId, int], ...]:
        return self._out.get(hub, ())


def build_network(hubs: Sequence, segments: Sequence) -> Network:
    """Validate hubs and segments and assemble a :class:`Network`.

    ``hubs`` may hold :class:`Hub` objects or bare integer ids; ``segments``
    may hold :class:`Segment` objects or ``(src, dst, minutes)`` triples.
    """
    if not hubs:
        raise ValueError("network needs at least one hub")
    hub_map: Dict[HubId, Hub] = {}
    for h in hubs:
        if not isinstance(h, Hub):
            h = Hub(int(h))
        if h.id in hub_map:
            raise DuplicateHub(f"hub {h.id} listed twice")
        if h.id < 1:
            raise ValueError(f"hub ids start at 1, got {h.id}")
        hub_map[h.id] = h

    seg_map: Dict[Pair, Segment] = {}
    out: Dict[HubId, List[Tuple[HubId, int]]] = defaultdict(list)
    for s in segments:
        if not isinstance(s, Segment):
            s = Segment(*s)
        for end in (s.src, s.dst):
            if end not in hub_map:
                raise UnknownEndpoint(f"segment {s.src}->{s.dst} references unknown hub {end}")
        if s.src == s.dst:
            raise InvalidRoute(f"self-loop segment at hub {s.src}")
        if s.travel_minutes <= 0:
            raise NonPositiveTravelTime(
                f"segment {s.src}->{s.dst} has travel time {s.travel_minutes}"
            )
        if (s.src, s.dst) in seg_map:
            raise ValueError(f"duplicate segment {s.src}->{s.dst}")
        seg_map[(s.src, s.dst)] = s
        out[s.src].append((s.dst, s.travel_minutes))

    frozen_out = {h: tuple(sorted(v)) for h, v in out.items()}
    return Network(hubs=hub_map, segments=seg_map, _out=frozen_out)


@dataclass(frozen=True)
class Route:
    truck: TruckId
    hubs: Tuple[HubId, ...]
    segment_minutes: Tuple[int, ...]

    @property
    def n_hubs(self) -> int:
        return len(self.hubs)

    @property
    def origin(self) -> HubId:
        return self.hubs[0]

    @property
    def destination(self) -> HubId:
        return self.hubs[-1]

    @property
    def travel_minutes(self) -> int:
        return sum(self.segment_minutes)

    def pair(self, k: int) -> Pair:
        if not 0 <= k <= len(self.hubs) - 2:
            raise IndexOutOfRange(f"segment index {k} outside route of {len(self.hubs)} hubs")
        return (self.hubs[k], self.hubs[k + 1])

    def pairs(self) -> List[Pair]:
        return list(zip(self.hubs, self.hubs[1:]))


def make_route(net: Network, truck: TruckId, hubs: Sequence[HubId]) -> Route:
    """Build a route along ``hubs``, reading travel times from ``net``."""
    hubs = tuple(int(h) for h in hubs)
    if len(hubs) < 2:
        raise InvalidRoute(f"truck {truck}: a route needs at least two hubs")
    for h in hubs:
        if h not in net:
            raise UnknownEndpoint(f"truck {truck}: hub {h} not in network")
    pairs = list(zip(hubs, hubs[1:]))
    if len(set(pairs)) != len(pairs):
        raise InvalidRoute(f"truck {truck}: route traverses a segment twice")
    minutes = tuple(net.travel(a, b) for a, b in pairs)
    return Route(truck=truck, hubs=hubs, segment_minutes=minutes)


def plan_route(net: Network, origin: HubId, destination: HubId, truck: TruckId) -> Route:
    """Shortest-travel-time route; ties go to the lexicographically smallest hub sequence.

    Dijkstra over (distance, path) labels. With positive weights the first
    label popped for a hub carries its lexicographically smallest shortest path.
    """
    if origin == destination:
        raise ValueError("origin and destination must differ")
    for h in (origin, destination):
        if h not in net:
            raise UnknownEndpoint(f"hub {h} not in network")

    best: Dict[HubId, int] = {origin: 0}
    done = set()
    heap = [(0, (origin,))]
    while heap:
        dist, path = heapq.heappop(heap)
        node = path[-1]
        if node in done:
            continue
        done.add(node)
        if node == destination:
            return make_route(net, truck, path)
        for nxt, minutes in net.successors(node):
            if nxt in done:
                continue
            nd = dist + minutes
            if nd <= best.get(nxt, nd):
                best[nxt] = nd
                heapq.heappush(heap, (nd, path + (nxt,)))
    raise Unreachable(f"no path from hub {origin} to hub {destination}")


def is_common_segment(route_i: Route, k: int, route_j: Route) -> bool:
    """True if the directed hub pair at index ``k`` of ``route_i`` also occurs in ``route_j``."""
    target = route_i.pair(k)
    return any(p == target for p in zip(route_j.hubs, route_j.hubs[1:]))


class PartnerIndex:
    """Offline map (truck, hub index) -> trucks sharing that route segment."""

    def __init__(self, table: Dict[Tuple[TruckId, int], Tuple[TruckId, ...]]):
        self._table = table

    def __getitem__(self, key: Tuple[TruckId, int]) -> Tuple[TruckId, ...]:
        return self._table[key]

    def partners(self, truck: TruckId, k: int) -> Tuple[TruckId, ...]:
        return self._table[(truck, k)]

    def items(self):
        return self._table.items()

    def __len__(self) -> int:
        return len(self._table)

    def __eq__(self, other) -> bool:
        return isinstance(other, PartnerIndex) and self._table == other._table


def build_partner_index(routes: Iterable[Route]) -> PartnerIndex:
    routes = list(routes)
    by_pair: Dict[Pair, set] = defaultdict(set)
    for r in routes:
        for p in r.pairs():
            by_pair[p].add(r.truck)
    table = {}
    for r in routes:
        for k, p in enumerate(r.pairs()):
            table[(r.truck, k)] = tuple(sorted(by_pair[p] - {r.truck}))
    return PartnerIndex(table)


# -- network file -----------------------------------------------------------

def network_to_dict(net: Network) -> dict:
    hubs = []
    for h in sorted(net.hubs.values(), key=lambda h: h.id):
        hubs.append({"id": h.id, "name": h.name, "lat": h.lat, "lon": h.lon})
    segments = [
        {"from": s.src, "to": s.dst, "travel_minutes": s.travel_minutes}
        for _, s in sorted(net.segments.items())
    ]
    return {"hubs": hubs, "segments": segments}


def network_from_dict(doc: dict) -> Network:
    try:
        hubs = [
            Hub(int(h["id"]), h.get("name") or "", h.get("lat"), h.get("lon"))
            for h in doc["hubs"]
        ]
        segments = [
            Segment(int(s["from"]), int(s["to"]), int(s["travel_minutes"]))
            for s in doc["segments"]
        ]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed network document: missing field {exc}") from exc
    return build_network(hubs, segments)


def load_network(path) -> Network:
    with open(path) as fh:
        return network_from_dict(json.load(fh))


def save_network(net: Network, path) -> None:
    Path(path).write_text(json.dumps(network_to_dict(net), indent=1) + "\n")
