"""Scenario files, randomized truck generation and a synthetic hub network."""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass
from decimal import Decimal
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial import Delaunay

from .errors import ScenarioInvalid, Unreachable
from .fleet import TruckSpec
from .money import rate
from .network import Hub, Network, Segment, build_network, load_network, plan_route, save_network
from .simulator import Scenario, validate_scenario

NETWORK_FILE = "network.json"
TRUCKS_FILE = "trucks.json"
CONFIG_FILE = "scenario.json"

MAX_OD_RETRIES = 1000


@dataclass
class ScenarioConfig:
    network: str
    trucks: int
    seed: int = 0
    start_window: Tuple[int, int] = (480, 540)  # 8:00-9:00, minutes after midnight
    wait_max_per_hub: int = 30
    wait_budget_total: int = 60
    xi_per_min: Decimal = Decimal("0.96")  # 57.6 SEK/h
    eps_per_min: Decimal = Decimal("0.75")  # 45 SEK/h

    def __post_init__(self):
        self.start_window = tuple(self.start_window)
        self.xi_per_min = rate(self.xi_per_min)
        self.eps_per_min = rate(self.eps_per_min)
        if self.trucks < 1:
            raise ValueError("need at least one truck")
        if self.start_window[0] > self.start_window[1] or self.start_window[0] < 0:
            raise ValueError(f"bad start window {self.start_window}")


def generate_trucks(config: ScenarioConfig, net: Network) -> List[TruckSpec]:
    if len(net.hubs) < 2:
        raise ScenarioInvalid("network needs at least two hubs")
    rng = random.Random(config.seed)
    hubs = sorted(net.hubs)
    specs = []
    for truck in range(1, config.trucks + 1):
        for _ in range(MAX_OD_RETRIES):
            origin, dest = rng.sample(hubs, 2)
            try:
                route = plan_route(net, origin, dest, truck)
                break
            except Unreachable:
                continue
        else:
            raise Unreachable(f"no reachable OD pair found for truck {truck}")
        start = rng.randint(*config.start_window)
        specs.append(
            TruckSpec(
                id=truck,
                route=route,
                start_tick=start,
                deadline_tick=start + route.travel_minutes + config.wait_budget_total,
                wait_max_per_hub=config.wait_max_per_hub,
                wait_budget_total=config.wait_budget_total,
                xi_per_min=config.xi_per_min,
                eps_per_min=config.eps_per_min,
            )
        )
    return specs


def generate_scenario(config: ScenarioConfig, out_dir) -> Scenario:
    """Draw trucks for ``config`` and write the scenario directory."""
    net = load_network(config.network)
    scenario = Scenario(net, tuple(generate_trucks(config, net)), config.seed)
    save_scenario(scenario, out_dir, config)
    return scenario


# -- truck list file --------------------------------------------------------

def truck_to_dict(spec: TruckSpec) -> dict:
    doc = {
        "id": spec.id,
        "origin": spec.route.origin,
        "destination": spec.route.destination,
        "start_tick": spec.start_tick,
        "deadline_tick": spec.deadline_tick,
        "wait_max_per_hub": spec.wait_max_per_hub,
        "wait_budget_total": spec.wait_budget_total,
        "xi_per_min": float(spec.xi_per_min),
        "eps_per_min": float(spec.eps_per_min),
    }
    if spec.wait_min:
        doc["wait_min"] = spec.wait_min
    return doc


def truck_from_dict(doc: dict, net: Network) -> TruckSpec:
    try:
        truck = int(doc["id"])
        route = plan_route(net, int(doc["origin"]), int(doc["destination"]), truck)
        return TruckSpec(
            id=truck,
            route=route,
            start_tick=int(doc["start_tick"]),
            deadline_tick=int(doc["deadline_tick"]),
            wait_max_per_hub=int(doc["wait_max_per_hub"]),
            wait_budget_total=int(doc["wait_budget_total"]),
            xi_per_min=rate(doc["xi_per_min"]),
            eps_per_min=rate(doc["eps_per_min"]),
            wait_min=int(doc.get("wait_min", 0)),
        )
    except KeyError as exc:
        raise ScenarioInvalid(f"truck record missing field {exc}") from None


def load_trucks(path, net: Network) -> List[TruckSpec]:
    with open(path) as fh:
        docs = json.load(fh, parse_float=Decimal)
    if not isinstance(docs, list):
        raise ScenarioInvalid(f"{path}: expected an array of truck records")
    return [truck_from_dict(d, net) for d in docs]


def save_scenario(scenario: Scenario, out_dir, config: Optional[ScenarioConfig] = None) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_network(scenario.network, out / NETWORK_FILE)
    docs = [truck_to_dict(s) for s in sorted(scenario.trucks, key=lambda s: s.id)]
    (out / TRUCKS_FILE).write_text(json.dumps(docs, indent=1) + "\n")
    meta = {"seed": scenario.seed}
    if config is not None:
        meta.update(asdict(config))
        meta["xi_per_min"] = float(config.xi_per_min)
        meta["eps_per_min"] = float(config.eps_per_min)
        meta["start_window"] = list(config.start_window)
    (out / CONFIG_FILE).write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
    return out


def load_scenario(path) -> Scenario:
    """Read a scenario directory (network.json + trucks.json [+ scenario.json])."""
    path = Path(path)
    for name in (NETWORK_FILE, TRUCKS_FILE):
        if not (path / name).is_file():
            raise FileNotFoundError(f"{path / name}: no such file")
    net = load_network(path / NETWORK_FILE)
    trucks = load_trucks(path / TRUCKS_FILE, net)
    seed = 0
    if (path / CONFIG_FILE).is_file():
        seed = int(json.loads((path / CONFIG_FILE).read_text()).get("seed", 0))
    scenario = Scenario(net, tuple(trucks), seed)
    validate_scenario(scenario)
    return scenario


# -- synthetic network ------------------------------------------------------

# Rough extent of southern and central Sweden, where most freight hubs sit.
LAT_RANGE = (55.4, 63.0)
LON_RANGE = (11.8, 18.8)
EARTH_RADIUS_KM = 6371.0
SPEED_KMH = 80.0
ROAD_FACTOR = 1.2  # road distance over great-circle distance


def haversine_km(lat1, lon1, lat2, lon2) -> float:
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp, dl = p2 - p1, math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(math.sqrt(a))


def synthetic_network(n_hubs: int = 84, seed: int = 0, extra_edge_ratio: Optional[float] = None) -> Network:
    """Random geometric hub graph with motorway travel times.

    Hubs are scattered with density decreasing to the north and linked by
    their Delaunay triangulation, each link in both directions. Passing
    ``extra_edge_ratio`` thins the graph to the minimum spanning tree plus
    that many (times the hub count) of the shortest remaining links.
    """
    if n_hubs < 2:
        raise ValueError("need at least two hubs")
    rng = np.random.default_rng(seed)
    lat = LAT_RANGE[0] + (LAT_RANGE[1] - LAT_RANGE[0]) * rng.beta(1.2, 2.2, n_hubs)
    lon = rng.uniform(*LON_RANGE, n_hubs)
    hubs = [Hub(i + 1, f"H{i + 1:02d}", round(float(lat[i]), 4), round(float(lon[i]), 4)) for i in range(n_hubs)]

    xy = np.column_stack([lon * np.cos(np.radians(lat.mean())), lat])
    if n_hubs >= 3:
        edges = set()
        for simplex in Delaunay(xy).simplices:
            for a in range(3):
                for b in range(a + 1, 3):
                    i, j = sorted((int(simplex[a]), int(simplex[b])))
                    edges.add((i, j))
    else:
        edges = {(0, 1)}

    def km(i, j):
        return haversine_km(hubs[i].lat, hubs[i].lon, hubs[j].lat, hubs[j].lon)

    dist = {e: km(*e) for e in sorted(edges)}
    weights = np.zeros((n_hubs, n_hubs))
    for (i, j), d in dist.items():
        weights[i, j] = d
    tree = minimum_spanning_tree(weights).tocoo()
    keep = {tuple(sorted((int(i), int(j)))) for i, j in zip(tree.row, tree.col)}
    rest = sorted((e for e in dist if e not in keep), key=lambda e: (dist[e], e))
    if extra_edge_ratio is None:
        keep.update(rest)
    else:
        keep.update(rest[: int(round(extra_edge_ratio * n_hubs))])

    segments = []
    for i, j in sorted(keep):
        minutes = max(1, int(round(dist[(i, j)] * ROAD_FACTOR / SPEED_KMH * 60)))
        segments.append(Segment(i + 1, j + 1, minutes))
        segments.append(Segment(j + 1, i + 1, minutes))
    return build_network(hubs, segments)
