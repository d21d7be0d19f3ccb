import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hubplatoon.errors import (
    DuplicateHub,
    IndexOutOfRange,
    InvalidRoute,
    NonPositiveTravelTime,
    UnknownEndpoint,
    Unreachable,
)
from hubplatoon.network import (
    Hub,
    build_network,
    build_partner_index,
    is_common_segment,
    load_network,
    make_route,
    network_to_dict,
    plan_route,
    save_network,
)


def route(hubs, truck=1):
    net = build_network(sorted(set(hubs)), [(a, b, 10) for a, b in set(zip(hubs, hubs[1:]))])
    return make_route(net, truck, hubs)


def test_minimal_network():
    net = build_network([1, 2], [(1, 2, 60)])
    assert len(net.hubs) == 2 and len(net.segments) == 1


def test_dangling_endpoint():
    with pytest.raises(UnknownEndpoint):
        build_network([1], [(1, 2, 60)])


def test_zero_travel_time():
    with pytest.raises(NonPositiveTravelTime):
        build_network([1, 2], [(1, 2, 0)])


def test_duplicate_hub():
    with pytest.raises(DuplicateHub):
        build_network([Hub(1, "a"), Hub(1, "b")], [])


def test_plan_route_line():
    net = build_network([1, 2, 3], [(1, 2, 60), (2, 3, 60)])
    r = plan_route(net, 1, 3, truck=7)
    assert r.hubs == (1, 2, 3)
    assert r.segment_minutes == (60, 60)
    assert r.truck == 7


def test_plan_route_degenerate_od():
    net = build_network([1, 2], [(1, 2, 60)])
    with pytest.raises(ValueError):
        plan_route(net, 1, 1, truck=1)


def test_plan_route_tie_break():
    net = build_network([1, 2, 3, 4], [(1, 3, 5), (3, 4, 5), (1, 2, 5), (2, 4, 5)])
    assert plan_route(net, 1, 4, truck=1).hubs == (1, 2, 4)


def test_plan_route_unreachable():
    net = build_network([1, 2, 3], [(1, 2, 5), (3, 2, 5)])
    with pytest.raises(Unreachable):
        plan_route(net, 1, 3, truck=1)


def test_route_rejects_repeated_segment():
    net = build_network([1, 2], [(1, 2, 5), (2, 1, 5)])
    with pytest.raises(InvalidRoute):
        make_route(net, 1, [1, 2, 1, 2])
    # revisiting a hub is fine
    assert make_route(net, 1, [1, 2, 1]).n_hubs == 3


@pytest.mark.parametrize(
    "ri, k, rj, expected",
    [
        ([1, 2, 3], 0, [1, 2], True),
        ([1, 2, 3], 1, [3, 2], False),
        ([1, 2, 3], 1, [4, 2, 3], True),
    ],
)
def test_is_common_segment(ri, k, rj, expected):
    assert is_common_segment(route(ri, 1), k, route(rj, 2)) is expected


def test_is_common_segment_index_check():
    with pytest.raises(IndexOutOfRange):
        is_common_segment(route([1, 2, 3]), 2, route([1, 2], 2))


def test_partner_index_examples():
    idx = build_partner_index([route([1, 2, 3], 1), route([1, 2], 2)])
    assert idx[(1, 0)] == (2,)
    assert idx[(1, 1)] == ()
    assert idx[(2, 0)] == (1,)

    assert build_partner_index([route([1, 2, 3], 1)])[(1, 0)] == ()

    idx = build_partner_index([route([1, 2, 3], 1), route([2, 3], 2), route([4, 2, 3], 3)])
    assert len(idx[(1, 1)]) == 2 and len(idx[(2, 0)]) == 2 and len(idx[(3, 1)]) == 2


def all_simple_paths(net, src, dst):
    stack = [(src,)]
    while stack:
        path = stack.pop()
        if path[-1] == dst:
            yield path
            continue
        for (a, b) in net.segments:
            if a == path[-1] and b not in path:
                stack.append(path + (b,))


@st.composite
def small_graphs(draw):
    n = draw(st.integers(2, 8))
    pairs = [(a, b) for a in range(1, n + 1) for b in range(1, n + 1) if a != b]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    weights = draw(st.lists(st.integers(1, 6), min_size=len(chosen), max_size=len(chosen)))
    return build_network(list(range(1, n + 1)), [(a, b, w) for (a, b), w in zip(chosen, weights)])


@settings(max_examples=150, deadline=None)
@given(small_graphs(), st.data())
def test_plan_route_matches_path_enumeration(net, data):
    src = data.draw(st.sampled_from(sorted(net.hubs)))
    dst = data.draw(st.sampled_from(sorted(set(net.hubs) - {src})))
    paths = list(all_simple_paths(net, src, dst))
    if not paths:
        with pytest.raises(Unreachable):
            plan_route(net, src, dst, 1)
        return
    cost = lambda p: sum(net.segments[(a, b)].travel_minutes for a, b in zip(p, p[1:]))
    best = min(paths, key=lambda p: (cost(p), p))
    r = plan_route(net, src, dst, 1)
    assert r.hubs == best
    assert r.travel_minutes == cost(best)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.integers(1, 5), min_size=2, max_size=6), min_size=1, max_size=6))
def test_partner_index_matches_pairwise_checks(raw_routes):
    net = build_network([1, 2, 3, 4, 5], [(a, b, 7) for a in range(1, 6) for b in range(1, 6) if a != b])
    routes = []
    for t, hubs in enumerate(raw_routes, start=1):
        try:
            routes.append(make_route(net, t, hubs))
        except InvalidRoute:
            continue
    idx = build_partner_index(routes)
    for ri in routes:
        for k in range(ri.n_hubs - 1):
            expected = tuple(sorted(rj.truck for rj in routes if rj.truck != ri.truck and is_common_segment(ri, k, rj)))
            assert idx[(ri.truck, k)] == expected
            for j in expected:
                rj = next(r for r in routes if r.truck == j)
                back = [k2 for k2 in range(rj.n_hubs - 1) if rj.pair(k2) == ri.pair(k)]
                assert back and all(ri.truck in idx[(j, k2)] for k2 in back)
            assert ri.truck not in idx[(ri.truck, k)]


def test_network_file_round_trip(tmp_path):
    net = build_network([Hub(1, "Malmö", 55.6, 13.0), Hub(2, "Lund", 55.7, 13.2)], [(1, 2, 20), (2, 1, 20)])
    path = tmp_path / "net.json"
    save_network(net, path)
    doc = json.loads(path.read_text())
    assert doc["hubs"][0] == {"id": 1, "name": "Malmö", "lat": 55.6, "lon": 13.0}
    assert doc["segments"][0] == {"from": 1, "to": 2, "travel_minutes": 20}
    assert network_to_dict(load_network(path)) == doc


def test_network_file_rejects_missing_field(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"hubs": [{"id": 1}], "segments": [{"from": 1, "to": 1}]}))
    with pytest.raises(ValueError, match="travel_minutes"):
        load_network(path)
