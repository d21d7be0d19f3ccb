import csv
import json
from decimal import Decimal

import pytest

from conftest import two_truck_scenario
from hubplatoon.cli import main
from hubplatoon.errors import IncompleteLog
from hubplatoon.network import load_network
from hubplatoon.report import TRUCK_COLUMNS, build_report
from hubplatoon.scenario import ScenarioConfig, generate_scenario, load_scenario, save_scenario


@pytest.fixture
def net_file(tmp_path):
    path = tmp_path / "net.json"
    assert main(["synth-network", "--hubs", "84", "--seed", "1", "--out", str(path)]) == 0
    return path


def test_generate_two_hub_network(tmp_path):
    net = tmp_path / "net.json"
    net.write_text(json.dumps({"hubs": [{"id": 1, "name": "a", "lat": None, "lon": None},
                                        {"id": 2, "name": "b", "lat": None, "lon": None}],
                               "segments": [{"from": 1, "to": 2, "travel_minutes": 90}]}))
    sc = generate_scenario(ScenarioConfig(str(net), 1, seed=11), tmp_path / "sc")
    (t,) = sc.trucks
    assert t.route.hubs == (1, 2)
    assert 480 <= t.start_tick <= 540
    assert t.deadline_tick == t.start_tick + 90 + 60


def test_generate_is_deterministic(tmp_path, net_file):
    for name in ("a", "b"):
        assert main(["generate", "--network", str(net_file), "--trucks", "20", "--seed", "4",
                     "--out", str(tmp_path / name)]) == 0
    for f in ("trucks.json", "network.json", "scenario.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_generate_hundred_trucks_valid(tmp_path, net_file):
    sc = generate_scenario(ScenarioConfig(str(net_file), 100, seed=9), tmp_path / "sc")
    assert len(sc.trucks) == 100
    net = load_network(net_file)
    for t in sc.trucks:
        assert t.violations() == []
        assert t.route.origin != t.route.destination
        assert t.deadline_tick == t.start_tick + t.route.travel_minutes + t.wait_budget_total
        for (a, b), m in zip(t.route.pairs(), t.route.segment_minutes):
            assert net.segments[(a, b)].travel_minutes == m
    reloaded = load_scenario(tmp_path / "sc")
    assert reloaded.trucks == sc.trucks
    assert reloaded.trucks[0].xi_per_min == Decimal("0.96")


def test_run_writes_outputs(tmp_path):
    save_scenario(two_truck_scenario(), tmp_path / "sc")
    assert main(["run", "--scenario", str(tmp_path / "sc"), "--out", str(tmp_path / "out")]) == 0
    assert sorted(p.name for p in (tmp_path / "out").iterdir()) == ["events.csv", "summary.json", "trucks.csv"]
    rows = list(csv.DictReader(open(tmp_path / "out" / "trucks.csv")))
    assert rows[0]["utility_sek"] == "42.60" and rows[0]["total_wait_min"] == "20"
    assert rows[0]["platooning_rate"] == "1.000000"
    events = list(csv.DictReader(open(tmp_path / "out" / "events.csv")))
    decide = [e for e in events if e["kind"] == "DECIDE"][0]
    assert decide["utility_cents"] == "4260" and float(decide["solve_ms"]) >= 0


def test_run_missing_file(tmp_path, capsys):
    assert main(["run", "--scenario", str(tmp_path / "nope"), "--out", str(tmp_path / "out")]) != 0
    assert str(tmp_path / "nope") in capsys.readouterr().err


def test_run_invalid_scenario(tmp_path, capsys):
    save_scenario(two_truck_scenario(), tmp_path / "sc")
    trucks = json.loads((tmp_path / "sc" / "trucks.json").read_text())
    trucks[0]["deadline_tick"] = 100
    (tmp_path / "sc" / "trucks.json").write_text(json.dumps(trucks))
    assert main(["run", "--scenario", str(tmp_path / "sc"), "--out", str(tmp_path / "out")]) != 0
    assert "deadline_tick" in capsys.readouterr().err


def test_report_single_truck(tmp_path, net_file):
    main(["generate", "--network", str(net_file), "--trucks", "1", "--seed", "2", "--out", str(tmp_path / "sc")])
    main(["run", "--scenario", str(tmp_path / "sc"), "--out", str(tmp_path / "run")])
    assert main(["report", "--log", str(tmp_path / "run"), "--out", str(tmp_path / "rep")]) == 0
    for name in ("fig5_utility", "fig6_wait", "fig7_platooning_rate", "fig8_travel_min",
                 "fig8_platoon_min", "fig9_solve_ms"):
        lines = (tmp_path / "rep" / f"{name}.dat").read_text().splitlines()
        assert lines[0].startswith("#") and len(lines) == 2
    assert (tmp_path / "rep" / "fig5_utility.dat").read_text().splitlines()[1] == "1 0.00"
    assert (tmp_path / "rep" / "fig8_travel_times.png").stat().st_size > 0


def test_report_two_trucks(tmp_path):
    save_scenario(two_truck_scenario(), tmp_path / "sc")
    main(["run", "--scenario", str(tmp_path / "sc"), "--out", str(tmp_path / "run")])
    rep = build_report(tmp_path / "run", tmp_path / "rep", figures=False)
    row = next(r for r in rep.rows if r.truck_id == 1)
    assert (row.utility_sek, row.total_wait_min, row.platooning_rate) == (Decimal("42.60"), 20, 1.0)


def test_report_aggregates_recomputed(tmp_path, net_file):
    main(["generate", "--network", str(net_file), "--trucks", "60", "--seed", "8", "--out", str(tmp_path / "sc")])
    main(["run", "--scenario", str(tmp_path / "sc"), "--out", str(tmp_path / "run")])
    main(["report", "--log", str(tmp_path / "run"), "--out", str(tmp_path / "rep"), "--no-figures"])
    summary = json.loads((tmp_path / "rep" / "summary.json").read_text())
    assert summary == json.loads((tmp_path / "run" / "summary.json").read_text())

    with open(tmp_path / "run" / "trucks.csv") as fh:
        reader = csv.reader(fh)
        assert next(reader) == TRUCK_COLUMNS
        table = [list(map(float, r)) for r in reader]
    n = len(table)
    assert summary["total_trucks"] == n
    assert summary["mean_wait_min"] == round(sum(r[2] for r in table) / n, 6)
    assert summary["mean_platooning_rate"] == round(sum(r[5] for r in table) / n, 6)
    assert summary["frac_nonzero_utility"] == round(sum(r[1] != 0 for r in table) / n, 6)
    assert summary["mean_solve_ms"] == round(sum(r[6] for r in table) / n, 6)
    assert all(0 <= r[5] <= 1 for r in table)
    assert 0 <= summary["frac_nonzero_utility"] <= 1

    series = [line.split() for line in (tmp_path / "rep" / "fig5_utility.dat").read_text().splitlines()[1:]]
    values = [Decimal(v) for _, v in series]
    assert values == sorted(values) and len(values) == n


def test_report_incomplete_log(tmp_path):
    save_scenario(two_truck_scenario(), tmp_path / "sc")
    main(["run", "--scenario", str(tmp_path / "sc"), "--out", str(tmp_path / "run")])
    events = tmp_path / "run" / "events.csv"
    events.write_text("".join(l for l in events.read_text().splitlines(True) if "FINISH" not in l))
    with pytest.raises(IncompleteLog):
        build_report(tmp_path / "run", tmp_path / "rep")
    (tmp_path / "run" / "trucks.csv").unlink()
    assert main(["report", "--log", str(tmp_path / "run"), "--out", str(tmp_path / "rep")]) != 0
