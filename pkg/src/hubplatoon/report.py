"""Run outputs (event log, per-truck table, summary) and the figure report."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Dict, List, Optional

from .errors import IncompleteLog
from .simulator import FINISH, Scenario, SimulationLog

EVENTS_FILE = "events.csv"
TRUCKS_CSV = "trucks.csv"
SUMMARY_FILE = "summary.json"

TRUCK_COLUMNS = [
    "truck_id",
    "utility_sek",
    "total_wait_min",
    "travel_min",
    "platoon_min",
    "platooning_rate",
    "mean_solve_ms",
]
EVENT_COLUMNS = ["tick", "kind", "trucks", "hubs", "solve_ms", "utility_cents"]

# name -> (column, y label); x is the rank in ascending-utility order
SERIES = {
    "fig5_utility": ("utility_sek", "realized utility [SEK]"),
    "fig6_wait": ("total_wait_min", "total waiting time [min]"),
    "fig7_platooning_rate": ("platooning_rate", "platooning rate"),
    "fig8_travel_min": ("travel_min", "travel time [min]"),
    "fig8_platoon_min": ("platoon_min", "time in platoon [min]"),
    "fig9_solve_ms": ("mean_solve_ms", "mean solve time [ms]"),
}


@dataclass
class TruckRow:
    truck_id: int
    utility_sek: Decimal
    total_wait_min: int
    travel_min: int
    platoon_min: int
    platooning_rate: float
    mean_solve_ms: float


@dataclass
class Report:
    rows: List[TruckRow]
    aggregates: Dict[str, float]


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def truck_rows(scenario: Scenario, slog: SimulationLog) -> List[TruckRow]:
    rows = []
    for spec in sorted(scenario.trucks, key=lambda s: s.id):
        m = slog.trucks[spec.id]
        if not m.finished:
            raise IncompleteLog(f"truck {spec.id} did not reach its destination")
        rows.append(
            TruckRow(
                spec.id,
                m.realized_utility,
                m.total_wait,
                m.travel_minutes,
                m.platoon_minutes,
                float(_fmt(m.platoon_minutes / m.travel_minutes)),
                float(_fmt(m.mean_solve_ms)),
            )
        )
    return rows


def aggregate(rows: List[TruckRow]) -> Dict[str, float]:
    n = len(rows)
    if n == 0:
        return {
            "mean_wait_min": 0.0,
            "mean_platooning_rate": 0.0,
            "frac_nonzero_utility": 0.0,
            "mean_solve_ms": 0.0,
            "total_trucks": 0,
        }
    return {
        "mean_wait_min": round(sum(r.total_wait_min for r in rows) / n, 6),
        "mean_platooning_rate": round(sum(r.platooning_rate for r in rows) / n, 6),
        "frac_nonzero_utility": round(sum(1 for r in rows if r.utility_sek != 0) / n, 6),
        "mean_solve_ms": round(sum(r.mean_solve_ms for r in rows) / n, 6),
        "total_trucks": n,
    }


def write_trucks_csv(rows: List[TruckRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRUCK_COLUMNS)
        for r in rows:
            w.writerow([
                r.truck_id,
                f"{r.utility_sek:.2f}",
                r.total_wait_min,
                r.travel_min,
                r.platoon_min,
                _fmt(r.platooning_rate),
                _fmt(r.mean_solve_ms),
            ])


def read_trucks_csv(path) -> List[TruckRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != TRUCK_COLUMNS:
            raise IncompleteLog(f"{path}: unexpected header {reader.fieldnames}")
        return [
            TruckRow(
                int(d["truck_id"]),
                Decimal(d["utility_sek"]),
                int(d["total_wait_min"]),
                int(d["travel_min"]),
                int(d["platoon_min"]),
                float(d["platooning_rate"]),
                float(d["mean_solve_ms"]),
            )
            for d in reader
        ]


def write_summary(aggregates: Dict[str, float], path) -> None:
    Path(path).write_text(json.dumps(aggregates, indent=1) + "\n")


def write_event_log(slog: SimulationLog, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EVENT_COLUMNS)
        for e in slog.events:
            w.writerow([
                e.tick,
                e.kind,
                ";".join(map(str, e.trucks)),
                ";".join(map(str, e.hubs)),
                "" if e.solve_ms is None else f"{e.solve_ms:.3f}",
                "" if e.utility_cents is None else e.utility_cents,
            ])


def write_run_outputs(scenario: Scenario, slog: SimulationLog, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = truck_rows(scenario, slog)
    write_event_log(slog, out / EVENTS_FILE)
    write_trucks_csv(rows, out / TRUCKS_CSV)
    write_summary(aggregate(rows), out / SUMMARY_FILE)
    return out


def _check_complete(log_dir: Path, rows: List[TruckRow]) -> None:
    finished = set()
    with open(log_dir / EVENTS_FILE, newline="") as fh:
        for d in csv.DictReader(fh):
            if d["kind"] == FINISH:
                finished.add(int(d["trucks"]))
    missing = sorted({r.truck_id for r in rows} - finished)
    if missing:
        raise IncompleteLog(f"no FINISH event for trucks {missing[:10]}")


def build_report(log_dir, out_dir: Optional[str] = None, figures: bool = True) -> Report:
    """Recompute aggregates from a run directory and emit per-figure series.

    Each series is a two-column text file (rank, value) with trucks ordered
    by ascending realized utility. PNG renderings are written next to them
    unless ``figures`` is false.
    """
    log_dir = Path(log_dir)
    for name in (TRUCKS_CSV, EVENTS_FILE):
        if not (log_dir / name).is_file():
            raise IncompleteLog(f"{log_dir / name}: missing")
    rows = read_trucks_csv(log_dir / TRUCKS_CSV)
    _check_complete(log_dir, rows)
    report = Report(rows, aggregate(rows))

    out = Path(out_dir) if out_dir is not None else log_dir
    out.mkdir(parents=True, exist_ok=True)
    ordered = sorted(rows, key=lambda r: (r.utility_sek, r.truck_id))
    for name, (column, _) in SERIES.items():
        with open(out / f"{name}.dat", "w") as fh:
            fh.write(f"# rank {column}\n")
            for rank, r in enumerate(ordered, start=1):
                value = getattr(r, column)
                if isinstance(value, Decimal):
                    text = f"{value:.2f}"
                elif isinstance(value, float):
                    text = _fmt(value)
                else:
                    text = str(value)
                fh.write(f"{rank} {text}\n")
    write_summary(report.aggregates, out / SUMMARY_FILE)
    if figures:
        from .plotting import render_figures

        render_figures(ordered, out)
    return report
