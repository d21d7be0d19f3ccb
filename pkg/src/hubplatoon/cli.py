"""Command-line entry point: synth-network, generate, run, report."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import List, Optional

from .errors import PlatoonError
from .network import save_network
from .report import build_report, write_run_outputs
from .scenario import ScenarioConfig, generate_scenario, load_scenario, synthetic_network
from .simulator import run

log = logging.getLogger("hubplatoon")


def _cmd_synth_network(args) -> int:
    net = synthetic_network(args.hubs, args.seed)
    save_network(net, args.out)
    print(f"wrote {args.out}: {len(net.hubs)} hubs, {len(net.segments)} segments")
    return 0


def _cmd_generate(args) -> int:
    config = ScenarioConfig(
        network=args.network,
        trucks=args.trucks,
        seed=args.seed,
        start_window=(args.start_min, args.start_max),
        wait_max_per_hub=args.wait_max,
        wait_budget_total=args.wait_budget,
        xi_per_min=args.xi,
        eps_per_min=args.eps,
    )
    scenario = generate_scenario(config, args.out)
    print(f"wrote {args.out}: {len(scenario.trucks)} trucks")
    return 0


def _cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    slog = run(scenario, timing=not args.no_timing)
    write_run_outputs(scenario, slog, args.out)
    print(f"wrote {args.out}: {len(slog.events)} events, {len(slog.platoons)} platoons")
    return 0


def _cmd_report(args) -> int:
    report = build_report(args.log, args.out, figures=not args.no_figures)
    print(json.dumps(report.aggregates, indent=1))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hubplatoon", description="Hub-based truck platoon coordination.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth-network", help="write a random geometric hub network")
    s.add_argument("--hubs", type=int, default=84)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_synth_network)

    g = sub.add_parser("generate", help="draw a randomized truck scenario on a network")
    g.add_argument("--network", required=True)
    g.add_argument("--trucks", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--start-min", type=int, default=480)
    g.add_argument("--start-max", type=int, default=540)
    g.add_argument("--wait-max", type=int, default=30, help="max wait per hub [min]")
    g.add_argument("--wait-budget", type=int, default=60, help="max total wait per trip [min]")
    g.add_argument("--xi", default="0.96", help="platooning benefit [SEK/min]")
    g.add_argument("--eps", default="0.75", help="waiting cost [SEK/min]")
    g.set_defaults(func=_cmd_generate)

    r = sub.add_parser("run", help="simulate a scenario directory")
    r.add_argument("--scenario", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--no-timing", action="store_true",
                   help="record solve durations as 0 so outputs are byte-reproducible")
    r.set_defaults(func=_cmd_run)

    t = sub.add_parser("report", help="series files, figures and aggregates from a run directory")
    t.add_argument("--log", required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--no-figures", action="store_true")
    t.set_defaults(func=_cmd_report)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (PlatoonError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
