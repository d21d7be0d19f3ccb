"""Hub-based truck platoon coordination by event-triggered distributed MPC.

Each truck plans its waiting times at the hubs on its fixed route whenever it
arrives at a hub, maximizing its own predicted platooning reward minus
waiting cost against the departure times other trucks have published.
"""

from .fleet import PredictionBoard, TruckSpec, TruckState
from .network import Network, Route, build_network, build_partner_index, plan_route
from .simulator import Scenario, SimulationLog, run
from .solver import SolveResult, brute_force_oracle, solve_mpc

__all__ = [
    "Network",
    "PredictionBoard",
    "Route",
    "Scenario",
    "SimulationLog",
    "SolveResult",
    "TruckSpec",
    "TruckState",
    "brute_force_oracle",
    "build_network",
    "build_partner_index",
    "plan_route",
    "run",
    "solve_mpc",
]

__version__ = "0.1.0"
