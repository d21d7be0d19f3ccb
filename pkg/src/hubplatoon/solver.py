"""Per-truck receding-horizon wait planning.

:func:`solve_mpc` is an exact dynamic program over integer-minute waits.
The state after stage ``h`` is the cumulative wait ``W`` accumulated from the
current hub through hub ``k+h``; the truck then departs hub ``k+h`` at
``earliest[h] + W``. Rewards depend only on that departure tick, the loss
only on the final ``W``, so the recursion is exact.

Among optimal plans the one with the least total wait wins, then the
lexicographically smallest wait vector.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DeadlineInfeasible, TooLargeForOracle
from .fleet import PredictionBoard, TruckSpec, TruckState
from .money import Money, from_cents, to_cents
from .network import PartnerIndex
from .utility import (
    PartnerSetPrediction,
    WaitPlan,
    predicted_loss,
    predicted_partner_set,
    segment_reward,
    utility,
)

_NEG = -(2**62)

ORACLE_MAX_HORIZON = 5
ORACLE_MAX_WAIT_VALUES = 31


@dataclass(frozen=True)
class SolveResult:
    plan: WaitPlan
    utility: Money
    partner_sets: PartnerSetPrediction
    solve_ms: float = 0.0


@dataclass(frozen=True)
class _Horizon:
    earliest: Tuple[int, ...]  # zero-wait departure tick at each remaining hub
    cap: int  # max total wait over the remaining horizon
    lo: Tuple[int, ...]  # feasible cumulative-wait range after each stage
    hi: Tuple[int, ...]


def _horizon(spec: TruckSpec, k: int, state: TruckState) -> _Horizon:
    minutes = spec.route.segment_minutes
    n = spec.n_decisions - k
    if n <= 0:
        raise ValueError(f"truck {spec.id} has no decision left at hub index {k}")
    earliest = [state.arrival_tick]
    for h in range(n - 1):
        earliest.append(earliest[-1] + minutes[k + h])
    slack = spec.deadline_tick - (earliest[-1] + minutes[-1])
    budget = spec.wait_budget_total - state.wait_used
    cap = min(slack, budget)
    wmin, wmax = spec.wait_min, spec.wait_max_per_hub
    if slack < n * wmin:
        raise DeadlineInfeasible(
            f"truck {spec.id} at hub index {k}: cannot reach destination by tick "
            f"{spec.deadline_tick} (slack {slack} min)"
        )
    if budget < n * wmin:
        raise DeadlineInfeasible(
            f"truck {spec.id} at hub index {k}: wait budget exhausted ({budget} min left)"
        )
    lo = tuple((h + 1) * wmin for h in range(n))
    hi = tuple(min((h + 1) * wmax, cap - (n - 1 - h) * wmin) for h in range(n))
    return _Horizon(tuple(earliest), cap, lo, hi)


def candidate_window(spec: TruckSpec, k: int, state: TruckState) -> List[Tuple[int, int]]:
    """Earliest and latest feasible departure tick at each remaining hub."""
    hz = _horizon(spec, k, state)
    return [(e + lo, e + hi) for e, lo, hi in zip(hz.earliest, hz.lo, hz.hi)]


def _match_counts(spec, k, h, board, index) -> Dict[int, int]:
    on_pair = board.departures_on(spec.route.pair(k + h))
    counts: Dict[int, int] = {}
    for j in index.partners(spec.id, k + h):
        t = on_pair.get(j)
        if t is not None:
            counts[t] = counts.get(t, 0) + 1
    return counts


def solve_mpc(
    spec: TruckSpec,
    k: int,
    state: TruckState,
    board: PredictionBoard,
    index: PartnerIndex,
) -> SolveResult:
    t0 = time.perf_counter()
    hz = _horizon(spec, k, state)
    n = len(hz.earliest)
    cap = hz.cap
    wmin, wmax = spec.wait_min, spec.wait_max_per_hub
    minutes = spec.route.segment_minutes
    scale = cap + 1  # key = utility_cents * scale - total_wait

    reward_cache: Dict[Tuple[int, int], int] = {}

    def stage_reward(h: int) -> np.ndarray:
        r = np.zeros(cap + 1, dtype=np.int64)
        for tick, cnt in _match_counts(spec, k, h, board, index).items():
            w = tick - hz.earliest[h]
            if 0 <= w <= cap:
                key = (minutes[k + h], cnt)
                if key not in reward_cache:
                    reward_cache[key] = to_cents(segment_reward(spec.xi_per_min, *key))
                r[w] = reward_cache[key]
        return r

    rewards = [stage_reward(h) for h in range(n)]
    W = np.arange(cap + 1)
    loss = np.array([to_cents(predicted_loss(spec, (w,))) for w in range(cap + 1)], dtype=np.int64)

    values: List[np.ndarray] = [None] * n
    valid = (W >= hz.lo[-1]) & (W <= hz.hi[-1])
    values[-1] = np.where(valid, (rewards[-1] - loss) * scale - W, _NEG)
    for h in range(n - 2, -1, -1):
        padded = np.concatenate([values[h + 1], np.full(wmax + 1, _NEG, dtype=np.int64)])
        windows = sliding_window_view(padded[wmin:], wmax - wmin + 1)[: cap + 1]
        cont = windows.max(axis=1)
        valid = (W >= hz.lo[h]) & (W <= hz.hi[h]) & (cont > _NEG // 2)
        values[h] = np.where(valid, rewards[h] * scale + cont, _NEG)

    first = values[0].copy()
    first[(W < wmin) | (W > wmax)] = _NEG
    best = int(first.max())
    if best <= _NEG // 2:
        raise DeadlineInfeasible(f"truck {spec.id} at hub index {k}: no feasible plan")

    cum = [int(np.flatnonzero(first == best)[0])]
    target = best
    for h in range(1, n):
        target -= int(rewards[h - 1][cum[-1]]) * scale
        lo, hi = cum[-1] + wmin, min(cum[-1] + wmax, cap)
        seg = values[h][lo : hi + 1]
        cum.append(lo + int(np.flatnonzero(seg == target)[0]))
    plan = tuple(int(c) for c in np.diff([0] + cum))

    total_wait = cum[-1]
    util_cents = (best + total_wait) // scale
    sets = predicted_partner_set(spec, k, plan, state, board, index)
    elapsed = (time.perf_counter() - t0) * 1000.0
    return SolveResult(plan, from_cents(util_cents), sets, elapsed)


def brute_force_oracle(
    spec: TruckSpec,
    k: int,
    state: TruckState,
    board: PredictionBoard,
    index: PartnerIndex,
) -> SolveResult:
    """Enumerate every feasible wait vector and score it with :func:`utility`."""
    t0 = time.perf_counter()
    n = spec.n_decisions - k
    n_values = spec.wait_max_per_hub - spec.wait_min + 1
    if n > ORACLE_MAX_HORIZON or n_values > ORACLE_MAX_WAIT_VALUES:
        raise TooLargeForOracle(f"horizon {n} with {n_values} wait values per hub")

    remaining = spec.route.segment_minutes[k:]
    budget = spec.wait_budget_total - state.wait_used
    slack = spec.deadline_tick - state.arrival_tick - sum(remaining)
    if slack < n * spec.wait_min:
        raise DeadlineInfeasible(f"truck {spec.id} at hub index {k}: deadline unreachable")
    limit = min(budget, slack)

    best: Optional[Tuple[Money, int]] = None
    best_plan = None
    best_sets = None
    choices = range(spec.wait_min, spec.wait_max_per_hub + 1)
    # product() yields vectors in ascending lexicographic order, so the first
    # vector reaching the best (utility, -total wait) is the lexicographic tie-break
    for plan in itertools.product(choices, repeat=n):
        total = sum(plan)
        if total > limit:
            continue
        j, sets = utility(spec, k, plan, state, board, index)
        key = (j, -total)
        if best is None or key > best:
            best, best_plan, best_sets = key, plan, sets
    if best is None:
        raise DeadlineInfeasible(f"truck {spec.id} at hub index {k}: no feasible plan")
    return SolveResult(best_plan, best[0], best_sets, (time.perf_counter() - t0) * 1000.0)
