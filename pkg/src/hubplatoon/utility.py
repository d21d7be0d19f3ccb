"""Predicted partner sets, platooning reward, waiting loss and per-truck utility."""

from __future__ import annotations

from fractions import Fraction
from typing import FrozenSet, Sequence, Tuple

from .fleet import PredictionBoard, TruckSpec, TruckState, check_plan, roll_forward
from .money import ZERO, Money, money
from .network import PartnerIndex, TruckId

WaitPlan = Tuple[int, ...]
PartnerSetPrediction = Tuple[FrozenSet[TruckId], ...]


def partners_departing(
    spec: TruckSpec, k: int, tick: int, board: PredictionBoard, index: PartnerIndex
) -> FrozenSet[TruckId]:
    """Potential partners at route index ``k`` whose board departure on that segment is ``tick``."""
    on_pair = board.departures_on(spec.route.pair(k))
    return frozenset(j for j in index.partners(spec.id, k) if on_pair.get(j) == tick)


def predicted_partner_set(
    spec: TruckSpec,
    k: int,
    plan: Sequence[int],
    state: TruckState,
    board: PredictionBoard,
    index: PartnerIndex,
) -> PartnerSetPrediction:
    departures = roll_forward(spec.route, k, state.arrival_tick, plan)
    return tuple(
        partners_departing(spec, k + h, d, board, index) for h, d in enumerate(departures)
    )


def segment_reward(xi_per_min, travel: int, n_partners: int) -> Money:
    """Share of the platooning benefit on one segment with ``n_partners`` others in the platoon."""
    if n_partners < 0:
        raise ValueError("n_partners must be non-negative")
    if n_partners == 0:
        return ZERO
    return money(Fraction(xi_per_min) * travel * Fraction(n_partners, n_partners + 1))


def predicted_reward(spec: TruckSpec, k: int, plan: Sequence[int], partner_sets) -> Money:
    minutes = spec.route.segment_minutes
    total = ZERO
    for h, members in enumerate(partner_sets):
        total += segment_reward(spec.xi_per_min, minutes[k + h], len(members))
    return total


def predicted_loss(spec: TruckSpec, plan: Sequence[int]) -> Money:
    return money(spec.eps_per_min * sum(plan))


def utility(
    spec: TruckSpec,
    k: int,
    plan: Sequence[int],
    state: TruckState,
    board: PredictionBoard,
    index: PartnerIndex,
) -> Tuple[Money, PartnerSetPrediction]:
    check_plan(spec, k, state, plan)
    sets = predicted_partner_set(spec, k, plan, state, board, index)
    return predicted_reward(spec, k, plan, sets) - predicted_loss(spec, plan), sets
