"""Offline optima for a price prefix, in batch and streaming form.

Without a per-slot cap the optimum charges the whole capacity at the
cheapest price seen (or abstains when dissatisfaction is cheaper).  With
the cap, the optimum fills the cheapest slots priced below alpha at full
rate, plus one fractional slot when capacity is not a whole number of
slots; everything else is paid as dissatisfaction.
"""

from __future__ import annotations

import math
from bisect import insort
from dataclasses import dataclass
from fractions import Fraction

from .core import ChargingSchedule, PriceTrace, ProblemSpec


def opt_no_limit(spec: ProblemSpec, prices) -> float:
    """Optimal cost-plus-dissatisfaction when any rate is allowed."""
    slots = list(prices)
    if not slots:
        raise ValueError("empty price prefix")
    return min(min(slots), spec.alpha) * spec.capacity_f


def _keep_limit(spec: ProblemSpec) -> int:
    cap = spec.capacity
    return -(-cap.numerator // cap.denominator)  # ceil


def _greedy_value(spec: ProblemSpec, kept: tuple[tuple[float, int], ...]) -> tuple[float, list[tuple[int, float]]]:
    """Fill capacity cheapest-first over the kept slots; return (value, fills).

    `kept` must be ascending by (price, slot).  Amounts are exact rationals
    until the final float multiply, so streaming and batch callers land on
    bit-identical values.
    """
    remaining = spec.capacity
    one = Fraction(1)
    terms = []
    fills: list[tuple[int, float]] = []
    for price, slot in kept:
        if remaining <= 0:
            break
        q = one if remaining >= one else remaining
        remaining -= q
        qf = float(q)
        terms.append(price * qf)
        fills.append((slot, qf))
    terms.append(spec.alpha * float(remaining))
    return math.fsum(terms), fills


def opt_rate_limited(spec: ProblemSpec, prices) -> tuple[float, ChargingSchedule]:
    """Optimal value and a schedule achieving it under the per-slot cap of 1."""
    slots = list(prices)
    if not slots:
        raise ValueError("empty price prefix")
    limit = _keep_limit(spec)
    candidates = sorted(
        ((p, i) for i, p in enumerate(slots) if p < spec.alpha)
    )[:limit]
    value, fills = _greedy_value(spec, tuple(candidates))
    v = [0.0] * len(slots)
    for slot, q in fills:
        v[slot] = q
    return value, ChargingSchedule(tuple(v))


@dataclass(frozen=True)
class OfflineState:
    """Streaming tracker for both optima over a growing prefix.

    kept holds the (price, slot) pairs of the cheapest slots priced below
    alpha, at most ceil(capacity) of them, ascending; ties keep the earlier
    slot.  Values are recomputed from kept each step so the stream matches
    the batch computation exactly.
    """

    spec: ProblemSpec
    t: int
    running_min: float
    kept: tuple[tuple[float, int], ...]
    opt_value: float

    @property
    def opt_no_limit_value(self) -> float:
        return min(self.running_min, self.spec.alpha) * self.spec.capacity_f


def new_offline_state(spec: ProblemSpec) -> OfflineState:
    return OfflineState(
        spec=spec,
        t=0,
        running_min=math.inf,
        kept=(),
        opt_value=spec.alpha * spec.capacity_f,
    )


def offline_step(state: OfflineState, price: float) -> OfflineState:
    """Advance the prefix by one slot."""
    spec = state.spec
    slot = state.t  # 0-based index of the incoming slot
    kept = state.kept
    if price < spec.alpha:
        buf = list(kept)
        insort(buf, (price, slot))
        if len(buf) > _keep_limit(spec):
            buf.pop()  # evict the most expensive, latest on price ties
        kept = tuple(buf)
    value, _ = _greedy_value(spec, kept)
    return OfflineState(
        spec=spec,
        t=slot + 1,
        running_min=min(state.running_min, price),
        kept=kept,
        opt_value=value,
    )
