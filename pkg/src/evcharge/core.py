"""Problem data model: price-bounded charging with a dissatisfaction penalty.

An instance is a price band [p_min, p_max], a per-unit dissatisfaction
price alpha charged on unmet demand, and a battery capacity expressed in
units of the maximum per-slot charge.  Capacity is kept as an exact
rational so slot-counting logic never suffers float drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

FEASIBILITY_TOL = 1e-9

# Denominator cap used when a capacity arrives as a float (real-valued
# inputs are snapped to a nearby rational before any slot arithmetic).
MAX_CAPACITY_DENOMINATOR = 10_000


class EvChargeError(Exception):
    """Base class for all library errors."""


class ValidationError(EvChargeError, ValueError):
    """Bad input data or parameters; maps to CLI exit code 1."""


class NonPositivePrice(ValidationError):
    pass


class BoundsInverted(ValidationError):
    pass


class AlphaBelowPMin(ValidationError):
    pass


class ZeroCapacity(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class InfeasibleSchedule(ValidationError):
    pass


class PriceOutOfRange(ValidationError):
    pass


class DegenerateSpec(ValidationError):
    pass


class InternalConsistencyError(EvChargeError):
    """A guarantee the code relies on was violated; maps to exit code 3."""


@dataclass(frozen=True)
class ProblemSpec:
    """Validated instance parameters.  Build via :func:`validate_spec`.

    slot_minutes is carried for unit conversion in reports only; the
    policies work in normalized units and never read it.
    """

    p_min: float
    p_max: float
    alpha: float
    capacity: Fraction
    slot_minutes: int = 5

    @property
    def theta(self) -> float:
        """Price fluctuation ratio p_max / p_min."""
        return self.p_max / self.p_min

    @property
    def capacity_f(self) -> float:
        return float(self.capacity)


def _as_fraction(capacity) -> Fraction:
    if isinstance(capacity, float):
        if not math.isfinite(capacity):
            raise ZeroCapacity(f"capacity must be finite, got {capacity!r}")
        return Fraction(capacity).limit_denominator(MAX_CAPACITY_DENOMINATOR)
    return Fraction(capacity)


def validate_spec(p_min: float, p_max: float, alpha: float, capacity, slot_minutes: int = 5) -> ProblemSpec:
    """Check parameter sanity and return a normalized spec.

    Capacity accepts int, Fraction, "m/n" strings, or floats (floats are
    snapped to a rational with denominator <= 10**4).  alpha below p_min is
    rejected: the optimum there is to never charge, which makes every
    ratio question vacuous.
    """
    p_min = float(p_min)
    p_max = float(p_max)
    alpha = float(alpha)
    if not (p_min > 0.0) or not math.isfinite(p_max):
        raise NonPositivePrice(f"price bounds must be positive finite, got [{p_min}, {p_max}]")
    if p_max < p_min:
        raise BoundsInverted(f"p_max={p_max} < p_min={p_min}")
    if not math.isfinite(alpha) or alpha < p_min:
        raise AlphaBelowPMin(f"alpha={alpha} must be >= p_min={p_min}")
    cap = _as_fraction(capacity)
    if cap <= 0:
        raise ZeroCapacity(f"capacity must be positive, got {cap}")
    if slot_minutes <= 0:
        raise ValidationError(f"slot_minutes must be positive, got {slot_minutes}")
    return ProblemSpec(p_min=p_min, p_max=p_max, alpha=alpha, capacity=cap, slot_minutes=int(slot_minutes))


@dataclass(frozen=True)
class PriceTrace:
    """Per-slot prices for one charging window."""

    slots: tuple[float, ...]

    @property
    def T(self) -> int:
        return len(self.slots)

    def __iter__(self):
        return iter(self.slots)


def validate_trace(spec: ProblemSpec, prices) -> PriceTrace:
    """Wrap prices after checking they sit inside the spec's band."""
    slots = tuple(float(p) for p in prices)
    lo = spec.p_min - 1e-12
    hi = spec.p_max + 1e-12
    for i, p in enumerate(slots):
        if not (lo <= p <= hi):
            raise PriceOutOfRange(f"slot {i}: price {p} outside [{spec.p_min}, {spec.p_max}]")
    return PriceTrace(slots)


@dataclass(frozen=True)
class ChargingSchedule:
    """Per-slot charge amounts in normalized units (1.0 = slot maximum)."""

    v: tuple[float, ...]

    @property
    def total(self) -> float:
        return math.fsum(self.v)


@dataclass(frozen=True)
class ObjectiveValue:
    charging_cost: float
    dissatisfaction: float
    total: float


def check_feasible(spec: ProblemSpec, schedule: ChargingSchedule, rate_limited: bool = True) -> bool:
    """True when charges are nonnegative, within capacity, and (optionally)
    within the per-slot cap of 1."""
    tol = FEASIBILITY_TOL
    if any(x < -tol for x in schedule.v):
        return False
    if rate_limited and any(x > 1.0 + tol for x in schedule.v):
        return False
    return schedule.total <= spec.capacity_f + tol


def evaluate_objective(spec: ProblemSpec, trace: PriceTrace, schedule: ChargingSchedule) -> ObjectiveValue:
    """Charging cost plus dissatisfaction for a completed window.

    Only capacity feasibility is enforced here; callers evaluating
    rate-unlimited schedules pass amounts above 1 freely.
    """
    if trace.T != len(schedule.v):
        raise LengthMismatch(f"trace has {trace.T} slots, schedule has {len(schedule.v)}")
    if any(x < -FEASIBILITY_TOL for x in schedule.v):
        raise InfeasibleSchedule("negative charge amount")
    charged = schedule.total
    cap = spec.capacity_f
    if charged > cap + FEASIBILITY_TOL:
        raise InfeasibleSchedule(f"total charge {charged} exceeds capacity {cap}")
    cost = math.fsum(p * x for p, x in zip(trace.slots, schedule.v))
    diss = max(0.0, spec.alpha * (cap - charged))
    return ObjectiveValue(charging_cost=cost, dissatisfaction=diss, total=cost + diss)
