"""Worst-case charge totals and the smallest maintainable ratio target.

The threshold policy that keeps its cost-plus-dissatisfaction within a
factor pi of the running offline optimum charges a predictable worst-case
total over all feasible price paths: nothing once prices cannot drop below
alpha/pi, a logarithmic accumulation while the trigger price alpha/pi sits
inside the price band, plus an initial lump when it sits above the band.
The best achievable target pi_star is the value whose worst-case total
exactly fills the battery, found in closed form when the dissatisfaction
price is high enough and by bisection otherwise.

All quantities here scale linearly in capacity, so targets are solved at
unit capacity and are exactly capacity-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .core import (
    InternalConsistencyError,
    ProblemSpec,
    ValidationError,
)

ROOT_RESIDUAL_TOL = 1e-10
PI_LOWER_BRACKET = 1.0 + 1e-12


class NoBracket(ValidationError):
    """The defining equation has no root (degenerate price band)."""


class DegenerateAtPiOne(ValidationError):
    """Worst-case total diverges at pi = 1 when alpha sits inside the band."""


class DenominatorSignViolation(InternalConsistencyError):
    """The per-slot target formula was called outside its valid region."""


def log_price_ratio(alpha: float, p_hi: float, p_lo: float) -> float:
    """ln((alpha - p_lo) / (alpha - p_hi)) for p_lo <= p_hi < alpha.

    Written via log1p so the value stays accurate when alpha dwarfs the
    price band and the ratio is barely above 1.
    """
    return math.log1p((p_hi - p_lo) / (alpha - p_hi))


def max_total_charge(spec: ProblemSpec, pi: float) -> float:
    """Supremum of the target-pi policy's total charge over feasible prices.

    Decreasing in pi; equal to capacity exactly at pi_star.  Requires
    pi > 1 whenever alpha <= p_max (at pi = 1 the total diverges there).
    """
    if pi < 1.0:
        raise ValidationError(f"ratio target must be >= 1, got {pi}")
    alpha, c = spec.alpha, spec.capacity_f
    trigger = alpha / pi
    if trigger <= spec.p_min:
        return 0.0
    if trigger <= spec.p_max:
        if alpha - trigger <= 0.0:
            raise DegenerateAtPiOne(
                f"worst-case total diverges at pi={pi} with alpha={alpha} <= p_max={spec.p_max}"
            )
        return c * pi * log_price_ratio(alpha, trigger, spec.p_min)
    head = (alpha * c - spec.p_max * c * pi) / (alpha - spec.p_max)
    return head + c * pi * log_price_ratio(alpha, spec.p_max, spec.p_min)


def _bisect_decreasing(f, lo: float, hi: float, max_iter: int = 200) -> float:
    """Root of a strictly decreasing f with f(lo) > 0 >= f(hi)."""
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_alpha_star(spec: ProblemSpec) -> float:
    """Dissatisfaction price above which the closed-form target applies.

    Root of (a / p_max) * ln((a - p_min) / (a - p_max)) = 1 in a.  The
    left side falls strictly from +inf toward 1 - p_min/p_max < 1, so a
    unique root exists whenever the band is non-degenerate.
    """
    p_min, p_max = spec.p_min, spec.p_max
    if p_min == p_max:
        raise NoBracket("p_min == p_max: the defining equation is identically 0")

    def g(a: float) -> float:
        return (a / p_max) * log_price_ratio(a, p_max, p_min) - 1.0

    lo = p_max * (1.0 + 1e-12)
    hi = 2.0 * p_max
    for _ in range(70):
        if g(hi) < 0.0:
            break
        hi *= 2.0
    else:
        raise NoBracket("could not bracket the threshold price")
    root = _bisect_decreasing(g, lo, hi)
    if abs(g(root)) > ROOT_RESIDUAL_TOL:
        raise InternalConsistencyError(f"threshold bisection residual {g(root)}")
    return root


def pi_star_upper_bound(spec: ProblemSpec) -> float:
    """min(sqrt(alpha / p_min), p_max / p_min); also the bisection bracket."""
    return min(math.sqrt(spec.alpha / spec.p_min), spec.theta)


@dataclass(frozen=True)
class RatioSolution:
    """Best maintainable target plus solver diagnostics.

    branch is "closed_form" above the alpha threshold, "root" below it,
    and "degenerate" when the instance forces pi_star = 1 outright
    (alpha == p_min, or a flat price band).  residual is |V(pi_star) - c|;
    it is only meaningful outside the degenerate branch, where V is
    identically zero or trivially equal to capacity.
    """

    alpha_star: float | None
    pi_star: float
    branch: str
    upper_bound: float
    residual: float


@lru_cache(maxsize=None)
def solve_pi_star(spec: ProblemSpec) -> RatioSolution:
    """Smallest ratio target whose worst-case charge total fits capacity."""
    alpha, p_min, p_max = spec.alpha, spec.p_min, spec.p_max
    bound = pi_star_upper_bound(spec)
    c = spec.capacity_f

    if p_min == p_max:
        # Flat band: every price equals p_min, target 1 is free.
        residual = 0.0 if alpha > p_max else c  # V(1) is c or identically 0
        return RatioSolution(None, 1.0, "degenerate", bound, residual)
    if alpha == p_min:
        # Charging is never strictly worthwhile; the policy stays idle.
        return RatioSolution(solve_alpha_star(spec), 1.0, "degenerate", bound, c)

    alpha_star = solve_alpha_star(spec)
    if alpha > alpha_star:
        lump = p_max / (alpha - p_max)
        pi = lump / (lump - log_price_ratio(alpha, p_max, p_min))
        branch = "closed_form"
    else:
        def excess(pi: float) -> float:
            # Worst-case total at unit capacity minus the unit capacity.
            return pi * log_price_ratio(alpha, alpha / pi, p_min) - 1.0

        hi = bound
        for _ in range(8):
            if excess(hi) <= 0.0:
                break
            hi *= 1.0 + 1e-9
        else:
            raise NoBracket("upper bracket failed to cap the target equation")
        pi = _bisect_decreasing(excess, PI_LOWER_BRACKET, hi)
        if abs(excess(pi)) > ROOT_RESIDUAL_TOL:
            raise InternalConsistencyError(f"target bisection residual {excess(pi)}")
        branch = "root"

    residual = abs(max_total_charge(spec, pi) - c)
    return RatioSolution(alpha_star, pi, branch, bound, residual)


@dataclass(frozen=True)
class AdaptiveRatioContext:
    """Mid-episode state the per-slot target depends on."""

    cumulative_charge: float
    eta_prev: float


def max_total_charge_from(
    ctx: AdaptiveRatioContext, spec: ProblemSpec, pi_t: float, price: float
) -> float:
    """Worst-case final total when committing to target pi_t at `price`.

    Counts charge already banked, the forced top-up at the current price,
    and the worst-case accumulation over any further price descent.
    """
    alpha, c = spec.alpha, spec.capacity_f
    forced = (ctx.eta_prev - price * c * pi_t) / (alpha - price)
    tail = c * pi_t * log_price_ratio(alpha, price, spec.p_min)
    return ctx.cumulative_charge + forced + tail


def solve_pi_t(ctx: AdaptiveRatioContext, spec: ProblemSpec, price: float) -> float:
    """Tightest target sustainable from here on, given history in ctx.

    Valid only at prices below alpha that set a new running minimum; the
    linear equation it solves has a strictly negative slope in pi there,
    so a non-negative denominator means the caller fed inconsistent state.

    Successive targets shrink whenever each recomputation was acted on
    (charge bracket nonempty).  They can rise on benign traces: a first
    price just under alpha solves to a small target with an empty bracket,
    leaving the next minimum an effectively fresh solve.
    """
    alpha, c = spec.alpha, spec.capacity_f
    if not price < alpha:
        raise ValidationError(f"per-slot target needs price < alpha, got {price} >= {alpha}")
    gap = alpha - price
    denom = c * (log_price_ratio(alpha, price, spec.p_min) - price / gap)
    if denom >= 0.0:
        raise DenominatorSignViolation(f"nonnegative slope {denom} at price {price}")
    numer = c - ctx.cumulative_charge - ctx.eta_prev / gap
    return numer / denom
