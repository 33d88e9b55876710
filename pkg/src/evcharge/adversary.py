"""Worst-case price traces and an adaptive truncation adversary.

The hardest feasible input for a target-pi policy is a strictly
decreasing price path: it starts where charging first becomes forced
(min(alpha/pi, p_max)) and descends to p_min with the gaps to alpha
shrinking geometrically, which makes the policy's forced charges equal
across steps and drives its total toward the worst-case supremum.

The adaptive adversary turns that path into a lower-bound certificate
for any other policy: it replays the path against both the candidate
and the reference policy, and ends the episode as soon as the candidate
has banked less charge than the reference, freezing in a ratio at least
as bad as the reference target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DegenerateSpec, PriceTrace, ProblemSpec, ValidationError
from .online import PolicyRunner, _FixedRunner
from .ratio import solve_pi_star

MIN_LEVEL_GAP = 1e-12

# Candidate charged strictly less than the reference, beyond float noise.
TRUNCATION_SLACK = 1e-12


@dataclass(frozen=True)
class AdversaryTrace:
    prices: PriceTrace
    achieved_ratio_target: float
    steps: int


def worst_case_no_limit(spec: ProblemSpec, pi: float, steps: int) -> AdversaryTrace:
    """Strictly decreasing price path that exhausts a target-pi policy."""
    if steps < 1:
        raise ValidationError(f"need at least one step, got {steps}")
    if pi < 1.0 - 1e-12:
        raise ValidationError(f"ratio target must be >= 1, got {pi}")
    alpha, p_min, p_max = spec.alpha, spec.p_min, spec.p_max
    if alpha == p_min:
        raise DegenerateSpec("alpha == p_min: never charging is optimal, no descent exists")
    p_start = min(alpha / pi, p_max)
    if p_start <= p_min + MIN_LEVEL_GAP or steps == 1:
        return AdversaryTrace(PriceTrace((p_min,)), pi, 1)

    span = math.log((alpha - p_min) / (alpha - p_start))
    # cap keeps the tightest level spacing at twice the gap floor so float
    # rounding cannot collapse adjacent levels
    cap = 1 + int((alpha - p_start) * span / (2 * MIN_LEVEL_GAP))
    n = min(steps, max(2, cap))
    gaps = np.geomspace(alpha - p_start, alpha - p_min, n)
    prices = alpha - gaps
    prices[0] = p_start
    prices[-1] = p_min
    if np.any(np.diff(prices) > -MIN_LEVEL_GAP):
        raise ValidationError(f"cannot fit {n} strictly decreasing levels in the band")
    return AdversaryTrace(PriceTrace(tuple(prices.tolist())), pi, n)


def worst_case_rate_limited(spec: ProblemSpec, steps: int) -> AdversaryTrace:
    """Each descent level repeated capacity times, so every sub-problem of a
    capacity-splitting policy sees the full descent."""
    if spec.capacity.denominator != 1:
        raise ValidationError(
            f"rate-limited worst case needs an integer capacity, got {spec.capacity}"
        )
    c = int(spec.capacity)
    pi = solve_pi_star(spec).pi_star
    levels = worst_case_no_limit(spec, pi, steps)
    repeated = tuple(p for p in levels.prices for _ in range(c))
    return AdversaryTrace(PriceTrace(repeated), pi, len(repeated))


def adaptive_adversary(
    policy: PolicyRunner, spec: ProblemSpec, steps: int
) -> tuple[AdversaryTrace, float]:
    """Duel `policy` against the reference on the worst-case descent.

    Returns the (possibly truncated) trace actually played and the
    candidate's final cost ratio against the unlimited-rate optimum, a
    certified lower bound up to the descent's discretization.
    """
    pi_star = solve_pi_star(spec).pi_star
    plan = worst_case_no_limit(spec, pi_star, steps).prices.slots
    reference = _FixedRunner(spec, pi_star)
    c = spec.capacity_f

    cum_policy = 0.0
    cum_ref = 0.0
    eta = spec.alpha * c
    played = 0
    for t, price in enumerate(plan):
        look = plan[t + 1 : t + 1 + policy.lookahead_needed]
        out = policy.step(price, look)
        cum_policy += out.charge
        cum_ref += reference.step(price).charge
        eta -= (spec.alpha - price) * out.charge
        played = t + 1
        if cum_policy < cum_ref - TRUNCATION_SLACK:
            break
    opt = min(plan[played - 1], spec.alpha) * c
    ratio = eta / opt
    trace = AdversaryTrace(PriceTrace(plan[:played]), pi_star, played)
    return trace, ratio
