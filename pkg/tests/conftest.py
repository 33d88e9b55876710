"""Shared helpers: spec builders, trace generators, policy drivers."""

from __future__ import annotations

import math

import numpy as np

from evcharge.core import ProblemSpec, validate_spec
from evcharge.online import PolicyStep, make_policy


def spec_of(p_min=1.0, p_max=5.0, alpha=5.0, capacity=1) -> ProblemSpec:
    return validate_spec(p_min, p_max, alpha, capacity)


def drive(policy_name: str, spec: ProblemSpec, prices, pi=None) -> list[PolicyStep]:
    """Step a fresh policy down a price list and collect every output."""
    runner = make_policy(policy_name, spec, pi=pi)
    out = []
    prices = list(prices)
    for t, p in enumerate(prices):
        look = tuple(prices[t + 1 : t + 1 + runner.lookahead_needed])
        out.append(runner.step(p, look))
    return out


def total_charge(steps: list[PolicyStep]) -> float:
    return math.fsum(s.charge for s in steps)


def random_prices(rng: np.random.Generator, spec: ProblemSpec, T: int) -> list[float]:
    """Mixed-shape price path inside the spec band: iid, descending, or piecewise."""
    lo, hi = spec.p_min, spec.p_max
    kind = rng.integers(0, 3)
    if kind == 0:
        vals = np.exp(rng.uniform(np.log(lo), np.log(hi), size=T))
    elif kind == 1:
        vals = np.geomspace(rng.uniform(0.5 * (lo + hi), hi), rng.uniform(lo, 0.5 * (lo + hi)), T)
        vals = vals * rng.uniform(0.98, 1.02, size=T)
    else:
        n_seg = int(rng.integers(1, 5))
        levels = rng.uniform(lo, hi, size=n_seg)
        vals = np.repeat(levels, int(np.ceil(T / n_seg)))[:T]
    return [float(x) for x in np.clip(vals, lo, hi)]


def lattice_optimum(spec: ProblemSpec, prices, step: int = 8) -> float:
    """Independent offline oracle: exact DP over charge amounts on a 1/step grid.

    States count grid units charged so far; each slot may add 0..step units.
    Valid as an equality oracle whenever capacity sits on the grid.
    """
    units = int(spec.capacity * step)
    assert units == spec.capacity * step, "capacity must sit on the lattice"
    inf = math.inf
    cost = [0.0] + [inf] * units
    for p in prices:
        nxt = list(cost)
        for s in range(1, units + 1):
            lo = max(0, s - step)
            best = min(cost[q] + p * (s - q) / step for q in range(lo, s))
            if best < nxt[s]:
                nxt[s] = best
        cost = nxt
    cap = spec.capacity_f
    return min(cost[s] + spec.alpha * (cap - s / step) for s in range(units + 1) if cost[s] < inf)


def decreasing_prices(rng: np.random.Generator, lo: float, start: float, T: int) -> list[float]:
    """Strictly decreasing path from just under `start` down to `lo`."""
    top = start * (1.0 - 1e-9)
    if T == 1:
        return [top]
    cuts = np.sort(rng.uniform(lo, top, size=T - 2))[::-1] if T > 2 else np.empty(0)
    vals = np.concatenate(([top], cuts, [lo]))
    # enforce strict decrease in case of duplicate draws
    for i in range(1, len(vals)):
        if vals[i] >= vals[i - 1]:
            vals[i] = np.nextafter(vals[i - 1], 0.0)
    return [float(x) for x in vals]
