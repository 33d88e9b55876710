"""Parameter sweeps and policy comparisons over an ingested corpus."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from statistics import fmean

from ..core import MAX_CAPACITY_DENOMINATOR, ValidationError, validate_spec
from ..offline import opt_rate_limited
from ..ratio import solve_pi_star
from .config import ExperimentConfig
from .ingest import IngestResult, ingest_prices
from .runner import run_episode, slot_energy_kwh, spec_from_calibration

_SEASONS = {
    12: "winter", 1: "winter", 2: "winter",
    3: "spring", 4: "spring", 5: "spring",
    6: "summer", 7: "summer", 8: "summer",
    9: "fall", 10: "fall", 11: "fall",
}


@dataclass(frozen=True)
class AlphaSweepRow:
    alpha_factor: float
    alpha: float
    pi_star: float
    mean_ratio: float
    mean_charged_fraction: float


@dataclass(frozen=True)
class RateSweepRow:
    rate_factor: float
    capacity: str
    policy: str
    mean_alg_objective: float  # per-episode cost-plus-dissatisfaction, in
    mean_opt_objective: float  # price units * kWh at the unscaled rate


@dataclass(frozen=True)
class CompareRow:
    bucket: str
    policy: str
    episodes: int
    mean_ratio: float
    mean_objective: float
    mean_charged_fraction: float


def _ingested(cfg: ExperimentConfig) -> IngestResult:
    if cfg.prices is None:
        raise ValidationError("config has no prices path")
    result = ingest_prices(cfg.prices, cfg)
    if not result.episodes:
        raise ValidationError(f"{cfg.prices}: no complete episodes to simulate")
    return result


def _distributor_policy(capacity: Fraction) -> str:
    if capacity <= 1:
        return "fixed"
    return "int" if capacity.denominator == 1 else "rat"


def sweep_alpha(cfg: ExperimentConfig, ingested: IngestResult | None = None) -> list[AlphaSweepRow]:
    """Re-solve the target and re-run the capacity-splitting policy for each
    dissatisfaction price in the grid (as multiples of calibrated p_min)."""
    data = ingested or _ingested(cfg)
    calib = data.calibration
    rows = []
    for factor in cfg.alpha_grid:
        spec = validate_spec(calib.p_min, calib.p_max, factor * calib.p_min, cfg.capacity, cfg.slot_minutes)
        policy = _distributor_policy(spec.capacity)
        ratios = []
        fractions = []
        for ep in data.episodes:
            row, _ = run_episode(cfg, spec, ep.trace, policy, ep.date, collect_slots=False)
            ratios.append(row.ratio)
            fractions.append(row.charged_fraction)
        rows.append(
            AlphaSweepRow(
                alpha_factor=factor,
                alpha=spec.alpha,
                pi_star=solve_pi_star(spec).pi_star,
                mean_ratio=fmean(ratios),
                mean_charged_fraction=fmean(fractions),
            )
        )
    return rows


def sweep_rate_limit(cfg: ExperimentConfig, ingested: IngestResult | None = None) -> list[RateSweepRow]:
    """Rescale the per-slot cap and compare policy and optimum objectives.

    A rate factor f multiplies the physical per-slot maximum, so capacity
    in normalized units becomes capacity / f; objectives are scaled back by
    f to stay comparable across the grid (fixed total energy need).
    """
    data = ingested or _ingested(cfg)
    calib = data.calibration
    base = spec_from_calibration(cfg, calib)
    energy = slot_energy_kwh(cfg)
    rows = []
    for factor in cfg.rate_grid:
        f = Fraction(str(factor)).limit_denominator(MAX_CAPACITY_DENOMINATOR)
        if f <= 0:
            raise ValidationError(f"rate factor must be positive, got {factor}")
        capacity = base.capacity / f
        spec = validate_spec(calib.p_min, calib.p_max, base.alpha, capacity, cfg.slot_minutes)
        policy = _distributor_policy(capacity)
        scale = factor * energy
        alg_vals = []
        opt_vals = []
        for ep in data.episodes:
            row, _ = run_episode(cfg, spec, ep.trace, policy, ep.date, collect_slots=False)
            alg_vals.append(row.objective * scale)
            opt_vals.append(opt_rate_limited(spec, ep.trace.slots)[0] * scale)
        rows.append(
            RateSweepRow(
                rate_factor=factor,
                capacity=str(capacity),
                policy=policy,
                mean_alg_objective=fmean(alg_vals),
                mean_opt_objective=fmean(opt_vals),
            )
        )
    return rows


def _bucket(date: str, mode: str) -> str:
    if mode == "all":
        return "all"
    month = int(date[5:7])
    return f"{date[:4]}-{date[5:7]}" if mode == "month" else _SEASONS[month]


def compare_policies(cfg: ExperimentConfig, ingested: IngestResult | None = None) -> list[CompareRow]:
    """Mean per-policy scores grouped by a date bucket."""
    data = ingested or _ingested(cfg)
    spec = spec_from_calibration(cfg, data.calibration)
    grouped: dict[tuple[str, str], list] = {}
    for ep in data.episodes:
        key_bucket = _bucket(ep.date, cfg.bucket)
        for policy in cfg.policies:
            row, _ = run_episode(cfg, spec, ep.trace, policy, ep.date, collect_slots=False)
            grouped.setdefault((key_bucket, policy), []).append(row)
    out = []
    for (bucket, policy), rows in sorted(grouped.items()):
        out.append(
            CompareRow(
                bucket=bucket,
                policy=policy,
                episodes=len(rows),
                mean_ratio=fmean(r.ratio for r in rows),
                mean_objective=fmean(r.objective for r in rows),
                mean_charged_fraction=fmean(r.charged_fraction for r in rows),
            )
        )
    return out
