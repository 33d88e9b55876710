"""Experiment configuration: a flat key=value file plus CLI overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from datetime import time

from ..core import ValidationError


@dataclass(frozen=True)
class ExperimentConfig:
    prices: str | None = None
    out_dir: str = "reports"
    alpha: float | None = None        # absolute; wins over alpha_factor
    alpha_factor: float = 2.0         # alpha = factor * calibrated p_min
    capacity: str = "24"              # slots at full rate; "m/n" accepted
    slot_minutes: int = 5
    window_start: str = "17:00"
    window_end: str = "08:00"
    trim: float = 0.05
    out_of_range: str = "clamp"       # or "drop" (drop the whole episode)
    policies: tuple[str, ...] = ("fixed", "adaptive", "int", "rhc:0", "naive")
    alpha_grid: tuple[float, ...] = (1.0, 2.0, 4.0, 7.0, 10.0, 14.0, 20.0)
    rate_grid: tuple[float, ...] = (0.5, 0.75, 1.0, 1.25, 1.5)
    seed: int = 0
    charger_kw: float = 8.8
    tz_offset_minutes: int = 0
    bucket: str = "season"            # season | month | all


_TUPLE_STR = {"policies"}
_TUPLE_FLOAT = {"alpha_grid", "rate_grid"}
_OPTIONAL_FLOAT = {"alpha"}


def _coerce(name: str, raw: str):
    hint = ExperimentConfig.__dataclass_fields__[name].type
    if name in _TUPLE_STR:
        return tuple(x.strip() for x in raw.split(",") if x.strip())
    if name in _TUPLE_FLOAT:
        return tuple(float(x) for x in raw.split(",") if x.strip())
    if name in _OPTIONAL_FLOAT:
        return float(raw)
    if hint == "int":
        return int(raw)
    if hint == "float":
        return float(raw)
    return raw


def parse_config_text(text: str) -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ValidationError(f"config line {lineno}: expected key = value, got {line!r}")
        key, _, raw = body.partition("=")
        key = key.strip()
        if key not in known:
            raise ValidationError(f"config line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw.strip())
    return check_config(ExperimentConfig(**values))


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def apply_overrides(cfg: ExperimentConfig, **overrides) -> ExperimentConfig:
    supplied = {k: v for k, v in overrides.items() if v is not None}
    return check_config(replace(cfg, **supplied)) if supplied else cfg


def _parse_hhmm(value: str) -> time:
    try:
        hh, mm = value.split(":")
        return time(int(hh), int(mm))
    except Exception as exc:
        raise ValidationError(f"bad time of day {value!r}, expected HH:MM") from exc


def episode_slot_count(cfg: ExperimentConfig) -> int:
    """Number of slots from window_start to window_end (wrapping midnight)."""
    start = _parse_hhmm(cfg.window_start)
    end = _parse_hhmm(cfg.window_end)
    span = ((end.hour - start.hour) * 60 + (end.minute - start.minute)) % (24 * 60)
    if span == 0:
        raise ValidationError("window_start equals window_end")
    if span % cfg.slot_minutes:
        raise ValidationError(f"window of {span} minutes not divisible by {cfg.slot_minutes}-minute slots")
    return span // cfg.slot_minutes


def check_config(cfg: ExperimentConfig) -> ExperimentConfig:
    if not 0.0 <= cfg.trim < 0.5:
        raise ValidationError(f"trim must be in [0, 0.5), got {cfg.trim}")
    if cfg.out_of_range not in ("clamp", "drop"):
        raise ValidationError(f"out_of_range must be clamp or drop, got {cfg.out_of_range!r}")
    if cfg.bucket not in ("season", "month", "all"):
        raise ValidationError(f"bucket must be season, month, or all, got {cfg.bucket!r}")
    if cfg.slot_minutes <= 0:
        raise ValidationError("slot_minutes must be positive")
    if cfg.charger_kw <= 0:
        raise ValidationError("charger_kw must be positive")
    episode_slot_count(cfg)
    return cfg
