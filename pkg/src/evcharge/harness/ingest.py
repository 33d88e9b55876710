"""CSV price ingestion: calibrate band from quantiles, slice into episodes."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

import numpy as np

from ..core import EvChargeError, PriceTrace, ValidationError
from .config import ExperimentConfig, _parse_hhmm, episode_slot_count


class ParseError(EvChargeError):
    """Malformed input file; maps to CLI exit code 2."""


class EmptyAfterTrim(ValidationError):
    pass


@dataclass(frozen=True)
class Calibration:
    p_min: float
    p_max: float
    trim: float
    n_rows: int
    n_clamped: int


@dataclass(frozen=True)
class Episode:
    date: str  # calendar date of the window start
    trace: PriceTrace


@dataclass(frozen=True)
class IngestResult:
    calibration: Calibration
    episodes: tuple[Episode, ...]
    dropped_incomplete: int
    dropped_out_of_range: int


def _parse_rows(path: str, tz_offset_minutes: int) -> list[tuple[datetime, float]]:
    local = timezone(timedelta(minutes=tz_offset_minutes))
    rows: list[tuple[datetime, float]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["timestamp", "price"]:
            raise ParseError(f"{path}: expected header 'timestamp,price', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise ParseError(f"{path}:{lineno}: expected 2 columns, got {row}")
            try:
                ts = datetime.fromisoformat(row[0].strip())
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad timestamp {row[0]!r}") from exc
            if ts.tzinfo is not None:
                ts = ts.astimezone(local).replace(tzinfo=None)
            try:
                price = float(row[1])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad price {row[1]!r}") from exc
            if not math.isfinite(price):
                raise ParseError(f"{path}:{lineno}: non-finite price {row[1]!r}")
            rows.append((ts, price))
    return rows


def ingest_prices(path: str, cfg: ExperimentConfig) -> IngestResult:
    """Read timestamp,price rows; calibrate the band on trimmed quantiles;
    slice complete charging windows into episodes.

    Calibration drops the top and bottom `trim` quantiles, then every
    timeline price is clamped back into the calibrated band (or, with
    out_of_range=drop, the episode containing it is discarded).
    """
    rows = _parse_rows(path, cfg.tz_offset_minutes)
    if not rows:
        raise EmptyAfterTrim(f"{path}: no data rows")
    prices = np.array([p for _, p in rows], dtype=float)
    p_min = float(np.quantile(prices, cfg.trim))
    p_max = float(np.quantile(prices, 1.0 - cfg.trim))

    by_time = {ts: p for ts, p in rows}  # duplicate timestamps: last wins
    start = _parse_hhmm(cfg.window_start)
    n_slots = episode_slot_count(cfg)
    step = timedelta(minutes=cfg.slot_minutes)

    episodes: list[Episode] = []
    dropped_incomplete = 0
    dropped_range = 0
    n_clamped = 0
    for day in sorted({ts.date() for ts in by_time}):
        t0 = datetime.combine(day, start)
        raw = []
        for k in range(n_slots):
            raw.append(by_time.get(t0 + k * step))
        present = [p for p in raw if p is not None]
        if not present:
            continue
        if len(present) < n_slots:
            dropped_incomplete += 1
            continue
        if cfg.out_of_range == "drop" and any(p < p_min or p > p_max for p in present):
            dropped_range += 1
            continue
        clamped = []
        for p in present:
            q = min(max(p, p_min), p_max)
            if q != p:
                n_clamped += 1
            clamped.append(q)
        episodes.append(Episode(date=day.isoformat(), trace=PriceTrace(tuple(clamped))))

    calib = Calibration(p_min=p_min, p_max=p_max, trim=cfg.trim, n_rows=len(rows), n_clamped=n_clamped)
    return IngestResult(
        calibration=calib,
        episodes=tuple(episodes),
        dropped_incomplete=dropped_incomplete,
        dropped_out_of_range=dropped_range,
    )
