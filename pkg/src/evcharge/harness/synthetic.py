"""Seeded synthetic price corpora so experiments run with no external data."""

from __future__ import annotations

from datetime import datetime, timedelta

import numpy as np

from ..core import ValidationError

MODELS = ("log_uniform", "regime", "descending")


def _log_uniform(rng: np.random.Generator, n: int, lo: float, hi: float) -> np.ndarray:
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size=n))


def _regime(rng: np.random.Generator, n: int, lo: float, hi: float) -> np.ndarray:
    """Two-regime Markov prices: calm around the low band, spiky high band."""
    mid = lo + 0.35 * (hi - lo)
    out = np.empty(n)
    high = False
    for i in range(n):
        if rng.uniform() < 0.04:
            high = not high
        if high:
            out[i] = rng.uniform(mid, hi)
        else:
            out[i] = rng.uniform(lo, mid)
    return out


def _descending_day(rng: np.random.Generator, n: int, lo: float, hi: float) -> np.ndarray:
    """One 17:00-anchored day: evening peak falling to an early-morning low.

    Adversarially shaped for early committers: waiting is almost always
    rewarded with a better price later in the window.  The descent bottoms
    out 15 hours in (08:00, the default window close) so overnight windows
    see the full slide to the corpus floor; prices then climb back toward
    the next evening's peak.
    """
    top = rng.uniform(0.75 * hi, hi)
    bottom = rng.uniform(lo, lo + 0.05 * (hi - lo))
    n_down = max(2, (n * 15) // 24)
    down = np.geomspace(top, bottom, n_down)
    up = np.geomspace(bottom, rng.uniform(0.75 * hi, hi), n - n_down + 1)[1:]
    path = np.concatenate([down, up])
    noise = rng.uniform(0.98, 1.02, size=n)
    return np.clip(path * noise, lo, hi)


def synthetic_prices(model: str, days: int, seed: int, lo: float = 1.0, hi: float = 10.0,
                     slot_minutes: int = 5) -> np.ndarray:
    if model not in MODELS:
        raise ValidationError(f"unknown synthetic model {model!r}; pick one of {MODELS}")
    if days < 1 or lo <= 0 or hi <= lo:
        raise ValidationError("need days >= 1 and 0 < lo < hi")
    per_day = (24 * 60) // slot_minutes
    n = days * per_day
    rng = np.random.default_rng(seed)
    if model == "log_uniform":
        return _log_uniform(rng, n, lo, hi)
    if model == "regime":
        return _regime(rng, n, lo, hi)
    chunks = [_descending_day(rng, per_day, lo, hi) for _ in range(days)]
    return np.concatenate(chunks)


def write_corpus(path: str, model: str, days: int, seed: int, lo: float = 1.0, hi: float = 10.0,
                 start: str = "2021-03-01", slot_minutes: int = 5) -> str:
    """Write a timestamp,price CSV covering `days` full days of slots.

    The descending model anchors its daily drift at 17:00 so evening-start
    charging windows see a falling path.
    """
    prices = synthetic_prices(model, days, seed, lo, hi, slot_minutes)
    t0 = datetime.fromisoformat(start)
    if model == "descending":
        t0 = t0.replace(hour=17, minute=0)
    step = timedelta(minutes=slot_minutes)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("timestamp,price\n")
        for k, p in enumerate(prices.tolist()):
            fh.write(f"{(t0 + k * step).isoformat(sep=' ')},{p!r}\n")
    return path
