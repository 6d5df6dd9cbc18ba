"""Time-of-use price signal.

A tariff is a set of daily bands, each a half-open minute range
``[start, end)`` with a price in cents/kWh.  A band whose start is later
than its end wraps across midnight.  Together the bands must cover all
1440 minutes of the day exactly once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Any, Mapping, Sequence

import numpy as np

from .errors import ConfigError, TariffValidationError

if TYPE_CHECKING:
    from .domain import TimeGrid

MINUTES_PER_DAY = 1440
BAND_LABELS = ("off_peak", "mid_peak", "peak")
DEFAULT_TARIFF_PATH = Path(__file__).parent / "data" / "default_tariff.json"


@dataclass(frozen=True)
class TariffBand:
    start_minute: int
    end_minute: int
    price: float
    label: str

    def minutes(self) -> np.ndarray:
        if self.start_minute < self.end_minute:
            return np.arange(self.start_minute, self.end_minute)
        # wraps midnight (or spans the whole day when start == end)
        return np.concatenate(
            [np.arange(self.start_minute, MINUTES_PER_DAY), np.arange(0, self.end_minute)]
        )


@dataclass(frozen=True)
class TariffProfile:
    bands: tuple[TariffBand, ...]

    def __post_init__(self):
        _check_bands(self.bands)

    def minute_prices(self) -> np.ndarray:
        prices = np.empty(MINUTES_PER_DAY)
        for band in self.bands:
            prices[band.minutes()] = band.price
        return prices

    def band_at(self, minute: int) -> TariffBand:
        minute %= MINUTES_PER_DAY
        for band in self.bands:
            s, e = band.start_minute, band.end_minute
            inside = s <= minute < e if s < e else (minute >= s or minute < e)
            if inside:
                return band
        raise AssertionError("coverage checked at construction")

    def slot_prices(self, grid: TimeGrid) -> np.ndarray:
        """Per-slot price vector for ``grid``; read-only."""
        res = grid.resolution_minutes
        misaligned = sorted(
            {m for b in self.bands for m in (b.start_minute, b.end_minute) if m % res}
        )
        if misaligned:
            raise ConfigError(
                f"tariff band boundaries {misaligned} (minutes) do not align "
                f"with {res}-minute slots"
            )
        starts = (np.arange(grid.slot_count) * res) % MINUTES_PER_DAY
        prices = self.minute_prices()[starts]
        prices.setflags(write=False)
        return prices

    @classmethod
    def from_slot_prices(cls, prices: Sequence[float], resolution_minutes: int = 60) -> TariffProfile:
        """Build a tariff that reproduces ``prices`` slot by slot from midnight.

        The last price is held until 24:00.  Labels follow price rank: the
        cheapest level is off-peak, the dearest peak, everything else mid-peak.
        """
        prices = [float(p) for p in prices]
        if not prices or len(prices) * resolution_minutes > MINUTES_PER_DAY:
            raise ConfigError("need between 1 and one day's worth of slot prices")
        lo, hi = min(prices), max(prices)

        def label(p):
            if p == hi and p != lo:
                return "peak"
            return "off_peak" if p == lo else "mid_peak"

        bands = []
        for i, p in enumerate(prices):
            end = MINUTES_PER_DAY if i == len(prices) - 1 else (i + 1) * resolution_minutes
            bands.append(TariffBand(i * resolution_minutes, end % MINUTES_PER_DAY, p, label(p)))
        return cls(tuple(bands))


def price_at(tariff: TariffProfile, grid: TimeGrid, slot: int) -> float:
    if not 0 <= slot < grid.slot_count:
        raise IndexError(f"slot {slot} outside [0, {grid.slot_count})")
    return float(tariff.band_at(slot * grid.resolution_minutes).price)


def _format_minute(m: int) -> str:
    return f"{m // 60:02d}:{m % 60:02d}"


def _runs(minutes: np.ndarray) -> list[tuple[int, int]]:
    """Collapse sorted minute indices into half-open ranges."""
    runs = []
    start = prev = None
    for m in minutes.tolist():
        if start is None:
            start = prev = m
        elif m == prev + 1:
            prev = m
        else:
            runs.append((start, prev + 1))
            start = prev = m
    if start is not None:
        runs.append((start, prev + 1))
    return runs


def _describe(runs) -> str:
    return ", ".join(f"{_format_minute(a)}-{_format_minute(b)} (minutes {a}-{b})" for a, b in runs)


def _check_bands(bands: Sequence[TariffBand]) -> None:
    if not bands:
        raise TariffValidationError("tariff has no bands")
    coverage = np.zeros(MINUTES_PER_DAY, dtype=int)
    for band in bands:
        if not (0 <= band.start_minute < MINUTES_PER_DAY and 0 <= band.end_minute < MINUTES_PER_DAY):
            raise TariffValidationError(f"band {band} has minute out of [0, 1440)")
        if not band.price > 0:
            raise TariffValidationError(f"band {band.label} has non-positive price {band.price}")
        if band.label not in BAND_LABELS:
            raise TariffValidationError(f"band label {band.label!r} not one of {BAND_LABELS}")
        coverage[band.minutes()] += 1
    gaps = _runs(np.flatnonzero(coverage == 0))
    if gaps:
        raise TariffValidationError(f"tariff leaves uncovered: {_describe(gaps)}")
    overlaps = _runs(np.flatnonzero(coverage > 1))
    if overlaps:
        raise TariffValidationError(f"tariff bands overlap at: {_describe(overlaps)}")


def parse_clock(text: str) -> int:
    """``"HH:MM"`` to minute of day; ``"24:00"`` maps to 1440."""
    try:
        hh, mm = text.split(":")
        h, m = int(hh), int(mm)
    except (AttributeError, ValueError):
        raise TariffValidationError(f"bad clock time {text!r}, expected HH:MM") from None
    if not (0 <= m < 60 and (0 <= h < 24 or (h == 24 and m == 0))):
        raise TariffValidationError(f"clock time {text!r} out of range")
    return h * 60 + m


_BAND_FIELDS = {"start", "end", "price", "label"}


def tariff_from_dict(doc: Mapping[str, Any]) -> TariffProfile:
    if not isinstance(doc, Mapping) or set(doc) != {"bands"}:
        raise TariffValidationError('tariff document must be {"bands": [...]} and nothing else')
    bands = []
    for raw in doc["bands"]:
        if not isinstance(raw, Mapping):
            raise TariffValidationError(f"band entry {raw!r} is not an object")
        unknown = set(raw) - _BAND_FIELDS
        missing = _BAND_FIELDS - set(raw)
        if unknown or missing:
            raise TariffValidationError(
                f"band {raw!r}: unknown fields {sorted(unknown)}, missing {sorted(missing)}"
            )
        price = raw["price"]
        if isinstance(price, bool) or not isinstance(price, (int, float)):
            raise TariffValidationError(f"band price {price!r} is not a number")
        bands.append(
            TariffBand(
                parse_clock(raw["start"]) % MINUTES_PER_DAY,
                parse_clock(raw["end"]) % MINUTES_PER_DAY,
                float(price),
                raw["label"],
            )
        )
    return TariffProfile(tuple(bands))


def tariff_to_dict(tariff: TariffProfile) -> dict:
    return {
        "bands": [
            {
                "start": _format_minute(b.start_minute),
                "end": "24:00" if b.end_minute == 0 else _format_minute(b.end_minute),
                "price": b.price,
                "label": b.label,
            }
            for b in tariff.bands
        ]
    }


def load_tariff(document: str | Mapping[str, Any]) -> TariffProfile:
    """Parse a tariff from JSON text or an already-decoded mapping."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise TariffValidationError(f"tariff is not valid JSON: {exc}") from None
    return tariff_from_dict(document)


def load_tariff_file(path: str | Path) -> TariffProfile:
    return load_tariff(Path(path).read_text())


def default_tariff() -> TariffProfile:
    return load_tariff_file(DEFAULT_TARIFF_PATH)
