"""Problem instances, schedules, and the genome encoding used by the optimizers.

Genome layout for a problem with ``K`` non-interruptible and ``M``
interruptible appliances on a ``T``-slot grid::

    [start_0, ..., start_{K-1}, bits of interruptible 0 (T), ..., bits of interruptible M-1 (T)]

Start genes take values in ``[0, T - required_slots]``; bits in ``{0, 1}``.
Fixed appliances carry no genes.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import ConfigError, EncodingError, StructuralError
from .tariff import TariffProfile, load_tariff_file, tariff_from_dict, tariff_to_dict

DEFAULT_PROBLEM_PATH = Path(__file__).parent / "data" / "default_problem.json"

Genome = np.ndarray


@dataclass(frozen=True)
class TimeGrid:
    horizon_hours: int = 24
    resolution_minutes: int = 60

    def __post_init__(self):
        h, r = self.horizon_hours, self.resolution_minutes
        if not isinstance(h, int) or h <= 0:
            raise ConfigError(f"horizon_hours must be a positive integer, got {h!r}")
        if not isinstance(r, int) or r <= 0 or 60 % r:
            raise ConfigError(f"resolution_minutes={r!r} does not divide 60")
        if (h * 60) % r:
            raise ConfigError(f"horizon of {h} h is not a whole number of {r}-minute slots")

    @property
    def slot_count(self) -> int:
        return self.horizon_hours * 60 // self.resolution_minutes

    @property
    def slot_duration_h(self) -> Fraction:
        return Fraction(self.resolution_minutes, 60)

    def slot_start_minute(self, slot: int) -> int:
        return slot * self.resolution_minutes


def build_time_grid(horizon_hours: int = 24, resolution_minutes: int = 60) -> TimeGrid:
    return TimeGrid(horizon_hours, resolution_minutes)


class FlexClass(enum.Enum):
    FIXED = "fixed"
    NON_INTERRUPTIBLE = "non_interruptible"
    INTERRUPTIBLE = "interruptible"


@dataclass(frozen=True)
class Appliance:
    name: str
    power_rating_kw: float
    oti_hours: int
    flex_class: FlexClass
    baseline_start_slot: int
    fixed_window_start_slot: int | None = None
    predecessor: str | None = None

    def __post_init__(self):
        if not self.name:
            raise ConfigError("appliance name must be non-empty")
        if not self.power_rating_kw > 0:
            raise ConfigError(f"{self.name}: power rating must be > 0")
        if isinstance(self.oti_hours, bool) or not isinstance(self.oti_hours, int) or self.oti_hours <= 0:
            raise ConfigError(f"{self.name}: oti_hours must be a positive integer")
        if self.fixed_window_start_slot is not None and self.flex_class is not FlexClass.FIXED:
            raise ConfigError(f"{self.name}: fixed_start only applies to fixed appliances")
        if self.predecessor == self.name:
            raise ConfigError(f"{self.name}: cannot be its own predecessor")

    @property
    def fixed_start(self) -> int:
        if self.fixed_window_start_slot is not None:
            return self.fixed_window_start_slot
        return self.baseline_start_slot


def required_slots(appliance: Appliance, grid: TimeGrid) -> int:
    slots = Fraction(appliance.oti_hours * 60, grid.resolution_minutes)
    if slots.denominator != 1:
        raise ConfigError(
            f"{appliance.name}: {appliance.oti_hours} h is not a whole number of "
            f"{grid.resolution_minutes}-minute slots"
        )
    return int(slots)


@dataclass(frozen=True)
class GenomeLayout:
    """Where each gene lives and what values it may take."""

    slot_count: int
    start_appliances: tuple[int, ...]
    bit_appliances: tuple[int, ...]
    highs: np.ndarray = field(repr=False)

    @property
    def length(self) -> int:
        return len(self.highs)

    @property
    def n_starts(self) -> int:
        return len(self.start_appliances)

    @property
    def is_bit(self) -> np.ndarray:
        mask = np.ones(self.length, dtype=bool)
        mask[: self.n_starts] = False
        return mask


@dataclass(frozen=True)
class Problem:
    grid: TimeGrid
    appliances: tuple[Appliance, ...]
    tariff: TariffProfile
    grid_capacity_kwh: float
    w_cost: float = 0.5
    w_par: float = 0.5
    precedence_penalty: float = 10.0
    capacity_penalty: float = 10.0

    def __post_init__(self):
        if not isinstance(self.appliances, tuple):
            object.__setattr__(self, "appliances", tuple(self.appliances))
        if not self.appliances:
            raise ConfigError("problem needs at least one appliance")
        names = [a.name for a in self.appliances]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise ConfigError(f"duplicate appliance names: {dupes}")
        T = self.grid.slot_count
        for a in self.appliances:
            if a.oti_hours > self.grid.horizon_hours:
                raise ConfigError(f"{a.name}: OTI {a.oti_hours} h exceeds the {self.grid.horizon_hours} h horizon")
            req = required_slots(a, self.grid)
            if a.predecessor is not None and a.predecessor not in names:
                raise ConfigError(f"{a.name}: predecessor {a.predecessor!r} is not in the problem")
            if a.flex_class is FlexClass.FIXED and not 0 <= a.fixed_start <= T - req:
                raise ConfigError(f"{a.name}: fixed window starting at slot {a.fixed_start} overflows the horizon")
        if min(self.w_cost, self.w_par) < 0 or abs(self.w_cost + self.w_par - 1.0) > 1e-9:
            raise ConfigError(f"weights must be >= 0 and sum to 1, got ({self.w_cost}, {self.w_par})")
        if min(self.precedence_penalty, self.capacity_penalty) < 0:
            raise ConfigError("penalty weights must be >= 0")
        if not self.grid_capacity_kwh > 0:
            raise ConfigError("capacity_kwh must be > 0")
        biggest = float(self.slot_energy.max())
        if self.grid_capacity_kwh < biggest:
            raise ConfigError(
                f"capacity {self.grid_capacity_kwh} kWh per slot is below the largest "
                f"single-appliance slot energy {biggest} kWh; no feasible schedule exists"
            )

    # Derived arrays.  Computed once per instance; treat as read-only.

    @cached_property
    def required(self) -> np.ndarray:
        return np.array([required_slots(a, self.grid) for a in self.appliances], dtype=np.int64)

    @cached_property
    def slot_energy(self) -> np.ndarray:
        dur = float(self.grid.slot_duration_h)
        return np.array([a.power_rating_kw * dur for a in self.appliances])

    @cached_property
    def prices(self) -> np.ndarray:
        return self.tariff.slot_prices(self.grid)

    @cached_property
    def cheap_order(self) -> np.ndarray:
        """Slots from cheapest to dearest, ties by lower index."""
        T = self.grid.slot_count
        return np.lexsort((np.arange(T), self.prices))

    @cached_property
    def dear_order(self) -> np.ndarray:
        T = self.grid.slot_count
        return np.lexsort((np.arange(T), -self.prices))

    @cached_property
    def layout(self) -> GenomeLayout:
        T = self.grid.slot_count
        starts = tuple(i for i, a in enumerate(self.appliances) if a.flex_class is FlexClass.NON_INTERRUPTIBLE)
        bits = tuple(i for i, a in enumerate(self.appliances) if a.flex_class is FlexClass.INTERRUPTIBLE)
        highs = np.concatenate(
            [T - self.required[list(starts)], np.ones(len(bits) * T, dtype=np.int64)]
        ).astype(np.int64)
        highs.setflags(write=False)
        return GenomeLayout(T, starts, bits, highs)

    @cached_property
    def fixed_states(self) -> np.ndarray:
        """States with only the fixed rows filled in."""
        states = np.zeros((len(self.appliances), self.grid.slot_count), dtype=np.uint8)
        for i, a in enumerate(self.appliances):
            if a.flex_class is FlexClass.FIXED:
                states[i, a.fixed_start : a.fixed_start + self.required[i]] = 1
        states.setflags(write=False)
        return states

    @cached_property
    def precedence_pairs(self) -> tuple[tuple[int, int], ...]:
        """``(predecessor_index, successor_index)`` for every precedence link."""
        index = {a.name: i for i, a in enumerate(self.appliances)}
        return tuple(
            (index[a.predecessor], i) for i, a in enumerate(self.appliances) if a.predecessor is not None
        )

    def appliance_index(self, name: str) -> int:
        for i, a in enumerate(self.appliances):
            if a.name == name:
                return i
        raise KeyError(name)


@dataclass(frozen=True, eq=False)
class Schedule:
    """Binary appliance-by-slot ON/OFF matrix, rows in problem order."""

    states: np.ndarray

    def __post_init__(self):
        states = np.array(self.states, dtype=np.uint8)
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    def __eq__(self, other):
        if not isinstance(other, Schedule):
            return NotImplemented
        return self.states.shape == other.states.shape and bool(np.array_equal(self.states, other.states))

    __hash__ = None

    def row(self, i: int) -> np.ndarray:
        return self.states[i]

    def on_slots(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.states[i])


# --- repair -----------------------------------------------------------------


def _repair_batch(bits: np.ndarray, required: int, cheap: np.ndarray, dear: np.ndarray) -> np.ndarray:
    """Vectorised count repair; ``bits`` is ``(N, T)`` of 0/1."""
    bits = bits.astype(np.uint8, copy=True)
    counts = bits.sum(axis=1, dtype=np.int64)
    short = required - counts
    if np.any(short > 0):
        by_cheap = bits[:, cheap]
        off = 1 - by_cheap
        turn_on = (off == 1) & (np.cumsum(off, axis=1) <= short[:, None])
        bits[:, cheap] = by_cheap | turn_on
    if np.any(short < 0):
        by_dear = bits[:, dear]
        turn_off = (by_dear == 1) & (np.cumsum(by_dear, axis=1) <= -short[:, None])
        bits[:, dear] = by_dear & ~turn_off
    return bits


def repair_row(bits: Sequence[int], required: int, tariff_or_prices) -> np.ndarray:
    """Force exactly ``required`` ON bits with the fewest flips, cheapest first.

    Excess ON bits are dropped from the dearest slots, missing ones added
    in the cheapest slots; price ties go to the lower slot index.
    ``tariff_or_prices`` is a per-slot price vector (or anything
    array-like of the same length as ``bits``).
    """
    bits = np.asarray(bits, dtype=np.uint8)
    prices = np.asarray(tariff_or_prices, dtype=float)
    if not 0 <= required <= len(bits):
        raise ValueError(f"required={required} outside [0, {len(bits)}]")
    if prices.shape != bits.shape:
        raise ValueError("prices and bits differ in length")
    idx = np.arange(len(bits))
    cheap = np.lexsort((idx, prices))
    dear = np.lexsort((idx, -prices))
    return _repair_batch(bits[None], required, cheap, dear)[0]


# --- encode / decode --------------------------------------------------------


def check_genomes(genomes: np.ndarray, problem: Problem) -> np.ndarray:
    genomes = np.asarray(genomes)
    squeeze = genomes.ndim == 1
    g2 = np.atleast_2d(genomes)
    L = problem.layout.length
    if g2.ndim != 2 or g2.shape[1] != L:
        raise EncodingError(f"genome length {g2.shape[-1]} does not match layout length {L}")
    if not np.issubdtype(g2.dtype, np.integer):
        if not np.all(np.mod(g2, 1) == 0):
            raise EncodingError("genome genes must be integers")
        g2 = g2.astype(np.int64)
    bad = (g2 < 0) | (g2 > problem.layout.highs)
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raise EncodingError(
            f"gene {col} = {g2[row, col]} outside [0, {problem.layout.highs[col]}]"
        )
    return g2[0] if squeeze else g2


def decode_batch(genomes: np.ndarray, problem: Problem, *, checked: bool = False) -> np.ndarray:
    """Decode ``(N, L)`` genomes into ``(N, A, T)`` uint8 state tensors."""
    if not checked:
        genomes = check_genomes(np.atleast_2d(genomes), problem)
    layout = problem.layout
    N, T = genomes.shape[0], layout.slot_count
    states = np.broadcast_to(problem.fixed_states, (N,) + problem.fixed_states.shape).copy()
    slots = np.arange(T)
    for k, a in enumerate(layout.start_appliances):
        start = genomes[:, k : k + 1]
        states[:, a, :] = (slots >= start) & (slots < start + problem.required[a])
    off = layout.n_starts
    for m, a in enumerate(layout.bit_appliances):
        bits = genomes[:, off + m * T : off + (m + 1) * T]
        states[:, a, :] = _repair_batch(bits, int(problem.required[a]), problem.cheap_order, problem.dear_order)
    return states


def decode(genome: Genome, problem: Problem) -> Schedule:
    genome = np.asarray(genome)
    if genome.ndim != 1:
        raise EncodingError("decode takes a single 1-D genome; use decode_batch for many")
    return Schedule(decode_batch(genome[None], problem)[0])


def encode(schedule: Schedule, problem: Problem) -> Genome:
    """Genome that decodes back to ``schedule``'s flexible rows.

    Non-interruptible rows must be contiguous runs of the right length and
    interruptible rows must already have the right ON count.
    """
    _check_shape(schedule, problem)
    layout = problem.layout
    genes = []
    for a in layout.start_appliances:
        on = schedule.on_slots(a)
        req = problem.required[a]
        if len(on) != req or (len(on) and on[-1] - on[0] + 1 != req):
            raise EncodingError(f"{problem.appliances[a].name}: row is not a contiguous run of {req} slots")
        genes.append(int(on[0]))
    for a in layout.bit_appliances:
        row = schedule.row(a)
        if int(row.sum()) != problem.required[a]:
            raise EncodingError(f"{problem.appliances[a].name}: row has the wrong ON count")
        genes.extend(int(b) for b in row)
    return np.array(genes, dtype=np.int64)


# --- validation -------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    constraint: str  # binary | count | fixed | contiguity | precedence | capacity
    appliance: str | None
    slot: int | None
    detail: str


def _check_shape(schedule: Schedule, problem: Problem) -> None:
    expected = (len(problem.appliances), problem.grid.slot_count)
    if schedule.states.shape != expected:
        raise StructuralError(f"schedule shape {schedule.states.shape} != {expected}")


def validate_schedule(schedule: Schedule, problem: Problem) -> list[Violation]:
    _check_shape(schedule, problem)
    from .objective import energy_profile  # circular at import time

    S = schedule.states
    out: list[Violation] = []
    for i, a in enumerate(problem.appliances):
        row = S[i]
        nonbinary = np.flatnonzero(row > 1)
        for t in nonbinary:
            out.append(Violation("binary", a.name, int(t), f"state {row[t]} is not 0/1"))
        on = np.flatnonzero(row)
        req = int(problem.required[i])
        if len(on) != req:
            out.append(Violation("count", a.name, None, f"{len(on)} ON slots, need {req}"))
        if a.flex_class is FlexClass.FIXED and not np.array_equal(row, problem.fixed_states[i]):
            first = int(np.flatnonzero(row != problem.fixed_states[i])[0])
            out.append(Violation("fixed", a.name, first, "row differs from its fixed window"))
        if a.flex_class is not FlexClass.INTERRUPTIBLE and len(on) > 1:
            gaps = np.flatnonzero(np.diff(on) > 1)
            if len(gaps):
                out.append(Violation("contiguity", a.name, int(on[gaps[0]] + 1), "run is interrupted"))
    for p, s in problem.precedence_pairs:
        pred_on, succ_on = np.flatnonzero(S[p]), np.flatnonzero(S[s])
        if len(pred_on) and len(succ_on) and pred_on[-1] >= succ_on[0]:
            out.append(
                Violation(
                    "precedence",
                    problem.appliances[s].name,
                    int(succ_on[0]),
                    f"starts at slot {succ_on[0]} but {problem.appliances[p].name} runs until slot {pred_on[-1]}",
                )
            )
    energy = energy_profile(schedule, problem)
    for t in np.flatnonzero(energy > problem.grid_capacity_kwh):
        out.append(
            Violation("capacity", None, int(t), f"{energy[t]:.6g} kWh exceeds {problem.grid_capacity_kwh} kWh")
        )
    return out


# --- JSON -------------------------------------------------------------------

_TOP_FIELDS = {"grid", "appliances", "tariff", "capacity_kwh", "weights", "penalties"}
_REQUIRED_TOP = {"grid", "appliances", "tariff", "capacity_kwh", "weights"}
_APPLIANCE_FIELDS = {"name", "power_kw", "oti_hours", "class", "baseline_start", "fixed_start", "predecessor"}
_REQUIRED_APPLIANCE = {"name", "power_kw", "oti_hours", "class", "baseline_start"}


def _exact_keys(obj, allowed, required, where):
    if not isinstance(obj, Mapping):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown fields {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ConfigError(f"{where}: missing fields {sorted(missing)}")


def _int(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where} must be an integer, got {value!r}")
    return value


def _num(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    return float(value)


def problem_from_dict(doc: Mapping[str, Any], base_dir: str | Path | None = None) -> Problem:
    """Build a :class:`Problem` from its JSON form.

    ``tariff`` may be an inline tariff object or a path to a tariff file,
    resolved against ``base_dir``.
    """
    _exact_keys(doc, _TOP_FIELDS, _REQUIRED_TOP, "problem")
    _exact_keys(doc["grid"], {"horizon_hours", "resolution_minutes"}, set(), "grid")
    grid = TimeGrid(
        _int(doc["grid"].get("horizon_hours", 24), "grid.horizon_hours"),
        _int(doc["grid"].get("resolution_minutes", 60), "grid.resolution_minutes"),
    )
    if not isinstance(doc["appliances"], list):
        raise ConfigError("appliances must be a list")
    appliances = []
    for k, raw in enumerate(doc["appliances"]):
        where = f"appliances[{k}]"
        _exact_keys(raw, _APPLIANCE_FIELDS, _REQUIRED_APPLIANCE, where)
        try:
            cls = FlexClass(raw["class"])
        except ValueError:
            raise ConfigError(f"{where}: class {raw['class']!r} not one of {[c.value for c in FlexClass]}") from None
        fixed = raw.get("fixed_start")
        appliances.append(
            Appliance(
                name=str(raw["name"]),
                power_rating_kw=_num(raw["power_kw"], f"{where}.power_kw"),
                oti_hours=_int(raw["oti_hours"], f"{where}.oti_hours"),
                flex_class=cls,
                baseline_start_slot=_int(raw["baseline_start"], f"{where}.baseline_start"),
                fixed_window_start_slot=None if fixed is None else _int(fixed, f"{where}.fixed_start"),
                predecessor=raw.get("predecessor"),
            )
        )
    tariff_doc = doc["tariff"]
    if isinstance(tariff_doc, str):
        path = Path(tariff_doc)
        if not path.is_absolute() and base_dir is not None:
            path = Path(base_dir) / path
        try:
            tariff = load_tariff_file(path)
        except OSError as exc:
            raise ConfigError(f"cannot read tariff file {path}: {exc}") from None
    else:
        tariff = tariff_from_dict(tariff_doc)
    _exact_keys(doc["weights"], {"cost", "par"}, {"cost", "par"}, "weights")
    penalties = doc.get("penalties", {})
    _exact_keys(penalties, {"precedence", "capacity"}, set(), "penalties")
    return Problem(
        grid=grid,
        appliances=tuple(appliances),
        tariff=tariff,
        grid_capacity_kwh=_num(doc["capacity_kwh"], "capacity_kwh"),
        w_cost=_num(doc["weights"]["cost"], "weights.cost"),
        w_par=_num(doc["weights"]["par"], "weights.par"),
        precedence_penalty=_num(penalties.get("precedence", 10.0), "penalties.precedence"),
        capacity_penalty=_num(penalties.get("capacity", 10.0), "penalties.capacity"),
    )


def problem_to_dict(problem: Problem) -> dict:
    apps = []
    for a in problem.appliances:
        d = {
            "name": a.name,
            "power_kw": a.power_rating_kw,
            "oti_hours": a.oti_hours,
            "class": a.flex_class.value,
            "baseline_start": a.baseline_start_slot,
        }
        if a.fixed_window_start_slot is not None:
            d["fixed_start"] = a.fixed_window_start_slot
        if a.predecessor is not None:
            d["predecessor"] = a.predecessor
        apps.append(d)
    return {
        "grid": {"horizon_hours": problem.grid.horizon_hours, "resolution_minutes": problem.grid.resolution_minutes},
        "appliances": apps,
        "tariff": tariff_to_dict(problem.tariff),
        "capacity_kwh": problem.grid_capacity_kwh,
        "weights": {"cost": problem.w_cost, "par": problem.w_par},
        "penalties": {"precedence": problem.precedence_penalty, "capacity": problem.capacity_penalty},
    }


def load_problem(path: str | Path) -> Problem:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read problem file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from None
    return problem_from_dict(doc, base_dir=path.parent)


def default_problem() -> Problem:
    """The shipped eight-appliance household on a 60-minute grid."""
    return load_problem(DEFAULT_PROBLEM_PATH)


# --- derived problems -------------------------------------------------------


def with_resolution(problem: Problem, resolution_minutes: int) -> Problem:
    """Same household on a different slot resolution.

    Slot-indexed starts are converted through wall-clock minutes and the
    per-slot capacity is scaled so the power cap is unchanged.
    """
    old = problem.grid.resolution_minutes
    if resolution_minutes == old:
        return problem
    grid = TimeGrid(problem.grid.horizon_hours, resolution_minutes)

    def convert(slot, name):
        minute = slot * old
        if minute % resolution_minutes:
            raise ConfigError(f"{name}: start at minute {minute} is not on the {resolution_minutes}-minute grid")
        return minute // resolution_minutes

    apps = tuple(
        replace(
            a,
            baseline_start_slot=convert(a.baseline_start_slot, a.name),
            fixed_window_start_slot=(
                None if a.fixed_window_start_slot is None else convert(a.fixed_window_start_slot, a.name)
            ),
        )
        for a in problem.appliances
    )
    cap = problem.grid_capacity_kwh * resolution_minutes / old
    return replace(problem, grid=grid, appliances=apps, grid_capacity_kwh=cap)


def with_baseline_starts(problem: Problem, starts: Sequence[int]) -> Problem:
    if len(starts) != len(problem.appliances):
        raise ConfigError("one baseline start per appliance is required")
    apps = tuple(replace(a, baseline_start_slot=int(s)) for a, s in zip(problem.appliances, starts))
    return replace(problem, appliances=apps)


def random_genomes(problem: Problem, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` genomes with every gene uniform over its own range."""
    highs = problem.layout.highs
    return rng.integers(0, highs + 1, size=(n, len(highs)), dtype=np.int64)
