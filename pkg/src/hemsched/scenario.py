"""Multi-user, multi-resolution experiments and their comparative reports.

Users are independent households on the same base problem.  User ``u``
gets the 64-bit seed::

    SeedSequence([master_seed, u]).generate_state(1, uint64)[0]

which seeds its GA and HSA runs; its baseline-start jitter comes from a
separate stream, ``SeedSequence([user_seed, 1])``.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .baseline import baseline_metrics, baseline_schedule
from .domain import Problem, with_baseline_starts, with_resolution
from .errors import ConfigError, HemsError, ScenarioError
from .ga import GAParams, run_ga
from .hsa import HSAParams, run_hsa
from .objective import Metrics, cost_batch, energy_profile, penalty
from .results import OptimizationResult

ALGORITHMS = ("none", "ga", "hsa", "both")
_JITTER_ATTEMPTS = 64


def user_seed(master_seed: int, user: int) -> int:
    return int(np.random.SeedSequence([master_seed, user]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class Scenario:
    base_problem: Problem
    n_users: int = 1
    resolution_minutes: int = 60
    algorithm: str = "both"
    master_seed: int = 0
    jitter: int = 2
    ga: GAParams = GAParams()
    hsa: HSAParams = HSAParams()
    jobs: int = 1

    def __post_init__(self):
        if self.n_users < 1:
            raise ConfigError("n_users must be >= 1")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}")
        if self.jitter < 0:
            raise ConfigError("jitter must be >= 0")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    @property
    def optimizers(self) -> tuple[str, ...]:
        return {"none": (), "ga": ("ga",), "hsa": ("hsa",), "both": ("ga", "hsa")}[self.algorithm]

    @property
    def variants(self) -> tuple[str, ...]:
        return ("without",) + (self.optimizers or ("none",))


def user_problem(scenario: Scenario, user: int) -> Problem:
    """Base problem on the scenario grid with this user's jittered baseline.

    Offsets are uniform in ``[-jitter, jitter]`` slots, clamped to the
    horizon, and redrawn (up to 64 times) until the jittered baseline has
    zero penalty; if none qualifies the unjittered baseline is kept.
    """
    base = with_resolution(scenario.base_problem, scenario.resolution_minutes)
    if scenario.jitter == 0:
        return base
    rng = np.random.default_rng(np.random.SeedSequence([user_seed(scenario.master_seed, user), 1]))
    starts = np.array([a.baseline_start_slot for a in base.appliances])
    top = base.grid.slot_count - base.required
    for _ in range(_JITTER_ATTEMPTS):
        offsets = rng.integers(-scenario.jitter, scenario.jitter + 1, size=len(starts))
        candidate = with_baseline_starts(base, np.clip(starts + offsets, 0, top))
        try:
            if penalty(baseline_schedule(candidate), candidate) == 0:
                return candidate
        except ConfigError:
            continue
    return base


@dataclass(frozen=True, eq=False)
class UserOutcome:
    user: int
    seed: int
    baseline_starts: tuple[int, ...]
    baseline: Metrics
    results: dict[str, OptimizationResult]
    fallback: dict[str, bool]
    final: dict[str, Metrics]
    profiles: dict[str, np.ndarray]  # per variant, kWh per slot of the adopted schedule

    def __eq__(self, other):
        if not isinstance(other, UserOutcome):
            return NotImplemented
        return (
            (self.user, self.seed, self.baseline_starts, self.baseline, self.fallback, self.final)
            == (other.user, other.seed, other.baseline_starts, other.baseline, other.fallback, other.final)
            and self.results == other.results
            and self.profiles.keys() == other.profiles.keys()
            and all(np.array_equal(v, other.profiles[k]) for k, v in self.profiles.items())
        )

    __hash__ = None

    def to_dict(self) -> dict:
        return {
            "user": self.user,
            "seed": self.seed,
            "baseline_starts": list(self.baseline_starts),
            "baseline": self.baseline.to_dict(),
            "results": {k: r.to_dict() for k, r in self.results.items()},
            "fallback": dict(self.fallback),
            "final": {k: m.to_dict() for k, m in self.final.items()},
            "profiles": {k: p.tolist() for k, p in self.profiles.items()},
        }

    @classmethod
    def from_dict(cls, d) -> UserOutcome:
        return cls(
            user=d["user"],
            seed=d["seed"],
            baseline_starts=tuple(d["baseline_starts"]),
            baseline=Metrics.from_dict(d["baseline"]),
            results={k: OptimizationResult.from_dict(r) for k, r in d["results"].items()},
            fallback=dict(d["fallback"]),
            final={k: Metrics.from_dict(m) for k, m in d["final"].items()},
            profiles={k: np.array(p, dtype=float) for k, p in d["profiles"].items()},
        )


@dataclass(frozen=True)
class VariantSummary:
    max_kwh: float
    cost_cents: float
    par: float


@dataclass(frozen=True)
class Reduction:
    peak_pct: float
    cost_pct: float
    par_pct: float


def reduction_pct(without: float, with_: float) -> float:
    return 100.0 * (without - with_) / without


def _reductions(ref: VariantSummary, v: VariantSummary) -> Reduction:
    return Reduction(
        reduction_pct(ref.max_kwh, v.max_kwh),
        reduction_pct(ref.cost_cents, v.cost_cents),
        reduction_pct(ref.par, v.par),
    )


@dataclass(frozen=True, eq=False)
class ScenarioReport:
    n_users: int
    resolution_minutes: int
    algorithm: str
    master_seed: int
    jitter: int
    variants: tuple[str, ...]
    prices: np.ndarray
    aggregate_profiles: dict[str, np.ndarray]
    aggregate: dict[str, VariantSummary]
    reductions: dict[str, Reduction]
    users: tuple[UserOutcome, ...]
    wall_clock_seconds: float = field(default=0.0)

    def __eq__(self, other):
        # wall-clock time is deliberately not part of a report's identity
        if not isinstance(other, ScenarioReport):
            return NotImplemented
        head = ("n_users", "resolution_minutes", "algorithm", "master_seed", "jitter", "variants",
                "aggregate", "reductions", "users")
        return (
            all(getattr(self, k) == getattr(other, k) for k in head)
            and np.array_equal(self.prices, other.prices)
            and self.aggregate_profiles.keys() == other.aggregate_profiles.keys()
            and all(np.array_equal(v, other.aggregate_profiles[k]) for k, v in self.aggregate_profiles.items())
        )

    __hash__ = None

    def user_reductions(self, user: int, variant: str) -> Reduction:
        u = self.users[user]
        ref = u.baseline
        m = u.final[variant]
        return Reduction(
            reduction_pct(ref.peak_kwh, m.peak_kwh),
            reduction_pct(ref.total_cost_cents, m.total_cost_cents),
            reduction_pct(ref.par, m.par),
        )

    def to_dict(self) -> dict:
        return {
            "n_users": self.n_users,
            "resolution_minutes": self.resolution_minutes,
            "algorithm": self.algorithm,
            "master_seed": self.master_seed,
            "jitter": self.jitter,
            "variants": list(self.variants),
            "prices": self.prices.tolist(),
            "aggregate_profiles": {k: v.tolist() for k, v in self.aggregate_profiles.items()},
            "aggregate": {k: vars(v) for k, v in self.aggregate.items()},
            "reductions": {k: vars(v) for k, v in self.reductions.items()},
            "users": [u.to_dict() for u in self.users],
        }

    @classmethod
    def from_dict(cls, d) -> ScenarioReport:
        return cls(
            n_users=d["n_users"],
            resolution_minutes=d["resolution_minutes"],
            algorithm=d["algorithm"],
            master_seed=d["master_seed"],
            jitter=d["jitter"],
            variants=tuple(d["variants"]),
            prices=np.array(d["prices"], dtype=float),
            aggregate_profiles={k: np.array(v, dtype=float) for k, v in d["aggregate_profiles"].items()},
            aggregate={k: VariantSummary(**v) for k, v in d["aggregate"].items()},
            reductions={k: Reduction(**v) for k, v in d["reductions"].items()},
            users=tuple(UserOutcome.from_dict(u) for u in d["users"]),
        )


def run_user(scenario: Scenario, user: int) -> UserOutcome:
    problem = user_problem(scenario, user)
    seed = user_seed(scenario.master_seed, user)
    base_sched = baseline_schedule(problem)
    base = baseline_metrics(problem)
    base_profile = energy_profile(base_sched, problem)
    results, fallback, final = {}, {}, {}
    profiles = {"without": base_profile}
    if not scenario.optimizers:
        final["none"] = base
        profiles["none"] = base_profile
    for name in scenario.optimizers:
        if name == "ga":
            res = run_ga(problem, replace(scenario.ga, seed=seed))
        else:
            res = run_hsa(problem, replace(scenario.hsa, seed=seed))
        m = res.metrics
        regressed = m.total_cost_cents > base.total_cost_cents or m.par > base.par or m.penalty > 0
        results[name] = res
        fallback[name] = bool(regressed)
        final[name] = base if regressed else m
        profiles[name] = base_profile if regressed else energy_profile(res.best_schedule, problem)
    return UserOutcome(
        user=user,
        seed=seed,
        baseline_starts=tuple(a.baseline_start_slot for a in problem.appliances),
        baseline=base,
        results=results,
        fallback=fallback,
        final=final,
        profiles=profiles,
    )


def _run_user_safe(args) -> UserOutcome:
    scenario, user = args
    try:
        return run_user(scenario, user)
    except Exception as exc:
        raise ScenarioError(user, exc) from exc


def _summary(profile: np.ndarray, prices: np.ndarray) -> VariantSummary:
    cost = float(cost_batch(profile[None], prices)[0])
    return VariantSummary(float(profile.max()), cost, float(len(profile) * profile.max() / profile.sum()))


def run_scenario(scenario: Scenario) -> ScenarioReport:
    t0 = time.perf_counter()
    jobs = [(scenario, u) for u in range(scenario.n_users)]
    if scenario.jobs > 1 and scenario.n_users > 1:
        with ProcessPoolExecutor(max_workers=scenario.jobs) as pool:
            users = tuple(pool.map(_run_user_safe, jobs))
    else:
        users = tuple(_run_user_safe(j) for j in jobs)

    prices = with_resolution(scenario.base_problem, scenario.resolution_minutes).prices
    agg_profiles = {}
    for v in scenario.variants:
        total = np.zeros_like(users[0].profiles["without"])
        for u in users:
            total = total + u.profiles[v]
        agg_profiles[v] = total
    aggregate = {v: _summary(p, prices) for v, p in agg_profiles.items()}
    reductions = {v: _reductions(aggregate["without"], aggregate[v]) for v in scenario.variants[1:]}
    return ScenarioReport(
        n_users=scenario.n_users,
        resolution_minutes=scenario.resolution_minutes,
        algorithm=scenario.algorithm,
        master_seed=scenario.master_seed,
        jitter=scenario.jitter,
        variants=scenario.variants,
        prices=np.array(prices),
        aggregate_profiles=agg_profiles,
        aggregate=aggregate,
        reductions=reductions,
        users=users,
        wall_clock_seconds=time.perf_counter() - t0,
    )


# --- rendering ---------------------------------------------------------------

_LABELS = {"ga": "With GA-HEMS", "hsa": "With HSA-HEMS", "none": "No optimisation"}
CSV_COLUMNS = (
    "scope", "variant", "max_kwh", "cost_cents", "par",
    "peak_reduction_pct", "cost_reduction_pct", "par_reduction_pct", "fallback",
)


def _case_name(report: ScenarioReport) -> str:
    who = "1 user" if report.n_users == 1 else f"{report.n_users} users"
    return f"{who}; {report.resolution_minutes} min"


def _table(report: ScenarioReport) -> str:
    ref = report.aggregate["without"]
    groups = [("Without HEMS", ["Max E_H", "Cost (c)", "PAR"], [ref.max_kwh, ref.cost_cents, ref.par])]
    for v in report.variants[1:]:
        r = report.reductions[v]
        groups.append((_LABELS[v], ["% E_H Red.", "% c Red.", "% PAR Red."], [r.peak_pct, r.cost_pct, r.par_pct]))
    case = _case_name(report)
    first_w = max(len("Designed case"), len(case))
    top, heads, cells = ["".ljust(first_w)], ["Designed case".ljust(first_w)], [case.ljust(first_w)]
    for title, names, values in groups:
        widths = [max(len(n), 10) for n in names]
        span = sum(widths) + 3 * (len(widths) - 1)
        top.append(title.center(span))
        heads.append(" | ".join(n.rjust(w) for n, w in zip(names, widths)))
        cells.append(" | ".join(f"{x:.2f}".rjust(w) for x, w in zip(values, widths)))
    return "\n".join(" || ".join(row) for row in (top, heads, cells)) + "\n"


def _csv(report: ScenarioReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)

    def row(scope, variant, max_kwh, cost, ratio, red, fell_back):
        w.writerow([scope, variant, repr(max_kwh), repr(cost), repr(ratio),
                    f"{red.peak_pct:.2f}", f"{red.cost_pct:.2f}", f"{red.par_pct:.2f}", fell_back])

    zero = Reduction(0.0, 0.0, 0.0)
    for u in report.users:
        for v in report.variants:
            m = u.baseline if v == "without" else u.final[v]
            red = zero if v == "without" else report.user_reductions(u.user, v)
            row(f"user{u.user}", v, m.peak_kwh, m.total_cost_cents, m.par, red, int(u.fallback.get(v, False)))
    for v in report.variants:
        s = report.aggregate[v]
        red = report.reductions.get(v, zero)
        row("aggregate", v, s.max_kwh, s.cost_cents, s.par, red, "")
    return buf.getvalue()


def render_report(report: ScenarioReport, format: str = "table") -> str:
    if format == "table":
        return _table(report)
    if format == "csv":
        return _csv(report)
    if format == "json":
        return json.dumps(report.to_dict()) + "\n"
    raise ValueError(f"unknown report format {format!r}")


def parse_report(text: str) -> ScenarioReport:
    return ScenarioReport.from_dict(json.loads(text))


def plot_series(report: ScenarioReport, variant: str) -> str:
    """CSV of per-slot price and aggregate energy, baseline vs ``variant``."""
    if variant not in report.aggregate_profiles:
        raise HemsError(f"variant {variant!r} not in report")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["slot", "price", "baseline_kwh", "optimized_kwh"])
    base, opt = report.aggregate_profiles["without"], report.aggregate_profiles[variant]
    for t in range(len(report.prices)):
        w.writerow([t, repr(float(report.prices[t])), repr(float(base[t])), repr(float(opt[t]))])
    return buf.getvalue()
