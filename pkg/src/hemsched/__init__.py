"""Demand-response appliance scheduling with a genetic algorithm and harmony search."""

from .baseline import baseline_genome, baseline_metrics, baseline_schedule
from .domain import (
    Appliance,
    FlexClass,
    Problem,
    Schedule,
    TimeGrid,
    build_time_grid,
    decode,
    default_problem,
    encode,
    load_problem,
    problem_from_dict,
    repair_row,
    required_slots,
    validate_schedule,
    with_resolution,
)
from .errors import (
    ConfigError,
    EncodingError,
    HemsError,
    ScenarioError,
    SearchSpaceTooLarge,
    StructuralError,
    TariffValidationError,
    UndefinedPARError,
)
from .ga import GAParams, run_ga
from .hsa import HSAParams, run_hsa
from .objective import Metrics, energy_profile, fitness, par, penalty, total_cost
from .oracle import brute_force, space_size
from .results import OptimizationResult
from .scenario import Scenario, ScenarioReport, parse_report, reduction_pct, render_report, run_scenario
from .tariff import TariffProfile, default_tariff, load_tariff, price_at

__version__ = "0.1.0"
