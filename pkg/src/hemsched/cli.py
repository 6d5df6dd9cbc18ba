"""Command-line entry point.

Subcommands: ``run`` (scenario), ``oracle`` (brute force), ``validate``
(config check), ``plotdata`` (per-slot series for plotting).
Exit status: 0 success, 1 configuration or usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .baseline import baseline_schedule
from .domain import DEFAULT_PROBLEM_PATH, load_problem, validate_schedule
from .errors import ConfigError, HemsError, ScenarioError
from .ga import GAParams
from .hsa import HSAParams
from .oracle import brute_force, space_size
from .scenario import Scenario, plot_series, render_report, run_scenario

log = logging.getLogger("hemsched")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2
STANDARD_RESOLUTIONS = (30, 60)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _add_problem(p):
    p.add_argument("--problem", type=Path, default=DEFAULT_PROBLEM_PATH,
                   help="problem JSON (default: the shipped eight-appliance household)")


def _add_out(p):
    p.add_argument("--out", type=Path, help="write output here; without it, print to stdout")


def _add_scenario(p, algos):
    p.add_argument("--users", type=int, default=1)
    p.add_argument("--resolution", type=int, default=60, help="slot length in minutes (30 or 60)")
    p.add_argument("--allow-any-resolution", action="store_true",
                   help="accept any resolution that divides 60")
    p.add_argument("--algo", choices=algos, default=algos[-1])
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--jitter", type=int, default=2, help="max baseline-start shift per user, in slots")
    p.add_argument("--jobs", type=int, default=1)
    ga = p.add_argument_group("genetic algorithm")
    ga.add_argument("--pop", type=int, default=GAParams.population_size)
    ga.add_argument("--gens", type=int, default=GAParams.generations)
    ga.add_argument("--tournament", type=int, default=GAParams.tournament_size)
    ga.add_argument("--cx-prob", type=float, default=GAParams.crossover_prob)
    ga.add_argument("--mut-prob", type=float, default=None, help="per-gene rate (default 1/genome length)")
    ga.add_argument("--elite", type=int, default=GAParams.elite_count)
    hs = p.add_argument_group("harmony search")
    hs.add_argument("--hms", type=int, default=HSAParams.hms)
    hs.add_argument("--hmcr", type=float, default=HSAParams.hmcr)
    hs.add_argument("--par", type=float, default=HSAParams.par_rate, help="pitch adjustment rate")
    hs.add_argument("--bw", type=float, default=None, help="accepted and ignored on discrete genes")
    hs.add_argument("--ni", type=int, default=HSAParams.ni)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hemsched", description="Appliance scheduling under time-of-use prices.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run a multi-user scenario and report")
    _add_problem(run)
    _add_scenario(run, ("none", "ga", "hsa", "both"))
    run.add_argument("--format", choices=("json", "csv", "table"), default="json")
    _add_out(run)

    orc = sub.add_parser("oracle", help="exhaustive optimum of a tiny problem")
    _add_problem(orc)
    _add_out(orc)

    val = sub.add_parser("validate", help="check a problem file")
    _add_problem(val)

    plot = sub.add_parser("plotdata", help="per-slot price and energy series as CSV")
    _add_problem(plot)
    _add_scenario(plot, ("none", "ga", "hsa"))
    _add_out(plot)
    return parser


def _scenario(args) -> Scenario:
    if args.resolution not in STANDARD_RESOLUTIONS and not args.allow_any_resolution:
        raise ConfigError(f"--resolution must be 30 or 60 (got {args.resolution}); see --allow-any-resolution")
    problem = load_problem(args.problem)
    ga = GAParams(population_size=args.pop, generations=args.gens, tournament_size=args.tournament,
                  crossover_prob=args.cx_prob, mutation_prob_per_gene=args.mut_prob, elite_count=args.elite)
    hsa = HSAParams(hms=args.hms, hmcr=args.hmcr, par_rate=args.par, ni=args.ni, bw=args.bw)
    return Scenario(base_problem=problem, n_users=args.users, resolution_minutes=args.resolution,
                    algorithm=args.algo, master_seed=args.seed, jitter=args.jitter, ga=ga, hsa=hsa,
                    jobs=args.jobs)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _cmd_run(args) -> int:
    report = run_scenario(_scenario(args))
    log.info("scenario finished in %.2f s", report.wall_clock_seconds)
    _emit(render_report(report, args.format), args.out)
    return EXIT_OK


def _cmd_plotdata(args) -> int:
    report = run_scenario(_scenario(args))
    _emit(plot_series(report, report.variants[1]), args.out)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    problem = load_problem(args.problem)
    result = brute_force(problem)
    _emit(json.dumps({"space_size": space_size(problem), **result.to_dict()}) + "\n", args.out)
    return EXIT_OK


def _cmd_validate(args) -> int:
    problem = load_problem(args.problem)
    problem.prices  # tariff bands must align with the problem's own slots
    problems = validate_schedule(baseline_schedule(problem), problem)
    for v in problems:
        print(f"warning: baseline violates {v.constraint}: {v.appliance or ''} {v.detail}", file=sys.stderr)
    print(json.dumps({"ok": True, "appliances": len(problem.appliances),
                      "slots": problem.grid.slot_count, "genome_length": problem.layout.length,
                      "space_size": space_size(problem), "baseline_violations": len(problems)}))
    return EXIT_OK


_COMMANDS = {"run": _cmd_run, "oracle": _cmd_oracle, "validate": _cmd_validate, "plotdata": _cmd_plotdata}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG if isinstance(exc.cause, ConfigError) else EXIT_RUNTIME
    except (HemsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
