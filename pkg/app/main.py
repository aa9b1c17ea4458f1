from __future__ import annotations

import argparse
import json
from pathlib import Path

import structlog
from pydantic import ValidationError

from app.config import get_settings
from app.core.exceptions import ConfigParseError, PlannerError, PlanValidationError
from app.core.logging import configure_structured_logging
from app.models.scenario import Scenario
from app.schemas.planner import PlannerConfig, PSOParams
from app.schemas.scenario import ScenarioDocument
from app.schemas.solution import SolutionDocument
from app.services.baseline_service import plan_static_pso
from app.services.experiment_service import (
    ExperimentRunner,
    aggregate,
    default_reproduction_config,
    min_dbs_search,
    run_experiment,
    sweep,
    write_csv,
    write_json,
)
from app.services.metrics_service import compute_metrics
from app.services.planner_service import plan, validate_solution
from app.services.scenario_service import generate_scenario, default_scenario_template

log = structlog.get_logger(__name__)


def _floats(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part]


def _ints(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part]


def _load_scenario(path: str) -> Scenario:
    try:
        document = ScenarioDocument.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise ConfigParseError(f"Invalid scenario file {path}: {first['msg']}", location=location) from exc
    return document.to_scenario()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dbs-planner", description="Multi-drone 3D trajectory planner")
    verbs = parser.add_subparsers(dest="verb", required=True)

    generate = verbs.add_parser("generate", help="write seeded scenario JSON files")
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--count", type=int, default=1)
    generate.add_argument("--n-aois", type=int, default=20)
    generate.add_argument("--n-drones", type=int, default=5)
    generate.add_argument("--v-max", type=float, default=None)
    generate.add_argument("--output", default=None)

    for name, help_text in (("plan", "run the trajectory planner"), ("baseline", "run the static PSO baseline")):
        verb = verbs.add_parser(name, help=help_text)
        verb.add_argument("--scenario", required=True)
        verb.add_argument("--seed", type=int, default=0)
        verb.add_argument("--output", default=None)
        if name == "plan":
            verb.add_argument("--max-iterations", type=int, default=None)
            verb.add_argument(
                "--init-mode",
                choices=["kmeans_circle", "kmeans_point", "uniform_circle", "uniform_point"],
                default=None,
            )

    sweep_verb = verbs.add_parser("sweep", help="speed x fleet sweep")
    sweep_verb.add_argument("--mode", choices=["planner", "baseline"], default="planner")
    sweep_verb.add_argument("--v-max", type=_floats, default=[30.0, 50.0, 70.0, 90.0, 110.0])
    sweep_verb.add_argument("--n-drones", type=_ints, default=[4, 5, 6, 7])
    sweep_verb.add_argument("--seeds", type=int, default=None)
    sweep_verb.add_argument("--n-aois", type=int, default=20)
    sweep_verb.add_argument("--output", default=None)

    min_dbs = verbs.add_parser("min-dbs", help="smallest fleet meeting a pathloss threshold")
    min_dbs.add_argument("--scenario", required=True)
    min_dbs.add_argument("--threshold", type=float, required=True)
    min_dbs.add_argument("--v-max", type=float, required=True)
    min_dbs.add_argument("--mode", choices=["planner", "baseline"], default="planner")
    min_dbs.add_argument("--seed", type=int, default=0)

    reproduce = verbs.add_parser("reproduce", help="run every figure and table job")
    reproduce.add_argument("--output", default=None)

    run = verbs.add_parser("run", help="run an experiment config file")
    run.add_argument("--config", required=True)
    run.add_argument("--output", default=None)
    return parser


def _output_dir(args: argparse.Namespace) -> Path:
    return Path(args.output or get_settings().planner_output_dir)


def _generate(args: argparse.Namespace) -> None:
    template = default_scenario_template()
    if args.v_max is not None:
        template = template.replace(v_max=args.v_max)
    for seed in range(args.seed, args.seed + args.count):
        scenario = generate_scenario(seed, args.n_aois, args.n_drones, template=template)
        write_json(ScenarioDocument.from_scenario(scenario), _output_dir(args) / f"scenario_{seed}.json")


def _plan(args: argparse.Namespace) -> None:
    scenario = _load_scenario(args.scenario)
    if args.verb == "baseline":
        solution = plan_static_pso(scenario, PSOParams(seed=args.seed))
        validate_solution(solution, scenario)
    else:
        overrides = {"seed": args.seed}
        if args.max_iterations is not None:
            overrides["max_iterations"] = args.max_iterations
        if args.init_mode is not None:
            overrides["init_mode"] = args.init_mode
        solution = plan(scenario, PlannerConfig(**overrides))
    metrics = compute_metrics(solution, scenario)
    write_json(SolutionDocument.from_solution(solution), _output_dir(args) / f"{args.verb}_solution.json")
    log.info("plan_finished", kind=solution.kind, runtime=metrics.runtime, **metrics.row())


def _sweep(args: argparse.Namespace) -> None:
    seeds = list(range(args.seeds or get_settings().planner_sweep_seeds))
    frame, _ = sweep(default_scenario_template(), args.v_max, args.n_drones, seeds, mode=args.mode, n_aois=args.n_aois)
    write_csv(frame, _output_dir(args) / "metrics.csv")
    write_csv(aggregate(frame), _output_dir(args) / "fig7_means.csv")


def _min_dbs(args: argparse.Namespace) -> None:
    scenario = _load_scenario(args.scenario)
    count = min_dbs_search(
        scenario,
        args.threshold,
        args.v_max,
        args.mode,
        PlannerConfig(seed=args.seed),
        PSOParams(seed=args.seed),
    )
    print(json.dumps({"mode": args.mode, "threshold": args.threshold, "min_dbs": count}))


def main(argv: list[str] | None = None) -> int:
    settings = get_settings()
    configure_structured_logging(settings.log_level, settings.log_format)
    args = build_parser().parse_args(argv)
    try:
        if args.verb == "generate":
            _generate(args)
        elif args.verb in ("plan", "baseline"):
            _plan(args)
        elif args.verb == "sweep":
            _sweep(args)
        elif args.verb == "min-dbs":
            _min_dbs(args)
        elif args.verb == "reproduce":
            ExperimentRunner(default_reproduction_config(), _output_dir(args)).run()
        elif args.verb == "run":
            run_experiment(args.config, _output_dir(args))
    except PlanValidationError as exc:
        log.error("planner_error", error=exc.message, constraint=exc.constraint, violations=exc.violations)
        return 1
    except PlannerError as exc:
        log.error("planner_error", error=exc.message, constraint=exc.constraint)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
