from __future__ import annotations

import asyncio
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import structlog

from app.config import get_settings
from app.core.exceptions import PlannerError
from app.core.logging import configure_structured_logging
from app.models.metrics import Metrics
from app.models.plan import PlanSolution, StaticDeployment
from app.models.scenario import Scenario
from app.schemas.planner import PlannerConfig, PSOParams
from app.services.baseline_service import plan_static_pso
from app.services.metrics_service import compute_metrics, served_samples
from app.services.planner_service import plan, validate_solution
from app.services.scenario_service import generate_scenario

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class SweepCell:
    template: Scenario
    n_aois: int
    v_max: float
    n_drones: int
    seed: int
    mode: str = "planner"
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    pso: PSOParams = field(default_factory=PSOParams)
    run_id: str = ""


@dataclass
class CellResult:
    cell: SweepCell
    metrics: Metrics | None = None
    samples: list[float] = field(default_factory=list)
    error: str | None = None
    error_kind: str | None = None


def solve(
    scenario: Scenario, mode: str, planner: PlannerConfig, pso: PSOParams
) -> PlanSolution | StaticDeployment:
    """Plan in either mode and validate the result before anyone records it."""
    if mode == "baseline":
        solution = plan_static_pso(scenario, pso)
    else:
        solution = plan(scenario, planner)
    validate_solution(solution, scenario)
    return solution


def run_cell(cell: SweepCell) -> CellResult:
    """Plan one (speed, fleet, seed, mode) cell; planner errors are captured, not raised."""
    structlog.contextvars.clear_contextvars()
    structlog.contextvars.bind_contextvars(
        run_id=cell.run_id, v_max=cell.v_max, n_drones=cell.n_drones, seed=cell.seed, mode=cell.mode
    )
    try:
        # The AoI layout depends on the seed alone, so cells sharing a seed share AoIs.
        scenario = generate_scenario(
            cell.seed, cell.n_aois, cell.n_drones, template=cell.template.replace(v_max=cell.v_max)
        )
        solution = solve(
            scenario,
            cell.mode,
            cell.planner.model_copy(update={"seed": cell.seed}),
            cell.pso.model_copy(update={"seed": cell.seed}),
        )
        metrics = compute_metrics(solution, scenario)
        samples = served_samples(solution, scenario).tolist()
        logger.info("cell_finished", runtime=metrics.runtime, served_mean=metrics.served_mean)
        return CellResult(cell=cell, metrics=metrics, samples=samples)
    except PlannerError as exc:
        logger.warning(
            "sweep_cell_failed", error=exc.message, constraint=exc.constraint, kind=type(exc).__name__
        )
        return CellResult(cell=cell, error=exc.message, error_kind=type(exc).__name__)
    finally:
        structlog.contextvars.clear_contextvars()


def _init_worker() -> None:
    settings = get_settings()
    configure_structured_logging(settings.log_level, settings.log_format)


async def run_cells(cells: list[SweepCell], workers: int | None = None) -> list[CellResult]:
    """Run cells on a process pool, results in input order."""
    workers = workers or get_settings().planner_workers
    if workers <= 1 or len(cells) <= 1:
        return [run_cell(cell) for cell in cells]
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker) as pool:
        return list(await asyncio.gather(*(loop.run_in_executor(pool, run_cell, cell) for cell in cells)))
