"""Experiment harness: sweeps, fleet-size searches and the plot-data CSVs."""
from __future__ import annotations

import asyncio
import json
import math
import uuid
from pathlib import Path

import numpy as np
import pandas as pd
import structlog
from pydantic import BaseModel, ValidationError

from app.config import get_settings
from app.core.exceptions import ConfigParseError, PlannerError, PlanValidationError
from app.models.scenario import Scenario
from app.schemas.experiment import (
    CdfJob,
    CompareJob,
    ExperimentConfig,
    InitCompareJob,
    MinDbsJob,
    SpeedFleetSweepJob,
    TrajectoriesJob,
)
from app.schemas.planner import PlannerConfig, PSOParams
from app.schemas.scenario import ScenarioDocument
from app.schemas.solution import SolutionDocument
from app.services.metrics_service import compute_metrics, summarize_samples
from app.services.planner_service import plan
from app.services.scenario_service import generate_scenario, default_scenario_template
from app.workers.tasks import CellResult, SweepCell, run_cells, solve

logger = structlog.get_logger(__name__)

CSV_SCHEMA_VERSION = 1
FLOAT_FORMAT = "%.6f"
RESULT_COLUMNS = [
    "schema_version",
    "mode",
    "v_max",
    "n_drones",
    "seed",
    "mean_pathloss",
    "served_mean",
    "served_std",
    "served_max",
    "pair_std",
    "min_separation",
    "hovering_fraction",
    "iterations",
    "converged",
    "error_kind",
    "error",
]


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("artifact_written", path=str(path), rows=len(frame))
    return path


def write_json(document: BaseModel, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(document.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info("artifact_written", path=str(path))
    return path


def _cdf_columns(key: str) -> list[str]:
    return ["schema_version", key, "pathloss", "cdf"]


def results_frame(results: list[CellResult]) -> pd.DataFrame:
    rows = []
    for result in results:
        cell = result.cell
        row = {
            "schema_version": CSV_SCHEMA_VERSION,
            "mode": cell.mode,
            "v_max": cell.v_max,
            "n_drones": cell.n_drones,
            "seed": cell.seed,
            "error_kind": result.error_kind or "",
            "error": result.error or "",
        }
        if result.metrics is not None:
            row.update(result.metrics.row())
        rows.append(row)
    return pd.DataFrame(rows, columns=RESULT_COLUMNS)


def _cells(
    template: Scenario,
    n_aois: int,
    v_max_values: list[float],
    n_drones_values: list[int],
    seeds: list[int],
    mode: str,
    planner: PlannerConfig,
    pso: PSOParams,
) -> list[SweepCell]:
    run_id = uuid.uuid4().hex[:12]
    return [
        SweepCell(
            template=template,
            n_aois=n_aois,
            v_max=float(v),
            n_drones=int(d),
            seed=int(seed),
            mode=mode,
            planner=planner,
            pso=pso,
            run_id=run_id,
        )
        for v in v_max_values
        for d in n_drones_values
        for seed in seeds
    ]


def sweep(
    template: Scenario,
    v_max_values: list[float],
    n_drones_values: list[int],
    seeds: list[int],
    mode: str = "planner",
    n_aois: int = 20,
    planner: PlannerConfig | None = None,
    pso: PSOParams | None = None,
    workers: int | None = None,
) -> tuple[pd.DataFrame, list[CellResult]]:
    """One row per (v_max, n_drones, seed) in that nesting order."""
    cells = _cells(
        template, n_aois, v_max_values, n_drones_values, seeds, mode,
        planner or PlannerConfig(), pso or PSOParams(),
    )
    results = asyncio.run(run_cells(cells, workers))
    return results_frame(results), results


def aggregate(frame: pd.DataFrame, keys: tuple[str, ...] = ("mode", "v_max", "n_drones")) -> pd.DataFrame:
    """Seed mean and spread of each cell grouped by keys, failed rows excluded."""
    ok = frame[frame["error_kind"] == ""]
    grouped = ok.groupby(list(keys), sort=True)
    summary = grouped.agg(
        served_mean_avg=("served_mean", "mean"),
        served_mean_seed_std=("served_mean", lambda s: float(np.std(s))),
        served_std_avg=("served_std", "mean"),
        pair_std_avg=("pair_std", "mean"),
        mean_pathloss_avg=("mean_pathloss", "mean"),
        hovering_avg=("hovering_fraction", "mean"),
        n_ok=("seed", "count"),
    ).reset_index()
    summary.insert(0, "schema_version", CSV_SCHEMA_VERSION)
    return summary


def min_dbs_search(
    scenario: Scenario,
    pathloss_threshold: float,
    v_max: float,
    mode: str = "planner",
    planner: PlannerConfig | None = None,
    pso: PSOParams | None = None,
) -> int | None:
    """Smallest fleet whose worst served-slot pathloss stays within the threshold."""
    planner = planner or PlannerConfig()
    pso = pso or PSOParams()
    n_aois = scenario.n_aois
    floor = max(1, math.ceil(n_aois / scenario.aoi_capacity))
    for n_drones in range(floor, max(floor, n_aois) + 1):
        candidate = scenario.replace(n_drones=n_drones, v_max=v_max)
        try:
            metrics = compute_metrics(solve(candidate, mode, planner, pso), candidate)
        except PlanValidationError:
            raise
        except PlannerError as exc:
            logger.warning("min_dbs_candidate_failed", n_drones=n_drones, error=exc.message)
            continue
        if metrics.served_max <= pathloss_threshold:
            return n_drones
    return None


def load_experiment_config(path: str | Path) -> ExperimentConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(
            f"Malformed experiment config: {exc.msg}", line=exc.lineno, column=exc.colno
        ) from exc
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise ConfigParseError(
            f"Invalid experiment config at {location}: {first['msg']}", location=location
        ) from exc


def default_reproduction_config() -> ExperimentConfig:
    return ExperimentConfig.model_validate(
        {
            "jobs": [
                {"kind": "trajectories"},
                {"kind": "cdf"},
                {"kind": "speed_fleet_sweep"},
                {"kind": "compare"},
                {"kind": "min_dbs"},
                {"kind": "init_compare"},
            ]
        }
    )


class ExperimentRunner:
    def __init__(self, config: ExperimentConfig, output_dir: Path, workers: int | None = None) -> None:
        settings = get_settings()
        self._config = config
        self._output = output_dir
        self._workers = workers or settings.planner_workers
        self._seeds = config.seeds or list(range(settings.planner_sweep_seeds))
        self._template = config.scenario.apply(default_scenario_template())
        self._n_aois = config.scenario.n_aois
        self._validation_failures: list[str] = []

    def _sweep(
        self, v_max_values: list[float], n_drones_values: list[int], seeds: list[int], mode: str,
        planner: PlannerConfig | None = None,
    ) -> tuple[pd.DataFrame, list[CellResult]]:
        frame, results = sweep(
            self._template, v_max_values, n_drones_values, seeds, mode=mode, n_aois=self._n_aois,
            planner=planner or self._config.planner, pso=self._config.pso, workers=self._workers,
        )
        self._validation_failures.extend(
            r.error for r in results if r.error_kind == PlanValidationError.__name__
        )
        return frame, results

    def run(self) -> Path:
        self._output.mkdir(parents=True, exist_ok=True)
        handlers = {
            "trajectories": self._trajectories,
            "cdf": self._cdf,
            "speed_fleet_sweep": self._speed_fleet,
            "compare": self._compare,
            "min_dbs": self._min_dbs,
            "init_compare": self._init_compare,
        }
        for job in self._config.jobs:
            handlers[job.kind](job)
        if self._validation_failures:
            raise PlanValidationError(
                f"{len(self._validation_failures)} plan(s) failed validation.",
                violations=self._validation_failures,
            )
        return self._output

    def _trajectories(self, job: TrajectoriesJob) -> None:
        scenario = generate_scenario(
            job.seed, self._n_aois, job.n_drones, template=self._template.replace(v_max=job.v_max)
        )
        solution = plan(scenario, self._config.planner.model_copy(update={"seed": job.seed}))
        write_json(ScenarioDocument.from_scenario(scenario), self._output / "scenario.json")
        write_json(SolutionDocument.from_solution(solution), self._output / "solution.json")
        serving = solution.schedule.serving
        rows = [
            {
                "schema_version": CSV_SCHEMA_VERSION,
                "drone": traj.drone_id,
                "slot": slot,
                "x": point[0],
                "y": point[1],
                "h": point[2],
                "aoi": int(serving[traj.drone_id, slot]),
                "start_slot": solution.fleet_plan.start_slots[traj.drone_id],
            }
            for traj in solution.trajectories
            for slot, point in enumerate(traj.waypoints)
        ]
        write_csv(pd.DataFrame(rows), self._output / "fig3_trajectories.csv")

    @staticmethod
    def _cdf_rows(results: list[CellResult], key: str) -> list[dict]:
        rows = []
        for value in dict.fromkeys(getattr(r.cell, key) for r in results):
            pooled = [x for r in results if getattr(r.cell, key) == value for x in r.samples]
            _, _, _, cdf = summarize_samples(np.array(pooled))
            rows.extend(
                {"schema_version": CSV_SCHEMA_VERSION, key: value, "pathloss": pl, "cdf": frac}
                for pl, frac in cdf
            )
        return rows

    def _cdf(self, job: CdfJob) -> None:
        _, by_speed = self._sweep(job.v_max_values, [job.n_drones], job.seeds, "planner")
        speed_rows = pd.DataFrame(self._cdf_rows(by_speed, "v_max"), columns=_cdf_columns("v_max"))
        write_csv(speed_rows, self._output / "fig5_cdf.csv")
        _, by_fleet = self._sweep([job.v_max], job.n_drones_values, job.seeds, "planner")
        fleet_rows = pd.DataFrame(self._cdf_rows(by_fleet, "n_drones"), columns=_cdf_columns("n_drones"))
        write_csv(fleet_rows, self._output / "fig6_cdf.csv")

    def _speed_fleet(self, job: SpeedFleetSweepJob) -> None:
        frame, _ = self._sweep(job.v_max_values, job.n_drones_values, job.seeds or self._seeds, job.mode)
        write_csv(frame, self._output / "metrics.csv")
        write_csv(aggregate(frame), self._output / "fig7_means.csv")

    def _compare(self, job: CompareJob) -> None:
        seeds = job.seeds or self._seeds
        # Planner runs are pooled over every speed; the static baseline ignores speed.
        frames = [
            self._sweep(job.v_max_values, job.n_drones_values, seeds, "planner")[0],
            self._sweep([job.v_max], job.n_drones_values, seeds, "baseline")[0],
        ]
        summary = aggregate(pd.concat(frames, ignore_index=True), keys=("mode", "n_drones"))
        write_csv(summary, self._output / "fig9_compare.csv")

        pivot = summary.pivot(index="n_drones", columns="mode", values="pair_std_avg").reindex(
            columns=["planner", "baseline"]
        )
        table = pd.DataFrame(
            {
                "schema_version": CSV_SCHEMA_VERSION,
                "n_drones": pivot.index.to_numpy(),
                "planner_std": pivot["planner"].to_numpy(),
                "baseline_std": pivot["baseline"].to_numpy(),
            }
        )
        table["reduction_pct"] = 100.0 * (1.0 - table["planner_std"] / table["baseline_std"])
        write_csv(table, self._output / "table2_std.csv")

    def _min_dbs(self, job: MinDbsJob) -> None:
        scenario = generate_scenario(job.seed, self._n_aois, self._template.n_drones, template=self._template)
        rows = []
        for threshold in job.thresholds:
            for v_max in job.v_max_values:
                for mode in job.modes:
                    count = min_dbs_search(
                        scenario, threshold, v_max, mode,
                        self._config.planner.model_copy(update={"seed": job.seed}),
                        self._config.pso.model_copy(update={"seed": job.seed}),
                    )
                    rows.append(
                        {
                            "schema_version": CSV_SCHEMA_VERSION,
                            "threshold": threshold,
                            "v_max": v_max,
                            "mode": mode,
                            "min_dbs": count if count is not None else pd.NA,
                        }
                    )
        write_csv(pd.DataFrame(rows), self._output / "table3_min_dbs.csv")

    def _init_compare(self, job: InitCompareJob) -> None:
        frames = []
        for init_mode in job.init_modes:
            frame, _ = self._sweep(
                [job.v_max], [job.n_drones], job.seeds or self._seeds, "planner",
                planner=self._config.planner.model_copy(update={"init_mode": init_mode}),
            )
            frames.append(frame.assign(init_mode=init_mode))
        merged = pd.concat(frames, ignore_index=True)
        ok = merged[merged["error_kind"] == ""]
        summary = (
            ok.groupby("init_mode", sort=False)
            .agg(
                served_mean_avg=("served_mean", "mean"),
                served_std_avg=("served_std", "mean"),
                iterations_avg=("iterations", "mean"),
                n_ok=("seed", "count"),
            )
            .reindex(job.init_modes)
            .reset_index()
        )
        summary.insert(0, "schema_version", CSV_SCHEMA_VERSION)
        write_csv(summary, self._output / "fig8_init.csv")


def run_experiment(config_path: str | Path, output_dir: str | Path | None = None) -> Path:
    config = load_experiment_config(config_path)
    output = Path(output_dir or get_settings().planner_output_dir)
    return ExperimentRunner(config, output).run()
