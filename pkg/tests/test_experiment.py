import json
import math
from pathlib import Path

import pandas as pd
import pytest

from app.core.exceptions import ConfigParseError
from app.models.scenario import Scenario
from app.schemas.experiment import ExperimentConfig
from app.schemas.planner import PlannerConfig, PSOParams
from app.services.experiment_service import (
    RESULT_COLUMNS,
    ExperimentRunner,
    aggregate,
    default_reproduction_config,
    load_experiment_config,
    min_dbs_search,
    run_experiment,
    sweep,
)
from app.services.scenario_service import generate_scenario

SMALL = {"n_aois": 4, "n_slots": 12, "s_min": 3, "z_min": 0.0}
QUICK_PSO = {"swarm_size": 10, "iterations": 20, "rounds": 1}


def _config(*jobs: dict) -> ExperimentConfig:
    return ExperimentConfig.model_validate(
        {"scenario": SMALL, "pso": QUICK_PSO, "planner": {"max_iterations": 20}, "seeds": [0, 1], "jobs": list(jobs)}
    )


def test_sweep_rows_follow_the_grid(small_template: Scenario) -> None:
    frame, results = sweep(small_template, [60.0, 90.0], [2], [0, 1], n_aois=4, workers=1)
    assert list(frame.columns) == RESULT_COLUMNS
    assert frame[["v_max", "seed"]].values.tolist() == [[60.0, 0], [60.0, 1], [90.0, 0], [90.0, 1]]
    assert (frame["error_kind"] == "").all()
    assert all(r.samples and len(r.samples) % small_template.n_slots == 0 for r in results)

    summary = aggregate(frame)
    assert summary["n_ok"].tolist() == [2, 2]
    assert summary["v_max"].tolist() == [60.0, 90.0]


def test_empty_job_list_only_creates_the_output_directory(tmp_path: Path) -> None:
    output = ExperimentRunner(_config(), tmp_path / "out", workers=1).run()
    assert output.is_dir()
    assert list(output.iterdir()) == []


def test_reruns_write_identical_csvs(tmp_path: Path) -> None:
    config = _config({"kind": "speed_fleet_sweep", "v_max_values": [60.0, 90.0], "n_drones_values": [2]})
    first = ExperimentRunner(config, tmp_path / "a", workers=1).run()
    second = ExperimentRunner(config, tmp_path / "b", workers=1).run()
    for name in ("metrics.csv", "fig7_means.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
    metrics = pd.read_csv(first / "metrics.csv")
    assert (metrics["schema_version"] == 1).all()
    assert "runtime" not in metrics.columns


def test_trajectory_job_writes_plot_data(tmp_path: Path) -> None:
    config = _config({"kind": "trajectories", "n_drones": 2, "v_max": 90.0})
    output = ExperimentRunner(config, tmp_path, workers=1).run()
    frame = pd.read_csv(output / "fig3_trajectories.csv")
    assert len(frame) == 2 * 12
    assert set(frame["drone"]) == {0, 1}
    solution = json.loads((output / "solution.json").read_text())
    assert solution["kind"] == "planner"
    assert (output / "scenario.json").exists()


def test_compare_job_writes_both_modes(tmp_path: Path) -> None:
    config = _config(
        {"kind": "compare", "n_drones_values": [2], "v_max": 90.0, "v_max_values": [60.0, 90.0], "seeds": [0]}
    )
    output = ExperimentRunner(config, tmp_path, workers=1).run()
    compare = pd.read_csv(output / "fig9_compare.csv")
    assert sorted(compare["mode"]) == ["baseline", "planner"]
    assert "v_max" not in compare.columns
    assert compare.set_index("mode")["n_ok"].to_dict() == {"baseline": 1, "planner": 2}
    table = pd.read_csv(output / "table2_std.csv")
    assert table.columns.tolist() == ["schema_version", "n_drones", "planner_std", "baseline_std", "reduction_pct"]


def test_cdf_job_ends_each_curve_at_one(tmp_path: Path) -> None:
    config = _config(
        {"kind": "cdf", "v_max_values": [60.0, 90.0], "n_drones_values": [2], "n_drones": 2, "v_max": 90.0}
    )
    output = ExperimentRunner(config, tmp_path, workers=1).run()
    by_speed = pd.read_csv(output / "fig5_cdf.csv")
    assert by_speed.groupby("v_max")["cdf"].max().tolist() == [1.0, 1.0]
    assert by_speed.groupby("v_max")["cdf"].apply(lambda s: s.is_monotonic_increasing).all()
    assert (output / "fig6_cdf.csv").exists()


def test_min_dbs_starts_at_the_capacity_floor(small_template: Scenario) -> None:
    scenario = generate_scenario(0, 4, 1, template=small_template.replace(s_min=6))
    assert min_dbs_search(scenario, math.inf, 90.0, "planner", PlannerConfig(max_iterations=10)) == 2


def test_min_dbs_reports_none_when_no_fleet_qualifies(small_template: Scenario) -> None:
    scenario = generate_scenario(0, 2, 1, template=small_template)
    assert min_dbs_search(scenario, 0.0, 90.0, "baseline", pso=PSOParams(**QUICK_PSO)) is None


def test_malformed_config_reports_its_line(tmp_path: Path) -> None:
    path = tmp_path / "bad.json"
    path.write_text('{\n  "jobs": [\n    {"kind": "cdf",}\n  ]\n}\n')
    with pytest.raises(ConfigParseError) as exc_info:
        load_experiment_config(path)
    assert exc_info.value.line == 3
    assert exc_info.value.constraint == "config"


def test_unknown_job_kind_reports_its_location(tmp_path: Path) -> None:
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"jobs": [{"kind": "fig42"}]}))
    with pytest.raises(ConfigParseError) as exc_info:
        load_experiment_config(path)
    assert "jobs" in exc_info.value.location


def test_run_experiment_from_file(tmp_path: Path) -> None:
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps({"scenario": SMALL, "jobs": []}))
    assert run_experiment(path, tmp_path / "results") == tmp_path / "results"


def test_reproduction_config_covers_every_artifact() -> None:
    kinds = [job.kind for job in default_reproduction_config().jobs]
    assert kinds == ["trajectories", "cdf", "speed_fleet_sweep", "compare", "min_dbs", "init_compare"]


def test_shipped_reproduction_config_parses() -> None:
    config = load_experiment_config(Path(__file__).resolve().parents[1] / "configs" / "reproduce.json")
    assert len(config.jobs) == 6
