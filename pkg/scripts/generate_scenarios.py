import argparse
from pathlib import Path

from app.config import get_settings
from app.core.logging import configure_structured_logging
from app.schemas.scenario import ScenarioDocument
from app.services.experiment_service import write_json
from app.services.scenario_service import generate_scenario, default_scenario_template


def generate(seeds: range, n_aois: int, n_drones: int, output: Path) -> list[Path]:
    template = default_scenario_template()
    return [
        write_json(
            ScenarioDocument.from_scenario(generate_scenario(seed, n_aois, n_drones, template=template)),
            output / f"scenario_{seed}.json",
        )
        for seed in seeds
    ]


if __name__ == "__main__":
    settings = get_settings()
    configure_structured_logging(settings.log_level, settings.log_format)
    parser = argparse.ArgumentParser(description="Write a batch of seeded scenarios")
    parser.add_argument("--first-seed", type=int, default=0)
    parser.add_argument("--count", type=int, default=20)
    parser.add_argument("--n-aois", type=int, default=20)
    parser.add_argument("--n-drones", type=int, default=5)
    parser.add_argument("--output", default=str(Path(settings.planner_output_dir) / "scenarios"))
    args = parser.parse_args()
    generate(range(args.first_seed, args.first_seed + args.count), args.n_aois, args.n_drones, Path(args.output))
