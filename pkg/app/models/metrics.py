from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Metrics:
    mean_pathloss: float
    served_mean: float
    served_std: float
    served_max: float
    pair_std: float
    cdf: list[tuple[float, float]]
    min_separation: float
    hovering_fraction: float
    hovering_by_drone: list[float] = field(default_factory=list)
    runtime: float = 0.0
    iterations: int = 0
    converged: bool = True

    def row(self) -> dict[str, float | int | bool]:
        """Flat CSV row; runtime is left out so reruns stay byte-identical."""
        return {
            "mean_pathloss": self.mean_pathloss,
            "served_mean": self.served_mean,
            "served_std": self.served_std,
            "served_max": self.served_max,
            "pair_std": self.pair_std,
            "min_separation": self.min_separation,
            "hovering_fraction": self.hovering_fraction,
            "iterations": self.iterations,
            "converged": self.converged,
        }
