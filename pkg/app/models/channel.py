from __future__ import annotations

import math
from dataclasses import dataclass

from app.core.exceptions import InvalidParameterError

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class D2UEnvParams:
    """Drone-to-user air-to-ground environment (suburban defaults)."""

    a: float = 4.88
    b: float = 0.43
    eta_los: float = 0.1
    eta_nlos: float = 21.0
    f_c: float = 2.4e9

    def __post_init__(self) -> None:
        if self.a <= 0 or self.b <= 0:
            raise InvalidParameterError("LoS sigmoid constants a and b must be positive.")
        if self.eta_nlos < self.eta_los:
            raise InvalidParameterError("eta_nlos must not be smaller than eta_los.")
        if self.f_c <= 0:
            raise InvalidParameterError("Carrier frequency must be positive.")

    @property
    def fspl_offset(self) -> float:
        return 20.0 * math.log10(4.0 * math.pi * self.f_c / SPEED_OF_LIGHT)


@dataclass(frozen=True)
class D2BEnvParams:
    """Drone-to-base-station backhaul environment and its pathloss cap."""

    alpha: float = 3.04
    A_excess: float = -23.29
    theta0: float = -3.61
    B_scale: float = 4.14
    eta0: float = 20.7
    p_db_max: float = 80.0

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise InvalidParameterError("Terrestrial exponent alpha must be positive.")
        if self.B_scale <= 0:
            raise InvalidParameterError("Angle scale B must be positive.")


@dataclass(frozen=True)
class HeightInterval:
    lower: float = 0.0
    upper: float = 0.0
    empty: bool = False

    def __post_init__(self) -> None:
        if not self.empty and not 0.0 <= self.lower <= self.upper:
            raise InvalidParameterError(
                f"Invalid height interval [{self.lower}, {self.upper}]."
            )

    @classmethod
    def none(cls) -> "HeightInterval":
        return cls(lower=0.0, upper=0.0, empty=True)

    def contains(self, h: float, tol: float = 0.0) -> bool:
        return not self.empty and self.lower - tol <= h <= self.upper + tol

    def intersect(self, lower: float, upper: float) -> "HeightInterval":
        if self.empty:
            return self
        lo = max(self.lower, lower)
        hi = min(self.upper, upper)
        if lo > hi:
            return HeightInterval.none()
        return HeightInterval(lower=max(lo, 0.0), upper=hi)
