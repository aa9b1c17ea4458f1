"""Air-to-ground (drone-to-user) and drone-to-base-station pathloss models.

All angles are elevation angles in degrees and all losses are in dB. The
drone-to-user functions accept scalars or numpy arrays.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import minimize_scalar

from app.core.exceptions import UndefinedGeometryError
from app.models.channel import D2BEnvParams, D2UEnvParams, HeightInterval

LN10 = math.log(10.0)
DEG = math.pi / 180.0
THETA_TOLERANCE = 1e-6
NEWTON_MAX_ITERATIONS = 200
BISECTION_TOLERANCE = 1e-7
DEFAULT_H_CEILING = 300.0


def elevation_angle(r: ArrayLike, h: ArrayLike) -> np.ndarray:
    r_arr = np.asarray(r, dtype=float)
    h_arr = np.asarray(h, dtype=float)
    if np.any((r_arr == 0.0) & (h_arr == 0.0)):
        raise UndefinedGeometryError("Elevation angle is undefined at zero distance.")
    # arctan2 maps r == 0 to 90 degrees.
    return np.degrees(np.arctan2(h_arr, r_arr))


def _los_from_angle(theta: ArrayLike, env: D2UEnvParams) -> np.ndarray:
    return 1.0 / (1.0 + env.a * np.exp(-env.b * (np.asarray(theta, dtype=float) - env.a)))


def los_probability(r_du: ArrayLike, h: ArrayLike, env: D2UEnvParams) -> np.ndarray:
    return _los_from_angle(elevation_angle(r_du, h), env)


def d2u_pathloss(r_du: ArrayLike, h: ArrayLike, env: D2UEnvParams) -> np.ndarray:
    r_arr = np.asarray(r_du, dtype=float)
    h_arr = np.asarray(h, dtype=float)
    distance = np.hypot(r_arr, h_arr)
    if np.any(distance <= 0.0):
        raise UndefinedGeometryError("D2U pathloss is undefined at zero distance.")
    p_los = _los_from_angle(np.degrees(np.arctan2(h_arr, r_arr)), env)
    fspl = env.fspl_offset + 20.0 * np.log10(distance)
    return fspl + p_los * env.eta_los + (1.0 - p_los) * env.eta_nlos


def angle_objective(theta: ArrayLike, env: D2UEnvParams) -> np.ndarray:
    """Angle-dependent part of the D2U pathloss at a fixed horizontal range.

    20*log10(sec(theta)) + (eta_los - eta_nlos) * P_LoS(theta); the constant
    eta_nlos and the range term are dropped.
    """
    theta_rad = np.radians(np.asarray(theta, dtype=float))
    return -20.0 * np.log10(np.cos(theta_rad)) + (env.eta_los - env.eta_nlos) * _los_from_angle(
        theta, env
    )


def d2u_pathloss_from_angle(theta: ArrayLike, r_du: float, env: D2UEnvParams) -> np.ndarray:
    if r_du <= 0.0:
        raise UndefinedGeometryError("Angle form needs a positive horizontal range.")
    return (
        env.fspl_offset
        + 20.0 * math.log10(r_du)
        + env.eta_nlos
        + angle_objective(theta, env)
    )


def d2u_angle_derivatives(theta: float, env: D2UEnvParams) -> tuple[float, float]:
    """First and second derivatives of angle_objective with respect to degrees."""
    delta = env.eta_los - env.eta_nlos
    e = math.exp(-env.b * (theta - env.a))
    denom = 1.0 + env.a * e
    theta_rad = theta * DEG
    # Chain factor DEG keeps the trigonometric terms in per-degree units.
    first = (20.0 / LN10) * math.tan(theta_rad) * DEG + delta * env.a * env.b * e / denom**2
    second = (
        (20.0 / LN10) * DEG * DEG / math.cos(theta_rad) ** 2
        + delta * 2.0 * env.a**2 * env.b**2 * e**2 / denom**3
        - delta * env.a * env.b**2 * e / denom**2
    )
    return first, second


def optimal_elevation_angle(env: D2UEnvParams) -> float:
    if env.eta_nlos <= env.eta_los:
        return 0.0
    return _optimal_elevation_angle(env)


@lru_cache(maxsize=64)
def _optimal_elevation_angle(env: D2UEnvParams) -> float:
    lo = env.a + math.log(env.a) / env.b
    if lo <= 0.0 or d2u_angle_derivatives(lo, env)[0] >= 0.0:
        lo = 0.0
    hi = 90.0 - 1e-3
    theta = 0.5 * (lo + hi)
    for _ in range(NEWTON_MAX_ITERATIONS):
        first, second = d2u_angle_derivatives(theta, env)
        if first < 0.0:
            lo = theta
        else:
            hi = theta
        if second > 0.0:
            candidate = theta - first / second
        else:
            candidate = math.nan
        if not lo < candidate < hi:
            candidate = 0.5 * (lo + hi)
        if abs(candidate - theta) <= THETA_TOLERANCE:
            return candidate
        theta = candidate
    return theta


def d2b_pathloss(r_db: ArrayLike, theta: ArrayLike, env: D2BEnvParams) -> np.ndarray:
    r_arr = np.asarray(r_db, dtype=float)
    if np.any(r_arr <= 0.0):
        raise UndefinedGeometryError("D2B pathloss needs a positive horizontal range.")
    theta_arr = np.asarray(theta, dtype=float)
    excess = (
        env.A_excess
        * (theta_arr - env.theta0)
        * np.exp((env.theta0 - theta_arr) / env.B_scale)
    )
    return 10.0 * env.alpha * np.log10(r_arr) + excess + env.eta0


def _bisect_boundary(
    feasible: float, infeasible: float, is_feasible, tol: float = BISECTION_TOLERANCE
) -> float:
    while abs(infeasible - feasible) > tol:
        mid = 0.5 * (feasible + infeasible)
        if is_feasible(mid):
            feasible = mid
        else:
            infeasible = mid
    return feasible


def d2b_feasible_height_interval(
    r_db: float,
    env: D2BEnvParams,
    h_ceiling: float = DEFAULT_H_CEILING,
) -> HeightInterval:
    if r_db <= 0.0:
        raise UndefinedGeometryError("D2B feasibility needs a positive horizontal range.")
    theta_top = math.degrees(math.atan2(h_ceiling, r_db))
    range_term = 10.0 * env.alpha * math.log10(r_db) + env.eta0

    def is_feasible(theta: float) -> bool:
        excess = env.A_excess * (theta - env.theta0) * math.exp((env.theta0 - theta) / env.B_scale)
        return range_term + excess <= env.p_db_max

    # The excess term is unimodal in theta with its minimum at theta0 + B.
    theta_min = min(max(env.theta0 + env.B_scale, 0.0), theta_top)
    if not is_feasible(theta_min):
        return HeightInterval.none()
    theta_low = 0.0 if is_feasible(0.0) else _bisect_boundary(theta_min, 0.0, is_feasible)
    if is_feasible(theta_top):
        upper = h_ceiling
    else:
        upper = r_db * math.tan(math.radians(_bisect_boundary(theta_min, theta_top, is_feasible)))
    lower = r_db * math.tan(math.radians(theta_low))
    return HeightInterval(lower=lower, upper=max(upper, lower))


def d2b_feasible_horizontal_radius(
    h: float, env: D2BEnvParams, r_cap: float, samples: int = 2000
) -> float:
    """Outer radius of the backhaul working zone at height h, clamped to r_cap."""
    return _horizontal_radius(float(h), env, float(r_cap), samples)


@lru_cache(maxsize=4096)
def _horizontal_radius(h: float, env: D2BEnvParams, r_cap: float, samples: int) -> float:
    if math.isinf(env.p_db_max):
        return r_cap
    radii = np.linspace(r_cap / samples, r_cap, samples)
    losses = d2b_pathloss(radii, np.degrees(np.arctan2(h, radii)), env)
    feasible = losses <= env.p_db_max
    if feasible[-1]:
        return r_cap

    def pathloss_at(r: float) -> float:
        return float(d2b_pathloss(r, math.degrees(math.atan2(h, r)), env))

    def is_feasible(r: float) -> bool:
        return pathloss_at(r) <= env.p_db_max

    candidates = radii[feasible].tolist()
    # A feasible pocket narrower than the sample spacing still holds a local minimum.
    dips = np.flatnonzero((losses[1:-1] <= losses[:-2]) & (losses[1:-1] <= losses[2:])) + 1
    for i in dips:
        dip = minimize_scalar(pathloss_at, bounds=(radii[i - 1], radii[i + 1]), method="bounded")
        if dip.fun <= env.p_db_max:
            candidates.append(float(dip.x))
    if not candidates:
        return 0.0
    start = max(candidates)
    beyond = min(int(np.searchsorted(radii, start, side="right")), samples - 1)
    return _bisect_boundary(start, float(radii[beyond]), is_feasible, tol=1e-4)
