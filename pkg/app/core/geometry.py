from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike

# Ranges below this are treated as this distance when a channel formula
# needs a strictly positive horizontal range to the BS.
MIN_RANGE = 1e-3
GEOMETRY_TOLERANCE = 1e-6


def slot_3d_distance(p: ArrayLike, q: ArrayLike) -> float:
    return float(np.linalg.norm(np.asarray(p, dtype=float) - np.asarray(q, dtype=float)))


def horizontal_range(point: ArrayLike) -> float:
    x, y = float(point[0]), float(point[1])
    return max(math.hypot(x, y), MIN_RANGE)


def project_onto_disk(point: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    offset = point - center
    dist = math.hypot(offset[0], offset[1])
    if dist <= radius:
        return point.copy()
    if dist == 0.0:
        return center.copy()
    return center + offset * (radius / dist)


def disk_violation(point: np.ndarray, disks: list[tuple[np.ndarray, float]]) -> float:
    """Largest distance by which point lies outside any of the disks."""
    return max(
        math.hypot(point[0] - center[0], point[1] - center[1]) - radius
        for center, radius in disks
    )
