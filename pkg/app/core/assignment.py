"""Exact assignment kernels.

Equal-cost optima are resolved towards the lexicographically lowest answer:
the lowest column-per-row vector for square matchings and the lowest
agent-per-task vector for capacity assignments.
"""
from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from app.core.exceptions import InfeasibleError, InstanceTooLargeError, StructuralError

BRUTE_FORCE_MAX_TASKS = 8
BRUTE_FORCE_MAX_STATES = 1_000_000


@dataclass(frozen=True)
class MatchingResult:
    """One-to-one matching: columns[i] is the column given to row i."""

    columns: tuple[int, ...]
    cost: float


@dataclass(frozen=True)
class CapacityResult:
    """Many-to-one assignment: owner[task] is the agent serving that task."""

    owner: tuple[int, ...]
    cost: float


def _tie_tolerance(value: float) -> float:
    return 1e-9 * max(1.0, abs(value))


def _check_finite(cost: np.ndarray) -> np.ndarray:
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2:
        raise StructuralError("Cost matrix must be two-dimensional.")
    if not np.all(np.isfinite(cost)):
        raise StructuralError("Cost matrix entries must be finite.")
    return cost


def matching_cost(cost: np.ndarray, columns: Sequence[int]) -> float:
    return math.fsum(float(cost[row, col]) for row, col in enumerate(columns))


def assignment_cost(cost: np.ndarray, owner: Sequence[int]) -> float:
    return math.fsum(float(cost[agent, task]) for task, agent in enumerate(owner))


def _lsa_value(cost: np.ndarray) -> float:
    if cost.shape[0] == 0:
        return 0.0
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum())


def min_cost_assignment(cost: np.ndarray) -> MatchingResult:
    cost = _check_finite(cost)
    n, m = cost.shape
    if n != m:
        raise StructuralError(f"Expected a square cost matrix, got {n}x{m}.")
    if n == 0:
        return MatchingResult(columns=(), cost=0.0)

    optimum = _lsa_value(cost)
    tol = _tie_tolerance(optimum)
    fixed_cost = 0.0
    columns: list[int] = []
    free = list(range(n))
    for row in range(n):
        for col in free:
            rest = [c for c in free if c != col]
            value = fixed_cost + cost[row, col] + _lsa_value(cost[np.ix_(range(row + 1, n), rest)])
            if value <= optimum + tol:
                columns.append(col)
                fixed_cost += cost[row, col]
                free = rest
                break
    return MatchingResult(columns=tuple(columns), cost=matching_cost(cost, columns))


def _expand_capacities(caps: Sequence[int]) -> np.ndarray:
    return np.repeat(np.arange(len(caps)), caps)


def _capacity_value(cost: np.ndarray, tasks: list[int], caps: list[int]) -> float:
    if not tasks:
        return 0.0
    if sum(caps) < len(tasks):
        return math.inf
    agents = _expand_capacities(caps)
    # Rows are tasks, columns are agent capacity units.
    return _lsa_value(cost[np.ix_(agents, tasks)].T)


def _normalize_caps(cap: int | Sequence[int], n_agents: int) -> list[int]:
    if isinstance(cap, (int, np.integer)):
        caps = [int(cap)] * n_agents
    else:
        caps = [int(c) for c in cap]
    if len(caps) != n_agents:
        raise StructuralError("One capacity is required per agent.")
    if any(c < 0 for c in caps):
        raise StructuralError("Capacities must be non-negative.")
    return caps


def capacity_assignment(cost: np.ndarray, cap: int | Sequence[int]) -> CapacityResult:
    """Exact min-cost assignment of every task to one agent within capacity."""
    cost = _check_finite(cost)
    n_agents, n_tasks = cost.shape
    caps = _normalize_caps(cap, n_agents)
    if sum(caps) < n_tasks:
        raise InfeasibleError(
            f"{n_agents} agents with capacities {caps} cannot cover {n_tasks} tasks.",
            constraint="capacity",
        )
    if n_tasks == 0:
        return CapacityResult(owner=(), cost=0.0)

    optimum = _capacity_value(cost, list(range(n_tasks)), caps)
    tol = _tie_tolerance(optimum)
    remaining = list(caps)
    owner: list[int] = []
    fixed_cost = 0.0
    for task in range(n_tasks):
        rest = list(range(task + 1, n_tasks))
        for agent in range(n_agents):
            if remaining[agent] == 0:
                continue
            remaining[agent] -= 1
            value = fixed_cost + cost[agent, task] + _capacity_value(cost, rest, remaining)
            if value <= optimum + tol:
                owner.append(agent)
                fixed_cost += cost[agent, task]
                break
            remaining[agent] += 1
    return CapacityResult(owner=tuple(owner), cost=assignment_cost(cost, owner))


def brute_force_assignment(cost: np.ndarray, cap: int | Sequence[int]) -> CapacityResult:
    """Exhaustive capacity assignment, used as a test oracle."""
    cost = _check_finite(cost)
    n_agents, n_tasks = cost.shape
    caps = _normalize_caps(cap, n_agents)
    if n_tasks > BRUTE_FORCE_MAX_TASKS or n_agents**n_tasks > BRUTE_FORCE_MAX_STATES:
        raise InstanceTooLargeError(
            f"Exhaustive search over {n_agents}^{n_tasks} maps is too large."
        )
    best: tuple[int, ...] | None = None
    best_cost = math.inf
    for owner in itertools.product(range(n_agents), repeat=n_tasks):
        counts = np.bincount(owner, minlength=n_agents) if owner else np.zeros(n_agents, dtype=int)
        if np.any(counts > caps):
            continue
        value = assignment_cost(cost, owner)
        if best is None or value < best_cost - _tie_tolerance(best_cost):
            best, best_cost = owner, value
    if best is None:
        raise InfeasibleError("No assignment satisfies the capacities.", constraint="capacity")
    return CapacityResult(owner=tuple(int(a) for a in best), cost=best_cost)
