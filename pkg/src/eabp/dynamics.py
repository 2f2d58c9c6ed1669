"""Trajectories of the evolution operator on R^(n+nu).

The female and male masses X = sum x_i, Y = sum y_k obey
X(V(z)) = Y(V(z)) = X(z) Y(z), so after t >= 1 steps both equal
(X0 Y0)^(2^(t-1)).  That alone decides which level set (H0: X=Y=0,
H1: X=Y=1, H_inf) can hold limit points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import AlgebraElement, InheritanceTensor, evolve, norm_l1

TOL_CONV = 1e-12
TOL_CLS = 1e-9
DIVERGENCE_BOUND = 1e12
DEDUP_TOL = 1e-6

H0, H1, H_INF, BOUNDARY_UNKNOWN = "H0", "H1", "H_infinity", "boundary_unknown"


@dataclass
class TrajectoryReport:
    states: list[AlgebraElement]
    xy_values: list[tuple[float, float]]
    classification: str
    converged_to: Optional[AlgebraElement] = None
    diverged: bool = False

    @property
    def steps(self) -> int:
        return len(self.states) - 1


@dataclass
class FixedPointSearch:
    points: list[AlgebraElement]
    dropped: int = 0
    diverged: int = 0
    per_seed: list[str] = field(default_factory=list)


def linear_forms(z: AlgebraElement) -> tuple[float, float]:
    return float(z.x.sum()), float(z.y.sum())


def classify_limit(z0: AlgebraElement, tol_cls: float = TOL_CLS) -> str:
    """Level set bounding the omega-limit set, decided from |X0 Y0| alone.

    X0 Y0 = -1 also lands in H1 (the masses become +1 after two steps).
    """
    X, Y = linear_forms(z0)
    p = abs(X * Y)
    if not math.isfinite(p):
        return BOUNDARY_UNKNOWN
    if abs(p - 1.0) <= tol_cls:
        return H1
    return H0 if p < 1.0 else H_INF


def trajectory(
    T: InheritanceTensor,
    z0: AlgebraElement,
    steps: int,
    tol_conv: float = TOL_CONV,
    bound: float = DIVERGENCE_BOUND,
) -> TrajectoryReport:
    if steps < 0:
        raise ValueError("steps must be >= 0")
    states = [z0]
    z = z0
    diverged = False
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(steps):
            z = evolve(T, z)
            states.append(z)
            size = norm_l1(z)
            if not math.isfinite(size) or size > bound:
                diverged = True
                break
    converged = None
    if not diverged and len(states) > 1 and norm_l1(states[-1] - states[-2]) <= tol_conv:
        converged = states[-1]
    return TrajectoryReport(
        states=states,
        xy_values=[linear_forms(s) for s in states],
        classification=classify_limit(z0),
        converged_to=converged,
        diverged=diverged,
    )


def check_fixed_point_necessary(z: AlgebraElement, tol: float = 1e-9) -> bool:
    """z in H0 or H1 (within tol); every fixed point passes."""
    X, Y = linear_forms(z)
    return abs(X - Y) <= tol and (abs(X) <= tol or abs(X - 1.0) <= tol)


def check_zero_point_necessary(z: AlgebraElement, tol: float = 1e-9) -> bool:
    X, Y = linear_forms(z)
    return abs(X * Y) <= tol


def verify_xy_recurrence(T: InheritanceTensor, z0: AlgebraElement, steps: int, tol: float = 1e-9) -> float:
    """Worst relative error of X(x^(t)) against (X0 Y0)^(2^(t-1)), t = 1..steps.

    Raises AssertionError if X and Y ever disagree by more than tol
    (relative to their size).
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    X0, Y0 = linear_forms(z0)
    p = X0 * Y0
    worst = 0.0
    z = z0
    for t in range(1, steps + 1):
        z = evolve(T, z)
        X, Y = linear_forms(z)
        expected = p ** (2 ** (t - 1))
        scale = max(abs(expected), 1e-300)
        if abs(X - Y) > tol * max(1.0, abs(X)):
            raise AssertionError(f"X != Y at step {t}: {X} vs {Y}")
        err = abs(X - expected) / scale if expected != 0.0 else abs(X)
        worst = max(worst, err)
    return worst


def find_fixed_points_by_iteration(
    T: InheritanceTensor,
    seeds: list[AlgebraElement],
    steps: int = 500,
    tol: float = 1e-10,
) -> FixedPointSearch:
    """Iterate from every seed and keep the limits that are fixed points.

    Non-convergent and divergent seeds are dropped and counted.  Limits
    within DEDUP_TOL (l1) of an earlier one are merged.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    found: list[AlgebraElement] = []
    out = FixedPointSearch(points=found)
    for z0 in seeds:
        z, diverged = z0, False
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(steps):
                nxt = evolve(T, z)
                size = norm_l1(nxt)
                if not math.isfinite(size) or size > DIVERGENCE_BOUND:
                    diverged = True
                    break
                settled = norm_l1(nxt - z) <= TOL_CONV
                z = nxt
                if settled:
                    break
        if diverged:
            out.diverged += 1
            out.dropped += 1
            out.per_seed.append("diverged")
            continue
        if norm_l1(evolve(T, z) - z) > tol:
            out.dropped += 1
            out.per_seed.append("not_converged")
            continue
        out.per_seed.append("converged")
        if not any(norm_l1(z - p) < DEDUP_TOL for p in found):
            found.append(z)
    return out
