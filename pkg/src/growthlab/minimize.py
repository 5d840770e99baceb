"""Ball-constrained global minimization.

The primitive behind every "minimize over a closed ball" statement in the
package: a dense axis-aligned grid scan over the ball's bounding cube,
followed by projected coordinate-descent polish from the best grid cells.
Correctness of the minimizer set, not speed, is the design goal; the grid
dimension is capped at 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from ._parallel import evaluate_points, ordered_map
from .core import BallRegion, FunctionOracle, GrowthLabError, as_vector, pairing

__all__ = [
    "MAX_GRID_DIM",
    "AllInfinite",
    "NonFiniteValue",
    "SolverConfig",
    "TiltedSolveResult",
    "ball_grid",
    "argmin_ball",
    "argmin_tilted",
    "argmin_perturbed",
]

MAX_GRID_DIM = 4

# Closed-ball membership slack, absorbs rounding at the boundary.
BALL_SLACK = 1e-12


class AllInfinite(GrowthLabError):
    """The oracle returned +inf at every sampled point of the region."""


class NonFiniteValue(GrowthLabError):
    """The oracle returned NaN or -inf, which no proper objective may do."""


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the grid scan and the coordinate-descent polish."""

    grid_points_per_axis: int = 201
    multistart_count: int = 8
    polish_max_iters: int = 200
    polish_step_tolerance: float = 1e-10
    minimizer_value_tolerance: float = 1e-9

    def __post_init__(self) -> None:
        if self.grid_points_per_axis < 3:
            raise ValueError("grid_points_per_axis must be >= 3")
        if self.multistart_count < 0:
            raise ValueError("multistart_count must be >= 0")
        for name in ("polish_step_tolerance", "minimizer_value_tolerance"):
            val = getattr(self, name)
            if not (val > 0.0 and math.isfinite(val)):
                raise ValueError(f"{name} must be positive and finite, got {val}")


@dataclass(frozen=True)
class TiltedSolveResult:
    """Every near-optimal point found, the best value, and the work done.

    ``minimizers`` holds all points whose value is within the configured
    relative tolerance of ``min_value``, sorted lexicographically; callers
    that need a single point take ``representative``.
    """

    minimizers: Tuple[np.ndarray, ...]
    min_value: float
    evaluations: int

    @property
    def representative(self) -> np.ndarray:
        """Lexicographically smallest minimizer (deterministic tie-break)."""
        return self.minimizers[0]


def ball_grid(region: BallRegion, points_per_axis: int) -> np.ndarray:
    """Grid points of the bounding cube that lie inside the ball.

    The grid is laid over ``[center - r, center + r]^d``; points outside
    the ball are dropped, not projected, to avoid biasing density toward
    the boundary.  Rows are in row-major axis order (deterministic).
    """
    if points_per_axis < 3:
        raise ValueError("points_per_axis must be >= 3")
    d = region.dim
    if d > MAX_GRID_DIM:
        raise ValueError(f"grid scan supports dimension <= {MAX_GRID_DIM}, got {d}")
    axes = [
        np.linspace(c - region.radius, c + region.radius, points_per_axis)
        for c in region.center
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    dist = np.linalg.norm(pts - region.center, axis=1)
    keep = dist <= region.radius + BALL_SLACK * max(1.0, region.radius)
    return pts[keep]


def _check_values(values: np.ndarray, points: np.ndarray, descriptor: str) -> None:
    bad = np.isnan(values) | np.isneginf(values)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise NonFiniteValue(
            f"oracle '{descriptor}' returned {values[i]} at {points[i]}"
        )


def _polish(
    evaluate: Callable[[np.ndarray], float],
    start: np.ndarray,
    start_value: float,
    region: BallRegion,
    step0: float,
    cfg: SolverConfig,
) -> Tuple[np.ndarray, float, int]:
    """Projected coordinate descent with shrinking steps from ``start``."""
    x = start.copy()
    fx = start_value
    step = step0
    evals = 0
    for _ in range(cfg.polish_max_iters):
        improved = False
        for i in range(x.size):
            best_cand, best_val = None, fx
            for sign in (1.0, -1.0):
                cand = x.copy()
                cand[i] += sign * step
                cand = region.project(cand)
                val = float(evaluate(cand))
                evals += 1
                if math.isnan(val) or val == -math.inf:
                    raise NonFiniteValue(f"oracle returned {val} at {cand}")
                if val < best_val:
                    best_cand, best_val = cand, val
            if best_cand is not None:
                x, fx = best_cand, best_val
                improved = True
        if not improved:
            step *= 0.5
            if step < cfg.polish_step_tolerance:
                break
    return x, fx, evals


def argmin_ball(
    f: FunctionOracle, region: BallRegion, cfg: SolverConfig
) -> TiltedSolveResult:
    """Global minimization of ``f`` over the closed ball.

    Dense grid scan, then coordinate-descent polish from the
    ``multistart_count`` best grid cells.  All near-optimal points found
    are reported, not just one: downstream estimators quantify over every
    minimizer and must see the worst witness.
    """
    pts = ball_grid(region, cfg.grid_points_per_axis)
    values = evaluate_points(f.evaluate, pts)
    evaluations = len(pts)
    _check_values(values, pts, f.descriptor)

    finite = np.isfinite(values)
    if not np.any(finite):
        raise AllInfinite(
            f"oracle '{f.descriptor}' is +inf at all {len(pts)} sampled points "
            f"of the ball around {region.center}"
        )

    pool_pts: List[np.ndarray] = [p for p in pts[finite]]
    pool_vals: List[float] = [float(v) for v in values[finite]]

    n_starts = min(cfg.multistart_count, len(pool_pts))
    if n_starts > 0:
        order = np.argsort(pool_vals, kind="stable")[:n_starts]
        spacing = 2.0 * region.radius / (cfg.grid_points_per_axis - 1)
        # polish runs are independent; results are reduced in start order
        polished = ordered_map(
            lambda idx: _polish(
                f.evaluate, pool_pts[idx], pool_vals[idx], region, spacing, cfg
            ),
            list(order),
        )
        for x, fx, used in polished:
            evaluations += used
            pool_pts.append(x)
            pool_vals.append(fx)

    vals = np.asarray(pool_vals)
    min_value = float(vals.min())
    cut = min_value + cfg.minimizer_value_tolerance * (1.0 + abs(min_value))
    near = [pool_pts[i] for i in np.flatnonzero(vals <= cut)]

    stacked = np.asarray(near)
    order = np.lexsort(stacked.T[::-1])
    minimizers: List[np.ndarray] = []
    for i in order:
        if minimizers and np.max(np.abs(stacked[i] - minimizers[-1])) <= 1e-12:
            continue
        minimizers.append(stacked[i])
    return TiltedSolveResult(tuple(minimizers), min_value, evaluations)


def argmin_tilted(
    f: FunctionOracle, xi, region: BallRegion, cfg: SolverConfig
) -> TiltedSolveResult:
    """Minimize the linearly tilted objective ``f(y) - <xi, y>`` over the ball."""
    xi = as_vector(xi, region.dim)

    def tilted(y: np.ndarray) -> float:
        fy = float(f.evaluate(y))
        if math.isinf(fy) and fy > 0:
            return fy
        return fy - pairing(xi, y)

    oracle = FunctionOracle(tilted, descriptor=f"{f.descriptor} - <xi,.>")
    return argmin_ball(oracle, region, cfg)


def argmin_perturbed(
    f: FunctionOracle, g: FunctionOracle, region: BallRegion, cfg: SolverConfig
) -> TiltedSolveResult:
    """Minimize ``f + g`` over the ball; ``+inf`` is absorbing in the sum."""

    def perturbed(y: np.ndarray) -> float:
        fy = float(f.evaluate(y))
        if math.isinf(fy) and fy > 0:
            return fy
        gy = float(g.evaluate(y))
        if math.isinf(gy) and gy > 0:
            return gy
        return fy + gy

    oracle = FunctionOracle(perturbed, descriptor=f"{f.descriptor} + {g.descriptor}")
    return argmin_ball(oracle, region, cfg)
