"""Backtracking line searches: vector sufficient decrease for refinement and
front-relative non-dominance acceptance for exploration."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .front import FrontSet
from .model import EvalCounters, ProblemDefinition, evaluate

__all__ = ["LineSearchParams", "LineSearchError", "armijo_front", "exploration_ls"]


@dataclass(frozen=True)
class LineSearchParams:
    alpha0: float = 1.0
    delta: float = 0.5
    gamma: float = 1e-4
    max_backtracks: int = 60

    def __post_init__(self):
        if self.alpha0 <= 0:
            raise ValueError("alpha0 must be positive")
        if not (0 < self.delta < 1):
            raise ValueError("delta must lie in (0, 1)")
        if not (0 < self.gamma < 1):
            raise ValueError("gamma must lie in (0, 1)")
        if self.max_backtracks < 1:
            raise ValueError("max_backtracks must be >= 1")


class LineSearchError(RuntimeError):
    """Backtracking cap exceeded during a refinement step: numerical breakdown,
    since finite termination is guaranteed for smooth objectives."""


def armijo_front(
    problem: ProblemDefinition,
    x: np.ndarray,
    fx: np.ndarray,
    d: np.ndarray,
    d_value: float,
    params: LineSearchParams,
    counters: Optional[EvalCounters] = None,
) -> tuple:
    """Largest step alpha0 * delta^h satisfying componentwise sufficient decrease

        F(x + alpha d) <= F(x) + gamma * alpha * d_value * 1

    Returns (alpha, z, Fz). ``d_value`` must be the (negative) worst
    directional derivative of the objectives along d.
    """
    if d_value >= 0:
        raise ValueError("armijo_front requires a descent direction (d_value < 0)")
    alpha = params.alpha0
    for _ in range(params.max_backtracks + 1):
        z = x + alpha * d
        fz = evaluate(problem, z, counters)
        if np.all(fz <= fx + params.gamma * alpha * d_value):
            return alpha, z, fz
        alpha *= params.delta
    raise LineSearchError(
        f"no acceptable step within {params.max_backtracks} backtracks at x={x}"
    )


def exploration_ls(
    problem: ProblemDefinition,
    z: np.ndarray,
    direction: np.ndarray,
    front: FrontSet,
    params: LineSearchParams,
    counters: Optional[EvalCounters] = None,
) -> Optional[tuple]:
    """Largest step whose trial point is not weakly dominated by any front member.

    Acceptance requires, for every y in the front, some objective where the
    trial point is strictly better. Returns (alpha, point, image) or None when
    the backtracking cap is exceeded (the candidate is simply discarded).
    """
    F = front.images()
    alpha = params.alpha0
    for _ in range(params.max_backtracks + 1):
        w = z + alpha * direction
        fw = evaluate(problem, w, counters)
        # not dominated-or-equal by any member: each row must lose somewhere
        if F.size == 0 or np.all(np.any(fw < F, axis=1)):
            return alpha, w, fw
        alpha *= params.delta
    return None
