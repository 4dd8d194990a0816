"""Front descent outer loop.

Each iteration processes every point of the current set: a refinement step
(line search along a common descent direction, gated by the per-iteration
stationarity threshold) followed by exploration steps along partial steepest
descent directions for every proper subset of objectives. The point with the
worst stationarity value is always processed first.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import directions as dirs
from .front import FrontEntry, FrontSet, insert_filter, is_stable
from .hypervolume import hypervolume
from .linesearch import LineSearchParams, armijo_front, exploration_ls
from .model import EvalCounters, ProblemDefinition, hessians, jacobian

__all__ = [
    "FDConfig",
    "IterationRecord",
    "RunResult",
    "run",
    "select_processing_order",
    "theta_of_front",
    "compute_iteration_bound",
    "default_reference_point",
    "front_hypervolume",
]

TRACE_COLUMNS = [
    "k",
    "front_size_in",
    "pct_sigma_stationary_in",
    "n_refinements",
    "iterations_since_last_refinement",
    "n_explorations",
    "pct_exploration_sigma_stationary",
    "front_size_out",
    "theta_value",
    "hypervolume_value",
]


@dataclass(frozen=True)
class FDConfig:
    """All algorithm parameters. Defaults follow the reference experimental
    setting; see README for the meaning of each knob."""

    alpha0: float = 1.0
    delta: float = 0.5
    gamma: float = 1e-4
    gamma1: float = 1e-2
    gamma2: float = 1e2
    sigma: float = 1e-7
    sigma_decreasing: bool = False  # sigma_k = sigma / (k + 1) instead of constant
    variant: str = "sd"  # sd | newton | bb
    kappa: float = 1e-2
    a_min: float = 1e-3
    a_max: float = 1e3
    eps_hv: float = 5e-4
    max_iterations: Optional[int] = 1000
    wall_clock_limit: Optional[float] = None
    crowding_gap_factor: float = 1e-3
    exploration_theta_tol: float = 1e-10
    max_backtracks: int = 60
    check_invariants: bool = False

    def __post_init__(self):
        if self.gamma1 <= 0 or self.gamma2 <= 0:
            raise ValueError("gamma1 and gamma2 must be positive")
        if not (0 < self.delta < 1) or not (0 < self.gamma < 1):
            raise ValueError("delta and gamma must lie in (0, 1)")
        if self.variant not in ("sd", "newton", "bb"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.eps_hv < 0 or self.sigma < 0:
            raise ValueError("eps_hv and sigma must be nonnegative")

    def line_search_params(self) -> LineSearchParams:
        return LineSearchParams(
            alpha0=self.alpha0,
            delta=self.delta,
            gamma=self.gamma,
            max_backtracks=self.max_backtracks,
        )

    def sigma_at(self, k: int) -> float:
        return self.sigma / (k + 1) if self.sigma_decreasing else self.sigma


@dataclass
class IterationRecord:
    k: int
    front_size_in: int
    pct_sigma_stationary_in: float
    n_refinements: int
    iterations_since_last_refinement: int
    n_explorations: int
    pct_exploration_sigma_stationary: float
    front_size_out: int
    theta_value: float
    hypervolume_value: float
    elapsed: float

    def row(self) -> list:
        return [getattr(self, c) for c in TRACE_COLUMNS]


@dataclass
class RunResult:
    front: FrontSet
    trace: List[IterationRecord]
    counters: EvalCounters
    stop_reason: str
    reference_point: np.ndarray
    # one (k, v_norm, alpha) triple per executed refinement line search
    refinements: List[tuple] = field(default_factory=list)


def _cache_entry(problem, entry: FrontEntry, counters) -> None:
    """Attach Jacobian, steepest descent direction and theta to an entry."""
    if getattr(entry, "cached_J", None) is not None:
        return
    J = jacobian(problem, entry.x, counters)
    res = dirs.common_steepest(J)
    entry.cached_J = J
    entry.cached_v = res.d
    entry.cached_theta = res.theta
    entry.cached_v_norm = float(np.linalg.norm(res.d))


def select_processing_order(front: FrontSet) -> List[int]:
    """Index order with an argmin-theta point first, ties and the remainder
    in insertion order."""
    if not len(front):
        raise ValueError("front must be nonempty")
    thetas = [e.cached_theta for e in front.entries]
    if any(t is None for t in thetas):
        raise ValueError("theta must be cached on all entries")
    first = int(np.argmin(thetas))
    return [first] + [i for i in range(len(front)) if i != first]


def theta_of_front(front: FrontSet) -> float:
    thetas = [e.cached_theta for e in front.entries]
    if not thetas or any(t is None for t in thetas):
        raise ValueError("theta must be cached on all entries")
    return float(min(thetas))


def front_hypervolume(front: FrontSet, zeta: np.ndarray) -> float:
    """Hypervolume of the front image w.r.t. zeta; images beyond the reference
    point bound no volume and are ignored."""
    F = front.images()
    if F.size == 0:
        return 0.0
    inside = np.all(F <= zeta, axis=1)
    if not inside.any():
        return 0.0
    return hypervolume(F[inside], zeta)


def _refinement_direction(problem, entry, config, counters):
    """Variant direction with the steepest-descent-related safeguard; returns
    (d, d_value) with d_value measured against the true gradients."""
    J = entry.cached_J
    v = entry.cached_v
    norm_v = entry.cached_v_norm
    if config.variant == "sd":
        return v, -(norm_v**2)
    if config.variant == "newton":
        H = hessians(problem, entry.x, counters)
        cand = dirs.newton_direction(J, H, config.kappa)
    else:  # bb
        if entry.bb_history is not None:
            x_prev, J_prev = entry.bb_history
            s = entry.x - x_prev
            if float(s @ s) > 0:
                a = dirs.update_bb_scalars(s, J - J_prev, config.a_min, config.a_max)
            else:
                a = np.ones(J.shape[0])
        else:
            a = np.ones(J.shape[0])
        cand = dirs.bb_direction(J, a, config.a_min, config.a_max)
    d_value = float(np.max(J @ cand.d))
    if dirs.sdr_check(
        d_value, float(np.linalg.norm(cand.d)), norm_v, config.gamma1, config.gamma2
    ):
        return cand.d, d_value
    return v, -(norm_v**2)


def _proper_subsets(m: int):
    """Proper nonempty objective subsets, increasing cardinality then lexicographic."""
    for size in range(1, m):
        yield from itertools.combinations(range(m), size)


def default_reference_point(problem: ProblemDefinition, X0: FrontSet) -> np.ndarray:
    """Fixed per-run reference point: componentwise image maxima plus 10% of
    each objective's initial range.

    An objective whose X0 image range is degenerate (e.g. a singleton X0)
    borrows the range of the full hyper-diagonal sample X0 was filtered from,
    falling back to 10% of the magnitude, so the dominated region never has
    zero measure.
    """
    from .suite import diagonal_images  # local import avoids a cycle at load time

    F0 = X0.images()
    hi = F0.max(axis=0)
    rng = hi - F0.min(axis=0)
    if np.any(rng <= 0):
        diag = diagonal_images(problem)
        if diag.size:
            diag_rng = diag.max(axis=0) - diag.min(axis=0)
            rng = np.where(rng > 0, rng, diag_rng)
    rng = np.where(rng > 0, rng, np.maximum(1.0, np.abs(hi)))
    return hi + 0.1 * rng


def run(
    problem: ProblemDefinition,
    X0: FrontSet,
    config: FDConfig,
    reference_point: Optional[np.ndarray] = None,
) -> RunResult:
    """Execute the front descent loop from a stable nonempty starting set."""
    if not len(X0):
        raise ValueError("X0 must be nonempty")
    if config.check_invariants and not is_stable(X0):
        raise ValueError("X0 must be a set of mutually nondominated points")

    counters = EvalCounters()
    ls_params = config.line_search_params()
    t_start = time.perf_counter()

    front = X0.copy()
    for e in front.entries:
        _cache_entry(problem, e, counters)

    if reference_point is None:
        zeta = default_reference_point(problem, X0)
    else:
        zeta = np.asarray(reference_point, dtype=float)
        if np.any(X0.images() > zeta):
            raise ValueError("reference point must dominate every X0 image")

    trace: List[IterationRecord] = []
    refinement_log: List[tuple] = []
    stop_reason = None
    last_refinement_iter: Optional[int] = None
    prev_hv = front_hypervolume(front, zeta)
    k = 0

    while True:
        if config.max_iterations is not None and k >= config.max_iterations:
            stop_reason = "iteration_cap"
            break
        elapsed = time.perf_counter() - t_start
        if config.wall_clock_limit is not None and elapsed > config.wall_clock_limit:
            stop_reason = "time_cap"
            break

        sigma_k = config.sigma_at(k)
        size_in = len(front)
        stationary_in = sum(1 for e in front.entries if e.cached_theta >= -sigma_k)
        order = select_processing_order(front)
        snapshot = [front.entries[i] for i in order]

        n_r = 0
        n_e = 0
        n_e_stationary = 0

        # per-objective spacing gap for exploration insertions
        F_now = front.images()
        img_range = F_now.max(axis=0) - F_now.min(axis=0)
        gap = config.crowding_gap_factor * img_range

        for x_c in snapshot:
            if x_c not in front:
                continue
            theta_c = x_c.cached_theta
            if theta_c < -sigma_k:
                d, d_value = _refinement_direction(problem, x_c, config, counters)
                alpha, xz, fz = armijo_front(
                    problem, x_c.x, x_c.fx, d, d_value, ls_params, counters
                )
                z = FrontEntry(x=xz, fx=fz, provenance="refinement")
                if config.variant == "bb":
                    z.bb_history = (x_c.x, x_c.cached_J)
                _cache_entry(problem, z, counters)
                if config.check_invariants and not np.all(
                    fz <= x_c.fx + config.gamma * alpha * d_value
                ):
                    raise AssertionError("accepted step violates sufficient decrease")
                front = insert_filter(front, z)
                n_r += 1
                last_refinement_iter = k
                refinement_log.append((k, x_c.cached_v_norm, alpha))
            else:
                z = x_c

            if z not in front:
                continue
            J_z = z.cached_J
            for I in _proper_subsets(problem.m):
                if z not in front:
                    break
                part = dirs.partial_steepest(J_z, I)
                if part.theta >= -config.exploration_theta_tol:
                    continue
                hit = exploration_ls(problem, z.x, part.d, front, ls_params, counters)
                if hit is None:
                    continue
                _, xw, fw = hit
                if np.any(gap > 0):
                    close = np.max(
                        np.abs(front.images() - fw)
                        / np.where(gap > 0, gap, np.inf),
                        axis=1,
                    )
                    if np.min(close) < 1.0:
                        continue
                w = FrontEntry(
                    x=xw,
                    fx=fw,
                    provenance=f"exploration({tuple(i + 1 for i in I)})",
                )
                new_front = insert_filter(front, w)
                if w not in new_front:
                    continue
                front = new_front
                _cache_entry(problem, w, counters)
                n_e += 1
                if w.cached_theta >= -sigma_k:
                    n_e_stationary += 1

        if config.check_invariants and not is_stable(front):
            raise AssertionError(f"front lost stability at iteration {k}")

        hv = front_hypervolume(front, zeta)
        if config.check_invariants and hv < prev_hv - 1e-12 * max(1.0, abs(prev_hv)):
            raise AssertionError(f"hypervolume decreased at iteration {k}")

        elapsed = time.perf_counter() - t_start
        trace.append(
            IterationRecord(
                k=k,
                front_size_in=size_in,
                pct_sigma_stationary_in=100.0 * stationary_in / size_in,
                n_refinements=n_r,
                iterations_since_last_refinement=(
                    0 if last_refinement_iter is None else k - last_refinement_iter
                ),
                n_explorations=n_e,
                pct_exploration_sigma_stationary=(
                    100.0 * n_e_stationary / n_e if n_e else 100.0
                ),
                front_size_out=len(front),
                theta_value=theta_of_front(front),
                hypervolume_value=hv,
                elapsed=elapsed,
            )
        )

        k += 1
        # stop-rule priority: caps, then hypervolume, then theta
        if config.max_iterations is not None and k >= config.max_iterations:
            stop_reason = "iteration_cap"
            break
        if config.wall_clock_limit is not None and elapsed > config.wall_clock_limit:
            stop_reason = "time_cap"
            break
        if (
            config.eps_hv > 0
            and prev_hv > 0
            and (hv - prev_hv) / prev_hv < config.eps_hv
        ):
            stop_reason = "hv_improvement"
            prev_hv = hv
            break
        prev_hv = hv
        if theta_of_front(front) >= -sigma_k and n_e == 0:
            stop_reason = "theta_threshold"
            break

    if not trace:
        # zero-iteration run: record the untouched starting set
        trace.append(
            IterationRecord(
                k=0,
                front_size_in=len(front),
                pct_sigma_stationary_in=100.0
                * sum(1 for e in front.entries if e.cached_theta >= -config.sigma_at(0))
                / len(front),
                n_refinements=0,
                iterations_since_last_refinement=0,
                n_explorations=0,
                pct_exploration_sigma_stationary=100.0,
                front_size_out=len(front),
                theta_value=theta_of_front(front),
                hypervolume_value=prev_hv,
                elapsed=time.perf_counter() - t_start,
            )
        )

    return RunResult(
        front=front,
        trace=trace,
        counters=counters,
        stop_reason=stop_reason,
        reference_point=zeta,
        refinements=refinement_log,
    )


def compute_iteration_bound(
    V_star: float,
    V0: float,
    config: FDConfig,
    eps: float,
    L_max: float,
    m: int,
) -> float:
    """Worst-case count of iterations whose set-stationarity value stays at or
    below -eps, from the hypervolume-gain argument."""
    if eps <= 0 or L_max <= 0:
        raise ValueError("eps and L_max must be positive")
    if V_star < V0:
        raise ValueError("V_star must dominate V0")
    delta_low = config.gamma1 * (1.0 - config.gamma) / (config.gamma2**2 * L_max)
    denom = (
        2.0
        * config.gamma
        * min(1.0, config.gamma1)
        * min(config.alpha0, delta_low)
        * eps
    ) ** m
    return (V_star - V0) / denom
