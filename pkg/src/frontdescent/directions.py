"""Descent direction subproblems solved through their simplex duals.

All direction subproblems share the shape

    min_d  max_j  g_j' d + (1/2) d' B_j d

over an active subset of objectives, with B_j = I for (rescaled) steepest
descent and B_j symmetric positive definite for Newton-type directions. The
dual maximizes  q(lam) = -(1/2) g(lam)' B(lam)^{-1} g(lam)  over the unit
simplex, with g(lam) = sum_j lam_j g_j and B(lam) = sum_j lam_j B_j; the
primal direction is recovered as d = -B(lam)^{-1} g(lam).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "DirectionResult",
    "DualSolveError",
    "common_steepest",
    "partial_steepest",
    "newton_direction",
    "bb_direction",
    "update_bb_scalars",
    "sdr_check",
    "solve_dual_simplex",
    "spectral_shift",
]

ZERO_DIRECTION_TOL = 1e-12


class DualSolveError(RuntimeError):
    """Dual solver hit its iteration cap with too large a KKT residual."""

    def __init__(self, residual: float):
        super().__init__(f"dual simplex solver did not converge (residual {residual:.3e})")
        self.residual = residual


@dataclass
class DirectionResult:
    """A descent direction with its subproblem optimum and dual weights.

    ``d_value`` is max_j g_j' d over the active subset (the worst directional
    derivative), ``theta`` the optimal value of the direction subproblem.
    """

    d: np.ndarray
    theta: float
    d_value: float
    weights: np.ndarray
    kind: str

    @property
    def is_zero(self) -> bool:
        return float(np.linalg.norm(self.d)) <= ZERO_DIRECTION_TOL


def project_simplex(y: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the unit simplex (sort-based)."""
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, len(y) + 1)
    cond = u - css / ks > 0
    rho = int(np.max(ks[cond]))
    tau = css[rho - 1] / rho
    return np.maximum(y - tau, 0.0)


def solve_dual_simplex(
    grads: np.ndarray,
    metrics: Optional[Sequence[np.ndarray]] = None,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    fail_residual: float = 1e-6,
) -> tuple:
    """Maximize the dual over the simplex by projected gradient with backtracking.

    Returns ``(lam, d, theta, terms)`` where ``terms[j] = g_j' d + (1/2) d' B_j d``.
    Warm start is uniform weights; for two objectives with the identity metric
    the clamped closed-form multiplier is used directly.

    Raises DualSolveError if the iteration cap is reached with KKT residual
    above ``fail_residual``.
    """
    G = np.asarray(grads, dtype=float)
    m = G.shape[0]
    if m == 0:
        raise ValueError("active subset must be nonempty")

    if metrics is None:
        if m == 1:
            d = -G[0]
            lam = np.ones(1)
            return lam, d, float(G[0] @ d + 0.5 * d @ d), np.array([G[0] @ d + 0.5 * d @ d])
        if m == 2:
            g1, g2 = G
            diff = g1 - g2
            denom = float(diff @ diff)
            if denom <= 0.0:
                lam1 = 0.5
            else:
                # lam1 minimizes ||lam1 g1 + (1 - lam1) g2||^2
                lam1 = float(np.clip(((g2 - g1) @ g2) / denom, 0.0, 1.0))
            lam = np.array([lam1, 1.0 - lam1])
            d = -(lam @ G)
            terms = G @ d + 0.5 * float(d @ d)
            theta = float(np.max(terms))
            return lam, d, theta, terms
        # identity metric, m >= 3: exact min-norm point of the gradient hull
        lam = _min_norm_simplex(G)
        d = -(lam @ G)
        terms = G @ d + 0.5 * float(d @ d)
        return lam, d, float(np.max(terms)), terms
    else:
        B = [np.asarray(b, dtype=float) for b in metrics]
        if m == 1:
            d = -np.linalg.solve(B[0], G[0])
            val = float(G[0] @ d + 0.5 * d @ B[0] @ d)
            return np.ones(1), d, val, np.array([val])

        def solve(lam):
            Blam = sum(l * b for l, b in zip(lam, B))
            c = np.linalg.cholesky(Blam)
            g = lam @ G
            return -np.linalg.solve(c.T, np.linalg.solve(c, g))

        def dual_grad(lam, d):
            return np.array([G[j] @ d + 0.5 * d @ B[j] @ d for j in range(m)])

        if m == 2:
            lam = _maximize_dual_m2(solve, dual_grad)
            d = solve(lam)
            terms = dual_grad(lam, d)
            return lam, d, float(np.max(terms)), terms
        if m == 3:
            lam = _maximize_dual_m3(solve, dual_grad)
            d = solve(lam)
            terms = dual_grad(lam, d)
            return lam, d, float(np.max(terms)), terms

        L = None

    def dual_value(lam, d):
        # q(lam) = -(1/2) g(lam)' B(lam)^{-1} g(lam) = (1/2) g(lam)' d
        return 0.5 * float((lam @ G) @ d)

    lam = np.full(m, 1.0 / m)
    d = solve(lam)
    terms = dual_grad(lam, d)
    q = dual_value(lam, d)
    step = 1.0 / L if L and L > 0 else 1.0
    residual = np.inf
    for _ in range(max_iter):
        residual = float(np.max(terms) - lam @ terms)
        if residual <= tol:
            break
        trial_step = step
        for _bt in range(60):
            lam_new = project_simplex(lam + trial_step * terms)
            if np.allclose(lam_new, lam, rtol=0.0, atol=1e-18):
                break
            d_new = solve(lam_new)
            q_new = dual_value(lam_new, d_new)
            if q_new >= q - 1e-18:
                break
            trial_step *= 0.5
        if np.allclose(lam_new, lam, rtol=0.0, atol=1e-18):
            # projection is a fixed point: KKT holds up to numerical precision
            break
        lam, d, q = lam_new, d_new, q_new
        terms = dual_grad(lam, d)
    else:
        if residual > fail_residual:
            raise DualSolveError(residual)

    theta = float(np.max(terms))
    return lam, d, theta, terms


_BISECT_ITERS = 60


def _maximize_dual_m2(solve, dual_grad) -> np.ndarray:
    """Maximizer of the concave dual over the 1-simplex by derivative bisection.

    By the envelope theorem the dual gradient is ``terms``, so along
    lam(t) = (t, 1 - t) the derivative is terms[0] - terms[1], monotone
    nonincreasing in t; bisection locates its sign change to machine precision.
    """

    def slope(t: float) -> float:
        lam = np.array([t, 1.0 - t])
        terms = dual_grad(lam, solve(lam))
        return float(terms[0] - terms[1])

    lo, hi = 0.0, 1.0
    if slope(lo) <= 0.0:
        return np.array([0.0, 1.0])
    if slope(hi) >= 0.0:
        return np.array([1.0, 0.0])
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if slope(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    return np.array([t, 1.0 - t])


def _maximize_dual_m3(solve, dual_grad) -> np.ndarray:
    """Maximizer of the concave dual over the 2-simplex by nested bisection.

    Parametrize lam(t, s) = (t, (1 - t) s, (1 - t)(1 - s)). For fixed t the
    slice is a segment, so q is concave in s with derivative proportional to
    terms[1] - terms[2]; the inner bisection yields s*(t). The value function
    phi(t) is concave with envelope derivative
    terms[0] - (s terms[1] + (1 - s) terms[2]) at s = s*(t).
    """

    def lam_of(t: float, s: float) -> np.ndarray:
        return np.array([t, (1.0 - t) * s, (1.0 - t) * (1.0 - s)])

    def inner(t: float) -> tuple:
        def slope(s: float):
            lam = lam_of(t, s)
            terms = dual_grad(lam, solve(lam))
            return float(terms[1] - terms[2]), terms

        sl, terms = slope(0.0)
        if sl <= 0.0:
            return 0.0, terms
        sl, terms = slope(1.0)
        if sl >= 0.0:
            return 1.0, terms
        lo, hi = 0.0, 1.0
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            sl, terms = slope(mid)
            if sl > 0.0:
                lo = mid
            else:
                hi = mid
        s = 0.5 * (lo + hi)
        lam = lam_of(t, s)
        return s, dual_grad(lam, solve(lam))

    def outer_slope(t: float) -> float:
        s, terms = inner(t)
        return float(terms[0] - (s * terms[1] + (1.0 - s) * terms[2]))

    lo, hi = 0.0, 1.0
    if outer_slope(lo) <= 0.0:
        t = 0.0
    elif outer_slope(hi) >= 0.0:
        t = 1.0
    else:
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            if outer_slope(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        t = 0.5 * (lo + hi)
    s, _ = inner(t)
    return lam_of(t, s)


def _min_norm_simplex(G: np.ndarray) -> np.ndarray:
    """Exact minimizer of ||lam' G||^2 over the unit simplex.

    The optimum lies in the relative interior of some face, where the
    equality-constrained KKT system M lam = mu 1, sum(lam) = 1 holds with M
    the Gram matrix of that face's gradients (mu = 0 exactly when zero lies
    in the hull). Enumerating faces (2^m - 1 of them, m is small) and keeping
    the feasible candidate of least norm is exact.
    """
    m = G.shape[0]
    gram = G @ G.T
    scale = max(1.0, float(np.max(np.abs(gram))))
    best_n2 = np.inf
    best_lam = None
    for size in range(1, m + 1):
        for S in itertools.combinations(range(m), size):
            idx = list(S)
            M = gram[np.ix_(idx, idx)]
            kkt = np.zeros((size + 1, size + 1))
            kkt[:size, :size] = M
            kkt[:size, size] = -1.0
            kkt[size, :size] = 1.0
            rhs = np.zeros(size + 1)
            rhs[size] = 1.0
            sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
            w = sol[:size]
            if float(np.linalg.norm(kkt @ sol - rhs)) > 1e-9 * scale:
                continue  # no stationary point on this face
            if np.any(w < -1e-12):
                continue
            lam = np.zeros(m)
            lam[idx] = np.clip(w, 0.0, None)
            lam /= lam.sum()
            n2 = float(lam @ gram @ lam)
            if n2 < best_n2:
                best_n2 = n2
                best_lam = lam
    return best_lam


def _zero_guard(d: np.ndarray, theta: float, d_value: float) -> tuple:
    if float(np.linalg.norm(d)) <= ZERO_DIRECTION_TOL:
        return np.zeros_like(d), 0.0, 0.0
    return d, theta, d_value


def common_steepest(J: np.ndarray) -> DirectionResult:
    """Steepest common descent direction: min-norm negative convex combination
    of the gradients, with theta = -(1/2)||d||^2."""
    J = np.atleast_2d(np.asarray(J, dtype=float))
    lam, d, theta, _ = solve_dual_simplex(J)
    d_value = float(np.max(J @ d)) if d.size else 0.0
    d, theta, d_value = _zero_guard(d, theta, d_value)
    return DirectionResult(d=d, theta=theta, d_value=d_value, weights=lam, kind="common_sd")


def partial_steepest(J: np.ndarray, I: Sequence[int]) -> DirectionResult:
    """Steepest descent restricted to the objective rows in I (0-based)."""
    J = np.atleast_2d(np.asarray(J, dtype=float))
    m = J.shape[0]
    idx = sorted(set(int(i) for i in I))
    if not idx or len(idx) >= m or min(idx) < 0 or max(idx) >= m:
        raise ValueError(f"I must be a proper nonempty subset of range({m}), got {I}")
    lam, d, theta, _ = solve_dual_simplex(J[idx])
    d_value = float(np.max(J[idx] @ d))
    d, theta, d_value = _zero_guard(d, theta, d_value)
    return DirectionResult(
        d=d, theta=theta, d_value=d_value, weights=lam, kind=f"partial_sd({tuple(idx)})"
    )


def spectral_shift(H: np.ndarray, kappa: float) -> tuple:
    """Shift H by eta*I so the minimum eigenvalue is at least kappa whenever it
    was nonpositive; H is left untouched otherwise. Returns (B, eta)."""
    lam_min = float(np.linalg.eigvalsh(H)[0])
    if lam_min <= 0.0:
        eta = -lam_min + kappa
        return H + eta * np.eye(H.shape[0]), eta
    return H, 0.0


def newton_direction(J: np.ndarray, H: Sequence[np.ndarray], kappa: float) -> DirectionResult:
    """Newton-type direction with per-objective metrics B_j = H_j + eta_j I.

    eta_j lifts the spectrum above kappa when H_j is not positive definite.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    J = np.atleast_2d(np.asarray(J, dtype=float))
    B = []
    for h in H:
        h = np.asarray(h, dtype=float)
        if not np.allclose(h, h.T, atol=1e-8):
            raise ValueError("Hessian input must be symmetric")
        B.append(spectral_shift(0.5 * (h + h.T), kappa)[0])
    lam, d, theta, _ = solve_dual_simplex(J, metrics=B)
    d_value = float(np.max(J @ d))
    d, theta, d_value = _zero_guard(d, theta, d_value)
    return DirectionResult(d=d, theta=theta, d_value=d_value, weights=lam, kind="newton")


def bb_direction(J: np.ndarray, a: np.ndarray, a_min: float, a_max: float) -> DirectionResult:
    """Gradient-rescaled steepest descent: objective j contributes g_j / a_j.

    The scalars are clamped into [a_min, a_max]; theta = -(1/2)||d||^2 holds
    as for plain steepest descent.
    """
    if not (0 < a_min <= a_max):
        raise ValueError("require 0 < a_min <= a_max")
    J = np.atleast_2d(np.asarray(J, dtype=float))
    a = np.clip(np.asarray(a, dtype=float), a_min, a_max)
    if np.any(a <= 0):
        raise ValueError("rescaling scalars must be positive")
    lam, d, theta, _ = solve_dual_simplex(J / a[:, None])
    # d_value reports the true worst directional derivative, not the rescaled one
    d_value = float(np.max(J @ d))
    d, theta, d_value = _zero_guard(d, theta, d_value)
    return DirectionResult(d=d, theta=theta, d_value=d_value, weights=lam, kind="bb")


def update_bb_scalars(
    s: np.ndarray,
    y: np.ndarray,
    a_min: float,
    a_max: float,
) -> np.ndarray:
    """Per-objective spectral step scalars a_j = (s'y_j)/(s's), clamped.

    ``y`` holds one gradient difference per row. Nonpositive curvature falls
    back to a_j = 1.
    """
    s = np.asarray(s, dtype=float)
    ss = float(s @ s)
    if ss <= 0:
        raise ValueError("step vector must be nonzero")
    y = np.atleast_2d(np.asarray(y, dtype=float))
    a = np.empty(y.shape[0])
    for j in range(y.shape[0]):
        sy = float(s @ y[j])
        a[j] = np.clip(sy / ss, a_min, a_max) if sy > 0 else 1.0
    return a


def sdr_check(
    d_value_of_vD: float,
    norm_vD: float,
    norm_v: float,
    gamma1: float,
    gamma2: float,
) -> bool:
    """Steepest-descent-related safeguard: the tentative direction must make
    at least Gamma1-proportional progress and stay within Gamma2 of the
    steepest descent norm."""
    return (d_value_of_vD <= -gamma1 * norm_v**2) and (norm_vD <= gamma2 * norm_v)
