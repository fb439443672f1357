"""Source/relay power split minimizing the high-SNR pairwise error probability."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .pep import coding_gain_constants


@dataclass(frozen=True)
class AllocationResult:
    alpha1: float
    alpha2: float
    cost: float

    def __post_init__(self):
        if self.alpha1 < 0 or self.alpha2 < 0 or self.alpha1 + self.alpha2 > 1 + 1e-12:
            raise ValueError("allocation must lie on the simplex")


def opa_cost(alpha1, alpha2, sigma_f_sq, sigma_g_sq, n):
    """``C_T1^-N + C_T2^-N``; ``inf`` outside the open simplex."""
    a1 = np.asarray(alpha1, dtype=float)
    a2 = np.asarray(alpha2, dtype=float)
    inside = (a1 > 0) & (a2 > 0) & (a1 + a2 < 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        c_t1, c_t2 = coding_gain_constants(a1, a2, sigma_f_sq, sigma_g_sq, n)
        cost = c_t1 ** (-float(n)) + c_t2 ** (-float(n))
    cost = np.where(inside, cost, np.inf)
    return float(cost) if cost.ndim == 0 else cost


def _grid_min(sigma_f_sq, sigma_g_sq, n, step):
    a = np.arange(step, 1, step)
    a1, a2 = np.meshgrid(a, a, indexing="ij")
    c = opa_cost(a1, a2, sigma_f_sq, sigma_g_sq, n)
    i = np.unravel_index(np.argmin(c), c.shape)
    return a1[i], a2[i], c[i]


def solve_opa(sigma_f_sq, sigma_g_sq, n, tol=1e-5) -> AllocationResult:
    """Coarse grid (step 0.01) then Nelder-Mead on the log cost."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if sigma_f_sq <= 0 or sigma_g_sq <= 0:
        raise ValueError("channel variances must be positive")
    a1, a2, _ = _grid_min(sigma_f_sq, sigma_g_sq, n, 0.01)

    def log_cost(x):
        c = opa_cost(x[0], x[1], sigma_f_sq, sigma_g_sq, n)
        return np.log(c) if np.isfinite(c) else np.inf

    res = minimize(log_cost, [a1, a2], method="Nelder-Mead",
                   options={"xatol": tol / 10, "fatol": 1e-14, "initial_simplex":
                            [[a1, a2], [a1 + 0.005, a2], [a1, a2 + 0.005]]})
    x1, x2 = (float(v) for v in res.x)
    return AllocationResult(x1, x2, opa_cost(x1, x2, sigma_f_sq, sigma_g_sq, n))


def equal_allocation(n, sigma_f_sq=1.0, sigma_g_sq=1.0) -> AllocationResult:
    """Every node at ``P / (N + 2)``."""
    a = 1 / (n + 2)
    return AllocationResult(a, a, opa_cost(a, a, sigma_f_sq, sigma_g_sq, n))


def allocation_to_powers(result: AllocationResult, p_total, n):
    """``(P1, P2, P_R)`` with ``P_R`` the power of each relay."""
    p_relay = (1 - result.alpha1 - result.alpha2) * p_total / n
    return result.alpha1 * p_total, result.alpha2 * p_total, max(0.0, p_relay)
