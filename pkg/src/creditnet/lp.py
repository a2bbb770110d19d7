"""Small dense LP kernel: maximize c.x subject to A x = b, 0 <= x <= u.

Thin validated wrapper over the simplex kernel in _kernels.  Every returned
witness is re-checked against the constraints before being handed back.
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import lp_feasible_kernel, lp_solve_kernel

# Defaults per the tolerance contract: equality constraints to 1e-9,
# variable bounds to 1e-12.
TOL_EQ = 1e-9
TOL_BOUND = 1e-12


class LPError(Exception):
    """Numerical failure in the simplex (cycling guard exceeded)."""


@dataclass
class BoxLP:
    """maximize objective . x  s.t.  A x = b,  0 <= x <= u."""

    objective: np.ndarray
    A: np.ndarray
    b: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        m = self.objective.shape[0]
        self.A = np.asarray(self.A, dtype=float)
        if self.A.size == 0:
            self.A = self.A.reshape(self.b.shape[0], m) if self.b.shape[0] == 0 else self.A.reshape(-1, m)
        if self.A.shape != (self.b.shape[0], m) or self.u.shape != (m,):
            raise ValueError("inconsistent LP dimensions")
        if not np.all(np.isfinite(self.u)) or np.any(self.u < 0):
            raise ValueError("bounds must be finite and nonnegative")


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: float = 0.0
    x: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _check_witness(A, b, u, x, tol_eq, tol_bound):
    if A.shape[0]:
        resid = np.max(np.abs(A @ x - b))
        if resid > tol_eq:
            raise LPError(f"witness violates equality constraints by {resid:g}")
    if np.any(x < -tol_bound) or np.any(x > u + tol_bound):
        raise LPError("witness violates variable bounds")


def solve(lp: BoxLP, tol_eq: float = TOL_EQ, tol_bound: float = TOL_BOUND) -> LPResult:
    """Solve a BoxLP.  Deterministic given its input (Bland's rule)."""
    m = lp.objective.shape[0]
    if lp.A.shape[0] == 0:
        # No equalities: each variable independently at its best bound.
        x = np.where(lp.objective > 0, lp.u, 0.0)
        return LPResult("optimal", float(lp.objective @ x), x)
    scale = max(1.0, float(np.max(np.abs(lp.b))))
    st, val, x, resid = lp_solve_kernel(lp.objective, lp.A, lp.b, lp.u)
    if st == 3:
        raise LPError("simplex iteration limit exceeded")
    if st == 2:
        return LPResult("unbounded")
    if resid > tol_eq * scale:
        return LPResult("infeasible")
    x = np.clip(x, 0.0, lp.u)
    _check_witness(lp.A, lp.b, lp.u, x, tol_eq * scale, tol_bound * scale)
    return LPResult("optimal", float(val), x)


def feasible(A, b, u, tol_eq: float = TOL_EQ, tol_bound: float = TOL_BOUND):
    """Feasibility of {A x = b, 0 <= x <= u}.  Returns (ok, witness-or-None)."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    u = np.asarray(u, dtype=float)
    if A.ndim != 2:
        raise ValueError("A must be a matrix")
    if A.shape[0] == 0:
        return True, np.zeros(A.shape[1])
    scale = max(1.0, float(np.max(np.abs(b))))
    resid, x = lp_feasible_kernel(A, b, u)
    if resid > tol_eq * scale:
        return False, None
    x = np.clip(x, 0.0, u)
    _check_witness(A, b, u, x, tol_eq * scale, tol_bound * scale)
    return True, x
