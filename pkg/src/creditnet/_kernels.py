"""Hot numeric kernels: bounded-variable simplex and the transaction-chain loop.

The kernels are written in numba-compatible numpy and compiled with @njit when
numba is importable.  Set CREDITNET_DISABLE_NUMBA=1 to force the pure-python
fallback path (same code, no compilation); benchmarks/bench_kernels.py times
the two paths against each other.

LP form solved here: maximize c.x subject to A x = b, 0 <= x <= u.
Internal variable status codes: 0 = nonbasic at lower bound, 1 = nonbasic at
upper bound, 2 = basic.  Solver status codes: 0 optimal, 2 unbounded,
3 iteration limit (cycling guard).  Feasibility is reported as the phase-1
residual (sum of artificial values); the caller compares it to its tolerance.
"""

import os

import numpy as np

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("CREDITNET_DISABLE_NUMBA", "0") != "1"


def _maybe_jit(fn):
    if USE_NUMBA:
        return _njit(cache=True)(fn)
    return fn


DUAL_TOL = 1e-9
PIV_TOL = 1e-10
RATIO_TIE = 1e-12


def _simplex_loop(T, xB, basis, vstat, bounds, cc, n_enter, maxit):
    """One simplex phase.  Mutates T, xB, basis, vstat in place.

    Entering variables are restricted to indices < n_enter (this is how
    phase 2 locks out the artificial columns).  Bland's rule on both the
    entering and leaving choice guarantees termination up to float fuzz;
    maxit is the cycling guard on top of that.
    """
    p, nall = T.shape
    for _ in range(maxit):
        enter = -1
        edir = 0.0
        for j in range(n_enter):
            if vstat[j] == 2:
                continue
            d = cc[j]
            for i in range(p):
                if T[i, j] != 0.0:
                    d -= cc[basis[i]] * T[i, j]
            if vstat[j] == 0 and d > DUAL_TOL:
                enter = j
                edir = 1.0
                break
            if vstat[j] == 1 and d < -DUAL_TOL:
                enter = j
                edir = -1.0
                break
        if enter == -1:
            return 0
        col = np.empty(p)
        for i in range(p):
            col[i] = T[i, enter]
        # Ratio test: the entering variable moves by t in direction edir.
        # Candidates: its own bound span (a bound flip), or a basic variable
        # hitting one of its bounds.
        tbest = bounds[enter]
        leave = -1
        leave_to = 0
        for i in range(p):
            a = edir * col[i]
            if a > PIV_TOL:
                ti = xB[i] / a
                to = 0
            elif a < -PIV_TOL:
                ub = bounds[basis[i]]
                if ub == np.inf:
                    continue
                ti = (ub - xB[i]) / (-a)
                to = 1
            else:
                continue
            if ti < 0.0:
                ti = 0.0
            if leave == -1:
                if ti <= tbest:
                    tbest = ti
                    leave = i
                    leave_to = to
            elif ti < tbest - RATIO_TIE:
                tbest = ti
                leave = i
                leave_to = to
            elif ti <= tbest + RATIO_TIE and basis[i] < basis[leave]:
                leave = i
                leave_to = to
        if leave == -1 and tbest == np.inf:
            return 2
        if leave == -1:
            # Bound flip, no basis change.
            for i in range(p):
                xB[i] -= edir * tbest * col[i]
            vstat[enter] = 1 - vstat[enter]
        else:
            entv = edir * tbest
            if vstat[enter] == 1:
                entv += bounds[enter]
            for i in range(p):
                xB[i] -= edir * tbest * col[i]
            lv = basis[leave]
            vstat[lv] = leave_to
            vstat[enter] = 2
            basis[leave] = enter
            xB[leave] = entv
            piv = col[leave]
            for j2 in range(nall):
                T[leave, j2] /= piv
            for i in range(p):
                if i != leave and col[i] != 0.0:
                    f = col[i]
                    for j2 in range(nall):
                        T[i, j2] -= f * T[leave, j2]
            for i in range(p):
                if -1e-11 < xB[i] < 0.0:
                    xB[i] = 0.0
    return 3


_simplex_loop = _maybe_jit(_simplex_loop)


def _extract_x(m, bounds, vstat, basis, xB):
    x = np.zeros(m)
    for j in range(m):
        if vstat[j] == 1:
            x[j] = bounds[j]
    for i in range(basis.shape[0]):
        if basis[i] < m:
            x[basis[i]] = xB[i]
    return x


_extract_x = _maybe_jit(_extract_x)


def _lp_core(cobj, A, b, u, run_phase2):
    """Two-phase bounded simplex.

    Returns (status, value, x, resid).  resid is the phase-1 residual; the
    problem is feasible iff resid is (numerically) zero.  value/x are only
    meaningful when status == 0 and resid is small.
    """
    p, m = A.shape
    nall = m + p
    T = np.zeros((p, nall))
    xB = np.empty(p)
    for i in range(p):
        if b[i] < 0.0:
            for j in range(m):
                T[i, j] = -A[i, j]
            xB[i] = -b[i]
        else:
            for j in range(m):
                T[i, j] = A[i, j]
            xB[i] = b[i]
        T[i, m + i] = 1.0
    bounds = np.empty(nall)
    for j in range(m):
        bounds[j] = u[j]
    for j in range(m, nall):
        bounds[j] = np.inf
    vstat = np.zeros(nall, np.int64)
    basis = np.empty(p, np.int64)
    for i in range(p):
        basis[i] = m + i
        vstat[m + i] = 2
    maxit = 500 * (nall + 10)

    c1 = np.zeros(nall)
    for j in range(m, nall):
        c1[j] = -1.0
    st = _simplex_loop(T, xB, basis, vstat, bounds, c1, nall, maxit)
    if st != 0:
        return st, 0.0, np.zeros(m), np.inf
    resid = 0.0
    for i in range(p):
        if basis[i] >= m:
            resid += xB[i]
    x = _extract_x(m, bounds, vstat, basis, xB)
    if not run_phase2:
        return 0, 0.0, x, resid

    # Phase 2: pin artificials to zero so a degenerate basic artificial can
    # leave but never re-grow, and lock them out of the entering choice.
    for j in range(m, nall):
        bounds[j] = 0.0
    c2 = np.zeros(nall)
    for j in range(m):
        c2[j] = cobj[j]
    st = _simplex_loop(T, xB, basis, vstat, bounds, c2, m, maxit)
    x = _extract_x(m, bounds, vstat, basis, xB)
    val = 0.0
    for j in range(m):
        val += cobj[j] * x[j]
    return st, val, x, resid


_lp_core = _maybe_jit(_lp_core)


def lp_solve_kernel(cobj, A, b, u):
    return _lp_core(cobj, A, b, u, True)


lp_solve_kernel = _maybe_jit(lp_solve_kernel)


def lp_feasible_kernel(A, b, u):
    st, _val, x, resid = _lp_core(np.zeros(A.shape[1]), A, b, u, False)
    if st != 0:
        return np.inf, x
    return resid, x


lp_feasible_kernel = _maybe_jit(lp_feasible_kernel)


def chain_kernel(M, u, z0, dirs, pair_idx, sizes, burn_in, thin, n_record, feas_tol):
    """Markov-chain inner loop: one zonotope-membership LP per step.

    dirs holds the per-pair direction vector; a drawn transaction moves the
    state to z - k * dirs[pair] when that target is still in the zonotope.
    Records every `thin`-th state after `burn_in` steps.
    """
    p = M.shape[0]
    z = z0.copy()
    out = np.empty((n_record, p))
    target = np.empty(p)
    acc = 0
    rec = 0
    steps = pair_idx.shape[0]
    for t in range(steps):
        pi = pair_idx[t]
        for i in range(p):
            target[i] = z[i] - sizes[t] * dirs[pi, i]
        resid, _lam = lp_feasible_kernel(M, target, u)
        if resid <= feas_tol:
            for i in range(p):
                z[i] = target[i]
            acc += 1
        if t >= burn_in and (t - burn_in) % thin == 0 and rec < n_record:
            for i in range(p):
                out[rec, i] = z[i]
            rec += 1
    return acc, rec, out, z


chain_kernel = _maybe_jit(chain_kernel)


def membership_batch_kernel(M, u, points, feas_tol):
    """Membership test for many points at once; returns a boolean mask."""
    npts = points.shape[0]
    ok = np.zeros(npts, np.bool_)
    for t in range(npts):
        resid, _lam = lp_feasible_kernel(M, points[t], u)
        ok[t] = resid <= feas_tol
    return ok


membership_batch_kernel = _maybe_jit(membership_batch_kernel)
