"""Low-level numeric kernels: two-sided shifted power iteration and the
projection onto a weighted budget slice of the unit box.

Compiled with numba when available; a pure-numpy fallback keeps the package
usable without a JIT (set REVAX_NO_NUMBA=1 to force it).
"""

from __future__ import annotations

import os

import numpy as np


def _pair_power_py(M, tol_lam, tol_res, max_iter):
    """Two-sided power iteration on M + c*I with c = ||M||_inf.

    Returns (lam, u, w, converged, iterations) with u the right and w the
    left Perron vector candidates, u normalized to sum 1 and w to w@u = 1
    on success.  The eigenvalue estimate is the two-sided Rayleigh quotient,
    whose error decays like the square of the eigenvector error.
    """
    n = M.shape[0]
    u = np.full(n, 1.0 / n)
    w = np.full(n, 1.0 / n)
    norm = 0.0
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += M[i, j]
        if s > norm:
            norm = s
    if norm == 0.0:
        return 0.0, u, np.full(n, float(n) / n), 1, 0
    c = norm
    lam_old = -1.0
    lam = 0.0
    Mu = M @ u
    for it in range(1, max_iter + 1):
        au = Mu + c * u
        u = au / au.sum()
        aw = M.T @ w + c * w
        w = aw / aw.sum()
        Mu = M @ u
        wu = w @ u
        if wu > 1e-14:
            lam = (w @ Mu) / wu
        else:
            lam = au.sum() / n - c  # crude growth estimate until overlap exists
        if abs(lam - lam_old) <= 0.25 * tol_lam and wu > 1e-12:
            res_r = np.max(np.abs(Mu - lam * u))
            res_l = np.max(np.abs(M.T @ w - lam * w))
            if res_r <= tol_res * (1.0 + lam) and res_l <= tol_res * (1.0 + lam):
                u = u / u.sum()
                w = w / (w @ u)
                if lam < 0.0:
                    lam = 0.0
                return lam, u, w, 1, it
        lam_old = lam
    if lam < 0.0:
        lam = 0.0
    return lam, u, w, 0, max_iter


def _project_slice_py(y, a, s):
    """Euclidean projection of y onto {eta in [0,1]^n : a @ eta = s}, a > 0.

    Bisection on the multiplier tau of the budget constraint; a @ clip(y -
    tau*a, 0, 1) is nonincreasing in tau.
    """
    lo = np.min((y - 1.0) / a)
    hi = np.max(y / a)
    total = a.sum()
    if s <= 0.0:
        return np.zeros_like(y)
    if s >= total:
        return np.ones_like(y)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        v = a @ np.clip(y - mid * a, 0.0, 1.0)
        if v > s:
            lo = mid
        else:
            hi = mid
    return np.clip(y - 0.5 * (lo + hi) * a, 0.0, 1.0)


_USE_NUMBA = os.environ.get("REVAX_NO_NUMBA", "") == ""

if _USE_NUMBA:
    try:
        from numba import njit

        pair_power = njit(cache=True)(_pair_power_py)
        project_slice = njit(cache=True)(_project_slice_py)
        # Trigger compilation once at import so later calls are cheap.
        pair_power(np.zeros((1, 1)), 1e-13, 1e-11, 4)
        project_slice(np.zeros(1), np.ones(1), 0.5)
    except Exception:  # pragma: no cover - exercised only without a JIT
        pair_power = _pair_power_py
        project_slice = _project_slice_py
else:
    pair_power = _pair_power_py
    project_slice = _project_slice_py
