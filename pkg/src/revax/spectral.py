"""Spectral radii, Perron eigenpairs, R_e(eta) and its gradient."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._power import pair_power
from .errors import ConvergenceError, GradientUndefined, ModelError
from .graphs import strongly_connected_components
from .kernels import Kernel, Strategy

# Relative gap below which two atoms are considered to share the Perron root.
SIMPLE_ROOT_GAP = 1e-8


@dataclass(frozen=True)
class PerronPair:
    """Perron root with right eigenvector u (sum 1) and left w (w @ u = 1)."""

    radius: float
    right: np.ndarray
    left: np.ndarray
    converged: bool
    iterations: int


def _validate_matrix(M) -> np.ndarray:
    M = np.ascontiguousarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ModelError("expected a non-empty square matrix")
    if not np.all(np.isfinite(M)):
        raise ModelError("matrix has non-finite entries")
    if np.any(M < 0):
        raise ModelError("matrix has negative entries")
    return M


def _tolerances(M: np.ndarray) -> tuple[float, float]:
    norm = float(np.abs(M).sum(axis=1).max()) if M.size else 0.0
    return 1e-13 * (1.0 + norm), 1e-11


def _radius_scc(M: np.ndarray) -> float:
    """Max of per-block Perron roots over the SCCs of the support graph.

    Safeguard for matrices on which the global iteration stagnates
    (defective dominant eigenvalue, tied blocks).  Each diagonal block is
    irreducible so the shifted iteration converges geometrically.
    """
    comps = strongly_connected_components(M > 0)
    best = 0.0
    for comp in comps:
        if len(comp) == 1:
            v = float(M[comp[0], comp[0]])
            best = max(best, v)
            continue
        B = np.ascontiguousarray(M[np.ix_(comp, comp)])
        tol_lam, tol_res = _tolerances(B)
        lam, _, _, ok, _ = pair_power(B, tol_lam, tol_res, 50 * len(comp) + 5000)
        if not ok:
            raise ConvergenceError(
                f"power iteration failed on an irreducible block of size {len(comp)}"
            )
        best = max(best, float(lam))
    return best


def spectral_radius(M) -> float:
    """Perron root of a nonnegative matrix.

    Shifted two-sided power iteration; if it stagnates, fall back to the
    maximum over the irreducible diagonal blocks.
    """
    M = _validate_matrix(M)
    tol_lam, tol_res = _tolerances(M)
    lam, _, _, ok, _ = pair_power(M, tol_lam, tol_res, 10 * M.shape[0] + 1000)
    if ok:
        return float(lam)
    return _radius_scc(M)


def perron_pair(M, max_iter: int | None = None) -> PerronPair:
    """Perron eigenpair of a nonnegative matrix.

    Convergence is guaranteed for irreducible inputs; otherwise the pair is
    returned with converged=False after max_iter.
    """
    M = _validate_matrix(M)
    tol_lam, tol_res = _tolerances(M)
    if max_iter is None:
        max_iter = 10 * M.shape[0] + 1000
    lam, u, w, ok, it = pair_power(M, tol_lam, tol_res, max_iter)
    return PerronPair(float(lam), u, w, bool(ok), int(it))


def effective_r(ker: Kernel, eta: Strategy) -> float:
    """Effective reproduction number R_e(eta) = rho(k * mu * eta)."""
    if eta.n != ker.n:
        raise ModelError("strategy does not match the kernel dimension")
    return spectral_radius(ker.operator_matrix(eta.eta))


def _effective_atoms(M: np.ndarray) -> tuple[list[list[int]], list[float]]:
    """Non-zero atoms (SCCs with positive restricted radius) of M's support."""
    comps = strongly_connected_components(M > 0)
    atoms, radii = [], []
    for comp in comps:
        if len(comp) == 1:
            r = float(M[comp[0], comp[0]])
            if r <= 0.0:
                continue
        else:
            r = _radius_scc(M[np.ix_(comp, comp)])
        atoms.append(comp)
        radii.append(r)
    return atoms, radii


def r_gradient(ker: Kernel, eta: Strategy) -> np.ndarray:
    """Gradient of R_e with respect to eta.

    Defined where the Perron root is simple, i.e. exactly one atom of the
    effective kernel attains the maximal radius; otherwise raises
    GradientUndefined and the caller must fall back to derivative-free steps.
    The derivative is w @ (dM/d eta_j) @ u / (w @ u) with (u, w) the Perron
    pair of the dominant block, which vanishes outside that block.
    """
    if eta.n != ker.n:
        raise ModelError("strategy does not match the kernel dimension")
    M = ker.operator_matrix(eta.eta)
    atoms, radii = _effective_atoms(M)
    if not atoms:
        return np.zeros(ker.n)
    order = np.argsort(radii)[::-1]
    top = float(radii[order[0]])
    if len(atoms) > 1:
        second = float(radii[order[1]])
        if top - second <= SIMPLE_ROOT_GAP * top:
            raise GradientUndefined(
                "two atoms share the maximal radius; the Perron root is not simple"
            )
    comp = atoms[order[0]]
    B = np.ascontiguousarray(M[np.ix_(comp, comp)])
    pp = perron_pair(B, max_iter=50 * len(comp) + 5000)
    if not pp.converged:
        raise ConvergenceError("Perron pair of the dominant atom did not converge")
    u = np.zeros(ker.n)
    w = np.zeros(ker.n)
    u[comp] = pp.right
    w[comp] = pp.left
    col_weighted = ker.k * ker.mu[np.newaxis, :]  # dM/d eta_j stacked by column
    return (w @ col_weighted) * u / (w @ u)
