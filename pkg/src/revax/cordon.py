"""Cordon-sanitaire diagnostics.

A strategy eta != 0 is *disconnecting* when the kernel restricted to its
support {eta > 0} is reducible: the still-circulating subpopulations split
into groups that do not all infect each other.  Such a strategy is never
anti-Pareto optimal: zeroing eta off the group with the largest effective
radius keeps the loss unchanged (the spectral radius of a block-triangular
operator is the maximum over its diagonal blocks) while vaccinating
strictly more, i.e. at strictly lower cost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .costs import CostModel
from .decomposition import decompose, restrict
from .errors import PreconditionError
from .kernels import Kernel, Strategy, effective_kernel
from .spectral import effective_r


@dataclass(frozen=True)
class CordonReport:
    disconnecting: bool
    components: tuple[tuple[int, ...], ...]
    improvement: Strategy | None


def _improvement(ker: Kernel, eta: Strategy, masses: np.ndarray) -> Strategy:
    """Keep eta on the effective atom of maximal radius, zero it elsewhere.

    `masses` weighs the traits for tie breaking: among atoms whose radii tie
    for the maximum, keep the one of least retained mass so the zeroed side
    is as large as possible.
    """
    eff = decompose(effective_kernel(ker, eta))
    if not eff.atoms or eff.max_radius <= 0.0:
        raise PreconditionError("effective reproduction number is zero")
    tol = 1e-12 * (1.0 + eff.max_radius)
    best_atom, best_key = None, None
    for atom, radius in zip(eff.atoms, eff.radii):
        if radius < eff.max_radius - tol:
            continue
        key = (float(np.sum(masses[list(atom)] * eta.eta[list(atom)])), atom)
        if best_key is None or key < best_key:
            best_atom, best_key = atom, key
    keep = np.zeros(ker.n)
    keep[list(best_atom)] = 1.0
    return Strategy(eta.eta * keep)


def is_disconnecting(ker: Kernel, eta: Strategy) -> CordonReport:
    """Detect whether eta is a cordon sanitaire.

    The report lists the strongly connected components of the kernel
    restricted to {eta > 0} (as original trait indices) and, when the
    strategy is disconnecting with positive loss, carries the equal-loss
    cheaper improvement.
    """
    if eta.n != ker.n:
        raise PreconditionError("strategy does not match the kernel dimension")
    support = np.flatnonzero(eta.eta > 0)
    if support.size == 0:
        return CordonReport(False, (), None)
    sub = restrict(ker, support)
    dec = decompose(sub)
    components = tuple(
        tuple(int(support[i]) for i in comp)
        for comp in _all_components(sub)
    )
    disconnecting = dec.classification != "irreducible"
    improvement = None
    if disconnecting and effective_r(ker, eta) > 0.0:
        improvement = _improvement(ker, eta, ker.pop.mu)
    return CordonReport(disconnecting, components, improvement)


def _all_components(ker: Kernel):
    from .decomposition import support_graph
    from .graphs import strongly_connected_components

    return strongly_connected_components(support_graph(ker, 0.0))


def improve_cordon(ker: Kernel, cm: CostModel, eta: Strategy) -> Strategy:
    """Strictly cheaper strategy with the same loss as a disconnecting eta.

    Ties between equal-radius atoms are broken toward zeroing the side of
    larger cost mass, then lexicographically.
    """
    if cm.pop.n != ker.n:
        raise PreconditionError("cost model does not match the kernel dimension")
    report = is_disconnecting(ker, eta)
    if not report.disconnecting:
        raise PreconditionError("strategy is not disconnecting")
    return _improvement(ker, eta, cm.trait_costs)
