"""Cost functionals on vaccination strategies.

C(eta) = sum_i (1 - eta[i]) * weights[i] * mu[i]: uniform cost has unit
weights, affine costs carry user weights.  Affine costs are extensive:
vaccinating disjoint targets is additive, which is what makes the per-atom
frontier reduction work.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomposition import AtomDecomposition
from .errors import ModelError, PreconditionError
from .kernels import Population, Strategy, _as_vector, _freeze

EXTENSIVITY_RTOL = 1e-12


@dataclass(frozen=True)
class CostModel:
    kind: str
    pop: Population
    weights: np.ndarray

    def __post_init__(self):
        if self.kind not in ("uniform", "affine"):
            raise ModelError(f"unknown cost kind {self.kind!r}")
        w = _as_vector(self.weights, "weights")
        if w.size != self.pop.n:
            raise ModelError("cost weights do not match the population")
        if np.any(w <= 0):
            raise ModelError("cost weights must be strictly positive")
        object.__setattr__(self, "weights", _freeze(w))

    @property
    def c_max(self) -> float:
        """Cost of vaccinating everyone, C(0); computed, never user-supplied."""
        return float(self.weights @ self.pop.mu)

    @property
    def trait_costs(self) -> np.ndarray:
        """Per-trait full-vaccination cost weights[i]*mu[i]."""
        return self.weights * self.pop.mu


def uniform_cost(pop: Population) -> CostModel:
    return CostModel("uniform", pop, np.ones(pop.n))


def affine_cost(pop: Population, weights) -> CostModel:
    return CostModel("affine", pop, np.asarray(weights, dtype=np.float64))


def evaluate(cm: CostModel, eta: Strategy) -> float:
    """Cost of a strategy: mass of the vaccinated population under the
    cost weights.  Decreasing in eta, 0 at eta = 1, c_max at eta = 0."""
    if eta.n != cm.pop.n:
        raise ModelError("strategy does not match the cost model dimension")
    return float((1.0 - eta.eta) @ cm.trait_costs)


def decompose_cost(
    cm: CostModel, eta: Strategy, atoms: AtomDecomposition
) -> tuple[list[float], float]:
    """Per-atom intrinsic costs plus the remainder cost.

    The parts always sum to evaluate(cm, eta); affine costs are extensive so
    this is the decomposition across disjoint vaccination targets.
    """
    if eta.n != cm.pop.n:
        raise ModelError("strategy does not match the cost model dimension")
    atom_sets = atoms.atoms if isinstance(atoms, AtomDecomposition) else tuple(atoms)
    tc = cm.trait_costs
    vac = 1.0 - eta.eta
    per_atom = [float(vac[list(atom)] @ tc[list(atom)]) for atom in atom_sets]
    in_atom = np.zeros(cm.pop.n, dtype=bool)
    for atom in atom_sets:
        in_atom[list(atom)] = True
    remainder = float(vac[~in_atom] @ tc[~in_atom])
    return per_atom, remainder


def is_extensive_pair(cm: CostModel, eta1: Strategy, eta2: Strategy) -> bool:
    """Check C(eta1 ^ eta2) = C(eta1) + C(eta2) for disjoint targets.

    Requires eta1 v eta2 = 1 (the two strategies vaccinate disjoint parts of
    the population); anything else is a precondition error.
    """
    if eta1.n != cm.pop.n or eta2.n != cm.pop.n:
        raise ModelError("strategy does not match the cost model dimension")
    if np.any(np.maximum(eta1.eta, eta2.eta) < 1.0):
        raise PreconditionError("vaccination targets are not disjoint (eta1 v eta2 != 1)")
    joint = Strategy(np.minimum(eta1.eta, eta2.eta))
    lhs = evaluate(cm, joint)
    rhs = evaluate(cm, eta1) + evaluate(cm, eta2)
    return abs(lhs - rhs) <= EXTENSIVITY_RTOL * (1.0 + cm.c_max)


def indicator_cost(cm: CostModel, traits) -> float:
    """Cost of the strategy equal to 1 on the given traits, 0 elsewhere."""
    return evaluate(cm, Strategy.indicator(cm.pop.n, traits))
