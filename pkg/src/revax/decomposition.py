"""Atomic decomposition of a kernel into invariant irreducible components.

The non-zero atoms are the strongly connected components of the support
graph whose restricted kernel has positive spectral radius; the effective
reproduction number of the whole kernel is the maximum over the atoms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModelError
from .graphs import condensation_topological_order, strongly_connected_components
from .kernels import Kernel, Population
from .spectral import spectral_radius

CLASSIFICATIONS = (
    "irreducible",
    "quasi-irreducible",
    "monatomic",
    "reducible-multiatomic",
    "zero",
)


@dataclass(frozen=True)
class AtomDecomposition:
    """Non-zero atoms in topological order (upstream infectors first)."""

    atoms: tuple[tuple[int, ...], ...]
    remainder: tuple[int, ...]
    radii: tuple[float, ...]
    classification: str

    @property
    def max_radius(self) -> float:
        return max(self.radii) if self.radii else 0.0

    @property
    def dominant(self) -> tuple[int, ...]:
        """Atoms attaining the maximal radius (indices into .atoms)."""
        top = self.max_radius
        return tuple(i for i, r in enumerate(self.radii) if r >= top)


def _check_trait_set(A, n: int) -> list[int]:
    idx = sorted(set(int(i) for i in A))
    if idx and (idx[0] < 0 or idx[-1] >= n):
        raise ModelError("trait index out of range")
    return idx


def is_invariant(ker: Kernel, A) -> bool:
    """True iff the sub-population A never infects its complement,
    i.e. k(A^c, A) = 0 (exact zero test)."""
    idx = _check_trait_set(A, ker.n)
    if not idx or len(idx) == ker.n:
        return True
    comp = np.setdiff1d(np.arange(ker.n), idx)
    block = ker.k[np.ix_(comp, idx)]
    mass = (ker.mu[comp] @ block) @ ker.mu[idx]
    return float(mass) == 0.0


def restrict(ker: Kernel, A) -> Kernel:
    """Kernel restricted to the sub-population A (weights and matrix)."""
    idx = _check_trait_set(A, ker.n)
    if not idx:
        raise ModelError("cannot restrict a kernel to an empty trait set")
    return Kernel(Population(ker.mu[idx]), ker.k[np.ix_(idx, idx)])


def support_graph(ker: Kernel, support_eps: float = 0.0) -> np.ndarray:
    """Boolean adjacency with edge j -> i iff k[i, j]*mu[j] > support_eps."""
    weighted = ker.k * ker.mu[np.newaxis, :]
    return (weighted > support_eps).T  # adj[j, i]: j infects i


def decompose(ker: Kernel, support_eps: float = 0.0) -> AtomDecomposition:
    """Atomic decomposition of the kernel.

    Atoms are the SCCs of the support digraph whose restricted kernel has a
    positive radius; singleton SCCs without a self-loop are zero atoms and go
    to the remainder.  support_eps > 0 treats near-zero entries as zero
    (useful for noisy data; default is the exact test).
    """
    adj = support_graph(ker, support_eps)
    comps = strongly_connected_components(adj)
    order = condensation_topological_order(adj, comps)
    atoms: list[tuple[int, ...]] = []
    radii: list[float] = []
    in_atom = np.zeros(ker.n, dtype=bool)
    for ci in order:
        comp = comps[ci]
        if len(comp) == 1:
            i = comp[0]
            if ker.k[i, i] * ker.mu[i] <= support_eps:
                continue
            r = float(ker.k[i, i] * ker.mu[i])
        else:
            sub = ker.operator_matrix()[np.ix_(comp, comp)]
            r = spectral_radius(sub)
        atoms.append(tuple(comp))
        radii.append(r)
        in_atom[comp] = True
    remainder = tuple(int(i) for i in np.flatnonzero(~in_atom))

    if not atoms:
        classification = "zero"
    elif len(atoms) > 1:
        classification = "reducible-multiatomic"
    elif len(atoms[0]) == ker.n:
        classification = "irreducible"
    else:
        outside = ~np.isin(np.arange(ker.n), atoms[0])
        k = ker.k.copy()
        k[np.ix_(~outside, ~outside)] = 0.0
        classification = "quasi-irreducible" if not np.any(k > 0) else "monatomic"
    return AtomDecomposition(tuple(atoms), remainder, tuple(radii), classification)
