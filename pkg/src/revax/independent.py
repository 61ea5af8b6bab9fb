"""Independent sets of a kernel with symmetric support and the exact
herd-immunity cost c_star = C(1_A*) via maximum-weight independent set search."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .costs import CostModel
from .errors import ModelError, PreconditionError
from .kernels import Kernel, Strategy


@dataclass(frozen=True)
class IndependentSetResult:
    set: tuple[int, ...]
    weight: float
    c_star: float

    def strategy(self, n: int) -> Strategy:
        return Strategy.indicator(n, self.set)


def is_independent(ker: Kernel, A) -> bool:
    """True iff k vanishes identically on A x A (exact test)."""
    idx = sorted(set(int(i) for i in A))
    if idx and (idx[0] < 0 or idx[-1] >= ker.n):
        raise ModelError("trait index out of range")
    if not idx:
        return True
    return not np.any(ker.k[np.ix_(idx, idx)] > 0)


def _greedy_order(adj_masks: list[int], weights: np.ndarray) -> list[int]:
    """Degeneracy-style ordering: repeatedly remove the vertex with the
    smallest weight-to-degree appeal; used for the initial greedy solution
    and the branching order."""
    n = len(adj_masks)
    alive = set(range(n))
    order = []
    while alive:
        best, best_key = None, None
        for v in alive:
            deg = bin(adj_masks[v] & _mask(alive)).count("1")
            key = (weights[v] / (deg + 1.0), -deg)
            if best_key is None or key > best_key:
                best, best_key = v, key
        order.append(best)
        alive.remove(best)
    return order


def _mask(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def _clique_cover_bound(cand: int, order: list[int], adj: list[int], w: np.ndarray) -> float:
    """Upper bound: partition candidates greedily into cliques; an
    independent set takes at most the heaviest vertex of each clique."""
    bound = 0.0
    remaining = cand
    for v in order:
        if not (remaining >> v) & 1:
            continue
        clique = 1 << v
        common = adj[v] & remaining
        best_w = w[v]
        u = common
        while u:
            x = (u & -u).bit_length() - 1
            clique |= 1 << x
            best_w = max(best_w, w[x])
            common &= adj[x]
            u = common
        bound += best_w
        remaining &= ~clique
    return bound


def max_weight_independent_set(ker: Kernel, cm: CostModel) -> IndependentSetResult:
    """Exact maximum-weight independent set of the support graph.

    Branch and bound with a greedy initial solution and a weighted
    clique-cover upper bound.  Requires the support of k to be symmetric
    (k[i][j] > 0 iff k[j][i] > 0); traits with a self-loop can never belong
    to an independent set.  c_star = c_max - weight is the cheapest cost at
    which the loss can be driven to zero.
    """
    if cm.pop.n != ker.n:
        raise ModelError("cost model does not match the kernel dimension")
    pos = ker.k > 0
    if not np.array_equal(pos, pos.T):
        raise PreconditionError("kernel support is not symmetric")
    n = ker.n
    w = cm.trait_costs
    eligible = [i for i in range(n) if not pos[i, i]]
    adj = [0] * n
    for i in eligible:
        for j in eligible:
            if i != j and pos[i, j]:
                adj[i] |= 1 << j

    order = _greedy_order([adj[v] for v in range(n)], w) if eligible else []
    order = [v for v in order if v in set(eligible)]

    # Greedy initial solution in branching order.
    best_mask, best_w = 0, -1.0
    cand = _mask(eligible)
    cur, cur_w = 0, 0.0
    for v in order:
        if (cand >> v) & 1:
            cur |= 1 << v
            cur_w += w[v]
            cand &= ~(adj[v] | (1 << v))
    best_mask, best_w = cur, cur_w

    stack = [(_mask(eligible), 0, 0.0)]
    while stack:
        cand, cur, cur_w = stack.pop()
        if cand == 0:
            if cur_w > best_w:
                best_mask, best_w = cur, cur_w
            continue
        if cur_w + _clique_cover_bound(cand, order, adj, w) <= best_w:
            continue
        v = next(u for u in order if (cand >> u) & 1)
        # Exclude branch first so the include branch is explored next.
        stack.append((cand & ~(1 << v), cur, cur_w))
        stack.append((cand & ~(adj[v] | (1 << v)), cur | (1 << v), cur_w + w[v]))
        if cur_w > best_w:
            best_mask, best_w = cur, cur_w

    members = tuple(i for i in range(n) if (best_mask >> i) & 1)
    weight = float(sum(w[i] for i in members))
    return IndependentSetResult(members, weight, float(cm.c_max - weight))
