"""Strongly connected components of the kernel support graph."""

from __future__ import annotations

import numpy as np


def strongly_connected_components(adj: np.ndarray) -> list[list[int]]:
    """SCCs of the digraph with boolean adjacency adj[u, v] (edge u -> v).

    Iterative Tarjan with an explicit stack; no recursion-depth limit.
    Components are returned in reverse topological order of the condensation
    (a component is listed before the components that point to it).
    """
    n = adj.shape[0]
    succ = [np.flatnonzero(adj[u]) for u in range(n)]
    index = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    on_stack = np.zeros(n, dtype=bool)
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work.pop()
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            for k in range(pi, len(succ[v])):
                u = int(succ[v][k])
                if index[u] == -1:
                    work.append((v, k + 1))
                    work.append((u, 0))
                    recurse = True
                    break
                if on_stack[u] and low[u] < low[v]:
                    low[v] = low[u]
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    u = stack.pop()
                    on_stack[u] = False
                    comp.append(u)
                    if u == v:
                        break
                comp.sort()
                comps.append(comp)
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
    return comps


def condensation_topological_order(adj: np.ndarray, comps: list[list[int]]) -> list[int]:
    """Indices into comps, sorted so that a component comes before every
    component it has an edge into (upstream first)."""
    n = adj.shape[0]
    comp_of = np.empty(n, dtype=np.int64)
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    m = len(comps)
    edges = [set() for _ in range(m)]
    for u, v in zip(*np.nonzero(adj)):
        cu, cv = int(comp_of[u]), int(comp_of[v])
        if cu != cv:
            edges[cu].add(cv)
    indeg = [0] * m
    for cu in range(m):
        for cv in edges[cu]:
            indeg[cv] += 1
    ready = sorted(ci for ci in range(m) if indeg[ci] == 0)
    order: list[int] = []
    while ready:
        ci = ready.pop(0)
        order.append(ci)
        for cv in sorted(edges[ci]):
            indeg[cv] -= 1
            if indeg[cv] == 0:
                ready.append(cv)
        ready.sort()
    return order
