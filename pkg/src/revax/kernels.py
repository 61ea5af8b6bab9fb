"""Populations, kernels and vaccination strategies on a finite trait space.

A population is a finite set of traits with positive measure weights mu.
A kernel k[i, j] gives the per-capita infection strength from trait j toward
trait i.  The matrix handed to spectral routines is the quadrature-weighted
effective matrix M[i, j] = k[i, j] * mu[j] * eta[j], so that the
metapopulation model reduces exactly to K @ diag(eta).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModelError


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def _as_vector(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise ModelError(f"{name} must be a non-empty 1-d array")
    if not np.all(np.isfinite(v)):
        raise ModelError(f"{name} has non-finite entries")
    return v


def _as_matrix(x, name: str) -> np.ndarray:
    m = np.asarray(x, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ModelError(f"{name} must be a non-empty square matrix")
    if not np.all(np.isfinite(m)):
        raise ModelError(f"{name} has non-finite entries")
    return m


@dataclass(frozen=True)
class Population:
    """Finite trait space: n traits with positive measure weights mu."""

    mu: np.ndarray

    def __post_init__(self):
        mu = _as_vector(self.mu, "mu")
        if np.any(mu <= 0):
            raise ModelError("measure weights mu must be strictly positive")
        object.__setattr__(self, "mu", _freeze(mu))

    @property
    def n(self) -> int:
        return self.mu.size

    @property
    def total_mass(self) -> float:
        return float(self.mu.sum())


@dataclass(frozen=True)
class Kernel:
    """Nonnegative kernel matrix on a population."""

    pop: Population
    k: np.ndarray

    def __post_init__(self):
        k = _as_matrix(self.k, "k")
        if k.shape[0] != self.pop.n:
            raise ModelError("kernel dimensions do not match the population")
        if np.any(k < 0):
            raise ModelError("kernel entries must be nonnegative")
        object.__setattr__(self, "k", _freeze(k))

    @property
    def n(self) -> int:
        return self.pop.n

    @property
    def mu(self) -> np.ndarray:
        return self.pop.mu

    def operator_matrix(self, eta=None) -> np.ndarray:
        """Quadrature-weighted effective matrix M[i, j] = k[i, j]*mu[j]*eta[j]."""
        if eta is None:
            w = self.mu
        else:
            if isinstance(eta, Strategy):
                eta = eta.eta
            w = self.mu * np.asarray(eta, dtype=np.float64)
        return self.k * w[np.newaxis, :]


@dataclass(frozen=True)
class Strategy:
    """Density of non-vaccinated individuals per trait, in [0, 1]."""

    eta: np.ndarray

    def __post_init__(self):
        eta = _as_vector(self.eta, "eta")
        if np.any(eta < 0) or np.any(eta > 1):
            raise ModelError("strategy entries must lie in [0, 1]")
        object.__setattr__(self, "eta", _freeze(eta))

    @property
    def n(self) -> int:
        return self.eta.size

    @classmethod
    def ones(cls, n: int) -> "Strategy":
        return cls(np.ones(n))

    @classmethod
    def zeros(cls, n: int) -> "Strategy":
        return cls(np.zeros(n))

    @classmethod
    def constant(cls, n: int, level: float) -> "Strategy":
        return cls(np.full(n, float(level)))

    @classmethod
    def indicator(cls, n: int, traits) -> "Strategy":
        """Strategy equal to 1 on the given traits and 0 elsewhere."""
        eta = np.zeros(n)
        eta[list(traits)] = 1.0
        return cls(eta)


def from_metapopulation(K, mu) -> Kernel:
    """Kernel of a metapopulation model: k[i, j] = K[i, j] / mu[j].

    The operator matrix of the result equals K @ diag(eta), so spectral radii
    agree with the matrix model.
    """
    K = _as_matrix(K, "K")
    mu = _as_vector(mu, "mu")
    if mu.size != K.shape[0]:
        raise ModelError("K and mu dimensions do not agree")
    if np.any(K < 0):
        raise ModelError("next-generation matrix must be nonnegative")
    if np.any(mu <= 0):
        raise ModelError("measure weights mu must be strictly positive")
    return Kernel(Population(mu), K / mu[np.newaxis, :])


def from_rates(transmission, gamma, mu=None) -> Kernel:
    """Kernel of an SIS/SEIR model: k[i, j] = transmission[i, j] / gamma[j].

    mu defaults to the uniform probability measure.
    """
    t = _as_matrix(transmission, "transmission")
    gamma = _as_vector(gamma, "gamma")
    if gamma.size != t.shape[0]:
        raise ModelError("transmission and gamma dimensions do not agree")
    if np.any(t < 0):
        raise ModelError("transmission matrix must be nonnegative")
    if np.any(gamma <= 0):
        raise ModelError("recovery rates gamma must be strictly positive")
    if mu is None:
        mu = np.full(t.shape[0], 1.0 / t.shape[0])
    return Kernel(Population(_as_vector(mu, "mu")), t / gamma[np.newaxis, :])


def scale(f, ker: Kernel, g) -> Kernel:
    """Entrywise scaled kernel (f k g)[i, j] = f[i] * k[i, j] * g[j].

    With f = 1 this builds the effective kernel k*eta.
    """
    f = _as_vector(f, "f")
    g = _as_vector(g, "g")
    if f.size != ker.n or g.size != ker.n:
        raise ModelError("scaling vectors do not match the kernel dimension")
    if np.any(f < 0) or np.any(g < 0):
        raise ModelError("scaling vectors must be nonnegative")
    return Kernel(ker.pop, f[:, np.newaxis] * ker.k * g[np.newaxis, :])


def effective_kernel(ker: Kernel, eta: Strategy) -> Kernel:
    """The effective kernel k*eta of a vaccination strategy."""
    if eta.n != ker.n:
        raise ModelError("strategy does not match the kernel dimension")
    return scale(np.ones(ker.n), ker, eta.eta)


def double_norm(ker: Kernel, p: float) -> float:
    """Discretized mixed L^p(L^q) norm of the kernel, 1/p + 1/q = 1.

    Bounds the L^p operator norm (and hence the spectral radius) of the
    integral operator.
    """
    p = float(p)
    if not p > 1 or not np.isfinite(p):
        raise ModelError("double norm requires p in (1, inf)")
    q = p / (p - 1.0)
    mu = ker.mu
    inner = (ker.k**q) @ mu
    return float((mu @ inner ** (p / q)) ** (1.0 / p))


def cycle_kernel(n: int) -> Kernel:
    """Metapopulation kernel of the non-oriented cycle graph on n nodes,
    equipped with the uniform probability measure."""
    if n < 3:
        raise ModelError("a cycle needs at least 3 nodes")
    A = np.zeros((n, n))
    idx = np.arange(n)
    A[idx, (idx + 1) % n] = 1.0
    A[idx, (idx - 1) % n] = 1.0
    return from_metapopulation(A, np.full(n, 1.0 / n))
