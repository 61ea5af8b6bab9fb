"""Bi-objective cost/loss optimization.

The two value functions are

    optimal_loss(c)      = min { R_e(eta) : C(eta) <= c }
    optimal_cost(l)      = min { C(eta) : R_e(eta) <= l }
    anti_optimal_loss(c) = max { R_e(eta) : C(eta) >= c }
    anti_optimal_cost(l) = max { C(eta) : R_e(eta) >= l }

Because R_e is non-decreasing and C strictly decreasing in eta, the budget
constraint is always active at an optimum, which reduces each loss problem
to optimizing the spectral radius over a slice {trait_costs @ eta = s} of
the unit box.  The inner solver is projected gradient with Armijo
backtracking and multiple starts, followed by a pairwise-exchange polish;
the cost problems invert the loss problems by bisection.  Anti problems on
reducible kernels are solved atom by atom: a maximizer concentrates on a
single atom, and vaccinating outside it only raises the cost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._power import pair_power, project_slice
from .costs import CostModel, affine_cost, evaluate
from .decomposition import decompose, restrict
from .errors import ModelError, PreconditionError
from .kernels import Kernel, Population, Strategy

_LOSS_TOL = 1e-9
_BISECT_STEPS = 52


@dataclass(frozen=True)
class FrontierPoint:
    cost: float
    loss: float
    strategy: Strategy


@dataclass(frozen=True)
class Frontier:
    kind: str  # "pareto" | "anti-pareto"
    points: tuple[FrontierPoint, ...]
    c_star: float | None = None        # pareto: minimal cost with zero loss
    c_star_upper: float | None = None  # anti-pareto: maximal useless cost


@dataclass(frozen=True)
class OptimalRay:
    lambdas: np.ndarray
    points: tuple[FrontierPoint, ...]
    endpoint: FrontierPoint
    c_star: float


# ---------------------------------------------------------------------------
# Inner solver: value/gradient of the effective radius and projected gradient
# on a budget slice.


class _Objective:
    """Effective radius r(eta) = rho(k diag(mu * eta)) and its gradient.

    The inner solver pushes toward nilpotent effective matrices, where
    power iteration is at its slowest, so small problems go straight to
    the dense eigensolver; larger ones try the iterative pair first.
    """

    def __init__(self, ker: Kernel):
        self.ker = ker
        self.kp = ker.k * ker.pop.mu[None, :]
        self.scale = float(np.max(np.sum(self.kp, axis=1))) or 1.0
        self.dense = ker.n <= 24

    def value(self, eta: np.ndarray) -> float:
        M = self.kp * eta[None, :]
        if not self.dense:
            lam, _, _, conv, _ = pair_power(M, 1e-13 * (1.0 + self.scale), 1e-11, 800)
            if conv:
                return float(lam)
        return float(np.max(np.abs(np.linalg.eigvals(M))))

    @staticmethod
    def _real_vector(v: np.ndarray) -> np.ndarray:
        k = int(np.argmax(np.abs(v)))
        v = (v * np.exp(-1j * np.angle(v[k]))).real
        return -v if v.sum() < 0 else v

    def value_grad(self, eta: np.ndarray) -> tuple[float, np.ndarray]:
        M = self.kp * eta[None, :]
        if not self.dense:
            lam, u, w, conv, _ = pair_power(M, 1e-13 * (1.0 + self.scale), 1e-11, 800)
            if conv and lam > 1e-12 * self.scale:
                return float(lam), (w @ self.kp) * u
        vals, V = np.linalg.eig(M)
        lam = float(np.max(np.abs(vals)))
        if lam <= 1e-10 * self.scale:
            return lam, np.zeros_like(eta)
        # The dominant root of a nonnegative matrix is real; pick the
        # eigenvalue nearest it so periodic spectra do not mislead us.
        i = int(np.argmin(np.abs(vals - lam)))
        wvals, W = np.linalg.eig(M.T)
        j = int(np.argmin(np.abs(wvals - vals[i])))
        u = self._real_vector(V[:, i])
        w = self._real_vector(W[:, j])
        wu = float(w @ u)
        if abs(vals[i].imag) <= 1e-8 * (1.0 + lam) and abs(wu) > 1e-10:
            grad = np.maximum((w @ self.kp) * u / wu, 0.0)
            return lam, grad
        # Defective dominant root: central differences as a direction.
        g = np.zeros_like(eta)
        h = 1e-7
        for idx in range(eta.size):
            for sgn in (1.0, -1.0):
                e = eta.copy()
                e[idx] += sgn * h
                Mj = self.kp * e[None, :]
                g[idx] += sgn * np.max(np.abs(np.linalg.eigvals(Mj)))
        return lam, g / (2.0 * h)


def _pgd(obj: _Objective, a: np.ndarray, s: float, eta0: np.ndarray,
         sign: float, max_iter: int = 200) -> tuple[float, np.ndarray]:
    """Minimize sign * r(eta) over {a @ eta = s, 0 <= eta <= 1}."""
    eta = project_slice(eta0, a, s)
    f, g = obj.value_grad(eta)
    f *= sign
    g = g * sign
    t = 1.0 / (1.0 + obj.scale)
    stall = 0
    for _ in range(max_iter):
        moved = False
        for _bt in range(30):
            cand = project_slice(eta - t * g, a, s)
            step = cand - eta
            sq = step @ step
            if sq < 1e-26:
                break
            fc = sign * obj.value(cand)
            if fc <= f - 1e-4 * sq / t:
                eta, gain = cand, f - fc
                f = fc
                _, g = obj.value_grad(eta)
                g = g * sign
                t = min(t * 1.6, 1e6)
                moved = True
                break
            t *= 0.5
        if not moved:
            break
        stall = stall + 1 if gain <= 1e-13 * (1.0 + abs(f)) else 0
        if stall >= 3:
            break
    return sign * f, eta


def _polish(obj: _Objective, a: np.ndarray, eta: np.ndarray, sign: float,
            sweeps: int = 4) -> tuple[float, np.ndarray]:
    """Pairwise mass exchanges along the slice; catches vertex optima the
    projected gradient slides past.

    Besides strict improvements, value-neutral exchanges that snap a
    coordinate to a bound are kept: on reducible kernels the loss is a max
    over atoms, and rebalancing one atom leaves the max unchanged until the
    other atom is rebalanced too, so tie moves are needed to escape.
    """
    eta = eta.copy()
    f = sign * obj.value(eta)
    n = eta.size
    for _ in range(sweeps):
        improved = False
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                # move mass t from j to i: eta_i += t/a_i, eta_j -= t/a_j
                tmax = min((1.0 - eta[i]) * a[i], eta[j] * a[j])
                if tmax <= 1e-15:
                    continue
                for t in (tmax, 0.5 * tmax, 0.1 * tmax):
                    cand = eta.copy()
                    cand[i] = min(1.0, cand[i] + t / a[i])
                    cand[j] = max(0.0, cand[j] - t / a[j])
                    fc = sign * obj.value(cand)
                    tol = 1e-13 * (1.0 + abs(f))
                    if fc < f - tol:
                        eta, f = cand, fc
                        improved = True
                        break
                    snaps = ((cand[j] == 0.0 and eta[j] > 0.0)
                             or (cand[i] == 1.0 and eta[i] < 1.0))
                    if t == tmax and snaps and fc <= f:
                        eta = cand
                        break
        if not improved:
            break
    return sign * f, eta


def _greedy_independent(ker: Kernel, order) -> np.ndarray:
    """0/1 vector of a maximal independent set built in the given order."""
    n = ker.n
    linked = (ker.k > 0) | (ker.k.T > 0)
    chosen = np.zeros(n, dtype=bool)
    for v in order:
        if linked[v, v]:
            continue
        if not np.any(linked[v] & chosen):
            chosen[v] = True
    return chosen.astype(float)


class _SliceProgram:
    """Session solver for one (kernel, cost) pair with warm-start caching.

    Solves min/max of R_e over budget slices and inverts the resulting
    value functions by bisection, reusing earlier optima as starting
    points.  Deterministic for a fixed seed.
    """

    def __init__(self, ker: Kernel, cm: CostModel, maximize: bool,
                 seed: int = 0, starts: int = 16):
        if cm.pop.n != ker.n:
            raise ModelError("cost model does not match the kernel dimension")
        self.ker, self.cm = ker, cm
        self.obj = _Objective(ker)
        self.a = cm.trait_costs
        self.c_max = cm.c_max
        self.sign = -1.0 if maximize else 1.0
        self.starts = starts
        self.rng = np.random.default_rng(seed)
        self._cache: list[tuple[float, float, np.ndarray]] = []  # (s, value, eta)

    def _start_points(self, s: float, quick: bool, warm=()) -> list[np.ndarray]:
        n = self.ker.n
        pts = [np.asarray(w, dtype=float) for w in warm]
        pts.append(np.full(n, s / self.a.sum()))
        for _, _, eta in self._nearest(s, 2):
            pts.append(eta)
        n_is = 1 if quick else 4
        if self.sign > 0:  # independent-set starts only help the minimizer
            for _ in range(n_is):
                order = self.rng.permutation(n)
                pts.append(_greedy_independent(self.ker, order))
        extra = self.starts - len(pts)
        n_bin = 0 if quick else max(0, extra // 2)
        n_unif = 1 if quick else max(0, extra - n_bin)
        for _ in range(n_bin):
            pts.append(self.rng.integers(0, 2, n).astype(float))
        for _ in range(n_unif):
            pts.append(self.rng.random(n))
        return pts

    def _nearest(self, s: float, count: int):
        by_gap = sorted(self._cache, key=lambda e: abs(e[0] - s))
        return by_gap[:count]

    def solve_slice(self, s: float, quick: bool = False,
                    warm=()) -> tuple[float, np.ndarray]:
        """Optimize R_e over {a @ eta = s}; returns (value, eta)."""
        s = float(np.clip(s, 0.0, self.a.sum()))
        runs = [
            _pgd(self.obj, self.a, s, x0, self.sign,
                 max_iter=60 if quick else 200)
            for x0 in self._start_points(s, quick, warm)
        ]
        top = min(self.sign * f for f, _ in runs)
        best_f, best_eta = min(
            ((f, eta) for f, eta in runs if self.sign * f <= top + _LOSS_TOL),
            key=lambda fe: tuple(fe[1]),
        )
        f, eta = _polish(self.obj, self.a, best_eta, self.sign,
                         sweeps=1 if quick else 4)
        if self.sign * (f - best_f) < -1e-15:
            best_f, best_eta = f, eta
        self._cache.append((s, best_f, best_eta))
        if len(self._cache) > 400:
            del self._cache[: len(self._cache) - 400]
        return best_f, best_eta

    def loss_at_cost(self, c: float, quick: bool = False,
                     warm=()) -> tuple[float, Strategy]:
        if c < -1e-12 or c > self.c_max + 1e-12:
            raise ModelError("budget outside [0, c_max]")
        f, eta = self.solve_slice(self.c_max - c, quick, warm)
        return f, Strategy(eta)

    def cost_at_loss(self, level: float, r0: float) -> tuple[float, Strategy]:
        """Invert the value function: extremal cost with loss at the level.

        Minimizer: least budget c with loss(c) <= level.  Maximizer: largest
        anchor c with loss(c) >= level.  Both use monotonicity of the value
        function in c, seeded from cached slice solves.
        """
        if level < -1e-12 or level > r0 + 1e-9:
            raise ModelError("loss target outside [0, R_0]")
        level = float(np.clip(level, 0.0, r0))
        tol = _LOSS_TOL * (1.0 + r0)
        # The value function is non-increasing in c; the feasible budgets
        # form an interval touching c_max (minimizer) or 0 (maximizer).
        if self.sign > 0:
            good = lambda v: v <= level + tol
            good_end = self.c_max
        else:
            good = lambda v: v >= level - tol
            good_end = 0.0
        lo, hi = 0.0, self.c_max  # invariant: the boundary lies in [lo, hi]
        ans_c, ans_eta = good_end, None
        for s, v, eta in self._cache:
            c = self.c_max - s
            if good(v):
                if self.sign > 0:
                    if c <= hi:
                        hi, ans_c, ans_eta = c, c, Strategy(eta)
                else:
                    if c >= lo:
                        lo, ans_c, ans_eta = c, c, Strategy(eta)
            else:
                if self.sign > 0:
                    lo = max(lo, c)
                else:
                    hi = min(hi, c)
        if self.sign > 0:
            lo = min(lo, hi)
        else:
            hi = max(hi, lo)
        if ans_eta is None:
            v, ans_eta = self.loss_at_cost(good_end)
            ans_c = good_end
            if not good(v):
                raise ModelError("loss target unreachable")
        # Does the good region cover the whole budget range?
        far_end = self.c_max - good_end
        v_far, bad_eta = self.loss_at_cost(far_end, quick=True)
        if good(v_far):
            return far_end, self.loss_at_cost(far_end)[1]
        gap = 1e-5 * (1.0 + r0)
        for _round in range(3):
            for _ in range(_BISECT_STEPS):
                if hi - lo <= 1e-9 * (1.0 + self.c_max):
                    break
                mid = 0.5 * (lo + hi)
                v, eta = self.loss_at_cost(mid, quick=True,
                                           warm=(ans_eta.eta, bad_eta.eta))
                if good(v):
                    ans_c, ans_eta = mid, eta
                    if self.sign > 0:
                        hi = mid
                    else:
                        lo = mid
                else:
                    bad_eta = eta
                    if self.sign > 0:
                        lo = mid
                    else:
                        hi = mid
            v, eta = self.loss_at_cost(ans_c, warm=(ans_eta.eta,))
            if good(v):
                ans_eta = eta
            # A strict inequality at the answer means the quick solves
            # misjudged the in-between budgets (local optima); redo the
            # bisection on the remaining range seeded with the better
            # strategy just found.
            if self.sign > 0:
                overshoot = v < level - gap and ans_c > 1e-12
                lo, hi = 0.0, ans_c
            else:
                overshoot = v > level + gap and ans_c < self.c_max - 1e-12
                lo, hi = ans_c, self.c_max
            if not overshoot:
                break
        return ans_c, ans_eta


# ---------------------------------------------------------------------------
# Public value functions.


class ParetoSolver:
    """Reusable solver session for one (kernel, cost model) pair.

    Caches slice solves so frontier sweeps and repeated inversions share
    work.  All results are deterministic for a fixed seed.
    """

    def __init__(self, ker: Kernel, cm: CostModel, seed: int = 0, starts: int = 16):
        self.ker, self.cm = ker, cm
        self._min = _SliceProgram(ker, cm, maximize=False, seed=seed, starts=starts)
        self._max = _SliceProgram(ker, cm, maximize=True, seed=seed + 1, starts=starts)
        self._seed = seed
        self._r0 = None
        self._atom_programs = None

    @property
    def r0(self) -> float:
        if self._r0 is None:
            self._r0 = self._min.obj.value(np.ones(self.ker.n))
        return self._r0

    def optimal_loss(self, c: float) -> tuple[float, Strategy]:
        return self._min.loss_at_cost(c)

    def optimal_cost(self, level: float) -> tuple[float, Strategy]:
        if self.r0 == 0.0:
            return 0.0, Strategy.ones(self.ker.n)
        return self._min.cost_at_loss(level, self.r0)

    def anti_optimal_loss(self, c: float, via_atoms: bool = True) -> tuple[float, Strategy]:
        if not via_atoms:
            return self._max.loss_at_cost(c)
        return self._anti_loss_atoms(c)

    def anti_optimal_cost(self, level: float, via_atoms: bool = True) -> tuple[float, Strategy]:
        if not via_atoms:
            if self.r0 == 0.0:
                return self.cm.c_max, Strategy.zeros(self.ker.n)
            return self._max.cost_at_loss(level, self.r0)
        return self._anti_cost_atoms(level)

    # -- anti problems atom by atom -------------------------------------
    # A maximizer of R_e concentrates on a single atom: replacing eta by
    # eta * 1_atom keeps the dominant block intact (same loss) while
    # vaccinating everything else (higher cost stays feasible).

    def _atoms(self):
        if self._atom_programs is None:
            dec = decompose(self.ker)
            progs = []
            for i, (atom, radius) in enumerate(zip(dec.atoms, dec.radii)):
                idx = np.array(atom)
                sub = restrict(self.ker, idx)
                sub_cm = _atom_cost_model(self.cm, idx)
                progs.append((idx, radius,
                              _SliceProgram(sub, sub_cm, maximize=True,
                                            seed=self._seed + 2 + i)))
            self._atom_programs = progs
        return self._atom_programs

    def _anti_loss_atoms(self, c: float) -> tuple[float, Strategy]:
        if c < -1e-12 or c > self.cm.c_max + 1e-12:
            raise ModelError("budget outside [0, c_max]")
        n = self.ker.n
        progs = self._atoms()
        if not progs:
            return 0.0, Strategy.zeros(n)
        s = self.cm.c_max - float(np.clip(c, 0.0, self.cm.c_max))
        if s >= self.cm.c_max - 1e-15 * (1.0 + self.cm.c_max):
            return self.r0, Strategy.ones(n)  # zero budget constrains nothing
        best_key, best = None, None
        for idx, _radius, prog in progs:
            v, eta_local = prog.solve_slice(min(s, prog.c_max))
            cand = _embed(n, idx, eta_local, 0.0)
            key = (v, tuple(-cand.eta))
            if best_key is None or key > best_key:
                best_key, best = key, (v, cand)
        return best

    def _anti_cost_atoms(self, level: float) -> tuple[float, Strategy]:
        n = self.ker.n
        progs = self._atoms()
        r0 = max((radius for _, radius, _ in progs), default=0.0)
        if level < -1e-12 or level > r0 + 1e-9:
            raise ModelError("loss target outside [0, R_0]")
        level = float(np.clip(level, 0.0, r0))
        if level == 0.0 or not progs:
            return self.cm.c_max, Strategy.zeros(n)
        best_key, best = None, None
        for idx, radius, prog in progs:
            if radius < level - _LOSS_TOL * (1.0 + r0):
                continue
            c_local, eta_local = prog.cost_at_loss(level, radius)
            outside = self.cm.c_max - prog.c_max  # vaccinate off the atom
            cand = _embed(n, idx, eta_local.eta, 0.0)
            key = (c_local + outside, tuple(-cand.eta))
            if best_key is None or key > best_key:
                best_key, best = key, (c_local + outside, cand)
        return best


def optimal_loss(ker: Kernel, cm: CostModel, c: float, seed: int = 0) -> tuple[float, Strategy]:
    """Least achievable loss R_e under the budget C(eta) <= c."""
    return ParetoSolver(ker, cm, seed=seed).optimal_loss(c)


def optimal_cost(ker: Kernel, cm: CostModel, level: float, seed: int = 0) -> tuple[float, Strategy]:
    """Least cost achieving loss R_e(eta) <= level."""
    return ParetoSolver(ker, cm, seed=seed).optimal_cost(level)


def anti_optimal_loss(ker: Kernel, cm: CostModel, c: float, seed: int = 0,
                      via_atoms: bool = True) -> tuple[float, Strategy]:
    """Worst loss R_e among strategies already spending C(eta) >= c."""
    return ParetoSolver(ker, cm, seed=seed).anti_optimal_loss(c, via_atoms)


def anti_optimal_cost(ker: Kernel, cm: CostModel, level: float, seed: int = 0,
                      via_atoms: bool = True) -> tuple[float, Strategy]:
    """Largest cost whose loss still reaches the level (c^* at level = R_0)."""
    return ParetoSolver(ker, cm, seed=seed).anti_optimal_cost(level, via_atoms)


def _atom_cost_model(cm: CostModel, idx: np.ndarray) -> CostModel:
    pop = Population(cm.pop.mu[idx])
    return affine_cost(pop, cm.weights[idx])


def _embed(n: int, idx: np.ndarray, eta_local: np.ndarray, fill: float) -> Strategy:
    eta = np.full(n, fill)
    eta[idx] = eta_local
    return Strategy(eta)


# ---------------------------------------------------------------------------
# Frontiers.


def _symmetric_support(ker: Kernel) -> bool:
    pos = ker.k > 0
    return bool(np.array_equal(pos, pos.T))


def _exact_c_star(ker: Kernel, cm: CostModel) -> float | None:
    if not _symmetric_support(ker):
        return None
    from .independent import max_weight_independent_set

    return max_weight_independent_set(ker, cm).c_star


def pareto_frontier(ker: Kernel, cm: CostModel, grid=None, seed: int = 0) -> Frontier:
    """Pareto frontier sampled at the given loss levels (default 101 levels
    spanning [0, R_0]); c_star is exact when the support is symmetric."""
    solver = ParetoSolver(ker, cm, seed=seed)
    r0 = solver.r0
    if r0 == 0.0:
        pt = FrontierPoint(0.0, 0.0, Strategy.ones(ker.n))
        return Frontier("pareto", (pt,), c_star=0.0)
    if grid is None:
        grid = np.linspace(0.0, r0, 101)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ModelError("empty loss grid")
    if np.any(grid < -1e-12) or np.any(grid > r0 + 1e-9):
        raise ModelError("grid outside [0, R_0]")
    points = []
    for level in sorted(grid, reverse=True):
        c, eta = solver.optimal_cost(level)
        points.append(FrontierPoint(c, solver._min.obj.value(eta.eta), eta))
    c_star = _exact_c_star(ker, cm)
    if c_star is None:
        c_star = solver.optimal_cost(0.0)[0]
    points.sort(key=lambda p: p.cost)
    return Frontier("pareto", tuple(points), c_star=float(c_star))


def anti_pareto_frontier(ker: Kernel, cm: CostModel, grid=None, seed: int = 0,
                         via_atoms: bool = True) -> Frontier:
    """Anti-Pareto frontier at the given loss levels; may be disconnected
    for multi-atom kernels, so points are reported without interpolation."""
    solver = ParetoSolver(ker, cm, seed=seed)
    r0 = solver.r0
    if r0 == 0.0:
        pt = FrontierPoint(cm.c_max, 0.0, Strategy.zeros(ker.n))
        return Frontier("anti-pareto", (pt,), c_star_upper=cm.c_max)
    if grid is None:
        grid = np.linspace(0.0, r0, 101)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ModelError("empty loss grid")
    points = []
    for level in sorted(grid, reverse=True):
        c, eta = solver.anti_optimal_cost(level, via_atoms)
        points.append(FrontierPoint(c, solver._min.obj.value(eta.eta), eta))
    c_upper = solver.anti_optimal_cost(r0, via_atoms)[0]
    points.sort(key=lambda p: p.cost)
    return Frontier("anti-pareto", tuple(points), c_star_upper=float(c_upper))


def detect_optimal_ray(ker: Kernel, cm: CostModel, eta_star: Strategy,
                       assume_convex: bool = False, samples: int = 51) -> OptimalRay:
    """Frontier segment {(C(lam * eta_star), R_e(lam * eta_star))}.

    Valid when R_e is convex (asserted by the caller) and eta_star is a
    Pareto optimum strictly below 1: every scaled strategy lam * eta_star
    inside the box is then Pareto optimal, and the herd-immunity cost is
    the full c_max.
    """
    if not assume_convex:
        raise PreconditionError("optimal-ray detection requires the caller "
                                "to assert convexity of the loss")
    top = float(np.max(eta_star.eta))
    if top >= 1.0 - 1e-9:
        raise PreconditionError("eta_star must be strictly below 1")
    obj = _Objective(ker)
    endpoint = FrontierPoint(cm.c_max, 0.0, Strategy.zeros(ker.n))
    if top == 0.0:
        return OptimalRay(np.zeros(1), (endpoint,), endpoint, cm.c_max)
    lambdas = np.linspace(0.0, 1.0 / top, samples)
    base = obj.value(eta_star.eta)
    points = []
    for lam in lambdas:
        eta = Strategy(np.clip(lam * eta_star.eta, 0.0, 1.0))
        points.append(FrontierPoint(evaluate(cm, eta), lam * base, eta))
    return OptimalRay(lambdas, tuple(points), endpoint, cm.c_max)


# ---------------------------------------------------------------------------
# Reduction to atoms.


@dataclass(frozen=True)
class AtomFrontiers:
    atom: tuple[int, ...]
    pareto: Frontier
    anti: Frontier
    radius: float


def atom_frontier_inputs(ker: Kernel, cm: CostModel, grid, seed: int = 0):
    """Per-atom intrinsic frontiers evaluated so that every level min(l,
    R_0_i) needed by combine_atom_frontiers is present exactly."""
    dec = decompose(ker)
    grid = np.asarray(grid, dtype=float)
    out = []
    for atom, radius in zip(dec.atoms, dec.radii):
        idx = np.array(atom)
        sub, sub_cm = restrict(ker, idx), _atom_cost_model(cm, idx)
        local = np.unique(np.clip(grid, 0.0, radius))
        out.append(AtomFrontiers(
            atom,
            pareto_frontier(sub, sub_cm, local, seed=seed),
            anti_pareto_frontier(sub, sub_cm, local, seed=seed),
            radius,
        ))
    return out, dec.remainder


def _lookup(frontier: Frontier, level: float) -> FrontierPoint:
    """Point of the frontier at the given loss level (nearest grid entry)."""
    return min(frontier.points, key=lambda p: abs(p.loss - level))


def combine_atom_frontiers(per_atom, cm: CostModel, remainder,
                           grid=None) -> tuple[Frontier, Frontier]:
    """Recombine intrinsic per-atom frontiers into global ones.

    Pareto: costs add across atoms at levels min(l, R_0_i), with eta = 1
    off the atoms (vaccinating there is pure waste).  Anti-Pareto: the
    worst strategy lives on a single atom of radius >= l, vaccinating
    everything else, so costs combine by a maximum and the frontier can
    jump where an atom drops out.
    """
    n = cm.pop.n
    if not per_atom:
        pareto = Frontier("pareto", (FrontierPoint(0.0, 0.0, Strategy.ones(n)),), c_star=0.0)
        anti = Frontier("anti-pareto", (FrontierPoint(cm.c_max, 0.0, Strategy.zeros(n)),),
                        c_star_upper=cm.c_max)
        return pareto, anti
    radii = [af.radius for af in per_atom]
    r0 = max(radii)
    if grid is None:
        grid = np.unique(np.concatenate([
            np.asarray([p.loss for p in af.pareto.points]) for af in per_atom
        ] + [np.asarray([0.0, r0])]))
        grid = grid[grid <= r0 + 1e-12]
    grid = np.asarray(grid, dtype=float)

    pareto_pts, anti_pts = [], []
    for level in sorted(grid, reverse=True):
        # Pareto: sum of intrinsic costs, eta assembled per atom.
        eta = np.ones(n)
        cost = 0.0
        loss = 0.0
        for af in per_atom:
            pt = _lookup(af.pareto, min(level, af.radius))
            cost += pt.cost
            loss = max(loss, pt.loss)
            eta[list(af.atom)] = pt.strategy.eta
        pareto_pts.append(FrontierPoint(cost, loss, Strategy(eta)))
        # Anti: best single atom still reaching the level.
        best = None
        for af in per_atom:
            if af.radius < level - _LOSS_TOL * (1.0 + r0):
                continue
            pt = _lookup(af.anti, level)
            outside = cm.c_max - float(np.sum(cm.trait_costs[list(af.atom)]))
            cand_cost = pt.cost + outside
            cand_eta = np.zeros(n)
            cand_eta[list(af.atom)] = pt.strategy.eta
            key = (cand_cost, tuple(-cand_eta))
            if best is None or key > best[0]:
                best = (key, FrontierPoint(cand_cost, pt.loss, Strategy(cand_eta)))
        if best is not None:
            anti_pts.append(best[1])

    c_star = float(sum(af.pareto.c_star for af in per_atom))
    tol = _LOSS_TOL * (1.0 + r0)
    c_upper = max(
        (cm.c_max - float(np.sum(cm.trait_costs[list(af.atom)]))) +
        _lookup(af.anti, af.radius).cost
        for af in per_atom if af.radius >= r0 - tol
    )
    pareto_pts.sort(key=lambda p: p.cost)
    anti_pts.sort(key=lambda p: p.cost)
    return (Frontier("pareto", tuple(pareto_pts), c_star=c_star),
            Frontier("anti-pareto", tuple(anti_pts), c_star_upper=float(c_upper)))
