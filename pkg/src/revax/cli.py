"""Command-line interface.

One command per process; all numeric output uses 17 significant digits and
files are written atomically.  Exit codes: 0 success, 2 bad input or
schema, 3 numeric non-convergence, 4 precondition violation.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import serialize
from .cordon import improve_cordon, is_disconnecting
from .costs import evaluate
from .decomposition import decompose
from .dynamics import simulate_sis, threshold_check
from .errors import ConvergenceError, ModelError, PreconditionError, SchemaError
from .frontier import Frontier, anti_pareto_frontier, pareto_frontier
from .independent import max_weight_independent_set
from .kernels import Strategy
from .spectral import effective_r

EXIT_INPUT, EXIT_NUMERIC, EXIT_PRECONDITION = 2, 3, 4


def _emit(text: str, out: str | None) -> None:
    if out:
        serialize.write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _load_model(args):
    ker = serialize.load_kernel(args.model)
    return ker


def _load_eta(args, n: int) -> Strategy:
    if args.strategy is not None and args.eta_const is not None:
        raise SchemaError("give either --strategy or --eta-const, not both")
    if args.strategy is not None:
        return serialize.load_strategy(args.strategy, n)
    if args.eta_const is not None:
        lam = float(args.eta_const)
        if not 0.0 <= lam <= 1.0:
            raise SchemaError("--eta-const must lie in [0, 1]")
        return Strategy.constant(n, lam)
    return Strategy.ones(n)


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("RE_FRONTIER_THREADS", "")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise SchemaError(f"RE_FRONTIER_THREADS must be an integer, got {env!r}")
    return 1


def cmd_re(args) -> int:
    ker = _load_model(args)
    eta = _load_eta(args, ker.n)
    print(serialize.fmt17(effective_r(ker, eta)))
    return 0


def _split_frontier(kind: str, ker, cm, grid: np.ndarray, seed: int,
                    threads: int) -> Frontier:
    builder = pareto_frontier if kind == "pareto" else anti_pareto_frontier
    if threads <= 1 or grid.size <= 1:
        return builder(ker, cm, grid, seed=seed)
    from concurrent.futures import ThreadPoolExecutor

    # Contiguous chunks keep the solver's warm-start chain intact within
    # each worker; strided chunks would solve isolated levels cold.
    chunks = [c for c in np.array_split(grid, threads) if c.size]
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(pool.map(lambda c: builder(ker, cm, c, seed=seed), chunks))
    points = sorted((p for fr in parts for p in fr.points), key=lambda p: p.cost)
    first = parts[0]
    return Frontier(first.kind, tuple(points), c_star=first.c_star,
                    c_star_upper=first.c_star_upper)


def _mark_jumps(frontier: Frontier) -> list[int]:
    """Indices (into the cost-sorted points) where the cost jumps by more
    than ten times the grid-local Lipschitz estimate."""
    pts = frontier.points
    if len(pts) < 3:
        return []
    steps = [abs(pts[i + 1].cost - pts[i].cost) for i in range(len(pts) - 1)]
    jumps = []
    for i, step in enumerate(steps):
        neighbors = [s for j, s in enumerate(steps) if j != i and abs(j - i) <= 3]
        local = max(neighbors) if neighbors else 0.0
        if step > 10.0 * local and step > 1e-9:
            jumps.append(i)
    return jumps


def cmd_frontier(args) -> int:
    ker = _load_model(args)
    cm = serialize.load_cost(args.cost, ker.pop)
    threads = _threads(args)
    from .frontier import ParetoSolver

    r0 = ParetoSolver(ker, cm, seed=args.seed).r0
    grid = np.linspace(0.0, r0, args.grid)
    kinds = ["pareto", "anti-pareto"] if args.kind == "both" else [
        "pareto" if args.kind == "pareto" else "anti-pareto"]
    frontiers = [
        _split_frontier("pareto" if kind == "pareto" else "anti",
                        ker, cm, grid, args.seed, threads)
        for kind in kinds
    ]
    csv_text = serialize.frontier_csv(frontiers, ker.n)
    _emit(csv_text, args.out)
    manifest = serialize.run_manifest(
        "frontier", args.model, seed=args.seed, grid=args.grid,
        threads=threads, kind=args.kind, cost=args.cost, r0=float(r0),
        multi_starts=16, loss_tolerance=1e-9,
        jumps={fr.kind: _mark_jumps(fr) for fr in frontiers},
        c_star={fr.kind: (fr.c_star if fr.kind == "pareto" else fr.c_star_upper)
                for fr in frontiers},
    )
    if args.out:
        serialize.write_atomic(args.out + ".manifest.json",
                               serialize.dumps17(manifest) + "\n")
    else:
        sys.stdout.write(serialize.dumps17(manifest) + "\n")
    return 0


def cmd_decompose(args) -> int:
    ker = _load_model(args)
    dec = decompose(ker, support_eps=args.support_eps)
    report = {
        "classification": dec.classification,
        "atoms": [list(a) for a in dec.atoms],
        "radii": list(dec.radii),
        "remainder": list(dec.remainder),
    }
    _emit(serialize.dumps17(report) + "\n", args.out)
    return 0


def cmd_independent(args) -> int:
    ker = _load_model(args)
    cm = serialize.load_cost(args.cost, ker.pop)
    res = max_weight_independent_set(ker, cm)
    report = {"independent_set": list(res.set), "c_star": res.c_star}
    _emit(serialize.dumps17(report) + "\n", args.out)
    return 0


def cmd_cordon(args) -> int:
    ker = _load_model(args)
    cm = serialize.load_cost(args.cost, ker.pop)
    eta = _load_eta(args, ker.n)
    rep = is_disconnecting(ker, eta)
    report = {
        "disconnecting": rep.disconnecting,
        "components": [list(c) for c in rep.components],
    }
    if rep.improvement is not None:
        better = improve_cordon(ker, cm, eta)
        report["improvement"] = list(better.eta)
        report["improvement_cost"] = evaluate(cm, better)
        report["improvement_loss"] = effective_r(ker, better)
        report["original_cost"] = evaluate(cm, eta)
        report["original_loss"] = effective_r(ker, eta)
    else:
        report["improvement"] = None
    _emit(serialize.dumps17(report) + "\n", args.out)
    return 0


def cmd_simulate(args) -> int:
    ker = _load_model(args)
    eta = _load_eta(args, ker.n)
    gamma = np.full(ker.n, args.gamma)
    if args.gamma <= 0:
        raise SchemaError("--gamma must be positive")
    transmission = ker.k * gamma[None, :]  # kernel convention: k = beta/gamma
    verdict = threshold_check(transmission, gamma, ker.pop.mu, eta,
                              t_end=args.t_end, dt=args.dt)
    traj = simulate_sis(transmission, gamma, ker.pop.mu, eta,
                        0.01 * eta.eta, args.t_end, args.dt)
    report = {
        "verdict": verdict.verdict,
        "r_effective": verdict.r_effective,
        "terminal_mass": verdict.terminal_mass,
        "drift": verdict.drift,
        "clamp_count": traj.clamp_count,
    }
    stride = max(1, int(round(1.0 / args.dt)))
    if args.out:
        serialize.write_atomic(args.out, serialize.trajectory_csv(traj, stride))
        serialize.write_atomic(args.out + ".verdict.json",
                               serialize.dumps17(report) + "\n")
    else:
        sys.stdout.write(serialize.dumps17(report) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="revax",
        description="Effective reproduction numbers, vaccination frontiers, "
                    "and cordon diagnostics for kernel epidemic models.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, cost=False, strategy=False):
        p.add_argument("--model", required=True, help="kernel JSON document")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--support-eps", type=float, default=0.0)
        if cost:
            p.add_argument("--cost", default="uniform",
                           help="'uniform' or 'affine:PATH'")
        if strategy:
            p.add_argument("--strategy", default=None, help="strategy JSON document")
            p.add_argument("--eta-const", type=float, default=None,
                           help="constant strategy value in [0, 1]")

    p = sub.add_parser("re", help="print R_e(eta)")
    common(p, strategy=True)
    p.set_defaults(func=cmd_re)

    p = sub.add_parser("frontier", help="Pareto / anti-Pareto frontier CSV")
    common(p, cost=True)
    p.add_argument("--kind", choices=["pareto", "anti", "both"], default="both")
    p.add_argument("--grid", type=int, default=101, help="number of loss levels")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_frontier)

    p = sub.add_parser("decompose", help="atomic decomposition report")
    common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("independent", help="maximum-weight independent set")
    common(p, cost=True)
    p.set_defaults(func=cmd_independent)

    p = sub.add_parser("cordon", help="cordon sanitaire diagnostics")
    common(p, cost=True, strategy=True)
    p.set_defaults(func=cmd_cordon)

    p = sub.add_parser("simulate", help="SIS trajectory and threshold verdict")
    common(p, strategy=True)
    p.add_argument("--gamma", type=float, default=1.0, help="uniform recovery rate")
    p.add_argument("--t-end", type=float, default=200.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (SchemaError, ModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
