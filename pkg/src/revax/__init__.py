"""Effective reproduction numbers of vaccinated kernel models, Pareto and
anti-Pareto cost/loss frontiers, atomic decomposition, herd-immunity costs,
cordon-sanitaire diagnostics, and SIS threshold dynamics."""

from .costs import CostModel, affine_cost, decompose_cost, evaluate, indicator_cost, is_extensive_pair, uniform_cost
from .cordon import CordonReport, improve_cordon, is_disconnecting
from .decomposition import AtomDecomposition, decompose, is_invariant, restrict, support_graph
from .dynamics import SisState, SisTrajectory, ThresholdVerdict, simulate_sis, threshold_check
from .errors import ConvergenceError, GradientUndefined, ModelError, PreconditionError, RevaxError, SchemaError
from .frontier import (
    AtomFrontiers,
    Frontier,
    FrontierPoint,
    OptimalRay,
    ParetoSolver,
    anti_optimal_cost,
    anti_optimal_loss,
    anti_pareto_frontier,
    atom_frontier_inputs,
    combine_atom_frontiers,
    detect_optimal_ray,
    optimal_cost,
    optimal_loss,
    pareto_frontier,
)
from .independent import IndependentSetResult, is_independent, max_weight_independent_set
from .kernels import (
    Kernel,
    Population,
    Strategy,
    cycle_kernel,
    double_norm,
    effective_kernel,
    from_metapopulation,
    from_rates,
    scale,
)
from .spectral import PerronPair, effective_r, perron_pair, r_gradient, spectral_radius

__version__ = "0.1.0"
