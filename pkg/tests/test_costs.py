import numpy as np
import pytest

from revax import (
    ModelError,
    Population,
    PreconditionError,
    Strategy,
    affine_cost,
    cycle_kernel,
    decompose,
    decompose_cost,
    evaluate,
    indicator_cost,
    is_extensive_pair,
    uniform_cost,
)
from revax.costs import CostModel


def test_uniform_cost_basics():
    pop = Population([0.25, 0.25, 0.5])
    cm = uniform_cost(pop)
    assert cm.c_max == pytest.approx(1.0)
    assert evaluate(cm, Strategy.ones(3)) == 0.0
    assert evaluate(cm, Strategy.zeros(3)) == pytest.approx(1.0)
    assert evaluate(cm, Strategy([0.5, 1.0, 1.0])) == pytest.approx(0.125)


def test_affine_cost_weights():
    pop = Population([0.5, 0.5])
    cm = affine_cost(pop, [1.0, 3.0])
    assert cm.c_max == pytest.approx(2.0)
    assert evaluate(cm, Strategy([1.0, 0.0])) == pytest.approx(1.5)
    with pytest.raises(ModelError):
        affine_cost(pop, [1.0, 0.0])  # weights must be positive
    with pytest.raises(ModelError):
        affine_cost(pop, [1.0, -1.0])


def test_cost_is_linear_in_vaccinated_mass():
    rng = np.random.default_rng(0)
    pop = Population(rng.random(5) + 0.1)
    cm = affine_cost(pop, rng.random(5) + 0.1)
    eta = rng.random(5)
    want = float(np.sum((1.0 - eta) * cm.weights * pop.mu))
    assert evaluate(cm, Strategy(eta)) == pytest.approx(want, abs=1e-14)


def test_extensivity_of_disjoint_targets():
    rng = np.random.default_rng(1)
    pop = Population(rng.random(6) + 0.1)
    cm = affine_cost(pop, rng.random(6) + 0.1)
    # eta1 vaccinates the first half, eta2 the second half: eta1 | eta2 = 1.
    eta1 = Strategy([0.2, 0.5, 0.0, 1.0, 1.0, 1.0])
    eta2 = Strategy([1.0, 1.0, 1.0, 0.3, 0.0, 0.9])
    assert is_extensive_pair(cm, eta1, eta2)
    both = Strategy(np.minimum(eta1.eta, eta2.eta))
    assert evaluate(cm, both) == pytest.approx(
        evaluate(cm, eta1) + evaluate(cm, eta2), rel=1e-12)
    with pytest.raises(PreconditionError):
        is_extensive_pair(cm, eta1, Strategy.zeros(6))


def test_decompose_cost_sums_to_total():
    ker = cycle_kernel(12)
    cm = uniform_cost(ker.pop)
    dec = decompose(ker)
    rng = np.random.default_rng(2)
    eta = Strategy(rng.random(12))
    per_atom, remainder = decompose_cost(cm, eta, dec.atoms)
    assert sum(per_atom) + remainder == pytest.approx(evaluate(cm, eta), abs=1e-12)


def test_indicator_cost():
    pop = Population([0.25, 0.25, 0.5])
    cm = uniform_cost(pop)
    # C(1_A): vaccinate everyone outside A.
    assert indicator_cost(cm, [0]) == pytest.approx(0.75)
    assert indicator_cost(cm, [0, 1, 2]) == 0.0


def test_dimension_mismatch():
    cm = uniform_cost(Population([1.0, 1.0]))
    with pytest.raises(ModelError):
        evaluate(cm, Strategy.ones(3))


def test_kind_field():
    pop = Population([1.0])
    assert uniform_cost(pop).kind == "uniform"
    assert affine_cost(pop, [2.0]).kind == "affine"
    assert isinstance(uniform_cost(pop), CostModel)
