import numpy as np
import pytest

from revax import (
    Kernel,
    Population,
    Strategy,
    cycle_kernel,
    decompose,
    effective_r,
    is_invariant,
    restrict,
    spectral_radius,
    support_graph,
)


def _block_kernel(rng, sizes, link=0.0):
    """Block-diagonal kernel with optional one-way links between blocks."""
    n = sum(sizes)
    k = np.zeros((n, n))
    start = 0
    blocks = []
    for size in sizes:
        idx = slice(start, start + size)
        k[idx, idx] = rng.random((size, size)) + 0.1
        blocks.append(list(range(start, start + size)))
        start += size
    if link and len(sizes) > 1:
        k[blocks[1][0], blocks[0][-1]] = link  # block 0 infects block 1
    return Kernel(Population(rng.random(n) + 0.1), k), blocks


def test_positive_kernel_is_irreducible():
    rng = np.random.default_rng(0)
    ker = Kernel(Population(rng.random(5) + 0.1), rng.random((5, 5)) + 0.01)
    dec = decompose(ker)
    assert dec.classification == "irreducible"
    assert len(dec.atoms) == 1 and len(dec.atoms[0]) == 5
    assert dec.remainder == ()


def test_block_diagonal_atoms():
    rng = np.random.default_rng(1)
    ker, blocks = _block_kernel(rng, [3, 2])
    dec = decompose(ker)
    assert dec.classification == "reducible-multiatomic"
    assert sorted(map(list, dec.atoms)) == sorted(blocks)
    for atom, radius in zip(dec.atoms, dec.radii):
        sub = restrict(ker, atom)
        want = spectral_radius(sub.operator_matrix(Strategy.ones(len(atom))))
        assert radius == pytest.approx(want, abs=1e-12)


def test_monatomic_and_quasi_irreducible():
    pop = Population([1.0, 1.0])
    # One atom {0} plus an edge leaving it: monatomic but not quasi-irreducible.
    ker = Kernel(pop, np.array([[1.0, 0.0], [1.0, 0.0]]))
    assert decompose(ker).classification == "monatomic"
    # One atom, k = 0 off the atom's square: quasi-irreducible.
    ker2 = Kernel(pop, np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert decompose(ker2).classification == "quasi-irreducible"


def test_nilpotent_kernel_is_zero_class():
    pop = Population([1.0, 1.0])
    ker = Kernel(pop, np.array([[0.0, 1.0], [0.0, 0.0]]))
    dec = decompose(ker)
    assert dec.classification == "zero"
    assert dec.atoms == ()
    assert list(dec.remainder) == [0, 1]
    assert effective_r(ker, Strategy.ones(2)) == 0.0


def test_atom_order_is_upstream_first():
    rng = np.random.default_rng(2)
    ker, blocks = _block_kernel(rng, [2, 2], link=0.5)  # block 0 -> block 1
    dec = decompose(ker)
    assert list(dec.atoms[0]) == blocks[0]
    assert list(dec.atoms[1]) == blocks[1]


def test_decomposition_identity_max_over_atoms():
    rng = np.random.default_rng(3)
    for _ in range(50):
        sizes = list(rng.integers(1, 4, size=int(rng.integers(1, 4))))
        ker, _ = _block_kernel(rng, sizes, link=float(rng.random()))
        eta = Strategy(rng.random(ker.n))
        dec = decompose(ker)
        per_atom = max(
            (effective_r(restrict(ker, atom), Strategy(eta.eta[list(atom)]))
             for atom in dec.atoms),
            default=0.0,
        )
        total = effective_r(ker, eta)
        assert abs(per_atom - total) <= 1e-9 * (1.0 + total)


def test_is_invariant():
    rng = np.random.default_rng(4)
    ker, blocks = _block_kernel(rng, [2, 3], link=0.7)  # block 0 infects block 1
    assert is_invariant(ker, blocks[1])       # nothing leaves block 1
    assert not is_invariant(ker, blocks[0])   # block 0 leaks into block 1
    assert is_invariant(ker, range(ker.n))


def test_support_eps_filters_weak_links():
    pop = Population([1.0, 1.0])
    ker = Kernel(pop, np.array([[1.0, 1e-12], [1e-12, 1.0]]))
    assert decompose(ker).classification == "irreducible"
    dec = decompose(ker, support_eps=1e-9)
    assert dec.classification == "reducible-multiatomic"
    assert len(dec.atoms) == 2


def test_support_graph_orientation():
    # edge j -> i iff k[i][j] * mu[j] > 0
    pop = Population([1.0, 1.0])
    ker = Kernel(pop, np.array([[0.0, 1.0], [0.0, 0.0]]))  # trait 1 infects 0
    adj = support_graph(ker, 0.0)
    assert adj[1, 0] and not adj[0, 1]


def test_cycle_restriction_components():
    ker = cycle_kernel(12)
    sub = restrict(ker, [1, 2, 3, 5, 6, 7, 9, 10, 11])
    dec = decompose(sub)
    assert dec.classification == "reducible-multiatomic"
    assert len(dec.atoms) == 3
