import numpy as np
import pytest

from sparsefb.errors import DimensionError
from sparsefb.linalg import spectral_abscissa
from sparsefb.problems import biochemical, mass_spring, random_network


def test_mass_spring_single_mass():
    p = mass_spring(1)
    assert np.array_equal(p.A, [[0.0, 1.0], [-2.0, 0.0]])
    assert np.array_equal(p.B2, [[0.0], [1.0]])
    assert np.array_equal(p.R, [[10.0]])


def test_mass_spring_block_form():
    N = 4
    p = mass_spring(N)
    T = p.A[N:, :N]
    assert np.array_equal(np.diag(T), -2 * np.ones(N))
    assert np.array_equal(np.diag(T, 1), np.ones(N - 1))
    assert np.array_equal(p.A[:N, N:], np.eye(N))
    assert not p.A[:N, :N].any() and not p.A[N:, N:].any()
    # undamped chain: eigenvalues on the imaginary axis
    assert abs(spectral_abscissa(p.A)) < 1e-12
    with pytest.raises(DimensionError):
        mass_spring(0)


def test_network_single_node():
    net = random_network(1, seed=3)
    assert np.array_equal(net.plant.A, [[1.0, 1.0], [1.0, 2.0]])
    assert np.trace(net.plant.A) == 3.0
    assert spectral_abscissa(net.plant.A) > 0


def test_network_deterministic_and_symmetric():
    a, b = random_network(12, seed=5), random_network(12, seed=5)
    assert np.array_equal(a.plant.A, b.plant.A) and np.array_equal(a.positions, b.positions)
    assert not np.array_equal(a.plant.A, random_network(12, seed=6).plant.A)
    A = a.plant.A
    off = A - np.kron(np.eye(12), [[1.0, 1.0], [1.0, 2.0]])
    assert np.array_equal(off, off.T)
    # coupling block between nodes 0 and 1 is exp(-distance) I_2
    dist = np.linalg.norm(a.positions[0] - a.positions[1])
    assert np.allclose(A[0:2, 2:4], np.exp(-dist) * np.eye(2), rtol=1e-15)
    assert np.all((a.positions >= 0) & (a.positions <= 10))
    assert a.plant.B1.shape == (24, 12) and np.array_equal(a.plant.B1, a.plant.B2)


def test_biochem_literal_coupling_coefficient():
    plant, _ = biochemical(5, literal_coupling=True)
    # subsystem 1 receives -(1/2)(1-3)(x1 - x3) = +(x1 - x3): -1 on x3
    assert np.array_equal(plant.A[0:3, 6:9], -np.eye(3))
    # diagonal: local -1 plus (1/2) sum_j (j - 1) = 5
    assert plant.A[0, 0] == pytest.approx(4.0)


def test_biochem_default_is_reversed_numbering():
    lit, _ = biochemical(5, literal_coupling=True)
    mir, part = biochemical(5)
    N = 5
    perm = np.concatenate([np.arange(3 * k, 3 * k + 3) for k in reversed(range(N))])
    assert np.allclose(mir.A, lit.A[np.ix_(perm, perm)])
    assert part.shape == (5, 15) and part.grid_shape == (5, 5)
    assert np.array_equal(mir.B2[:, 0], [3.0] + [0.0] * 14)
    assert np.array_equal(mir.B1, 3 * np.eye(15))
