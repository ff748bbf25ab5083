import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_plant
from sparsefb.admm import AdmmOptions
from sparsefb.h2 import H2Point, objective
from sparsefb.linalg import solve_are
from sparsefb.model import BlockPartition, PenaltySpec
from sparsefb.path import BASE, PathOptions, run_path, update_weights

finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_options_validation():
    for grid in ([0.0, 1.0], [2.0, 1.0], [1.0, 1.0]):
        with pytest.raises(ValueError):
            PathOptions(gamma_grid=grid)
    assert PathOptions(gamma_grid=[]).gamma_grid == ()


def test_update_weights_examples():
    spec = update_weights(np.zeros((2, 3)), PenaltySpec())
    assert np.allclose(spec.weights, 1000.0)
    w = update_weights(np.array([[0.999]]), PenaltySpec()).weights[0, 0]
    assert w == pytest.approx(1.0, rel=2e-3)
    part = BlockPartition((1,), (2,))
    w = update_weights(np.array([[3.0, 4.0]]), PenaltySpec(partition=part)).weights
    assert w.shape == (1, 1) and w[0, 0] == pytest.approx(1 / (5.0 + 1e-3))
    with pytest.raises(ValueError):
        update_weights(np.zeros((1, 1)), PenaltySpec("cardinality"))


@settings(max_examples=50, deadline=None)
@given(arrays(float, (3, 4), elements=finite), st.permutations(range(4)))
def test_update_weights_permutation_equivariant(F, perm):
    a = update_weights(F, PenaltySpec()).weights[:, perm]
    b = update_weights(F[:, perm], PenaltySpec()).weights
    assert np.array_equal(a, b)


def test_empty_grid_gives_riccati_record(rng):
    plant = random_plant(rng, 4, 2)
    path = run_path(plant, PenaltySpec(), PathOptions(gamma_grid=[]))
    assert len(path) == 1
    rec = path[0]
    _, Fc = solve_are(plant)
    assert rec.status == BASE and rec.gamma == 0.0
    assert np.array_equal(rec.F_polished, Fc) and rec.mask.all()
    assert rec.J_polished == path.J_c
    assert np.linalg.norm(H2Point(plant, Fc).grad) <= 1e-6 * max(1.0, np.linalg.norm(Fc))


@pytest.mark.parametrize("spec", [
    PenaltySpec(),
    PenaltySpec("cardinality"),
    PenaltySpec("sum_of_logs"),
    PenaltySpec(partition=BlockPartition((1, 1), (2, 2, 2))),
])
def test_path_invariants(rng, spec):
    plant = random_plant(rng, 6, 2, stable_shift=-0.3)
    seen = []
    # the invariants must hold whether or not ADMM converges at each point
    path = run_path(plant, spec, PathOptions(gamma_grid=np.logspace(-2, 1, 6)),
                    AdmmOptions(rho=10.0, max_iter=200), callback=seen.append)
    assert len(seen) == len(path) == 7
    scale = max(1.0, path.J_c)
    for rec in path:
        assert np.isfinite(rec.J_identified) and np.isfinite(rec.J_polished)
        assert objective(plant, rec.F_identified) == pytest.approx(rec.J_identified)
        assert np.array_equal(rec.F_polished, np.where(rec.mask, rec.F_polished, 0.0))
        assert rec.J_polished >= path.J_c * (1 - 1e-10)
        assert rec.J_polished <= rec.J_identified + 1e-8 * scale
        assert rec.nnz == rec.mask.sum()
    if spec.kind == "weighted_l1":
        assert all(r.certificate is not None for r in path.records[1:])


def test_nearest_record(rng):
    plant = random_plant(rng, 3, 1)
    path = run_path(plant, PenaltySpec(), PathOptions(gamma_grid=[0.01, 0.1, 1.0]),
                    AdmmOptions(rho=10.0))
    assert path.nearest(0.09).gamma == 0.1
    assert [r.gamma for r in path] == [0.0, 0.01, 0.1, 1.0]
