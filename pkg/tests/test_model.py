import numpy as np
import pytest

from sparsefb.errors import DefinitenessError, DimensionError
from sparsefb.model import BlockPartition, PenaltySpec, Plant, cardinality_report, penalty_value


def test_plant_validation():
    with pytest.raises(DimensionError):
        Plant(np.eye(2), np.ones((3, 1)), np.ones((2, 1)), np.eye(2), np.eye(1))
    with pytest.raises(DefinitenessError):
        Plant(np.eye(2), np.ones((2, 1)), np.ones((2, 1)), np.eye(2), -np.eye(1))
    with pytest.raises(DefinitenessError):
        Plant(np.eye(2), np.ones((2, 1)), np.ones((2, 1)), [[1.0, 2.0], [0.0, 1.0]], np.eye(1))
    p = Plant(np.eye(2), np.ones((2, 3)), np.ones((2, 1)), np.eye(2), np.eye(1))
    assert (p.n, p.m, p.d, p.gain_shape) == (2, 1, 3, (1, 2))
    assert not p.A.flags.writeable


def test_penalty_examples():
    for kind in ("weighted_l1", "cardinality", "sum_of_logs"):
        assert penalty_value(np.zeros((2, 3)), PenaltySpec(kind)) == 0.0
    assert penalty_value([[1.0, -2.0]], PenaltySpec(weights=[[1.0, 1.0]])) == 3.0
    one_block = BlockPartition((1,), (2,))
    assert penalty_value([[3.0, 4.0]], PenaltySpec("cardinality", partition=one_block)) == 1.0
    assert penalty_value([[3.0, 4.0]], PenaltySpec("weighted_l1", partition=one_block)) == 5.0
    eps = 0.1
    assert penalty_value([[0.2]], PenaltySpec("sum_of_logs", epsilon_log=eps)) == pytest.approx(
        np.log(3.0))


def test_penalty_weight_shape_checked():
    with pytest.raises(DimensionError):
        penalty_value(np.ones((2, 2)), PenaltySpec(weights=np.ones((2, 3))))
    with pytest.raises(ValueError):
        PenaltySpec(weights=[[-1.0]])
    with pytest.raises(ValueError):
        PenaltySpec("l2")


def test_unit_blocks_match_elementwise(rng):
    F = rng.standard_normal((3, 5))
    F[F < 0.2] = 0.0
    W = rng.uniform(0, 2, (3, 5))
    part = BlockPartition((1,) * 3, (1,) * 5)
    for kind in ("weighted_l1", "cardinality", "sum_of_logs"):
        a = penalty_value(F, PenaltySpec(kind, weights=W))
        b = penalty_value(F, PenaltySpec(kind, partition=part, weights=W))
        assert a == b


def test_inverse_magnitude_weights_give_cardinality(rng):
    F = rng.standard_normal((4, 4))
    F[rng.random((4, 4)) < 0.5] = 0.0
    W = np.where(F != 0, 1.0 / np.where(F != 0, np.abs(F), 1.0), 1e3)
    assert penalty_value(F, PenaltySpec(weights=W)) == pytest.approx(np.count_nonzero(F))


def test_cardinality_report_examples():
    r = cardinality_report(np.zeros((2, 3)))
    assert (r.nnz, r.nnz_blocks) == (0, 0) and not r.mask.any()
    assert cardinality_report([[1e-12, 2.0]], zero_tol=1e-8).nnz == 1
    part = BlockPartition((1, 1), (2, 1))
    F = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 2.0]])
    r = cardinality_report(F, part)
    assert (r.nnz, r.nnz_blocks) == (2, 2)


def test_mask_reproduces_gain(rng):
    F = rng.standard_normal((5, 6))
    F[rng.random((5, 6)) < 0.4] = 0.0
    r = cardinality_report(F)
    assert np.array_equal(F * r.mask, F)


def test_block_partition_helpers():
    part = BlockPartition.uniform(4, 6, 2, 3)
    assert part.grid_shape == (2, 2)
    F = np.arange(24.0).reshape(4, 6)
    norms = part.block_norms(F)
    assert norms[1, 0] == pytest.approx(np.linalg.norm(F[2:4, 0:3]))
    assert part.expand(np.array([[1, 2], [3, 4]]))[3, 5] == 4
    with pytest.raises(DimensionError):
        BlockPartition.uniform(4, 5, 2, 3)
