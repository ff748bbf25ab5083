"""Benchmark plants: mass-spring chain, random unstable network, and a
cyclic biochemical reaction network with block structure."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionError
from .model import BlockPartition, Plant

__all__ = ["mass_spring", "random_network", "biochemical", "NetworkPlant"]


def mass_spring(N: int, R_scale: float = 10.0) -> Plant:
    """``N`` unit masses joined by unit springs; states are positions then
    velocities, one force input per mass."""
    if N < 1:
        raise DimensionError("mass-spring system needs at least one mass")
    I = np.eye(N)
    O = np.zeros((N, N))
    T = -2.0 * I + np.eye(N, k=1) + np.eye(N, k=-1)
    A = np.block([[O, I], [T, O]])
    B = np.vstack([O, I])
    return Plant(A, B, B.copy(), np.eye(2 * N), R_scale * I)


class NetworkPlant(NamedTuple):
    plant: Plant
    positions: np.ndarray
    seed: int


def random_network(N: int, side: float = 10.0, seed: int = 0) -> NetworkPlant:
    """``N`` unstable second-order nodes scattered uniformly in a square.

    Node ``i`` obeys ``dx_i = [[1, 1], [1, 2]] x_i + sum_{j != i}
    exp(-dist(i, j)) x_j + [0, 1]^T (d_i + u_i)``, so the coupling block
    between two nodes is ``exp(-dist) * I_2``. Positions come from numpy's
    PCG64 generator seeded with ``seed``.
    """
    if N < 1:
        raise DimensionError("network needs at least one node")
    rng = np.random.Generator(np.random.PCG64(seed))
    pos = rng.uniform(0.0, side, size=(N, 2))
    dist = np.sqrt(((pos[:, None, :] - pos[None, :, :]) ** 2).sum(axis=-1))
    coupling = np.exp(-dist)
    np.fill_diagonal(coupling, 0.0)
    A = np.kron(coupling, np.eye(2)) + np.kron(np.eye(N), np.array([[1.0, 1.0], [1.0, 2.0]]))
    B = np.kron(np.eye(N), np.array([[0.0], [1.0]]))
    plant = Plant(A, B, B.copy(), np.eye(2 * N), np.eye(N))
    return NetworkPlant(plant, pos, seed)


_BIOCHEM_LOCAL = np.array([[-1.0, 0.0, -3.0],
                           [3.0, -1.0, 0.0],
                           [0.0, 3.0, -1.0]])


def biochemical(N: int = 5, literal_coupling: bool = False):
    """Cyclic negative-feedback reaction network of ``N`` three-state
    subsystems with pairwise coupling proportional to ``(i - j)(x_i - x_j)``.

    With ``literal_coupling=True`` subsystem ``i`` receives
    ``-(1/2) sum_j (i - j)(x_i - x_j)``, which destabilizes the low-index
    subsystems. The default flips that sign, which is the same plant with
    the subsystems numbered in reverse order; it is the orientation under
    which the low-index subsystems end up unactuated in the block-sparse
    design.

    Returns the plant and the partition of the ``N x 3N`` gain into
    ``1 x 3`` blocks.
    """
    idx = np.arange(1, N + 1)
    diff = (idx[:, None] - idx[None, :]).astype(float)   # (i - j)
    sign = -1.0 if literal_coupling else 1.0
    # sign (1/2)(i-j)(x_i - x_j): -sign/2 (i-j) on x_j, +sign/2 sum_j (i-j) on x_i
    C = -0.5 * sign * diff
    np.fill_diagonal(C, 0.5 * sign * diff.sum(axis=1))
    A = np.kron(np.eye(N), _BIOCHEM_LOCAL) + np.kron(C, np.eye(3))
    B1 = np.kron(np.eye(N), 3.0 * np.eye(3))
    B2 = np.kron(np.eye(N), np.array([[3.0], [0.0], [0.0]]))
    plant = Plant(A, B1, B2, np.eye(3 * N), np.eye(N))
    return plant, BlockPartition((1,) * N, (3,) * N)
