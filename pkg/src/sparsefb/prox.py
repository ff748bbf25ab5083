"""Closed-form minimizers of ``gamma g(G) + (rho/2) ||G - V||_F^2``.

Every penalty is separable over entries (or blocks), so each sub-problem
reduces to shrinking one magnitude ``s = |V_ij|`` (or ``s = ||V_b||_F``) to
``t >= 0`` along the fixed direction of ``V``. The radial shrinkage rules
live in ``shrink_*``; the public operators apply them entrywise or
blockwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import CARDINALITY, SUM_OF_LOGS, WEIGHTED_L1, PenaltySpec, penalty_value

__all__ = [
    "ProxProblem",
    "prox",
    "prox_weighted_l1",
    "prox_cardinality",
    "prox_sum_of_logs",
    "prox_blockwise",
    "prox_objective",
    "shrink_l1",
    "shrink_cardinality",
    "shrink_log",
]


@dataclass(frozen=True)
class ProxProblem:
    V: np.ndarray
    gamma: float
    rho: float
    spec: PenaltySpec

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if not self.gamma >= 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        object.__setattr__(self, "V", np.asarray(self.V, dtype=float))


def shrink_l1(s, a):
    """Soft threshold of magnitudes: ``s - a`` if ``s > a`` else 0."""
    s = np.asarray(s, dtype=float)
    return np.where(s > a, s - a, 0.0)


def shrink_cardinality(s, b):
    """Hard threshold of magnitudes: keep ``s`` if ``s > b`` else 0."""
    s = np.asarray(s, dtype=float)
    return np.where(s > b, s, 0.0)


def shrink_log(s, kappa, eps):
    """Minimize ``kappa log(1 + t/eps) + (t - s)^2 / 2`` over ``t >= 0``.

    ``kappa = gamma w / rho``. Stationary points on ``t > 0`` are roots of
    ``t^2 - (s - eps) t + (kappa - eps s) = 0`` whose discriminant is
    ``(s + eps)^2 - 4 kappa``; the larger root is the only candidate local
    minimizer and is compared against ``t = 0`` (ties go to 0).
    """
    s, kappa = np.broadcast_arrays(np.asarray(s, dtype=float),
                                   np.asarray(kappa, dtype=float))
    b = s - eps
    c = kappa - eps * s
    disc = (s + eps) ** 2 - 4.0 * kappa
    root = np.sqrt(np.maximum(disc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        # avoid cancellation in (b + root) / 2 when b < 0
        t = np.where(b >= 0, 0.5 * (b + root), 2.0 * c / (b - root))
    t = np.where((disc > 0) & np.isfinite(t) & (t > 0), t, 0.0)

    def phi(x):
        return kappa * np.log1p(x / eps) + 0.5 * (x - s) ** 2

    keep = (t > 0) & (phi(t) < phi(np.zeros_like(t)))
    return np.where(keep, t, 0.0)


def _radial(s, p: ProxProblem, W):
    """Shrunk magnitudes for the penalty of ``p`` with per-unit weights ``W``."""
    kind = p.spec.kind
    if kind == WEIGHTED_L1:
        return shrink_l1(s, (p.gamma / p.rho) * W)
    if kind == CARDINALITY:
        return shrink_cardinality(s, np.sqrt(2.0 * p.gamma / p.rho))
    return shrink_log(s, (p.gamma / p.rho) * W, p.spec.epsilon_log)


def _elementwise(p: ProxProblem, kind):
    if p.spec.kind != kind:
        raise ValueError(f"expected a {kind} penalty, got {p.spec.kind}")
    if p.spec.blockwise:
        return prox_blockwise(p)
    V = p.V
    t = _radial(np.abs(V), p, p.spec.weight_array(V.shape))
    return np.sign(V) * t


def prox_weighted_l1(p: ProxProblem) -> np.ndarray:
    """Soft thresholding with thresholds ``(gamma/rho) W_ij``."""
    return _elementwise(p, WEIGHTED_L1)


def prox_cardinality(p: ProxProblem) -> np.ndarray:
    """Truncation at ``sqrt(2 gamma / rho)``."""
    return _elementwise(p, CARDINALITY)


def prox_sum_of_logs(p: ProxProblem) -> np.ndarray:
    return _elementwise(p, SUM_OF_LOGS)


def prox_blockwise(p: ProxProblem) -> np.ndarray:
    """Apply the radial rule to block Frobenius norms and rescale each block."""
    part = p.spec.partition
    if part is None:
        raise ValueError("prox_blockwise needs a block partition")
    V = p.V
    s = part.block_norms(V)
    t = _radial(s, p, p.spec.weight_array(V.shape))
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.where(s > 0, t / s, 0.0)
    return V * part.expand(factor)


def prox(p: ProxProblem) -> np.ndarray:
    """Dispatch on penalty kind and granularity."""
    if p.spec.blockwise:
        return prox_blockwise(p)
    return _elementwise(p, p.spec.kind)


def prox_objective(G, p: ProxProblem) -> float:
    """``gamma g(G) + (rho/2) ||G - V||_F^2``."""
    G = np.asarray(G, dtype=float)
    return (p.gamma * penalty_value(G, p.spec)
            + 0.5 * p.rho * float(np.sum((G - p.V) ** 2)))

