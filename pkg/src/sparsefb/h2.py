"""Closed-loop H2 objective ``J(F)``, its gradient and Hessian-vector products.

For a stabilizing gain ``F`` with ``Acl = A - B2 F``::

    Acl L + L Acl^T = -B1 B1^T                 (controllability Gramian)
    Acl^T P + P Acl = -(Q + F^T R F)           (observability Gramian)
    J(F)      = trace(B1^T P B1)
    grad J(F) = 2 (R F - B2^T P) L

and ``J = inf`` when ``Acl`` is not Hurwitz.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, StabilityError
from .linalg import LyapunovSolver, spectral_abscissa

__all__ = ["H2Point", "objective", "gradient", "hessian_apply", "is_stabilizing"]


def _gain(plant, F):
    F = np.asarray(F, dtype=float)
    if F.shape != plant.gain_shape:
        raise DimensionError(f"gain must be {plant.gain_shape}, got {F.shape}")
    return F


class H2Point:
    """Gramians and derivatives of ``J`` at one stabilizing gain.

    The Schur form of the closed loop is computed once and reused by every
    Lyapunov solve, including those behind :meth:`hessian`.
    Raises :class:`StabilityError` if ``F`` is not stabilizing.
    """

    def __init__(self, plant, F):
        self.plant = plant
        self.F = _gain(plant, F)
        self.solver = LyapunovSolver(plant.closed_loop(self.F))
        B1 = plant.B1
        self.L = self.solver.controllability(B1 @ B1.T)
        self.P = self.solver.observability(plant.Q + self.F.T @ plant.R @ self.F)
        self.J = float(np.trace(B1.T @ self.P @ B1))
        # R F - B2^T P, shared by gradient and Hessian
        self._S = plant.R @ self.F - plant.B2.T @ self.P
        self.grad = 2.0 * self._S @ self.L

    def hessian(self, Ftil) -> np.ndarray:
        """``H(F, Ftil)``, the action of the Hessian on direction ``Ftil``."""
        p = self.plant
        Ftil = _gain(p, Ftil)
        M = p.B2 @ Ftil @ self.L
        Ltil = self.solver.controllability(-(M + M.T))
        N = -self._S.T @ Ftil
        Ptil = self.solver.observability(-(N + N.T))
        return 2.0 * ((p.R @ Ftil - p.B2.T @ Ptil) @ self.L + self._S @ Ltil)


def is_stabilizing(plant, F) -> bool:
    return spectral_abscissa(plant.closed_loop(_gain(plant, F))) < 0.0


def objective(plant, F) -> float:
    """``trace(B1^T P B1)``, or ``inf`` for a non-stabilizing gain."""
    try:
        return H2Point(plant, F).J
    except StabilityError:
        return float("inf")


def gradient(plant, F) -> np.ndarray:
    return H2Point(plant, F).grad


def hessian_apply(plant, F, Ftil) -> np.ndarray:
    return H2Point(plant, F).hessian(Ftil)
