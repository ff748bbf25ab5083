"""Structured H2 design: minimize ``J(F)`` subject to a fixed sparsity mask.

Newton's method where the direction minimizes the masked quadratic model
``(1/2)<H(D) o I_S, D> + <grad J o I_S, D>`` by conjugate gradients on the
free entries. CG stops early on negative curvature; an Armijo line search
that rejects destabilizing steps makes ``J`` strictly decrease.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import StabilityError, StructureError
from .h2 import H2Point

__all__ = ["PolishOptions", "PolishResult", "project_structure", "polish_gain"]

CONVERGED = "converged"
MAX_ITER = "max-iter"
STALLED = "stalled"
FLAT_DECREASE = 1e3 * np.finfo(float).eps


@dataclass(frozen=True)
class PolishOptions:
    grad_tol: float = 1e-8
    max_newton: int = 100
    cg_rtol: float = 1e-6
    cg_max: int | None = None
    armijo_c: float = 1e-4
    backtrack: float = 0.5


class PolishResult(NamedTuple):
    F: np.ndarray
    J: float
    iters: int
    status: str
    grad_norm: float
    J_trace: list


def project_structure(F, mask) -> np.ndarray:
    """Entrywise product ``F o I_S``."""
    F = np.asarray(F, dtype=float)
    mask = np.asarray(mask)
    if mask.shape != F.shape:
        raise StructureError(f"mask shape {mask.shape} does not match gain {F.shape}")
    return np.where(mask.astype(bool), F, 0.0)


def _newton_direction(pt, g, mask, rtol, max_iter):
    """Approximately solve ``H(D) o I_S = -g`` by CG; returns ``(D, cg_iters)``.

    On negative or zero curvature the current iterate is returned, or the
    steepest-descent direction if no CG step has been taken yet.
    """
    x = np.zeros_like(g)
    r = -g
    p = r.copy()
    rr = float(np.sum(r * r))
    gnorm = np.sqrt(rr)
    for j in range(max_iter):
        Hp = project_structure(pt.hessian(p), mask)
        curv = float(np.sum(p * Hp))
        if curv <= 0.0:
            return (-g if j == 0 else x), j
        alpha = rr / curv
        x = x + alpha * p
        r = r - alpha * Hp
        rr_new = float(np.sum(r * r))
        if np.sqrt(rr_new) <= rtol * gnorm:
            return x, j + 1
        p = r + (rr_new / rr) * p
        rr = rr_new
    return x, max_iter


def polish_gain(plant, mask, F0, opts: PolishOptions | None = None,
                callback=None) -> PolishResult:
    """Optimal H2 gain with the sparsity pattern ``mask``, started from ``F0``.

    ``F0`` must be stabilizing and satisfy ``F0 o mask == F0`` exactly.
    ``callback(F, J)`` is called for the start and every accepted iterate.
    """
    opts = opts or PolishOptions()
    mask = np.asarray(mask).astype(bool)
    F = np.asarray(F0, dtype=float)
    if mask.shape != F.shape:
        raise StructureError(f"mask shape {mask.shape} does not match gain {F.shape}")
    if np.any(F[~mask] != 0.0):
        raise StructureError("initial gain has nonzeros outside the mask")
    try:
        pt = H2Point(plant, F)
    except StabilityError:
        raise StabilityError("initial gain for polishing is not stabilizing") from None
    n_free = int(mask.sum())
    cg_max = opts.cg_max if opts.cg_max is not None else max(1, 2 * n_free)
    trace = [pt.J]
    if callback:
        callback(pt.F, pt.J)
    status = MAX_ITER
    gnorm = float("inf")
    it = 0
    for it in range(opts.max_newton + 1):
        g = project_structure(pt.grad, mask)
        gnorm = float(np.linalg.norm(g))
        if gnorm <= opts.grad_tol * max(1.0, float(np.linalg.norm(pt.F))):
            status = CONVERGED
            break
        if it == opts.max_newton or n_free == 0:
            break
        D, _ = _newton_direction(pt, g, mask, opts.cg_rtol, cg_max)
        slope = float(np.sum(g * D))
        if not slope < 0:
            D, slope = -g, -gnorm ** 2
        s = 1.0
        accepted = None
        while s >= 1e-12:
            try:
                cand = H2Point(plant, pt.F + s * D)
            except StabilityError:
                cand = None
            if cand is not None and cand.J < pt.J and cand.J <= pt.J + opts.armijo_c * s * slope:
                accepted = cand
                break
            s *= opts.backtrack
        if accepted is None:
            # a predicted decrease lost in the round-off of J means the
            # point is already optimal to working precision
            flat = -0.5 * slope <= FLAT_DECREASE * abs(pt.J)
            status = CONVERGED if flat else STALLED
            break
        pt = accepted
        trace.append(pt.J)
        if callback:
            callback(pt.F, pt.J)
    return PolishResult(pt.F, pt.J, len(trace) - 1, status, gnorm, trace)
