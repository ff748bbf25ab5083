"""ADMM for ``minimize J(F) + gamma g(G)  s.t.  F = G`` at a fixed ``gamma``.

Each iteration performs

* an F-step, ``argmin_F J(F) + (rho/2)||F - U||^2`` with ``U = G - Lambda/rho``,
  solved by the Anderson-Moore method (two Lyapunov solves and one
  Sylvester solve per sweep, globalized by a backtracking line search that
  treats non-stabilizing gains as having infinite cost);
* a G-step, the closed-form proximal map at ``V = F + Lambda/rho``;
* the dual ascent ``Lambda += rho (F - G)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import StabilityError
from .h2 import H2Point
from .linalg import solve_spd_sylvester
from .model import WEIGHTED_L1, PenaltySpec
from .prox import ProxProblem, prox

log = logging.getLogger(__name__)

CONVERGED = "converged"
NOT_CONVERGED = "not-converged"
STALLED = "stalled"
ROUNDOFF = 16 * np.finfo(float).eps
FLAT_DECREASE = 1e3 * np.finfo(float).eps


@dataclass(frozen=True)
class AdmmOptions:
    rho: float = 100.0
    eps_stop: float = 1e-4
    max_iter: int = 1000
    am_max_iter: int = 50
    am_grad_tol: float = 1e-3
    armijo_c: float = 1e-4
    backtrack: float = 0.5

    def __post_init__(self):
        if not self.rho > 0 or not self.eps_stop > 0 or not self.am_grad_tol > 0:
            raise ValueError("rho, eps_stop and am_grad_tol must be positive")
        if not (0 < self.armijo_c < 1 and 0 < self.backtrack < 1):
            raise ValueError("armijo_c and backtrack must lie in (0, 1)")
        if self.max_iter < 1 or self.am_max_iter < 1:
            raise ValueError("iteration caps must be at least 1")


@dataclass
class AdmmState:
    F: np.ndarray
    G: np.ndarray
    Lambda: np.ndarray
    iter: int = 0
    primal_residual: float = float("inf")
    g_change: float = float("inf")
    status: str = NOT_CONVERGED
    am_iters: int = 0
    history: list = field(default_factory=list, repr=False)


class AMResult(NamedTuple):
    F: np.ndarray
    iters: int
    grad_norm: float
    status: str
    phi_trace: list


def _phi(pt, U, rho):
    return pt.J + 0.5 * rho * float(np.sum((pt.F - U) ** 2))


def _try_point(plant, F):
    try:
        return H2Point(plant, F)
    except StabilityError:
        return None


def f_min_anderson_moore(plant, U, rho, F0, opts: AdmmOptions | None = None,
                         abs_tol: float = np.inf) -> AMResult:
    """Minimize ``J(F) + (rho/2)||F - U||_F^2`` from a stabilizing ``F0``.

    Each sweep fixes ``F``, solves for both Gramians, then solves
    ``2 R Fbar L + rho Fbar = 2 B2^T P L + rho U``; ``Fbar - F`` is a descent
    direction and the step along it is chosen by Armijo backtracking.
    Stops once ``||grad phi|| <= min(am_grad_tol max(1, ||F||), abs_tol)``.
    Raises :class:`StabilityError` if ``F0`` is not stabilizing.
    """
    opts = opts or AdmmOptions()
    U = np.asarray(U, dtype=float)

    def small(g, F):
        return g <= min(opts.am_grad_tol * max(1.0, float(np.linalg.norm(F))), abs_tol)

    pt = H2Point(plant, F0)
    phi = _phi(pt, U, rho)
    trace = [phi]
    status = NOT_CONVERGED
    gnorm = float("inf")
    s_next = 1.0
    it = 0
    for it in range(1, opts.am_max_iter + 1):
        F = pt.F
        gphi = pt.grad + rho * (F - U)
        gnorm = float(np.linalg.norm(gphi))
        if small(gnorm, F):
            status = CONVERGED
            it -= 1
            break
        rhs = 2.0 * plant.B2.T @ pt.P @ pt.L + rho * U
        D = solve_spd_sylvester(plant.R, pt.L, rho, rhs, clip_l=True) - F
        slope = float(np.sum(gphi * D))
        if not slope < 0:
            D = -gphi
            slope = -gnorm ** 2
        # start from one expansion of the last accepted step; below the
        # round-off scale of F no decrease can be certified
        s = s_next
        s_min = 1e-14 * max(1.0, float(np.linalg.norm(F))) / max(float(np.linalg.norm(D)), 1e-300)
        while True:
            cand = _try_point(plant, F + s * D)
            if cand is not None:
                phi_c = _phi(cand, U, rho)
                if phi_c <= phi + opts.armijo_c * s * slope:
                    break
                # near the minimizer the decrease drops below the round-off
                # of phi; accept a step that halves the gradient instead
                if (phi_c <= phi + ROUNDOFF * abs(phi) and
                        np.linalg.norm(cand.grad + rho * (cand.F - U)) <= 0.5 * gnorm):
                    break
            s *= opts.backtrack
            if s < max(s_min, 1e-12):
                cand = None
                break
        s_next = min(1.0, s / opts.backtrack)
        if cand is None:
            # no certifiable decrease left: optimal to working precision if
            # the predicted decrease is itself at the round-off of phi
            if -0.5 * slope <= FLAT_DECREASE * abs(phi):
                status = CONVERGED
                break
            status = STALLED
            log.debug("Anderson-Moore line search stalled at sweep %d", it)
            break
        pt, phi = cand, phi_c
        trace.append(phi)
    else:
        gphi = pt.grad + rho * (pt.F - U)
        gnorm = float(np.linalg.norm(gphi))
        if small(gnorm, pt.F):
            status = CONVERGED
    return AMResult(pt.F, it, gnorm, status, trace)


def admm_solve(plant, gamma, spec: PenaltySpec, F_init, opts: AdmmOptions | None = None,
               G_init=None, Lambda_init=None) -> AdmmState:
    """Run ADMM at one value of ``gamma``.

    ``G_init`` defaults to ``F_init`` and ``Lambda_init`` to zero. Reaching
    ``max_iter`` is reported through ``status``, never raised.
    """
    opts = opts or AdmmOptions()
    rho = opts.rho
    F = np.array(F_init, dtype=float)
    G = F.copy() if G_init is None else np.array(G_init, dtype=float)
    Lam = np.zeros_like(F) if Lambda_init is None else np.array(Lambda_init, dtype=float)
    state = AdmmState(F, G, Lam)
    # grad J(F) + Lambda equals the inner gradient plus rho (G_old - G_new):
    # the inner tolerance follows the outer progress and reaches rho * eps_stop
    # by the time the stopping test can pass, so that test implies stationarity
    r_change = np.inf
    for k in range(1, opts.max_iter + 1):
        inner_tol = max(rho * opts.eps_stop, 0.1 * rho * r_change)
        am = f_min_anderson_moore(plant, G - Lam / rho, rho, F, opts, inner_tol)
        F = am.F
        state.am_iters += am.iters
        G_new = prox(ProxProblem(F + Lam / rho, gamma, rho, spec))
        Lam = Lam + rho * (F - G_new)
        r_primal = float(np.linalg.norm(F - G_new))
        r_change = float(np.linalg.norm(G_new - G))
        G = G_new
        state.history.append((r_primal, r_change))
        state.F, state.G, state.Lambda, state.iter = F, G, Lam, k
        state.primal_residual, state.g_change = r_primal, r_change
        # small residuals after a truncated F-step only mean F stopped moving
        if (r_primal <= opts.eps_stop and r_change <= opts.eps_stop
                and am.status == CONVERGED):
            state.status = CONVERGED
            return state
    state.status = NOT_CONVERGED
    log.info("ADMM at gamma=%g hit max_iter=%d (primal %.2e, change %.2e)",
             gamma, opts.max_iter, state.primal_residual, state.g_change)
    return state


class Certificate(NamedTuple):
    primal: float
    stationarity: float
    subgradient_violation: float

    def max(self) -> float:
        return max(self)


def critical_point_certificate(plant, state: AdmmState, gamma, spec: PenaltySpec) -> Certificate:
    """Residuals of the critical-point conditions for a weighted-l1 problem.

    ``F = G``, ``grad J(F) + Lambda = 0`` and ``Lambda in gamma dg(G)``. For
    a blockwise penalty the subdifferential is tested per block.
    """
    if spec.kind != WEIGHTED_L1:
        raise ValueError("the certificate applies to weighted-l1 penalties only")
    F, G, Lam = state.F, state.G, state.Lambda
    primal = float(np.linalg.norm(F - G))
    try:
        stat = float(np.linalg.norm(H2Point(plant, F).grad + Lam))
    except StabilityError:
        stat = float("inf")
    W = spec.weight_array(G.shape)
    if spec.partition is None:
        zero = G == 0
        viol_zero = np.abs(Lam) - gamma * W
        viol_nz = np.abs(Lam - gamma * W * np.sign(G))
    else:
        part = spec.partition
        gn = part.block_norms(G)
        zero = gn == 0
        viol_zero = part.block_norms(Lam) - gamma * W
        with np.errstate(divide="ignore", invalid="ignore"):
            unit = G / part.expand(np.where(zero, 1.0, gn))
        viol_nz = part.block_norms(Lam - part.expand(gamma * W) * unit)
    v = 0.0
    if np.any(zero):
        v = max(v, float(np.max(viol_zero[zero])))
    if np.any(~zero):
        v = max(v, float(np.max(viol_nz[~zero])))
    return Certificate(primal, stat, max(0.0, v))
