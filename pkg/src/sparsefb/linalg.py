"""Dense linear-algebra kernels.

Real Schur forms, Lyapunov and Sylvester solvers, the continuous-time
algebraic Riccati equation, and a Hurwitz test. Lyapunov equations are
solved Bartels-Stewart style: reduce the coefficient to real Schur form,
solve the quasi-triangular Sylvester equation (LAPACK ``trsyl``), and
transform back. :class:`LyapunovSolver` keeps the Schur factors so that
several right-hand sides with the same closed-loop matrix share one
decomposition, which is the common case in the H2 gradient and Hessian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .errors import (
    DefinitenessError,
    DimensionError,
    NumericalError,
    StabilityError,
    SynthesisError,
)

__all__ = [
    "SchurForm",
    "LyapunovSolver",
    "schur_form",
    "spectral_abscissa",
    "solve_lyapunov",
    "solve_spd_sylvester",
    "solve_are",
]


def _as_square(M, name="M"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NumericalError(f"{name} has non-finite entries")
    return M


@dataclass(frozen=True)
class SchurForm:
    """Real Schur decomposition ``M = U T U^T``.

    ``quasi_triangular`` is block upper triangular with 1x1 and 2x2 diagonal
    blocks; ``orthogonal`` is ``U``.
    """

    orthogonal: np.ndarray
    quasi_triangular: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        T = self.quasi_triangular
        n = T.shape[0]
        out = np.empty(n, dtype=complex)
        i = 0
        while i < n:
            if i + 1 < n and T[i + 1, i] != 0.0:
                out[i:i + 2] = np.linalg.eigvals(T[i:i + 2, i:i + 2])
                i += 2
            else:
                out[i] = T[i, i]
                i += 1
        return out

    def reconstruct(self) -> np.ndarray:
        U = self.orthogonal
        return U @ self.quasi_triangular @ U.T


def schur_form(M) -> SchurForm:
    M = _as_square(M)
    try:
        T, U = sla.schur(M, output="real")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"Schur decomposition failed: {exc}") from exc
    return SchurForm(orthogonal=U, quasi_triangular=T)


def spectral_abscissa(M) -> float:
    """Largest real part over the eigenvalues of ``M``.

    A matrix is Hurwitz (a gain is stabilizing) iff the result is negative.
    """
    M = _as_square(M)
    if M.shape[0] == 0:
        return -np.inf
    try:
        ev = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue iteration failed: {exc}") from exc
    return float(np.max(ev.real))


class LyapunovSolver:
    """Lyapunov solves that share the Schur form of one Hurwitz matrix.

    ``observability(C)`` returns ``P`` with ``Acl^T P + P Acl = -C`` and
    ``controllability(C)`` returns ``L`` with ``Acl L + L Acl^T = -C``.
    Construction raises :class:`StabilityError` if ``Acl`` is not Hurwitz.
    """

    def __init__(self, Acl, schur: SchurForm | None = None):
        self.Acl = _as_square(Acl, "Acl")
        self.schur = schur if schur is not None else schur_form(self.Acl)
        ev = self.schur.eigenvalues()
        self.abscissa = float(np.max(ev.real)) if ev.size else -np.inf
        if not self.abscissa < 0.0:
            raise StabilityError(
                f"matrix is not Hurwitz (spectral abscissa {self.abscissa:.3e})"
            )

    def _solve(self, C, trana, tranb, symmetric):
        C = np.asarray(C, dtype=float)
        n = self.Acl.shape[0]
        if C.shape != (n, n):
            raise DimensionError(f"right-hand side must be {n}x{n}, got {C.shape}")
        U = self.schur.orthogonal
        T = self.schur.quasi_triangular
        Chat = U.T @ C @ U
        X, scale, info = lapack.dtrsyl(T, T, -Chat, trana=trana, tranb=tranb)
        if info < 0:
            raise NumericalError(f"trsyl argument error (info={info})")
        # info == 1 flags a perturbed (near-singular) problem; Hurwitz T
        # rules that out except for extreme ill-conditioning.
        X = U @ (X / scale) @ U.T
        if symmetric:
            X = 0.5 * (X + X.T)
        return X

    def observability(self, C, symmetric=True):
        return self._solve(C, "T", "N", symmetric)

    def controllability(self, C, symmetric=True):
        return self._solve(C, "N", "T", symmetric)


def solve_lyapunov(Acl, Rhs) -> np.ndarray:
    """Solve ``Acl^T P + P Acl = -Rhs`` for symmetric ``Rhs``.

    Raises :class:`StabilityError` when ``Acl`` is not Hurwitz, in which
    case the solution would not be the (PSD) Gramian.
    """
    Rhs = np.asarray(Rhs, dtype=float)
    Acl = _as_square(Acl, "Acl")
    if Rhs.shape != Acl.shape:
        raise DimensionError(f"Rhs shape {Rhs.shape} does not match Acl {Acl.shape}")
    return LyapunovSolver(Acl).observability(Rhs)


def _sym_eig(M, name):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    return np.linalg.eigh(0.5 * (M + M.T))


def solve_spd_sylvester(R, L, rho, Rhs, clip_l: bool = False) -> np.ndarray:
    """Solve ``2 R F L + rho F = Rhs`` for ``F``.

    ``R`` must be symmetric positive definite and ``L`` symmetric PSD, so
    that in the joint eigenbasis every coefficient ``2 lam_R lam_L + rho``
    is positive and the solution is unique. With ``clip_l`` the negative
    eigenvalues of ``L`` are set to zero instead of raising; use it for a
    Gramian that is PSD in exact arithmetic but ill-conditioned.
    """
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    lam_r, V_r = _sym_eig(R, "R")
    lam_l, V_l = _sym_eig(L, "L")
    Rhs = np.asarray(Rhs, dtype=float)
    if Rhs.shape != (lam_r.size, lam_l.size):
        raise DimensionError(
            f"Rhs must be {lam_r.size}x{lam_l.size}, got {Rhs.shape}"
        )
    if lam_r.size and lam_r.min() <= 0.0:
        raise DefinitenessError("R is not positive definite")
    tol = 1e-10 * max(1.0, float(np.max(np.abs(lam_l)))) if lam_l.size else 0.0
    if lam_l.size and lam_l.min() < -tol and not clip_l:
        raise DefinitenessError("L is not positive semidefinite")
    lam_l = np.clip(lam_l, 0.0, None)
    Rhat = V_r.T @ Rhs @ V_l
    Fhat = Rhat / (2.0 * np.outer(lam_r, lam_l) + rho)
    return V_r @ Fhat @ V_l.T


def solve_are(plant):
    """Stabilizing solution of ``A^T P + P A + Q - P B2 R^-1 B2^T P = 0``.

    The stable invariant subspace of the Hamiltonian matrix is extracted
    with an ordered real Schur decomposition; one Newton-Kleinman step then
    refines ``P``. Returns ``(P, Fc)`` with ``Fc = R^-1 B2^T P``.
    """
    A, B2, Q, R = plant.A, plant.B2, plant.Q, plant.R
    n = A.shape[0]
    Rinv_Bt = np.linalg.solve(R, B2.T)
    S = B2 @ Rinv_Bt
    H = np.block([[A, -S], [-Q, -A.T]])
    try:
        T, Z, sdim = sla.schur(H, output="real", sort="lhp")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SynthesisError(f"Hamiltonian Schur decomposition failed: {exc}") from exc
    if sdim != n:
        raise SynthesisError(
            f"Hamiltonian has {sdim} stable eigenvalues, expected {n}; "
            "check stabilizability and detectability"
        )
    Z11, Z21 = Z[:n, :n], Z[n:, :n]
    if np.linalg.cond(Z11) > 1e12:
        raise SynthesisError("stable invariant subspace is not a graph subspace")
    P = np.linalg.solve(Z11.T, Z21.T).T
    P = 0.5 * (P + P.T)

    # Newton-Kleinman refinement
    Fk = Rinv_Bt @ P
    try:
        P = LyapunovSolver(A - B2 @ Fk).observability(Q + Fk.T @ R @ Fk)
    except StabilityError as exc:
        raise SynthesisError(f"Riccati gain is not stabilizing: {exc}") from exc
    Fc = Rinv_Bt @ P
    if not spectral_abscissa(A - B2 @ Fc) < 0.0:
        raise SynthesisError("Riccati gain is not stabilizing")
    return P, Fc


def are_residual(plant, P) -> np.ndarray:
    A, B2, Q, R = plant.A, plant.B2, plant.Q, plant.R
    return A.T @ P + P @ A + Q - P @ B2 @ np.linalg.solve(R, B2.T @ P)
