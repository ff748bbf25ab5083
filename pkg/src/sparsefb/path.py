"""Sparsity/performance trade-off path over an increasing ``gamma`` grid.

Starting from the Riccati gain at ``gamma = 0``, each grid point is solved
by ADMM warm-started from the previous point (gain, sparse iterate and
multiplier). With reweighting on, the weighted-l1 weights at each point are
``1 / (|F_prev| + eps)`` computed from the previous sparse gain. The
sparsity pattern found by ADMM is then frozen and the gain is polished.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .admm import AdmmOptions, Certificate, admm_solve, critical_point_certificate
from .errors import StabilityError
from .h2 import H2Point, objective
from .linalg import solve_are
from .model import WEIGHTED_L1, PenaltySpec, cardinality_report, magnitudes
from .polish import PolishOptions, polish_gain

log = logging.getLogger(__name__)

BASE = "base"


@dataclass(frozen=True)
class PathOptions:
    gamma_grid: Sequence[float] = field(default_factory=lambda: tuple(np.logspace(-4, -1, 50)))
    reweighting: bool = True
    reweight_eps: float = 1e-3
    polish: bool = True
    polish_options: PolishOptions = field(default_factory=PolishOptions)

    def __post_init__(self):
        grid = tuple(float(g) for g in self.gamma_grid)
        if any(g <= 0 for g in grid):
            raise ValueError("gamma grid must be positive; gamma = 0 is the Riccati base point")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("gamma grid must be strictly increasing")
        if not self.reweight_eps > 0:
            raise ValueError("reweight_eps must be positive")
        object.__setattr__(self, "gamma_grid", grid)


@dataclass
class GammaRecord:
    gamma: float
    F_identified: np.ndarray
    mask: np.ndarray
    nnz: int
    nnz_blocks: int
    J_identified: float
    F_polished: np.ndarray
    J_polished: float
    admm_iters: int
    status: str
    certificate: Optional[Certificate] = None
    polish_status: str = ""
    zero_tol: float = 0.0


def update_weights(prev_F, spec: PenaltySpec) -> PenaltySpec:
    """Weights ``1 / (|prev| + eps)`` per entry, or per block Frobenius norm."""
    if spec.kind != WEIGHTED_L1:
        raise ValueError("reweighting applies to weighted-l1 penalties")
    mag = magnitudes(prev_F, spec.partition)
    return spec.with_weights(1.0 / (mag + spec.epsilon_reweight))


@dataclass
class TradeoffPath:
    records: list
    J_c: float
    F_c: np.ndarray

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def nearest(self, gamma) -> GammaRecord:
        return min(self.records[1:] or self.records,
                   key=lambda r: abs(np.log(r.gamma / gamma)) if r.gamma > 0 else np.inf)


def run_path(plant, spec: PenaltySpec, popts: PathOptions | None = None,
             aopts: AdmmOptions | None = None,
             callback: Callable[[GammaRecord], None] | None = None,
             report_partition=None) -> TradeoffPath:
    """Trace the trade-off path; record 0 is the dense Riccati solution.

    ``report_partition`` sets the blocks counted in ``nnz_blocks``; it
    defaults to the penalty's own partition.
    """
    popts = popts or PathOptions()
    part = spec.partition if report_partition is None else report_partition
    aopts = aopts or AdmmOptions()
    _, Fc = solve_are(plant)
    base = H2Point(plant, Fc)
    # the Riccati gain is dense; its small entries are not numerical zeros
    rep = cardinality_report(Fc, part, zero_tol=0.0)
    records = [GammaRecord(0.0, Fc, rep.mask, rep.nnz, rep.nnz_blocks, base.J,
                           Fc, base.J, 0, BASE, zero_tol=rep.zero_tol)]
    if callback:
        callback(records[0])
    spec = spec.with_weights(None) if spec.weights is not None and popts.reweighting else spec
    if spec.epsilon_reweight != popts.reweight_eps:
        spec = replace(spec, epsilon_reweight=popts.reweight_eps)

    F, G, Lam = Fc, Fc, np.zeros_like(Fc)
    prev_sparse = Fc
    for gamma in popts.gamma_grid:
        if popts.reweighting and spec.kind == WEIGHTED_L1:
            spec = update_weights(prev_sparse, spec)
        st = admm_solve(plant, gamma, spec, F, aopts, G_init=G, Lambda_init=Lam)
        F, G, Lam = st.F, st.G, st.Lambda
        prev_sparse = G
        rep = cardinality_report(G, part)
        F_id = G
        J_id = objective(plant, F_id)
        status = st.status
        if not np.isfinite(J_id):
            # the sparse iterate is not stabilizing; fall back to the F iterate
            # restricted to the same pattern if that one is
            status = f"{status};G-unstable"
            F_id = np.where(rep.mask, F, 0.0)
            J_id = objective(plant, F_id)
        if not np.isfinite(J_id):
            # last resort: the F iterate itself, which the F-step keeps
            # stabilizing, reported with its own pattern
            rep = cardinality_report(F, part, zero_tol=0.0)
            F_id, J_id = F, objective(plant, F)
            status = f"{status};F-used"
        cert = None
        if spec.kind == WEIGHTED_L1:
            cert = critical_point_certificate(plant, st, gamma, spec)
        F_pol, J_pol, pstat = F_id, J_id, "skipped"
        if popts.polish and np.isfinite(J_id):
            try:
                res = polish_gain(plant, rep.mask, np.where(rep.mask, F_id, 0.0),
                                  popts.polish_options)
                F_pol, J_pol, pstat = res.F, res.J, res.status
            except StabilityError as exc:
                pstat = f"failed: {exc}"
        rec = GammaRecord(float(gamma), F_id, rep.mask, rep.nnz, rep.nnz_blocks, J_id,
                          F_pol, J_pol, st.iter, status, cert, pstat, rep.zero_tol)
        records.append(rec)
        log.info("gamma=%.4g nnz=%d J_id=%.6g J_pol=%.6g iters=%d %s",
                 gamma, rep.nnz, J_id, J_pol, st.iter, status)
        if callback:
            callback(rec)
    return TradeoffPath(records, base.J, Fc)
