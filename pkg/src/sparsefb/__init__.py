"""Sparse state-feedback design: trade closed-loop H2 performance against
the number of nonzero gains, using ADMM with closed-form proximal steps,
then polish the gain on the identified sparsity pattern."""

from .admm import AdmmOptions, AdmmState, admm_solve, critical_point_certificate, f_min_anderson_moore
from .errors import (DefinitenessError, DimensionError, NumericalError, PlantFileError,
                     SparseFBError, StabilityError, StructureError, SynthesisError)
from .h2 import H2Point, gradient, hessian_apply, is_stabilizing, objective
from .linalg import solve_are, solve_lyapunov, solve_spd_sylvester, spectral_abscissa
from .model import (CARDINALITY, SUM_OF_LOGS, WEIGHTED_L1, BlockPartition, PenaltySpec, Plant,
                    cardinality_report, penalty_value)
from .path import GammaRecord, PathOptions, TradeoffPath, run_path, update_weights
from .polish import PolishOptions, polish_gain
from .problems import biochemical, mass_spring, random_network
from .prox import ProxProblem, prox

__version__ = "0.1.0"

__all__ = [
    "AdmmOptions", "AdmmState", "admm_solve", "critical_point_certificate",
    "f_min_anderson_moore", "DefinitenessError", "DimensionError", "NumericalError",
    "PlantFileError", "SparseFBError", "StabilityError", "StructureError", "SynthesisError",
    "H2Point", "gradient", "hessian_apply", "is_stabilizing", "objective", "solve_are",
    "solve_lyapunov", "solve_spd_sylvester", "spectral_abscissa", "CARDINALITY",
    "SUM_OF_LOGS", "WEIGHTED_L1", "BlockPartition", "PenaltySpec", "Plant",
    "cardinality_report", "penalty_value", "GammaRecord", "PathOptions", "TradeoffPath",
    "run_path", "update_weights", "PolishOptions", "polish_gain", "biochemical",
    "mass_spring", "random_network", "ProxProblem", "prox",
]
