import numpy as np
import pytest

from conftest import random_plant, stabilizing_gain
from oracles import golden_section
from sparsefb.admm import (CONVERGED, ROUNDOFF, AdmmOptions, AdmmState, admm_solve,
                           critical_point_certificate, f_min_anderson_moore)
from sparsefb.errors import StabilityError
from sparsefb.h2 import objective
from sparsefb.linalg import solve_are, spectral_abscissa
from sparsefb.model import BlockPartition, PenaltySpec
from sparsefb.path import update_weights


def test_options_validated():
    for bad in (dict(rho=0), dict(eps_stop=-1), dict(max_iter=0), dict(backtrack=1.0)):
        with pytest.raises(ValueError):
            AdmmOptions(**bad)


def test_am_large_rho_stays_put(rng):
    plant = random_plant(rng, 3, 2)
    F0 = stabilizing_gain(rng, plant, 0.3)
    res = f_min_anderson_moore(plant, F0, 1e8, F0)
    assert np.linalg.norm(res.F - F0) <= 1e-3


def test_am_riccati_fixed_point(rng):
    plant = random_plant(rng, 4, 2)
    _, Fc = solve_are(plant)
    for rho in (0.1, 10.0):
        res = f_min_anderson_moore(plant, Fc, rho, Fc)
        assert np.linalg.norm(res.F - Fc) <= 1e-8 * np.linalg.norm(Fc)


def test_am_scalar_matches_golden_section(scalar_plant):
    # J(f) = (1 + f^2) / (2 (f - 1)) for f > 1; minimize J + f^2 / 2
    phi = lambda f: (1 + f * f) / (2 * (f - 1)) + 0.5 * f * f
    f_ref = golden_section(phi, 1.0 + 1e-9, 10.0, tol=1e-12)
    res = f_min_anderson_moore(scalar_plant, [[0.0]], 1.0, [[3.0]],
                               AdmmOptions(am_grad_tol=1e-12, am_max_iter=200))
    assert res.F[0, 0] == pytest.approx(f_ref, abs=1e-6)


def test_am_monotone_and_stabilizing(rng):
    plant = random_plant(rng, 6, 3)
    F0 = stabilizing_gain(rng, plant, 0.5)
    U = F0 + rng.standard_normal(F0.shape)
    res = f_min_anderson_moore(plant, U, 1.0, F0)
    # non-increasing up to the round-off of phi
    assert all(b <= a + ROUNDOFF * abs(a) for a, b in zip(res.phi_trace, res.phi_trace[1:]))
    assert spectral_abscissa(plant.A - plant.B2 @ res.F) < 0


def test_am_rejects_unstable_start(scalar_plant):
    with pytest.raises(StabilityError):
        f_min_anderson_moore(scalar_plant, [[0.0]], 1.0, [[0.0]])


def test_gamma_zero_recovers_riccati(rng):
    plant = random_plant(rng, 5, 2)
    P, Fc = solve_are(plant)
    F0 = stabilizing_gain(rng, plant, 0.3)
    # with gamma = 0 the iteration is a proximal-point method on J; a small
    # rho makes it contract quickly
    st = admm_solve(plant, 0.0, PenaltySpec(), F0, AdmmOptions(rho=1.0, eps_stop=1e-10))
    assert st.status == CONVERGED
    assert np.linalg.norm(st.F - Fc) <= 1e-6 * np.linalg.norm(Fc)
    Jc = np.trace(plant.B1.T @ P @ plant.B1)
    assert abs(objective(plant, st.F) - Jc) <= 1e-8 * Jc


def test_large_gamma_drives_gain_to_zero(rng):
    n, m = 4, 2
    plant = random_plant(rng, n, m)
    plant = type(plant)(-np.eye(n), plant.B1, plant.B2, plant.Q, plant.R)
    _, Fc = solve_are(plant)
    st = admm_solve(plant, 1e4, PenaltySpec(), Fc, AdmmOptions(rho=10.0))
    assert st.status == CONVERGED
    assert not st.G.any()
    assert np.linalg.norm(st.F) <= 1e-4


def test_converged_state_properties(rng):
    plant = random_plant(rng, 5, 3)
    _, Fc = solve_are(plant)
    spec = update_weights(Fc, PenaltySpec())
    st = admm_solve(plant, 0.05, spec, Fc, AdmmOptions(rho=10.0, eps_stop=1e-6))
    assert st.status == CONVERGED
    assert st.primal_residual <= 1e-6
    assert spectral_abscissa(plant.A - plant.B2 @ st.F) < 0
    assert len(st.history) == st.iter


def test_certificate_at_riccati_point(rng):
    plant = random_plant(rng, 4, 2)
    _, Fc = solve_are(plant)
    st = AdmmState(Fc, Fc.copy(), np.zeros_like(Fc))
    cert = critical_point_certificate(plant, st, 0.0, PenaltySpec())
    assert cert.max() <= 1e-8 * np.linalg.norm(Fc)


def test_certificate_reports_violation(rng):
    plant = random_plant(rng, 3, 1)
    _, Fc = solve_are(plant)
    G = Fc.copy()
    G[0, 0] = 0.0
    Lam = np.zeros_like(Fc)
    Lam[0, 0] = 5.0
    cert = critical_point_certificate(plant, AdmmState(Fc, G, Lam), 1.0, PenaltySpec())
    assert cert.subgradient_violation >= 4.0 - 1e-12
    with pytest.raises(ValueError):
        critical_point_certificate(plant, AdmmState(Fc, G, Lam), 1.0, PenaltySpec("cardinality"))


def test_blockwise_certificate_after_convergence(rng):
    plant = random_plant(rng, 4, 2)
    _, Fc = solve_are(plant)
    spec = PenaltySpec(partition=BlockPartition((1, 1), (2, 2)))
    st = admm_solve(plant, 0.3, spec, Fc, AdmmOptions(rho=10.0, eps_stop=1e-7))
    assert st.status == CONVERGED
    cert = critical_point_certificate(plant, st, 0.3, spec)
    assert cert.max() <= 1e-3 * max(1.0, np.linalg.norm(Fc))


def test_unstable_start_rejected(scalar_plant):
    with pytest.raises(StabilityError):
        admm_solve(scalar_plant, 0.1, PenaltySpec(), [[0.5]])
