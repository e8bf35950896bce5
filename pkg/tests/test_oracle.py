"""Brute-force integrators and their agreement with the analytic steady states."""

import numpy as np
import pytest

from optomech_epr.model import SystemModel, drift_matrix_full
from optomech_epr.oracle import (default_dt, diffusion_at, formal_solution, integrate_cascaded,
                                 integrate_covariance, integrate_covariance_direct,
                                 slowest_decay_time, thermal_moments, vacuum_moments)
from optomech_epr.steadystate import diffusion_pieces, steady_state


def _rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


@pytest.fixture(scope="module")
def lossy():
    """Strongly coupled, lossy, fast-decaying model for the cascaded check."""
    return SystemModel.build(kappa_a=0.6, omega=[1.15, 0.85], G=[0.15, 0.13], chi=0.5,
                             kappa_c=0.9, epsilon_L=1.0, epsilon_a=0.3, gamma=0.02, n_T=1,
                             kappa_a_prime=0.1, kappa_c_prime=0.1)


def test_diffusion_at_zero_and_without_squeezing(ref):
    A = drift_matrix_full(ref)
    np.testing.assert_allclose(diffusion_at(ref, A, 0.0), diffusion_pieces(ref).C0, atol=1e-15)
    cold = ref.replace(opo=ref.opo.__class__(0.0, 0.9))
    for t in (0.0, 2.3, 40.0):
        np.testing.assert_allclose(diffusion_at(cold, A, t), diffusion_pieces(cold).C0)


def test_diffusion_long_time_limit(ref):
    """Late diffusion reproduces the steady sources through the Lyapunov equations."""
    A = drift_matrix_full(ref)
    sol = steady_state(ref, "full")
    t = 150.0
    Bt = diffusion_at(ref, A, t)
    ph = np.exp(-2j * t)
    # dV/dt of the analytic orbit equals A V + V A^T + B(t)
    V = sol.evaluate(t)
    dV = -2j * sol.Vminus * ph + 2j * sol.Vplus / ph
    np.testing.assert_allclose(A @ V + V @ A.T + Bt, dV, atol=1e-9)


def test_vacuum_stays_vacuum():
    m = SystemModel.build(kappa_a=0.1, omega=[1.01, 0.99], G=[0.0, 0.0], chi=0.0, kappa_c=0.9,
                          epsilon_L=1.0, gamma=2e-5, n_T=0.0)
    V = integrate_covariance(m, vacuum_moments(6), 30.0)
    np.testing.assert_allclose(V, vacuum_moments(6), atol=1e-12)


def test_thermal_moments(ref):
    V = thermal_moments(ref)
    assert V[0, 1] == 1 and V[2, 3] == 11 and V[3, 2] == 10


def test_default_dt(ref):
    A = drift_matrix_full(ref)
    assert default_dt(ref, A) == pytest.approx(0.01 / max(np.abs(np.linalg.eigvals(A)).max(),
                                                           1.4, 2.0))


def test_stays_on_the_analytic_orbit(lossy):
    sol = steady_state(lossy, "full")
    t0 = 120.0  # transient kernels have converged (r_- t0 > 40)
    V = integrate_covariance(lossy, sol.evaluate(t0), t0 + 25.0, t_start=t0)
    assert _rel(V, sol.evaluate(t0 + 25.0)) < 1e-6


def test_commutators_along_trajectory(lossy):
    V = integrate_covariance(lossy, thermal_moments(lossy), 7.3)
    for k in range(0, 6, 2):
        assert abs(V[k, k + 1] - V[k + 1, k] - 1.0) < 1e-10


def test_rk4_convergence_order(lossy):
    V0 = thermal_moments(lossy)
    ends = [integrate_covariance(lossy, V0, 6.0, dt=h) for h in (0.2, 0.1, 0.05)]
    ratio = np.linalg.norm(ends[0] - ends[1]) / np.linalg.norm(ends[1] - ends[2])
    assert 13.0 < ratio < 19.0


def test_eigen_and_direct_rk4_agree(ref):
    V0 = thermal_moments(ref)
    a = integrate_covariance(ref, V0, 3.0)
    b = integrate_covariance_direct(ref, V0, 3.0)
    assert _rel(a, b) < 1e-10


def test_formal_solution_agrees_with_rk4(lossy):
    V0 = thermal_moments(lossy)
    a = formal_solution(lossy, V0, 4.0)
    b = integrate_covariance(lossy, V0, 4.0)
    assert _rel(a, b) < 1e-9


def test_cascaded_simulation_confirms_full_steady_state(lossy):
    """Explicit source-mode simulation, with no reservoir kernels, lands on the full solution."""
    A = drift_matrix_full(lossy)
    T = np.ceil(25 * slowest_decay_time(A) / np.pi) * np.pi
    V = integrate_cascaded(lossy, T)
    full = steady_state(lossy, "full").evaluate(T)
    bb = steady_state(lossy, "broadband").evaluate(T)
    assert _rel(V, full) < 1e-7
    # the broadband model is measurably different here, so the check has teeth
    assert _rel(V, bb) > 1e-3
