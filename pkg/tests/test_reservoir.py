"""Reservoir kernels, spectrum and broadband moments.

Oracles: numerical quadrature of the scalar kernels and closed-form scalar
resolvents, both independent of the implementation's algebra.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from optomech_epr.exceptions import ResonantPoleError
from optomech_epr.model import OpoParams, drift_matrix_full
from optomech_epr.reservoir import (broadband_moments, squeezing_db, squeezing_spectrum,
                                    steady_kernels, transient_kernels, v_kernel)

OPO = OpoParams(0.5, 0.9)

opos = st.builds(
    lambda kc, x, loss: OpoParams(x * kc, kc, loss * kc),
    st.floats(0.1, 3.0), st.floats(0.0, 0.95), st.floats(0.0, 1.0))


def test_kernel_values_at_zero():
    # 0.225 * (1/0.4 -+ 1/1.4)
    assert v_kernel(OPO, 0.0, -1) == pytest.approx(0.40178571428571425, rel=1e-12)
    assert v_kernel(OPO, 0.0, +1) == pytest.approx(0.7232142857142857, rel=1e-12)


def test_kernel_trivial_limits():
    assert v_kernel(OpoParams(0.0, 0.9), 1.3, +1) == 0.0
    assert abs(v_kernel(OPO, 200.0, -1)) < 1e-30
    with pytest.raises(ValueError):
        v_kernel(OPO, 0.0, 0)


@given(opos, st.floats(0.0, 20.0))
def test_kernel_even_and_decreasing(opo, tau):
    for s in (+1, -1):
        assert v_kernel(opo, tau, s) == v_kernel(opo, -tau, s)
        assert v_kernel(opo, tau + 0.1, s) <= v_kernel(opo, tau, s) + 1e-15


def test_spectrum_values():
    assert squeezing_spectrum(OPO, 0.0) == pytest.approx(1 - 1.8 / 1.96, rel=1e-12)
    assert squeezing_spectrum(OPO, 0.0) == pytest.approx(0.081633, abs=1e-6)
    assert squeezing_db(OPO) == pytest.approx(10.88136088700552, rel=1e-12)
    assert squeezing_spectrum(OpoParams(0.0, 0.9), 3.0) == 1.0
    assert squeezing_spectrum(OPO, 1e6) == pytest.approx(1.0, abs=1e-11)
    assert squeezing_db(OpoParams(0.0, 0.9)) == 0.0


def test_source_loss_gives_reported_squeezing():
    # 10% of the source linewidth lost internally
    assert squeezing_db(OpoParams(0.5, 0.9, 0.09)) == pytest.approx(7.6, abs=0.05)


def test_spectrum_matches_kernel_fourier_transform():
    """S(w) = 1 + 2 int (v_- - v_+)(tau) cos(w tau) dtau over the real line."""
    for w in (0.0, 0.7, 2.5):
        f = lambda t: (v_kernel(OPO, t, -1) - v_kernel(OPO, t, +1)) * np.cos(w * t)  # noqa: E731
        val, _ = quad(f, 0, np.inf, epsabs=1e-13, limit=400)
        assert 1 + 4 * val == pytest.approx(squeezing_spectrum(OPO, w), abs=1e-9)


def test_broadband_moments_reference():
    bb = broadband_moments(OPO)
    assert bb.nbar == pytest.approx(2.582908, abs=1e-5)
    assert bb.mbar == pytest.approx(3.042092, abs=1e-5)
    assert bb.nbar_s == 0.0
    assert bb.mbar ** 2 == pytest.approx(bb.nbar * (bb.nbar + 1), abs=1e-8)


def test_broadband_moments_are_kernel_integrals():
    for s, target in ((-1, broadband_moments(OPO).nbar), (+1, broadband_moments(OPO).mbar)):
        val, _ = quad(lambda t: v_kernel(OPO, t, s), 0, np.inf, epsabs=1e-13)
        assert 2 * val == pytest.approx(target, rel=1e-10)


def test_broadband_trivial_cases():
    assert broadband_moments(OpoParams(0.0, 0.9))[:3] == (0.0, 0.0, 0.0)
    full_loss = broadband_moments(OpoParams(0.5, 0.9, 0.9))
    assert full_loss.nbar == 0.0 and full_loss.mbar == 0.0 and full_loss.nbar_s == 0.0


@settings(max_examples=200)
@given(opos)
def test_broadband_invariants(opo):
    bb = broadband_moments(opo)
    assert bb.mbar ** 2 <= bb.nbar * (bb.nbar + 1) * (1 + 1e-12) + 1e-14
    assert bb.nbar_s >= 0
    # S(0) = 2 nbar + 1 - 2 mbar holds for every amount of source loss
    assert squeezing_spectrum(opo, 0.0) == pytest.approx(2 * bb.nbar + 1 - 2 * bb.mbar,
                                                          rel=1e-9, abs=1e-12)
    if opo.kappa_c_prime == 0:
        assert bb.nbar_s == 0
    elif opo.kappa_c_prime > 1e-6 and bb.mbar > 1e-6:
        assert bb.nbar_s > 0


def test_steady_kernels_scalar_zero_drift():
    K = steady_kernels(np.zeros((1, 1)), OPO, 0.0)
    bb = broadband_moments(OPO)
    assert K.Nbar_plus[0, 0] == pytest.approx(bb.nbar, rel=1e-12)
    assert K.Mbar_minus[0, 0] == pytest.approx(bb.mbar, rel=1e-12)


def test_steady_kernels_scalar_decay():
    kappa = 0.3
    K = steady_kernels(np.array([[-kappa]]), OPO, 0.0)
    rm, rp, pref = 0.4, 1.4, 0.45
    assert K.Nbar_plus[0, 0] == pytest.approx(pref * (1 / (rm * (rm + kappa)) - 1 / (rp * (rp + kappa))))
    assert K.Mbar_plus[0, 0] == pytest.approx(pref * (1 / (rm * (rm + kappa)) + 1 / (rp * (rp + kappa))))


def test_steady_kernels_with_shift_scalar():
    eps, lam = 0.7, -0.2 + 0.5j
    K = steady_kernels(np.array([[lam]]), OPO, eps)
    for tag, sgn in (("plus", 1), ("minus", -1)):
        expect = 0.45 * (1 / (0.4 * (0.4 - lam + sgn * 1j * eps))
                         - 1 / (1.4 * (1.4 - lam + sgn * 1j * eps)))
        assert getattr(K, "Nbar_" + tag)[0, 0] == pytest.approx(expect, rel=1e-12)


def test_kernels_large_bandwidth_limit(ref):
    A = drift_matrix_full(ref)
    bb = broadband_moments(OPO)
    for s in (1e3, 1e5):
        # scale r_+- by s while chi * kappa_c / r^2 stays fixed
        opo = OpoParams(0.5 * s, 0.9 * s)
        K = steady_kernels(A, opo, ref.freq.epsilon_L)
        err = np.abs(K.Nbar_plus - bb.nbar * np.eye(6)).max() / bb.nbar
        # leading correction is O(|A| / r_-), with |A| ~ 1 and r_- = 0.4 s
        assert err < 10.0 / s


def test_steady_kernels_basis_covariance(ref):
    A = drift_matrix_full(ref)
    rng = np.random.default_rng(3)
    P = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)) + 3 * np.eye(6)
    Pi = np.linalg.inv(P)
    K1 = steady_kernels(P @ A @ Pi, OPO, 1.0)
    K0 = steady_kernels(A, OPO, 1.0)
    for a, b in zip(K1, K0):
        np.testing.assert_allclose(a, P @ b @ Pi, atol=1e-11)


def test_resonant_pole_detected():
    # eigenvalue r_- sits on the reservoir pole when eps = 0
    with pytest.raises(ResonantPoleError) as exc:
        steady_kernels(np.array([[0.4]]), OPO, 0.0)
    assert exc.value.shift == pytest.approx(0.4)


def test_transient_kernels_limits(ref):
    A = drift_matrix_full(ref)
    for K in transient_kernels(A, OPO, 1.0, 0.0):
        assert np.abs(K).max() == 0.0
    late = transient_kernels(A, OPO, 1.0, 200.0)
    for a, b in zip(late, steady_kernels(A, OPO, 1.0)):
        np.testing.assert_allclose(a, b, atol=1e-10)


def test_transient_kernels_scalar_closed_form():
    t = 1.7
    K = transient_kernels(np.zeros((1, 1)), OPO, 0.0, t)
    rm, rp, pref = 0.4, 1.4, 0.45
    assert K.Nbar_plus[0, 0] == pytest.approx(
        pref * ((1 - np.exp(-rm * t)) / rm ** 2 - (1 - np.exp(-rp * t)) / rp ** 2), rel=1e-12)
    assert K.Mbar_plus[0, 0] == pytest.approx(
        pref * ((1 - np.exp(-rm * t)) / rm ** 2 + (1 - np.exp(-rp * t)) / rp ** 2), rel=1e-12)
