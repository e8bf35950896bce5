"""Quantities derived from the parametric-oscillator output field."""

from __future__ import annotations

import warnings
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .exceptions import ResonantPoleError
from .model import OpoParams
from .lyapunov import propagate_expm

# condition-number ceiling for a shifted resolvent solve
_POLE_RCOND = 1e-13


def v_kernel(opo: OpoParams, tau, sign: int = +1):
    """Reservoir correlation functions.

    ``sign=-1`` gives the excitation-number kernel (normally ordered
    ``<c^dag(t) c(t+tau)>``) and ``sign=+1`` the self-correlation kernel
    ``<c(t) c(t+tau)>``.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    tau = np.abs(np.asarray(tau, dtype=float))
    rm, rp = opo.r_minus, opo.r_plus
    pref = 0.5 * opo.chi * opo.kappa_c_s
    return pref * (np.exp(-rm * tau) / rm + sign * np.exp(-rp * tau) / rp)


def squeezing_spectrum(opo: OpoParams, omega):
    """Noise spectral density of the maximally squeezed output quadrature (vacuum = 1)."""
    omega = np.asarray(omega, dtype=float)
    return 1.0 - 4.0 * opo.chi * opo.kappa_c_s / (opo.r_plus ** 2 + omega ** 2)


def squeezing_db(opo: OpoParams) -> float:
    """Squeezing at the central frequency in dB below vacuum."""
    return float(-10.0 * np.log10(squeezing_spectrum(opo, 0.0)))


class BroadbandMoments(NamedTuple):
    nbar: float
    mbar: float
    nbar_s: float
    #: Bogoliubov squeezing parameter, ``tanh(s) = (nbar - nbar_s) / mbar``
    s: float


def broadband_moments(opo: OpoParams) -> BroadbandMoments:
    """Delta-correlated (infinite bandwidth) equivalent of the reservoir."""
    rm, rp = opo.r_minus, opo.r_plus
    pref = opo.chi * opo.kappa_c_s
    nbar = pref * (1.0 / rm ** 2 - 1.0 / rp ** 2)
    mbar = pref * (1.0 / rm ** 2 + 1.0 / rp ** 2)
    # (2n+1)^2 - 4m^2 = S(0) (2n+1+2m); written as a product it stays
    # non-negative under round-off when the state is pure
    disc = (2 * nbar + 1 - 2 * mbar) * (2 * nbar + 1 + 2 * mbar)
    nbar_s = 0.5 * (np.sqrt(max(disc, 0.0)) - 1.0)
    if opo.kappa_c_prime == 0:
        nbar_s = 0.0
    nbar_s = max(nbar_s, 0.0)
    s = float(np.arctanh((nbar - nbar_s) / mbar)) if mbar > 0 else 0.0
    return BroadbandMoments(float(nbar), float(mbar), float(nbar_s), s)


class ReservoirKernels(NamedTuple):
    Nbar_plus: np.ndarray
    Nbar_minus: np.ndarray
    Mbar_plus: np.ndarray
    Mbar_minus: np.ndarray


def _shifted_solve(A, r, shift, rhs):
    """Solve ``(r I - A + shift I) X = rhs`` by LU, flagging singular poles."""
    d = A.shape[0]
    op = (r + shift) * np.eye(d) - A
    with warnings.catch_warnings():
        # exact singularity is reported below as ResonantPoleError
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(op, check_finite=False)
    diag = np.abs(np.diag(lu))
    if diag.min() <= _POLE_RCOND * max(diag.max(), 1.0):
        raise ResonantPoleError(
            f"shifted resolvent (r={r:g}, shift={shift}) is singular: "
            "a drift eigenvalue sits on a reservoir pole", shift=r + shift)
    return scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)


def steady_kernels(A, opo: OpoParams, epsilon_L: float) -> ReservoirKernels:
    """Matrix-valued reservoir kernels of the exact steady state.

    ``Nbar_pm = chi kappa_c_s [ (r_-(r_- - A pm i eps))^-1 - (r_+(r_+ - A pm i eps))^-1 ]``
    and ``Mbar_pm`` the same with a plus sign between the two resolvents.
    """
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    eye = np.eye(A.shape[0], dtype=complex)
    pref = opo.chi * opo.kappa_c_s
    rm, rp = opo.r_minus, opo.r_plus
    out = {}
    for tag, sgn in (("plus", +1), ("minus", -1)):
        shift = sgn * 1j * epsilon_L
        Rm = _shifted_solve(A, rm, shift, eye) / rm
        Rp = _shifted_solve(A, rp, shift, eye) / rp
        out["N" + tag] = pref * (Rm - Rp)
        out["M" + tag] = pref * (Rm + Rp)
    return ReservoirKernels(out["Nplus"], out["Nminus"], out["Mplus"], out["Mminus"])


def transient_kernels(A, opo: OpoParams, epsilon_L: float, t: float) -> ReservoirKernels:
    """Finite-time kernels; zero at ``t = 0``, tending to :func:`steady_kernels`."""
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    d = A.shape[0]
    eye = np.eye(d, dtype=complex)
    pref = opo.chi * opo.kappa_c_s
    rm, rp = opo.r_minus, opo.r_plus
    out = {}
    for tag, sgn in (("plus", +1), ("minus", -1)):
        shift = sgn * 1j * epsilon_L
        parts = []
        for r in (rm, rp):
            # 1 - exp(-(r - A + shift) t) commutes with the resolvent
            decay = eye - propagate_expm(A - (r + shift) * eye, t)
            parts.append(_shifted_solve(A, r, shift, decay) / r)
        out["N" + tag] = pref * (parts[0] - parts[1])
        out["M" + tag] = pref * (parts[0] + parts[1])
    return ReservoirKernels(out["Nplus"], out["Nminus"], out["Mplus"], out["Mminus"])
