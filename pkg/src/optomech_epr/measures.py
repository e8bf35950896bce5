"""Quadrature covariances, logarithmic negativity and two-mode squeezing.

Quadratures are ``x = (z + z^dag)/sqrt(2)`` and ``p = (z - z^dag)/(i sqrt(2))``,
so the vacuum variance is 1/2 and the collective two-mode vacuum level is 1.
Mode index 0 is the cavity; mechanical mode ``j`` (0-based) is mode ``j + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .exceptions import NonPhysicalStateError
from .steadystate import SteadyStateSolution, frame_transform

PHYS_TOL = 1e-9
#: raw negativities below this are round-off
EN_ATOL = 1e-12
_GRID = 64

_T1 = np.array([[1.0, 1.0], [-1j, 1j]]) / np.sqrt(2.0)


@dataclass(frozen=True)
class QuadratureCovariance:
    """Real symmetric covariance over ``(x_1, p_1, ..., x_n, p_n)``."""

    sigma: np.ndarray
    modes: tuple
    #: smallest eigenvalue of ``sigma + i Omega / 2``
    min_uncertainty_eig: float

    @property
    def physical(self) -> bool:
        return self.min_uncertainty_eig >= -PHYS_TOL


def symplectic_form(n: int) -> np.ndarray:
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def uncertainty_min_eig(sigma) -> float:
    n = sigma.shape[0] // 2
    return float(np.linalg.eigvalsh(sigma + 0.5j * symplectic_form(n)).min())


def symplectic_eigenvalues(sigma) -> np.ndarray:
    n = sigma.shape[0] // 2
    ev = np.linalg.eigvals(1j * symplectic_form(n) @ sigma)
    return np.sort(np.abs(ev.real))[::2]


def _moments(V, t):
    if isinstance(V, SteadyStateSolution):
        return V.evaluate(t)
    return np.asarray(V)


def to_quadrature_cm(V, mode_subset, t=0.0) -> QuadratureCovariance:
    """Reduced, symmetrized quadrature covariance of the selected modes.

    ``V`` is a moment matrix ``<z z^T>`` or a :class:`SteadyStateSolution`
    (evaluated at ``t``). Violations of the uncertainty relation are recorded
    in ``min_uncertainty_eig``, not raised.
    """
    V = _moments(V, t)
    modes = tuple(int(k) for k in mode_subset)
    idx = np.ravel([(2 * k, 2 * k + 1) for k in modes])
    sub = V[np.ix_(idx, idx)]
    T = np.kron(np.eye(len(modes)), _T1)
    W = T @ sub @ T.T
    sigma = 0.5 * (W + W.T).real
    return QuadratureCovariance(sigma, modes, uncertainty_min_eig(sigma))


def _sigma(cm):
    return cm.sigma if isinstance(cm, QuadratureCovariance) else np.asarray(cm, dtype=float)


def log_negativity_raw(sigma) -> float:
    """``-ln(2 nu)`` of the partially transposed state, without the clip at zero.

    Positive values are the logarithmic negativity; negative values measure
    the distance from the entangled region and give optimizers a slope.
    """
    s = _sigma(sigma)
    if s.shape != (4, 4):
        raise ValueError(f"need a 4x4 two-mode covariance, got {s.shape}")
    A, B, C = s[:2, :2], s[2:, 2:], s[:2, 2:]
    det_s = np.linalg.det(s)
    tilde = np.linalg.det(A) + np.linalg.det(B) - 2.0 * np.linalg.det(C)
    disc = tilde ** 2 - 4.0 * det_s
    scale = max(tilde ** 2, 1.0)
    if disc < -1e-10 * scale or det_s < 0:
        raise NonPhysicalStateError(
            f"partially transposed spectrum is complex (disc={disc:.3e}, det={det_s:.3e}); "
            f"min eig of sigma + i Omega/2 = {uncertainty_min_eig(s):.3e}")
    # smaller root via the product of the roots; avoids cancellation when strongly squeezed
    nu2 = 2.0 * det_s / (tilde + np.sqrt(max(disc, 0.0))) if tilde > 0 else 0.0
    if nu2 <= 0:
        raise NonPhysicalStateError(f"non-positive symplectic eigenvalue squared {nu2:.3e}")
    return float(-0.5 * np.log(4.0 * nu2))


def logarithmic_negativity(sigma, base=np.e) -> float:
    """Logarithmic negativity of a two-mode Gaussian state (natural log by default).

    Values within round-off of zero (separable states on the boundary, such
    as the vacuum) are reported as exactly 0.
    """
    raw = log_negativity_raw(sigma)
    if raw <= EN_ATOL:
        return 0.0
    return float(raw / np.log(base))


def _phase_vector(theta1, theta2):
    theta1, theta2 = np.asarray(theta1), np.asarray(theta2)
    return np.stack(np.broadcast_arrays(np.cos(theta1), -np.sin(theta1),
                                        np.cos(theta2), -np.sin(theta2)), axis=-1)


def _pair_sigma(V, pair, t):
    if isinstance(V, QuadratureCovariance):
        return V.sigma
    j, k = pair
    return to_quadrature_cm(V, (j + 1, k + 1), t).sigma


def variance_from_sigma(sigma, theta1, theta2):
    """``<X^2>`` of ``X = sum_j (b_j e^{i th_j} + h.c.)/sqrt(2)`` from a 4x4 covariance."""
    u = _phase_vector(theta1, theta2)
    return np.einsum("...i,ij,...j->...", u, sigma, u)


def two_mode_variance(V, theta1, theta2, t=0.0, pair=(0, 1)) -> float:
    """Variance of the collective quadrature of two mechanical modes.

    ``V`` is a moment matrix, a solution, or a two-mode
    :class:`QuadratureCovariance`; ``pair`` holds 0-based mechanical indices.
    """
    return float(variance_from_sigma(_pair_sigma(V, pair, t), theta1, theta2))


def canonical_phases(theta1, theta2):
    """Representative with ``theta1`` in ``[0, pi)``; ``X`` only flips sign under a joint pi shift."""
    theta1, theta2 = float(theta1) % (2 * np.pi), float(theta2) % (2 * np.pi)
    if theta1 >= np.pi:
        theta1, theta2 = theta1 - np.pi, (theta2 - np.pi) % (2 * np.pi)
    return theta1, theta2


def optimal_phases(V, t=0.0, pair=(0, 1), grid=_GRID):
    """Phases minimizing the two-mode variance: coarse grid, then local polish.

    Returns ``(theta1, theta2, var_min)``.
    """
    sigma = _pair_sigma(V, pair, t)
    th = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    vals = variance_from_sigma(sigma, th[:, None], th[None, :])
    span = vals.max() - vals.min()
    if span <= 1e-12 * max(abs(vals.max()), 1.0):
        return 0.0, 0.0, float(vals.min())
    i, k = np.unravel_index(np.argmin(vals), vals.shape)
    res = minimize(lambda x: variance_from_sigma(sigma, x[0], x[1]), x0=[th[i], th[k]],
                   method="BFGS", jac=lambda x: _variance_grad(sigma, x),
                   options={"gtol": 1e-12})
    best = res.x if res.fun <= vals[i, k] else np.array([th[i], th[k]])
    theta1, theta2 = canonical_phases(*best)
    return theta1, theta2, float(variance_from_sigma(sigma, theta1, theta2))


def _variance_grad(sigma, x):
    u = _phase_vector(x[0], x[1])
    du1 = np.array([-np.sin(x[0]), -np.cos(x[0]), 0.0, 0.0])
    du2 = np.array([0.0, 0.0, -np.sin(x[1]), -np.cos(x[1])])
    g = 2.0 * sigma @ u
    return np.array([du1 @ g, du2 @ g])


def purity(sigma) -> float:
    """Purity ``1 / (2^n sqrt(det sigma))`` of an n-mode Gaussian state."""
    s = _sigma(sigma)
    n = s.shape[0] // 2
    return float(1.0 / (2.0 ** n * np.sqrt(np.linalg.det(s))))


@dataclass(frozen=True)
class EntanglementReport:
    E_N: float
    theta1: float
    theta2: float
    var_min: float
    var_orth: float
    purity: float
    stable: bool
    min_uncertainty_eig: float
    pair: tuple = (0, 1)
    t: float = 0.0

    @property
    def squeezing_db(self) -> float:
        """Two-mode squeezing below the collective vacuum level, in dB."""
        return float(-10.0 * np.log10(self.var_min))

    def as_dict(self) -> dict:
        return {"E_N": self.E_N, "var_min": self.var_min, "var_orth": self.var_orth,
                "theta1": self.theta1, "theta2": self.theta2, "purity": self.purity,
                "squeezing_db": self.squeezing_db, "stable": self.stable,
                "min_uncertainty_eig": self.min_uncertainty_eig}


def entanglement_report(sol: SteadyStateSolution, t=0.0, pair=(0, 1),
                        base=np.e) -> EntanglementReport:
    """All two-mode figures of merit for a pair of mechanical modes (0-based).

    Phases refer to the squeezed-field rotating frame, so they are comparable
    across regimes and evaluation times.
    """
    j, k = pair
    cm = to_quadrature_cm(frame_transform(sol, t), (j + 1, k + 1))
    E_N = logarithmic_negativity(cm, base=base)
    theta1, theta2, var_min = optimal_phases(cm)
    var_orth = float(variance_from_sigma(cm.sigma, theta1 + np.pi / 2, theta2 - np.pi / 2))
    return EntanglementReport(E_N=E_N, theta1=theta1, theta2=theta2, var_min=var_min,
                              var_orth=var_orth, purity=purity(cm), stable=True,
                              min_uncertainty_eig=cm.min_uncertainty_eig,
                              pair=(j, k), t=float(t))
