"""Brute-force time integration used to check the analytic steady states.

Three independent routes are provided:

* :func:`integrate_covariance` -- classical RK4 on the moment equation
  ``dV/dt = A V + V A^T + B(t)`` with the exact time-dependent diffusion;
* :func:`formal_solution` -- ``exp(A t) V(0) exp(A^T t)`` plus a quadrature of
  the propagated diffusion (small systems only);
* :func:`integrate_cascaded` -- RK4 on an enlarged system in which the
  parametric oscillator mode is simulated explicitly and feeds the cavity.
  It never uses the reservoir kernels, so it checks them.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad_vec

from .lyapunov import propagate_expm
from .model import SystemModel, drift_matrix_full
from .reservoir import transient_kernels
from .steadystate import diffusion_pieces

_EIG_COND_MAX = 1e8


def vacuum_moments(d: int) -> np.ndarray:
    V = np.zeros((d, d), dtype=complex)
    for i in range(0, d, 2):
        V[i, i + 1] = 1.0
    return V


def thermal_moments(model: SystemModel) -> np.ndarray:
    """Uncoupled state: cavity vacuum, each resonator thermal at its own ``n_T``."""
    V = vacuum_moments(model.dim)
    for j, m in enumerate(model.modes):
        i = 2 + 2 * j
        V[i, i + 1] = m.n_T + 1.0
        V[i + 1, i] = m.n_T
    return V


def diffusion_at(model: SystemModel, A, t: float) -> np.ndarray:
    """Time-dependent diffusion matrix (pump frame), zero transient at ``t = 0``."""
    eps = model.freq.epsilon_L
    P = diffusion_pieces(model)
    K = transient_kernels(A, model.opo, eps, t)
    ph = np.exp(-2j * eps * t)
    return (P.C0
            + 0.5 * (K.Nbar_minus @ P.C12 + P.C12 @ K.Nbar_plus.T)
            + 0.5 * (K.Nbar_plus @ P.C21 + P.C21 @ K.Nbar_minus.T)
            + 0.5 * (K.Mbar_minus @ P.C11 + P.C11 @ K.Mbar_minus.T) * ph
            + 0.5 * (K.Mbar_plus @ P.C22 + P.C22 @ K.Mbar_plus.T) / ph)


def default_dt(model: SystemModel, A=None, safety=0.01) -> float:
    """Step resolving the fastest rate in the problem."""
    if A is None:
        A = drift_matrix_full(model)
    fastest = max(np.max(np.abs(np.linalg.eigvals(A))), model.opo.r_plus,
                  2.0 * abs(model.freq.epsilon_L))
    return safety / fastest


def slowest_decay_time(A) -> float:
    return float(1.0 / np.min(np.abs(np.linalg.eigvals(A).real)))


class _EigenForcing:
    """Diffusion in the eigenbasis of ``A`` as a sum of exponentials.

    With ``A = P diag(lam) P^-1`` and ``V = P W P^T`` the moment equation
    decouples entrywise: ``dW/dt = (lam_i + lam_j) W + F(t)`` with
    ``F(t) = sum_m coef_m * exp(expo_m t)``.
    """

    def __init__(self, model: SystemModel, A):
        lam, P = np.linalg.eig(A)
        if np.linalg.cond(P) > _EIG_COND_MAX:
            raise ValueError("drift matrix is too close to defective for the eigenbasis oracle")
        Pinv = np.linalg.inv(P)
        self.lam, self.P, self.Pinv = lam, P, Pinv
        eps = model.freq.epsilon_L
        opo = model.opo
        pref = opo.chi * opo.kappa_c_s
        pieces = diffusion_pieces(model)
        to_eig = lambda C: Pinv @ C @ Pinv.T  # noqa: E731
        K = {name: to_eig(getattr(pieces, name)) for name in ("C0", "C11", "C12", "C21", "C22")}
        d = A.shape[0]
        coefs = [K["C0"]]
        expos = [np.zeros((d, d), dtype=complex)]

        def kernel_vectors(sigma, kind):
            # const + decaying parts of the kernel eigenvalues, for shift sigma*i*eps
            const = np.zeros(d, dtype=complex)
            decay = []
            for r, s_r in ((opo.r_minus, 1.0), (opo.r_plus, -1.0 if kind == "N" else 1.0)):
                denom = r * (r - lam + sigma * 1j * eps)
                const += s_r * pref / denom
                decay.append((-s_r * pref / denom, lam - r - sigma * 1j * eps))
            return const, decay

        # (matrix, kernel on the left, kernel on the right, overall phase exponent)
        blocks = (("C12", ("N", -1), ("N", +1), 0.0),
                  ("C21", ("N", +1), ("N", -1), 0.0),
                  ("C11", ("M", -1), ("M", -1), -2j * eps),
                  ("C22", ("M", +1), ("M", +1), 2j * eps))
        for name, left, right, phase in blocks:
            Km = K[name]
            for side, (kind, sigma) in (("left", left), ("right", right)):
                const, decay = kernel_vectors(sigma, kind)
                terms = [(const, np.zeros(d, dtype=complex))] + decay
                for vec, expo in terms:
                    if side == "left":
                        coefs.append(0.5 * vec[:, None] * Km)
                        expos.append(np.broadcast_to(expo[:, None], (d, d)) + phase)
                    else:
                        coefs.append(0.5 * Km * vec[None, :])
                        expos.append(np.broadcast_to(expo[None, :], (d, d)) + phase)
        self.coefs = np.array(coefs)
        self.expos = np.array(expos)
        self.rates = lam[:, None] + lam[None, :]

    def __call__(self, t):
        return np.sum(self.coefs * np.exp(self.expos * t), axis=0)

    def to_eigen(self, V):
        return self.Pinv @ V @ self.Pinv.T

    def from_eigen(self, W):
        return self.P @ W @ self.P.T


def _n_steps(t_span, dt):
    n = max(int(np.ceil(t_span / dt - 1e-12)), 1)
    return n, t_span / n


def integrate_covariance(model: SystemModel, V_init, t_end: float, dt=None, t_start=0.0,
                         A=None, renorm_every=1000):
    """Classical RK4 for the full moment equation from ``t_start`` to ``t_end``.

    The step is evaluated in the eigenbasis of the drift matrix, where the
    equation is diagonal. There the four RK4 stages (at ``t``, ``t + h/2``
    twice, ``t + h``) collapse into fixed elementwise coefficient arrays, so
    each step is the textbook RK4 update evaluated in closed form.
    ``dt=None`` picks :func:`default_dt`.
    """
    if A is None:
        A = drift_matrix_full(model)
    if dt is None:
        dt = default_dt(model, A)
    n, h = _n_steps(t_end - t_start, dt)
    F = _EigenForcing(model, A)
    z = F.rates * h
    R = 1 + z + z ** 2 / 2 + z ** 3 / 6 + z ** 4 / 24
    c0 = h / 6 * (1 + z + z ** 2 / 2 + z ** 3 / 4)
    ch = h / 6 * (4 + 2 * z + z ** 2 / 2)
    c1 = h / 6
    # per-term step weights: sum_m coef_m e^{expo_m t} (c0 + ch e^{expo h/2} + c1 e^{expo h})
    H = F.coefs * (c0 + ch * np.exp(F.expos * h / 2) + c1 * np.exp(F.expos * h))
    step = np.exp(F.expos * h)
    W = F.to_eigen(np.asarray(V_init, dtype=complex))
    E = np.exp(F.expos * t_start)
    for k in range(n):
        W = R * W + np.einsum("mij,mij->ij", H, E)
        if (k + 1) % renorm_every:
            E = E * step
        else:
            E = np.exp(F.expos * (t_start + (k + 1) * h))
    return F.from_eigen(W)


def integrate_covariance_direct(model: SystemModel, V_init, t_end: float, dt=None,
                                t_start=0.0, A=None):
    """Stage-by-stage RK4 in the operator basis; slow, for short horizons."""
    if A is None:
        A = drift_matrix_full(model)
    if dt is None:
        dt = default_dt(model, A)
    n, h = _n_steps(t_end - t_start, dt)
    f = lambda t, V: A @ V + V @ A.T + diffusion_at(model, A, t)  # noqa: E731
    V = np.asarray(V_init, dtype=complex)
    t = t_start
    for _ in range(n):
        k1 = f(t, V)
        k2 = f(t + h / 2, V + h / 2 * k1)
        k3 = f(t + h / 2, V + h / 2 * k2)
        k4 = f(t + h, V + h * k3)
        V = V + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return V


def formal_solution(model: SystemModel, V_init, t: float, A=None, epsabs=1e-12):
    """``exp(A t) V0 exp(A^T t) + int_0^t exp(A(t-s)) B(s) exp(A^T(t-s)) ds`` by adaptive quadrature."""
    if A is None:
        A = drift_matrix_full(model)
    F = _EigenForcing(model, A)
    U = propagate_expm(A, t)
    hom = U @ V_init @ U.T

    def integrand(s):
        Us = propagate_expm(A, t - s)
        Bs = F.from_eigen(F(s))
        return (Us @ Bs @ Us.T).ravel()

    inhom, _ = quad_vec(integrand, 0.0, t, epsabs=epsabs, epsrel=1e-11, limit=2000)
    return hom + inhom.reshape(A.shape)


# -- cascaded simulation -----------------------------------------------------

def cascaded_system(model: SystemModel):
    """Drift pieces and diffusion of the enlarged (OPO + optomechanics) system.

    Vector ``(c, c^dag, a, a^dag, b_1, b_1^dag, ...)`` in the pump frame; the OPO
    mode is rotated by ``epsilon_L`` so its parametric term oscillates.
    Returns ``(A0, Am, Ap, B)`` with ``A(t) = A0 + Am e^{-2i eps t} + Ap e^{2i eps t}``.
    """
    d = model.dim
    D = d + 2
    eps = model.freq.epsilon_L
    opo, cav = model.opo, model.cavity
    A0 = np.zeros((D, D), dtype=complex)
    A0[2:, 2:] = drift_matrix_full(model)
    A0[0, 0] = -opo.kappa_c - 1j * eps
    A0[1, 1] = -opo.kappa_c + 1j * eps
    g = 2.0 * np.sqrt(cav.kappa_a_s * opo.kappa_c_s)
    A0[2, 0] = g
    A0[3, 1] = g
    Am = np.zeros((D, D), dtype=complex)
    Ap = np.zeros((D, D), dtype=complex)
    Am[0, 1] = opo.chi
    Ap[1, 0] = opo.chi
    # white noises: (c_s, c', a', b_1, ..., b_M), each with its conjugate
    n_noise = 3 + model.n_modes
    Dn = np.zeros((D, 2 * n_noise))
    N = np.zeros((2 * n_noise, 2 * n_noise))

    def pair(op_row, noise, weight, occupation=0.0):
        Dn[op_row, 2 * noise] += weight
        Dn[op_row + 1, 2 * noise + 1] += weight
        N[2 * noise, 2 * noise + 1] = occupation + 1.0
        N[2 * noise + 1, 2 * noise] = occupation

    pair(0, 0, np.sqrt(2 * opo.kappa_c_s))
    pair(2, 0, -np.sqrt(2 * cav.kappa_a_s))
    pair(0, 1, np.sqrt(2 * opo.kappa_c_prime))
    pair(2, 2, np.sqrt(2 * cav.kappa_a_prime))
    for j, m in enumerate(model.modes):
        pair(4 + 2 * j, 3 + j, np.sqrt(m.gamma), m.n_T)
    B = Dn @ N @ Dn.T
    return A0, Am, Ap, B.astype(complex)


def integrate_cascaded(model: SystemModel, t_end: float, dt=None):
    """RK4 of the enlarged system from joint vacuum; returns the optomechanical block."""
    A0, Am, Ap, B = cascaded_system(model)
    eps = model.freq.epsilon_L
    if dt is None:
        dt = default_dt(model)
    n, h = _n_steps(t_end, dt)
    D = A0.shape[0]
    V = vacuum_moments(D)
    V[2:, 2:] = thermal_moments(model)

    def f(t, V):
        ph = np.exp(-2j * eps * t)
        A = A0 + Am * ph + Ap / ph
        return A @ V + V @ A.T + B

    t = 0.0
    for _ in range(n):
        k1 = f(t, V)
        k2 = f(t + h / 2, V + h / 2 * k1)
        k3 = f(t + h / 2, V + h / 2 * k2)
        k4 = f(t + h, V + h * k3)
        V = V + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return V[2:, 2:]
