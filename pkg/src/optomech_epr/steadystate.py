"""Steady-state second moments in four regimes.

``full``
    Exact finite-bandwidth reservoir, counter-rotating terms kept (pump frame).
``broadband``
    Delta-correlated reservoir with the same central squeezing (pump frame).
``resonant``
    Broadband reservoir and co-rotating terms only (squeezed-field frame).
``ideal``
    Closed-form two-mode squeezed state reached without mechanical noise or
    cavity losses (squeezed-field frame).

Pump-frame solutions oscillate at ``2 epsilon_L``; both frames coincide at
``t = 0``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import UnstableSystemError
from .lyapunov import LyapunovOperator
from .model import (SystemModel, detunings, drift_matrix_full,
                    drift_matrix_resonant, stability_info)
from .reservoir import broadband_moments, steady_kernels

REGIMES = ("full", "broadband", "resonant", "ideal")


class DiffusionPieces(NamedTuple):
    C0: np.ndarray
    C11: np.ndarray
    C12: np.ndarray
    C21: np.ndarray
    C22: np.ndarray


@dataclass(frozen=True)
class SteadyStateSolution:
    """``V(t) = V0 + Vminus exp(-2i eps t) + Vplus exp(+2i eps t)``."""

    V0: np.ndarray
    Vminus: np.ndarray
    Vplus: np.ndarray
    epsilon_L: float
    regime: str
    #: "laser" (pump frame) or "squeezed" (frame rotating with the squeezed field)
    frame: str
    model: SystemModel = field(repr=False, compare=False)
    notes: tuple = ()

    @property
    def n_modes(self) -> int:
        return self.V0.shape[0] // 2 - 1

    def evaluate(self, t=0.0) -> np.ndarray:
        ph = np.exp(-2j * self.epsilon_L * t)
        return self.V0 + self.Vminus * ph + self.Vplus / ph


def diffusion_pieces(model: SystemModel) -> DiffusionPieces:
    d = model.dim
    C0 = np.zeros((d, d), dtype=complex)
    C0[0, 1] = 2.0 * model.cavity.kappa_a
    for j, m in enumerate(model.modes):
        i = 2 + 2 * j
        C0[i, i + 1] = m.gamma * (m.n_T + 1.0)
        C0[i + 1, i] = m.gamma * m.n_T
    ks2 = 2.0 * model.cavity.kappa_a_s
    single = []
    for l, lp in ((0, 0), (0, 1), (1, 0), (1, 1)):
        C = np.zeros((d, d), dtype=complex)
        C[l, lp] = ks2
        single.append(C)
    return DiffusionPieces(C0, *single)


def _require_stable(A, what):
    info = stability_info(A)
    if not info.stable:
        raise UnstableSystemError(
            f"{what} drift matrix is unstable: max Re(lambda) = {info.max_real:.3e}")


def _sym(K, C):
    return K @ C + C @ K.T


def steady_state_full(model: SystemModel) -> SteadyStateSolution:
    """Exact steady state driven by the finite-bandwidth squeezed field."""
    A = drift_matrix_full(model)
    _require_stable(A, "full")
    eps = model.freq.epsilon_L
    P = diffusion_pieces(model)
    K = steady_kernels(A, model.opo, eps)
    # each input component carries exp(-+ i eps t); the resolvent it meets
    # is shifted by the conjugate phase, which fixes the +/- pairing below
    inhom = (P.C0
             + 0.5 * (K.Nbar_minus @ P.C12 + P.C12 @ K.Nbar_plus.T)
             + 0.5 * (K.Nbar_plus @ P.C21 + P.C21 @ K.Nbar_minus.T))
    V0 = LyapunovOperator(A).solve(inhom)
    Vm = LyapunovOperator(A, 2j * eps).solve(0.5 * _sym(K.Mbar_minus, P.C11))
    Vp = LyapunovOperator(A, -2j * eps).solve(0.5 * _sym(K.Mbar_plus, P.C22))
    return SteadyStateSolution(V0, Vm, Vp, eps, "full", "laser", model)


def steady_state_broadband(model: SystemModel) -> SteadyStateSolution:
    """Steady state for a delta-correlated reservoir with the same ``S(0)``."""
    A = drift_matrix_full(model)
    _require_stable(A, "full")
    eps = model.freq.epsilon_L
    P = diffusion_pieces(model)
    bb = broadband_moments(model.opo)
    V0 = LyapunovOperator(A).solve(P.C0 + bb.nbar * (P.C12 + P.C21))
    Vm = LyapunovOperator(A, 2j * eps).solve(bb.mbar * P.C11)
    Vp = LyapunovOperator(A, -2j * eps).solve(bb.mbar * P.C22)
    return SteadyStateSolution(V0, Vm, Vp, eps, "broadband", "laser", model)


def resonant_diffusion(model: SystemModel) -> np.ndarray:
    """Time-independent diffusion matrix of the co-rotating model."""
    bb = broadband_moments(model.opo)
    kappa, ks = model.cavity.kappa_a, model.cavity.kappa_a_s
    B = diffusion_pieces(model).C0.copy()
    B[0, 0] = B[1, 1] = 2.0 * ks * bb.mbar
    B[0, 1] = 2.0 * (kappa + ks * bb.nbar)
    B[1, 0] = 2.0 * ks * bb.nbar
    return B


def steady_state_resonant(model: SystemModel) -> SteadyStateSolution:
    """Steady state without blue-sideband terms; time independent."""
    A = drift_matrix_resonant(model)
    _require_stable(A, "resonant")
    V0 = LyapunovOperator(A).solve(resonant_diffusion(model))
    zero = np.zeros_like(V0)
    return SteadyStateSolution(V0, zero, zero.copy(), model.freq.epsilon_L,
                               "resonant", "squeezed", model)


def ideal_regime_violations(model: SystemModel, rtol=1e-9) -> list:
    """Conditions of the closed-form ideal limit that ``model`` does not meet."""
    out = []
    if model.n_modes % 2:
        out.append("needs an even number of mechanical modes")
        return out
    _, deltas = detunings(model)
    G = model.couplings
    scale = max(np.max(np.abs(deltas)), 1e-300)
    if abs(model.freq.epsilon_a) > rtol:
        out.append(f"epsilon_a = {model.freq.epsilon_a:g} != 0")
    for j in range(0, model.n_modes, 2):
        if abs(deltas[j] + deltas[j + 1]) > rtol * scale:
            out.append(f"delta_{j + 1} != -delta_{j + 2}")
        if abs(G[j] - G[j + 1]) > rtol * max(abs(G[j]), 1e-300):
            out.append(f"G_{j + 1} != G_{j + 2}")
    if model.cavity.kappa_a_prime > 0:
        out.append("kappa_a_prime > 0")
    if any(m.gamma * m.n_T > 0 for m in model.modes):
        out.append("gamma * n_T > 0")
    return out


def steady_state_ideal(model: SystemModel) -> SteadyStateSolution:
    """Closed-form ideal-limit moments.

    Mechanical modes are paired in construction order ``(1, 2), (3, 4), ...``.
    Off its regime the formulas are still evaluated and a warning is issued.
    """
    notes = ideal_regime_violations(model)
    if notes:
        warnings.warn("ideal limit evaluated outside its regime: " + "; ".join(notes),
                      stacklevel=2)
    bb = broadband_moments(model.opo)
    d = model.dim
    V0 = np.zeros((d, d), dtype=complex)
    for i in range(0, d, 2):
        V0[i, i + 1] = bb.nbar + 1.0
        V0[i + 1, i] = bb.nbar
    V0[0, 0] = V0[1, 1] = bb.mbar
    for j in range(0, model.n_modes - 1, 2):
        i, k = 2 + 2 * j, 4 + 2 * j
        V0[i, k] = V0[k, i] = -bb.mbar
        V0[i + 1, k + 1] = V0[k + 1, i + 1] = -bb.mbar
    zero = np.zeros_like(V0)
    return SteadyStateSolution(V0, zero, zero.copy(), model.freq.epsilon_L,
                               "ideal", "squeezed", model, tuple(notes))


_SOLVERS = {
    "full": steady_state_full,
    "broadband": steady_state_broadband,
    "resonant": steady_state_resonant,
    "ideal": steady_state_ideal,
}


def steady_state(model: SystemModel, regime: str = "full") -> SteadyStateSolution:
    try:
        solver = _SOLVERS[regime]
    except KeyError:
        raise ValueError(f"unknown regime {regime!r}; choose from {REGIMES}") from None
    return solver(model)


def frame_phases(d: int, epsilon_L: float, t: float) -> np.ndarray:
    """Diagonal of the map from pump-frame to squeezed-field-frame operators."""
    ph = np.empty(d, dtype=complex)
    ph[0::2] = np.exp(1j * epsilon_L * t)
    ph[1::2] = np.exp(-1j * epsilon_L * t)
    return ph


def frame_transform(sol: SteadyStateSolution, t=0.0) -> np.ndarray:
    """Moments at time ``t`` expressed in the squeezed-field rotating frame."""
    V = sol.evaluate(t)
    if sol.frame == "squeezed":
        return V
    ph = frame_phases(V.shape[0], sol.epsilon_L, t)
    return ph[:, None] * V * ph[None, :]
