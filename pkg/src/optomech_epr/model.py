"""Physical parameters, drift matrices and stability of the linearized system.

Frequencies are dimensionless, in units of a reference frequency (the mean
mechanical frequency by convention). Operator ordering for every
``d x d`` matrix is ``(a, a^dag, b_1, b_1^dag, ..., b_M, b_M^dag)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from .exceptions import CriterionNotApplicableError, EigenSolverError

#: relative size below which a real part counts as "marginal" in diagnostics
MARGINAL_RTOL = 1e-12


@dataclass(frozen=True)
class MechanicalMode:
    """One mechanical resonator.

    Parameters
    ----------
    omega : float
        Resonance frequency.
    gamma : float
        Energy damping rate.
    n_T : float
        Mean thermal occupation of its bath.
    G : complex
        Linearized optomechanical coupling.
    """

    omega: float
    gamma: float = 0.0
    n_T: float = 0.0
    G: complex = 0.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.n_T < 0:
            raise ValueError(f"n_T must be >= 0, got {self.n_T}")


@dataclass(frozen=True)
class CavityParams:
    kappa_a: float
    kappa_a_prime: float = 0.0

    def __post_init__(self):
        if not 0 <= self.kappa_a_prime <= self.kappa_a:
            raise ValueError(
                f"need 0 <= kappa_a_prime <= kappa_a, got "
                f"kappa_a={self.kappa_a}, kappa_a_prime={self.kappa_a_prime}")

    @property
    def kappa_a_s(self) -> float:
        """Rate at which the cavity exchanges photons with the squeezed field."""
        return self.kappa_a - self.kappa_a_prime


@dataclass(frozen=True)
class OpoParams:
    """Degenerate parametric oscillator operated below threshold."""

    chi: float
    kappa_c: float
    kappa_c_prime: float = 0.0

    def __post_init__(self):
        if not 0 <= self.chi < self.kappa_c:
            raise ValueError(
                f"need 0 <= chi < kappa_c (below threshold), got chi={self.chi}, "
                f"kappa_c={self.kappa_c}")
        if not 0 <= self.kappa_c_prime <= self.kappa_c:
            raise ValueError(
                f"need 0 <= kappa_c_prime <= kappa_c, got {self.kappa_c_prime}")

    @property
    def r_plus(self) -> float:
        """Squeezing bandwidth."""
        return self.kappa_c + self.chi

    @property
    def r_minus(self) -> float:
        return self.kappa_c - self.chi

    @property
    def kappa_c_s(self) -> float:
        return self.kappa_c - self.kappa_c_prime

    @classmethod
    def from_bandwidth(cls, r_plus, ratio, loss_fraction=0.0):
        """Build from the squeezing bandwidth and the ratio ``r_minus / r_plus``.

        ``loss_fraction`` is ``kappa_c_prime / kappa_c``.
        """
        if not r_plus > 0 or not 0 < ratio <= 1:
            raise ValueError(f"need r_plus > 0 and 0 < ratio <= 1, got {r_plus}, {ratio}")
        r_minus = ratio * r_plus
        kappa_c = 0.5 * (r_plus + r_minus)
        return cls(chi=0.5 * (r_plus - r_minus), kappa_c=kappa_c,
                   kappa_c_prime=loss_fraction * kappa_c)


@dataclass(frozen=True)
class FrequencyConfig:
    """Field detunings.

    ``epsilon_L`` is squeezed-field centre minus pump, ``epsilon_a`` is
    cavity minus squeezed-field centre.
    """

    epsilon_L: float
    epsilon_a: float = 0.0

    @property
    def Delta(self) -> float:
        """Cavity-pump detuning."""
        return self.epsilon_a + self.epsilon_L


@dataclass(frozen=True)
class SystemModel:
    cavity: CavityParams
    modes: tuple
    opo: OpoParams
    freq: FrequencyConfig
    #: free-form provenance, e.g. the name of a preset; not used in physics
    label: str = field(default="", compare=False)

    def __post_init__(self):
        modes = tuple(self.modes)
        if len(modes) < 1:
            raise ValueError("need at least one mechanical mode")
        if not all(isinstance(m, MechanicalMode) for m in modes):
            raise TypeError("modes must be MechanicalMode instances")
        object.__setattr__(self, "modes", modes)

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def dim(self) -> int:
        return 2 * (self.n_modes + 1)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([m.omega for m in self.modes])

    @property
    def couplings(self) -> np.ndarray:
        return np.array([m.G for m in self.modes], dtype=complex)

    def replace(self, **changes) -> "SystemModel":
        return replace(self, **changes)

    def with_modes(self, **changes) -> "SystemModel":
        """Apply the same field changes to every mechanical mode."""
        return replace(self, modes=tuple(replace(m, **changes) for m in self.modes))

    @classmethod
    def build(cls, *, kappa_a, omega: Sequence[float], G: Sequence[complex],
              chi, kappa_c, epsilon_L, epsilon_a=0.0, gamma=0.0, n_T=0.0,
              kappa_a_prime=0.0, kappa_c_prime=0.0, label=""):
        """Flat-keyword constructor; ``gamma`` and ``n_T`` may be scalars or per mode."""
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        M = omega.size
        G = np.broadcast_to(np.asarray(G, dtype=complex), (M,))
        gamma = np.broadcast_to(np.asarray(gamma, dtype=float), (M,))
        n_T = np.broadcast_to(np.asarray(n_T, dtype=float), (M,))
        modes = tuple(
            MechanicalMode(omega=float(omega[j]), gamma=float(gamma[j]),
                           n_T=float(n_T[j]), G=_as_scalar(G[j]))
            for j in range(M))
        return cls(cavity=CavityParams(kappa_a, kappa_a_prime), modes=modes,
                   opo=OpoParams(chi, kappa_c, kappa_c_prime),
                   freq=FrequencyConfig(epsilon_L, epsilon_a), label=label)


def _as_scalar(g):
    g = complex(g)
    return g.real if g.imag == 0 else g


def detunings(model: SystemModel):
    """Cavity-pump detuning and mechanical detunings ``omega_j - epsilon_L``."""
    return model.freq.Delta, model.omegas - model.freq.epsilon_L


def _mode_slices(model):
    return [(2 + 2 * j, 3 + 2 * j) for j in range(model.n_modes)]


def drift_matrix_full(model: SystemModel) -> np.ndarray:
    """Drift matrix of the full linearized dynamics in the pump (laser) frame.

    Includes the counter-rotating (blue-sideband) coupling terms.
    """
    d = model.dim
    kappa = model.cavity.kappa_a
    Delta = model.freq.Delta
    A = np.zeros((d, d), dtype=complex)
    A[0, 0] = -kappa - 1j * Delta
    A[1, 1] = -kappa + 1j * Delta
    for (i, ic), m in zip(_mode_slices(model), model.modes):
        G, Gc = complex(m.G), np.conj(complex(m.G))
        A[0, i] = A[0, ic] = 1j * G
        A[1, i] = A[1, ic] = -1j * Gc
        A[i, 0], A[i, 1] = 1j * Gc, 1j * G
        A[ic, 0], A[ic, 1] = -1j * Gc, -1j * G
        A[i, i] = -0.5 * m.gamma - 1j * m.omega
        A[ic, ic] = -0.5 * m.gamma + 1j * m.omega
    return A


def drift_matrix_resonant(model: SystemModel) -> np.ndarray:
    """Drift matrix with only co-rotating terms, in the squeezed-field frame.

    The cavity diagonal carries ``epsilon_a`` (cavity minus squeezed-field
    detuning), the mechanical diagonals carry ``delta_j = omega_j - epsilon_L``.
    """
    d = model.dim
    kappa = model.cavity.kappa_a
    eps_a = model.freq.epsilon_a
    _, deltas = detunings(model)
    A = np.zeros((d, d), dtype=complex)
    A[0, 0] = -kappa - 1j * eps_a
    A[1, 1] = -kappa + 1j * eps_a
    for (i, ic), m, delta in zip(_mode_slices(model), model.modes, deltas):
        G, Gc = complex(m.G), np.conj(complex(m.G))
        A[0, i] = 1j * G
        A[1, ic] = -1j * Gc
        A[i, 0] = 1j * Gc
        A[ic, 1] = -1j * G
        A[i, i] = -0.5 * m.gamma - 1j * delta
        A[ic, ic] = -0.5 * m.gamma + 1j * delta
    return A


def pair_swap(d: int) -> np.ndarray:
    """Permutation exchanging each ``(z, z^dag)`` pair."""
    P = np.zeros((d, d))
    for k in range(0, d, 2):
        P[k, k + 1] = P[k + 1, k] = 1.0
    return P


class StabilityInfo(NamedTuple):
    stable: bool
    max_real: float
    marginal: bool


def stability_info(A: np.ndarray) -> StabilityInfo:
    """Spectral abscissa of ``A`` with a marginality flag for diagnostics."""
    try:
        ev = np.linalg.eigvals(np.asarray(A))
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigenvalue computation failed: {exc}") from exc
    max_real = float(np.max(ev.real))
    scale = max(np.linalg.norm(A), 1.0)
    return StabilityInfo(max_real < 0, max_real, abs(max_real) < MARGINAL_RTOL * scale)


def is_stable_eigen(A: np.ndarray) -> bool:
    """True iff every eigenvalue of ``A`` has strictly negative real part."""
    return stability_info(A).stable


def routh_hurwitz_margin(model: SystemModel) -> float:
    """Left-hand side ``Delta^2 + kappa^2 - 4 Delta sum |G_j|^2 / omega_j``.

    Positive means stable (for ``Delta > 0``).
    """
    Delta, _ = detunings(model)
    if not Delta > 0:
        raise CriterionNotApplicableError(
            f"Routh-Hurwitz shortcut needs Delta > 0 (got {Delta}); use is_stable_eigen")
    kappa = model.cavity.kappa_a
    load = np.sum(np.abs(model.couplings) ** 2 / model.omegas)
    return float(Delta ** 2 + kappa ** 2 - 4.0 * Delta * load)


def is_stable_routh_hurwitz(model: SystemModel) -> bool:
    return routh_hurwitz_margin(model) > 0
