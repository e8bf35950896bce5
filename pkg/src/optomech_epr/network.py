"""Star networks: one cavity shared by ``N`` pairs of mechanical resonators.

Pairs are identified by construction order, ``(1, 2), (3, 4), ...`` in
1-based labels, which is also the order of ``SystemModel.modes``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import logarithmic_negativity, to_quadrature_cm
from .model import MechanicalMode, SystemModel


@dataclass(frozen=True)
class PairSpec:
    """One designated pair with opposite detunings ``+delta`` and ``-delta``.

    ``index`` is the 1-based label of the first resonator (odd).
    """

    index: int
    delta: float
    G_odd: complex
    G_even: complex

    def __post_init__(self):
        if self.index < 1 or self.index % 2 == 0:
            raise ValueError(f"pair index must be odd and >= 1, got {self.index}")


def detuning_rule(N: int, delta_unit: float) -> np.ndarray:
    """Pair detuning magnitudes ``[1 + 3 (j - 1)] delta_unit`` for ``j = 1..N``."""
    return (1.0 + 3.0 * np.arange(N)) * delta_unit


def pair_specs(N, delta_unit, couplings) -> list:
    """Expand per-pair couplings into :class:`PairSpec` objects.

    ``couplings`` is a single ``(G_odd, G_even)`` tuple applied to every pair
    or a sequence of ``N`` such tuples.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    c = np.asarray(couplings, dtype=complex)
    if c.shape == (2,):
        c = np.broadcast_to(c, (N, 2))
    if c.shape != (N, 2):
        raise ValueError(f"couplings must be one (G_odd, G_even) pair or {N} of them")
    mags = detuning_rule(N, delta_unit)
    return [PairSpec(2 * j + 1, float(mags[j]), complex(c[j, 0]), complex(c[j, 1]))
            for j in range(N)]


def build_star_model(N: int, delta_unit: float, couplings, base: SystemModel) -> SystemModel:
    """Replace the mechanical modes of ``base`` by ``2N`` resonators.

    Resonator frequencies are ``epsilon_L + delta`` and ``epsilon_L - delta``
    for each pair; damping and bath occupation are copied from the first
    mechanical mode of ``base``.
    """
    template = base.modes[0]
    eps = base.freq.epsilon_L
    modes = []
    for p in pair_specs(N, delta_unit, couplings):
        for sign, G in ((+1, p.G_odd), (-1, p.G_even)):
            g = G.real if G.imag == 0 else G
            modes.append(MechanicalMode(omega=eps + sign * p.delta, gamma=template.gamma,
                                        n_T=template.n_T, G=g))
    return base.replace(modes=tuple(modes))


def pairwise_entanglement_map(sol, t=0.0) -> np.ndarray:
    """Symmetric matrix of ``E_N`` between mechanical modes (0-based), NaN diagonal."""
    V = sol.evaluate(t)
    M = sol.n_modes
    if M < 2:
        raise ValueError("need at least two mechanical modes")
    E = np.full((M, M), np.nan)
    for j in range(M):
        for k in range(j + 1, M):
            E[j, k] = E[k, j] = logarithmic_negativity(to_quadrature_cm(V, (j + 1, k + 1)))
    return E


def designated_pair_en(E: np.ndarray) -> np.ndarray:
    """``E_N`` of pairs ``(2j-1, 2j)`` taken from a pairwise map."""
    return np.array([E[2 * j, 2 * j + 1] for j in range(E.shape[0] // 2)])


def cross_pair_mask(M: int) -> np.ndarray:
    """Upper-triangular mask of the unordered pairs that are not designated."""
    mask = np.triu(np.ones((M, M), dtype=bool), 1)
    for j in range(0, M - 1, 2):
        mask[j, j + 1] = False
    return mask


#: field-parameter box used when a network is tuned beyond the caption values
DEFAULT_FIELD_BOUNDS = {"epsilon_L": (0.9, 1.1), "epsilon_a": (-0.5, 0.5), "r_plus": (0.2, 5.0)}


def optimize_star_fields(star: SystemModel, bounds=None, regime="full", maxiter=200):
    """Tune field parameters of a star network at fixed couplings.

    Maximizes the smallest ``E_N`` over the designated pairs. Returns an
    :class:`~optomech_epr.optimize.OptimizationResult`.
    """
    from .optimize import OptimizationSpec, maximize_EN

    pairs = tuple((j, j + 1) for j in range(0, star.n_modes - 1, 2))
    spec = OptimizationSpec(bounds=dict(bounds or DEFAULT_FIELD_BOUNDS), regime=regime,
                            pair=pairs, maxiter=maxiter)
    return maximize_EN(star, spec)
