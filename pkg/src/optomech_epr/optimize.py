"""Parameter sweeps and derivative-free maximization of the logarithmic negativity."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace as dc_replace
from typing import Mapping

import numpy as np
from scipy.optimize import minimize

from .exceptions import NoFeasiblePointError, NonPhysicalStateError, PhysicsError
from .measures import entanglement_report, log_negativity_raw, to_quadrature_cm
from .model import OpoParams, SystemModel
from .steadystate import frame_transform, steady_state

#: parameters understood by :func:`with_param`; ``t`` is the evaluation time
SWEEP_TARGETS = ("epsilon_L", "epsilon_a", "r_plus", "G_plus", "G_minus", "kappa_a",
                 "kappa_a_prime", "kappa_c_prime", "gamma", "n_T", "omega_minus", "t")
FREE_PARAMETERS = ("epsilon_L", "epsilon_a", "r_plus", "G_plus", "G_minus")
N_STARTS = 8


def _two_mode(model, name):
    if model.n_modes != 2:
        raise ValueError(f"{name} is defined for two mechanical modes, got {model.n_modes}")


def with_param(model: SystemModel, name: str, value: float, ratio: float | None = None) -> SystemModel:
    """Copy of ``model`` with one named parameter changed.

    ``r_plus`` keeps ``r_minus / r_plus`` at ``ratio`` (default: the ratio of
    ``model``) and the fraction ``kappa_c_prime / kappa_c``. ``kappa_a``
    keeps the fraction ``kappa_a_prime / kappa_a``. ``omega_minus`` keeps the
    mean mechanical frequency.
    """
    value = float(value)
    if name == "epsilon_L":
        return model.replace(freq=model.freq.__class__(value, model.freq.epsilon_a))
    if name == "epsilon_a":
        return model.replace(freq=model.freq.__class__(model.freq.epsilon_L, value))
    if name == "r_plus":
        opo = model.opo
        if ratio is None:
            ratio = opo.r_minus / opo.r_plus
        new = OpoParams.from_bandwidth(value, ratio, opo.kappa_c_prime / opo.kappa_c)
        return model.replace(opo=new)
    if name in ("G_plus", "G_minus"):
        _two_mode(model, name)
        G1, G2 = model.couplings
        gp, gm = (G1 + G2) / 2, (G1 - G2) / 2
        gp, gm = (value, gm) if name == "G_plus" else (gp, value)
        modes = (_set(model.modes[0], G=gp + gm), _set(model.modes[1], G=gp - gm))
        return model.replace(modes=modes)
    if name == "kappa_a":
        frac = model.cavity.kappa_a_prime / model.cavity.kappa_a
        return model.replace(cavity=model.cavity.__class__(value, frac * value))
    if name == "kappa_a_prime":
        return model.replace(cavity=model.cavity.__class__(model.cavity.kappa_a, value))
    if name == "kappa_c_prime":
        o = model.opo
        return model.replace(opo=OpoParams(o.chi, o.kappa_c, value))
    if name in ("gamma", "n_T"):
        return model.with_modes(**{name: value})
    if name == "omega_minus":
        _two_mode(model, name)
        wp = model.omegas.mean()
        modes = (_set(model.modes[0], omega=wp + value), _set(model.modes[1], omega=wp - value))
        return model.replace(modes=modes)
    raise ValueError(f"unknown parameter {name!r}; choose from {SWEEP_TARGETS}")


def _set(mode, **kw):
    if "G" in kw:
        g = complex(kw["G"])
        kw["G"] = g.real if g.imag == 0 else g
    return dc_replace(mode, **kw)


@dataclass(frozen=True)
class SweepSpec:
    """One-dimensional grid over a named parameter."""

    target: str
    start: float
    stop: float
    count: int
    scale: str = "linear"
    ratio: float | None = None

    def __post_init__(self):
        if self.target not in SWEEP_TARGETS:
            raise ValueError(f"unknown sweep target {self.target!r}; choose from {SWEEP_TARGETS}")
        if self.count < 2:
            raise ValueError(f"grid count must be >= 2, got {self.count}")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"scale must be 'linear' or 'log', got {self.scale!r}")
        if self.scale == "log" and not (self.start > 0 and self.stop > 0):
            raise ValueError("log grid needs positive end points")

    def grid(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


SWEEP_COLUMNS = ("value", "E_N", "var_min", "var_orth", "theta1", "theta2", "stable", "note")


@dataclass(frozen=True)
class SweepTable:
    """Column-oriented sweep result; infeasible rows hold NaN and a note."""

    target: str
    columns: Mapping[str, np.ndarray]

    def __len__(self):
        return len(self.columns["value"])

    def __getitem__(self, key):
        return self.columns[key]

    def rows(self):
        for i in range(len(self)):
            yield tuple(self.columns[c][i] for c in SWEEP_COLUMNS)


def evaluate_point(model, regime="full", t=0.0, pair=(0, 1)) -> dict:
    """Figures of merit for one model; physics failures become a flagged row."""
    nan = float("nan")
    try:
        sol = steady_state(model, regime)
        rep = entanglement_report(sol, t=t, pair=pair)
    except (PhysicsError, ValueError) as exc:
        return dict(E_N=nan, var_min=nan, var_orth=nan, theta1=nan, theta2=nan,
                    stable=False, note=f"{type(exc).__name__}: {exc}")
    return dict(E_N=rep.E_N, var_min=rep.var_min, var_orth=rep.var_orth,
                theta1=rep.theta1, theta2=rep.theta2, stable=True, note="")


def _sweep_point(args):
    model, spec, value, regime, t, pair = args
    try:
        if spec.target == "t":
            m, tt = model, float(value)
        else:
            m, tt = with_param(model, spec.target, value, spec.ratio), t
    except ValueError as exc:
        nan = float("nan")
        return dict(E_N=nan, var_min=nan, var_orth=nan, theta1=nan, theta2=nan,
                    stable=False, note=f"infeasible: {exc}")
    return evaluate_point(m, regime, tt, pair)


def sweep(model: SystemModel, spec: SweepSpec, regime="full", t=0.0, pair=(0, 1),
          workers: int = 1) -> SweepTable:
    """Evaluate the two-mode figures of merit across ``spec.grid()``.

    Row order follows the grid regardless of ``workers``.
    """
    grid = spec.grid()
    jobs = [(model, spec, v, regime, t, pair) for v in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            out = list(ex.map(_sweep_point, jobs))
    else:
        out = [_sweep_point(j) for j in jobs]
    cols = {"value": grid}
    for c in SWEEP_COLUMNS[1:]:
        cols[c] = np.array([r[c] for r in out], dtype=object if c == "note" else None)
    return SweepTable(spec.target, cols)


@dataclass(frozen=True)
class OptimizationSpec:
    """Free parameters with finite bounds; objective is ``E_N`` of ``pair`` at ``t``.

    ``pair`` is one 0-based mechanical pair or a tuple of pairs; with several
    pairs the objective is the smallest of their ``E_N``.
    """

    bounds: Mapping[str, tuple]
    regime: str = "full"
    pair: tuple = (0, 1)
    t: float = 0.0
    ratio: float | None = None
    maxiter: int = 400
    xatol: float = 1e-6
    fatol: float = 1e-9

    def __post_init__(self):
        if not self.bounds:
            raise ValueError("need at least one free parameter")
        for name, (lo, hi) in self.bounds.items():
            if name not in FREE_PARAMETERS:
                raise ValueError(f"{name!r} cannot be optimized; choose from {FREE_PARAMETERS}")
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"bounds for {name!r} must be finite with lo < hi, got {(lo, hi)}")

    @property
    def names(self) -> tuple:
        return tuple(self.bounds)

    @property
    def pairs(self) -> tuple:
        p = tuple(self.pair)
        return (tuple(p),) if np.ndim(p) == 1 else tuple(tuple(q) for q in p)


@dataclass
class OptimizationResult:
    params: dict
    E_N: float
    model: SystemModel
    trace: list = field(repr=False)
    notes: list = field(default_factory=list)


def _raw_negativity(model, spec):
    """Smallest unclipped negativity over the pairs of ``spec``."""
    V = frame_transform(steady_state(model, spec.regime), spec.t)
    vals = []
    for j, k in spec.pairs:
        cm = to_quadrature_cm(V, (j + 1, k + 1))
        if not cm.physical:
            raise NonPhysicalStateError(
                f"uncertainty relation violated by {cm.min_uncertainty_eig:.3e}")
        vals.append(log_negativity_raw(cm))
    return min(vals)


def start_points(n: int, n_starts: int = N_STARTS) -> np.ndarray:
    """Deterministic starting set in the unit cube.

    The centre plus points at 25% / 75% of each range following the sign
    patterns of the cube corners, drawn in a fixed shuffled order.
    """
    corners = np.array(np.meshgrid(*[[0.25, 0.75]] * n, indexing="ij")).reshape(n, -1).T
    order = np.random.default_rng(0).permutation(len(corners))
    pts = [np.full(n, 0.5)] + [corners[i] for i in order[: n_starts - 1]]
    return np.array(pts)


def maximize_EN(model: SystemModel, spec: OptimizationSpec) -> OptimizationResult:
    """Multistart bounded Nelder-Mead over the free parameters of ``spec``.

    Unstable or non-physical points are infeasible (objective ``-inf``). The
    search maximizes the unclipped negativity, which has the same maximizer
    whenever entanglement is reachable. The seed ``model`` is always a
    candidate, so the result never loses to it.
    """
    names = spec.names
    lo = np.array([spec.bounds[n][0] for n in names], dtype=float)
    hi = np.array([spec.bounds[n][1] for n in names], dtype=float)
    trace = []

    def build(u):
        m = model
        for n, v in zip(names, lo + np.clip(u, 0, 1) * (hi - lo)):
            m = with_param(m, n, v, spec.ratio)
        return m

    def objective(u):
        try:
            val = _raw_negativity(build(u), spec)
        except (PhysicsError, ValueError):
            val = -math.inf
        trace.append((dict(zip(names, (lo + np.clip(u, 0, 1) * (hi - lo)).tolist())), val))
        return -val

    candidates = []
    try:
        candidates.append((_raw_negativity(model, spec), model, "seed"))
    except (PhysicsError, ValueError):
        pass
    for u0 in start_points(len(names)):
        # an all-infeasible simplex compares inf - inf in the convergence test
        with np.errstate(invalid="ignore"):
            res = minimize(objective, u0, method="Nelder-Mead", bounds=[(0, 1)] * len(names),
                           options=dict(maxiter=spec.maxiter, xatol=spec.xatol,
                                        fatol=spec.fatol, initial_simplex=_simplex(u0)))
        if math.isfinite(res.fun):
            candidates.append((-res.fun, build(res.x), "start"))
    if not candidates:
        raise NoFeasiblePointError(
            f"no stable, physical point found for free parameters {names}")
    best_val, best_model, origin = max(candidates, key=lambda c: c[0])
    notes = []
    if origin == "seed":
        notes.append("seed point was not improved")
    E_N = max(0.0, best_val)
    if E_N == 0.0:
        notes.append("no entanglement reachable within bounds")
    return OptimizationResult(params=current_params(best_model, names), E_N=E_N,
                              model=best_model, trace=trace, notes=notes)


def _simplex(u0, step=0.15):
    n = len(u0)
    S = np.tile(u0, (n + 1, 1))
    for i in range(n):
        S[i + 1, i] += step if u0[i] + step <= 1 else -step
    return S


def current_params(model: SystemModel, names=FREE_PARAMETERS) -> dict:
    """Values of the named free parameters read back from ``model``."""
    out = {}
    for n in names:
        if n == "epsilon_L":
            out[n] = model.freq.epsilon_L
        elif n == "epsilon_a":
            out[n] = model.freq.epsilon_a
        elif n == "r_plus":
            out[n] = model.opo.r_plus
        elif n in ("G_plus", "G_minus"):
            G1, G2 = model.couplings.real
            out[n] = float((G1 + G2) / 2 if n == "G_plus" else (G1 - G2) / 2)
    return out
