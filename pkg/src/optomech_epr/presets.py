"""Named reproduction presets; each returns a :class:`~optomech_epr.tables.Table`.

All frequencies are in units of the mean mechanical frequency. The reference
point is two resonators at ``1 +- 0.01`` driven by a 10 dB parametric
oscillator with bandwidth ``r_plus = 1.4``.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import model_to_config
from .measures import entanglement_report
from .model import SystemModel
from .network import (build_star_model, designated_pair_en, optimize_star_fields,
                      pairwise_entanglement_map)
from .optimize import OptimizationSpec, SweepSpec, current_params, maximize_EN, sweep
from .steadystate import steady_state
from .tables import Table

#: box searched by the per-linewidth optimizations
FIG2E_BOUNDS = {"epsilon_L": (0.5, 1.5), "epsilon_a": (-1.0, 1.0), "r_plus": (0.1, 5.0),
                "G_plus": (0.0, 0.5), "G_minus": (-0.2, 0.2)}
FIG5_RATIO = 1.0 / 3.0


def reference_model(omega_minus=0.01, **changes) -> SystemModel:
    """Two-resonator reference configuration; keyword changes go to ``SystemModel.build``."""
    kw = dict(kappa_a=0.1, omega=[1.0 + omega_minus, 1.0 - omega_minus], G=[0.03, 0.03],
              chi=0.5, kappa_c=0.9, epsilon_L=1.0, epsilon_a=0.004, gamma=2e-5, n_T=10.0,
              label="reference")
    kw.update(changes)
    return SystemModel.build(**kw)


def _meta(name, model, **extra):
    meta = {"preset": name, "model": model_to_config(model)}
    meta.update(extra)
    return meta


def _map(fn, jobs, workers):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


def fig2b(workers=1, points=None) -> Table:
    """``E_N`` against the mechanical frequency difference."""
    m = reference_model()
    spec = SweepSpec("omega_minus", 0.0, 0.5, points or 101)
    tab = sweep(m, spec, workers=workers)
    rows = list(zip(tab["value"], tab["E_N"], tab["stable"]))
    return Table(("omega_minus", "E_N", "stable"), rows, _meta("fig2b", m, sweep=spec.__dict__))


def fig2c(workers=1, points=None) -> Table:
    """Squeezed and orthogonal collective variances with their phases."""
    m = reference_model()
    spec = SweepSpec("omega_minus", 0.0, 0.5, points or 101)
    tab = sweep(m, spec, workers=workers)
    cols = ("value", "var_min", "var_orth", "theta1", "theta2", "stable")
    rows = list(zip(*(tab[c] for c in cols)))
    return Table(("omega_minus",) + cols[1:], rows, _meta("fig2c", m, sweep=spec.__dict__))


FIG2E_CASES = {
    # name: (kappa_a_prime / kappa_a, kappa_c_prime / kappa_c)
    "lossless": (0.0, 0.0),
    "cavity_loss": (0.1, 0.0),
    "cavity_and_source_loss": (0.1, 0.1),
}


def _fig2e_point(job):
    kappa_a, case, regime = job
    fa, fc = FIG2E_CASES[case]
    m = reference_model(kappa_a=kappa_a, kappa_a_prime=fa * kappa_a,
                        kappa_c_prime=fc * 0.9)
    res = maximize_EN(m, OptimizationSpec(FIG2E_BOUNDS, regime=regime))
    p = current_params(res.model)
    return (kappa_a, case, regime, res.E_N, p["epsilon_L"], p["epsilon_a"], p["r_plus"],
            p["G_plus"], p["G_minus"])


def fig2e(workers=1, points=None) -> Table:
    """Optimized ``E_N`` against the cavity linewidth, with the optimal parameters."""
    kappas = np.geomspace(0.01, 10.0, points or 7)
    jobs = [(float(k), case, reg) for k in kappas for case in FIG2E_CASES
            for reg in ("full", "broadband")]
    rows = _map(_fig2e_point, jobs, workers)
    cols = ("kappa_a", "case", "regime", "E_N", "epsilon_L", "epsilon_a", "r_plus",
            "G_plus", "G_minus")
    return Table(cols, rows, _meta("fig2e", reference_model(), bounds=FIG2E_BOUNDS,
                                   cases=FIG2E_CASES))


def fig3(workers=1, points=None) -> Table:
    """``E_N`` over two periods of the residual oscillation, in every regime."""
    m = reference_model()
    sols = {r: steady_state(m, r) for r in ("full", "broadband", "resonant")}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sols["ideal"] = steady_state(m, "ideal")
    ts = np.linspace(0.0, 2 * np.pi / m.freq.epsilon_L, points or 201)
    rows = []
    for t in ts:
        rows.append((t,) + tuple(entanglement_report(sols[r], t=t).E_N
                                 for r in ("full", "broadband", "resonant", "ideal")))
    return Table(("t", "E_N_full", "E_N_broadband", "E_N_resonant", "E_N_ideal"), rows,
                 _meta("fig3", m))


def _fig4(name, target, start, stop, scale, workers, points):
    m = reference_model()
    spec = SweepSpec(target, start, stop, points or 41, scale)
    tabs = {r: sweep(m, spec, regime=r, workers=workers)
            for r in ("full", "broadband", "resonant")}
    rows = list(zip(spec.grid(), *(tabs[r]["E_N"] for r in tabs)))
    return Table((target, "E_N_full", "E_N_broadband", "E_N_resonant"), rows,
                 _meta(name, m, sweep=spec.__dict__))


def fig4a(workers=1, points=None) -> Table:
    """``E_N`` against internal losses of the parametric oscillator."""
    return _fig4("fig4a", "kappa_c_prime", 0.0, 0.9, "linear", workers, points)


def fig4b(workers=1, points=None) -> Table:
    """``E_N`` against mechanical damping."""
    return _fig4("fig4b", "gamma", 1e-7, 1e-3, "log", workers, points)


def fig4c(workers=1, points=None) -> Table:
    """``E_N`` against the thermal occupation."""
    return _fig4("fig4c", "n_T", 0.0, 100.0, "linear", workers, points)


def fig4d(workers=1, points=None) -> Table:
    """``E_N`` against uncontrolled cavity losses."""
    return _fig4("fig4d", "kappa_a_prime", 0.0, 0.1, "linear", workers, points)


FIG5_AXES = {
    "epsilon_L": (0.9, 1.1, "linear"),
    "epsilon_a": (-1.0, 1.0, "linear"),
    "G_minus": (-0.05, 0.05, "linear"),
    "G_plus": (0.0, 0.2, "linear"),
    "r_plus": (0.05, 10.0, "log"),
}


def fig5(workers=1, points=None) -> Table:
    """One-parameter cuts through the lossless optimum at two linewidths."""
    rows, optima = [], {}
    for kappa_a in (0.1, 1.0):
        seed = reference_model(kappa_a=kappa_a)
        best = maximize_EN(seed, OptimizationSpec(FIG2E_BOUNDS)).model
        optima[kappa_a] = current_params(best)
        for target, (a, b, scale) in FIG5_AXES.items():
            spec = SweepSpec(target, a, b, points or 41, scale,
                             ratio=FIG5_RATIO if target == "r_plus" else None)
            tab = sweep(best, spec, workers=workers)
            rows += [(kappa_a, target, v, e) for v, e in zip(tab["value"], tab["E_N"])]
    return Table(("kappa_a", "parameter", "value", "E_N"), rows,
                 _meta("fig5", reference_model(), optima=optima, axes=FIG5_AXES,
                       ratio=FIG5_RATIO))


FIG6_CASES = {0.1: (0.03, 0.03), 1.0: (0.06, 0.05)}


def fig6_model(kappa_a, tune_fields=None, N=10, delta=0.01) -> SystemModel:
    """Star network of ``2N`` resonators; fields re-optimized at ``kappa_a = 1`` by default."""
    base = reference_model(kappa_a=kappa_a)
    star = build_star_model(N, delta, FIG6_CASES[kappa_a], base)
    if tune_fields is None:
        tune_fields = kappa_a >= 1.0
    if tune_fields:
        star = optimize_star_fields(star).model
    return star.replace(label=f"fig6 kappa_a={kappa_a}")


def fig6(workers=1, points=None) -> Table:
    """Pairwise ``E_N`` of a 20-resonator star network at two linewidths."""
    rows, meta = [], {"preset": "fig6"}
    for kappa_a in FIG6_CASES:
        m = fig6_model(kappa_a)
        meta[f"model_kappa_a_{kappa_a}"] = model_to_config(m)
        E = pairwise_entanglement_map(steady_state(m))
        M = E.shape[0]
        for j in range(M):
            for k in range(j + 1, M):
                designated = (j % 2 == 0 and k == j + 1)
                rows.append((kappa_a, j + 1, k + 1, designated, E[j, k]))
        meta[f"designated_min_kappa_a_{kappa_a}"] = float(designated_pair_en(E).min())
    return Table(("kappa_a", "j", "k", "designated", "E_N"), rows, meta)


PRESETS = {
    "fig2b": fig2b, "fig2c": fig2c, "fig2e": fig2e, "fig3": fig3,
    "fig4a": fig4a, "fig4b": fig4b, "fig4c": fig4c, "fig4d": fig4d,
    "fig5": fig5, "fig6": fig6,
}


def run_preset(name, workers=1, points=None) -> Table:
    try:
        fn = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return fn(workers=workers, points=points)

