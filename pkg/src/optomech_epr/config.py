"""Structured run configuration (YAML or JSON).

A configuration is a nested mapping::

    units: scaled            # or "physical"
    cavity:    {kappa_a: 0.1, kappa_a_prime: 0.0}
    opo:       {chi: 0.5, kappa_c: 0.9, kappa_c_prime: 0.0}
    fields:    {epsilon_L: 1.0, epsilon_a: 0.004}
    mechanics:
      - {omega: 1.01, gamma: 2.0e-5, n_T: 10, G: 0.03}
      - {omega: 0.99, gamma: 2.0e-5, n_T: 10, G: 0.03}
    network:   {N: 10, delta: 0.01, couplings: [0.03, 0.03]}   # optional
    evaluation: {regime: full, time: 0.0, pair: [1, 2], log_base: e}
    sweep:     {target: omega_minus, start: 0, stop: 0.4, count: 81, scale: linear}
    optimize:  {bounds: {epsilon_L: [0.5, 1.5]}, ratio: null}

Instead of ``chi``/``kappa_c`` the ``opo`` block may give
``{r_plus, ratio}`` or ``{r_plus, squeezing_db}``, with an optional
``loss_fraction`` (``kappa_c_prime / kappa_c``).

With ``units: physical`` every frequency and rate is an ordinary frequency
in Hz (``omega / 2 pi``). Mechanical entries may give ``Q`` instead of
``gamma`` and a temperature ``T`` in kelvin instead of ``n_T``. Everything is
rescaled by the mean mechanical frequency.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml
from scipy.constants import h as PLANCK, k as BOLTZMANN

from .exceptions import ConfigError
from .model import (CavityParams, FrequencyConfig, MechanicalMode, OpoParams,
                    SystemModel)
from .steadystate import REGIMES

TOP_KEYS = ("units", "label", "cavity", "opo", "fields", "mechanics", "network",
            "evaluation", "sweep", "optimize")


def bose_occupation(frequency_hz: float, temperature_k: float) -> float:
    """Mean thermal excitation number ``1 / (exp(h f / k T) - 1)``."""
    if temperature_k < 0:
        raise ValueError("temperature must be >= 0")
    if temperature_k == 0:
        return 0.0
    return 1.0 / math.expm1(PLANCK * frequency_hz / (BOLTZMANN * temperature_k))


def load_file(path) -> dict:
    """Parse a YAML or JSON file (YAML is a superset, JSON is tried first by suffix)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    try:
        data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if data is None:
        data = {}
    if not isinstance(data, Mapping):
        raise ConfigError("top level of the config must be a mapping", key="<root>")
    return dict(data)


def _section(cfg, key, required=True) -> dict:
    sec = cfg.get(key)
    if sec is None:
        if required:
            raise ConfigError(f"missing required section '{key}'", key=key)
        return {}
    if not isinstance(sec, Mapping):
        raise ConfigError(f"'{key}' must be a mapping", key=key)
    return dict(sec)


def _check_keys(sec, allowed, where):
    for k in sec:
        if k not in allowed:
            raise ConfigError(f"unknown key '{where}.{k}'; allowed: {', '.join(allowed)}",
                              key=f"{where}.{k}")


def _num(sec, key, where, default=None, complex_ok=False):
    full = f"{where}.{key}"
    if key not in sec or sec[key] is None:
        if default is None:
            raise ConfigError(f"missing required key '{full}'", key=full)
        return default
    v = sec[key]
    if isinstance(v, bool):
        raise ConfigError(f"'{full}' must be a number, got {v!r}", key=full)
    try:
        if complex_ok and isinstance(v, (list, tuple)):
            re, im = v
            return complex(float(re), float(im))
        if complex_ok and isinstance(v, str):
            c = complex(v.replace(" ", ""))
            return c.real if c.imag == 0 else c
        out = float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"'{full}' must be a number, got {v!r}", key=full) from None
    if not math.isfinite(out):
        raise ConfigError(f"'{full}' must be finite, got {v!r}", key=full)
    return out


class _Units:
    """Converts configured frequencies to the dimensionless working unit."""

    def __init__(self, cfg):
        self.mode = cfg.get("units", "scaled")
        if self.mode not in ("scaled", "physical"):
            raise ConfigError(f"'units' must be 'scaled' or 'physical', got {self.mode!r}",
                              key="units")
        self.ref_hz = 1.0
        if self.mode == "physical":
            mech = cfg.get("mechanics")
            omegas = []
            if isinstance(mech, list):
                for i, m in enumerate(mech):
                    if isinstance(m, Mapping):
                        omegas.append(_num(m, "omega", f"mechanics[{i}]"))
            if not omegas or min(omegas) <= 0:
                raise ConfigError("physical units need positive mechanics[*].omega in Hz",
                                  key="mechanics")
            self.ref_hz = float(np.mean(omegas))

    def freq(self, value):
        return value / self.ref_hz


def _mechanics(cfg, units) -> tuple:
    mech = cfg.get("mechanics")
    if not isinstance(mech, list) or not mech:
        raise ConfigError("'mechanics' must be a non-empty list of mode entries",
                          key="mechanics")
    allowed = ("omega", "gamma", "Q", "n_T", "T", "G")
    modes = []
    for i, m in enumerate(mech):
        where = f"mechanics[{i}]"
        if not isinstance(m, Mapping):
            raise ConfigError(f"'{where}' must be a mapping", key=where)
        _check_keys(m, allowed, where)
        omega_raw = _num(m, "omega", where)
        omega = units.freq(omega_raw)
        if "Q" in m and "gamma" in m:
            raise ConfigError(f"give either '{where}.gamma' or '{where}.Q', not both",
                              key=f"{where}.Q")
        if "Q" in m:
            Q = _num(m, "Q", where)
            if Q <= 0:
                raise ConfigError(f"'{where}.Q' must be > 0", key=f"{where}.Q")
            gamma = omega / Q
        else:
            gamma = units.freq(_num(m, "gamma", where, default=0.0))
        if "T" in m and "n_T" in m:
            raise ConfigError(f"give either '{where}.n_T' or '{where}.T', not both",
                              key=f"{where}.T")
        if "T" in m:
            if units.mode != "physical":
                raise ConfigError(f"'{where}.T' needs units: physical (frequency in Hz)",
                                  key=f"{where}.T")
            n_T = bose_occupation(omega_raw, _num(m, "T", where))
        else:
            n_T = _num(m, "n_T", where, default=0.0)
        G = _num(m, "G", where, default=0.0, complex_ok=True)
        G = units.freq(G)
        try:
            modes.append(MechanicalMode(omega=omega, gamma=gamma, n_T=n_T, G=G))
        except ValueError as exc:
            raise ConfigError(f"'{where}': {exc}", key=where) from None
    return tuple(modes)


def _opo(cfg, units) -> OpoParams:
    sec = _section(cfg, "opo")
    _check_keys(sec, ("chi", "kappa_c", "kappa_c_prime", "r_plus", "ratio",
                      "squeezing_db", "loss_fraction"), "opo")
    try:
        if "chi" in sec or "kappa_c" in sec:
            return OpoParams(units.freq(_num(sec, "chi", "opo")),
                             units.freq(_num(sec, "kappa_c", "opo")),
                             units.freq(_num(sec, "kappa_c_prime", "opo", default=0.0)))
        r_plus = units.freq(_num(sec, "r_plus", "opo"))
        loss = _num(sec, "loss_fraction", "opo", default=0.0)
        if "squeezing_db" in sec:
            # with no internal loss S(0) = (r_-/r_+)^2
            ratio = 10.0 ** (-_num(sec, "squeezing_db", "opo") / 20.0)
        else:
            ratio = _num(sec, "ratio", "opo")
        return OpoParams.from_bandwidth(r_plus, ratio, loss)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"'opo': {exc}", key="opo") from None


def build_model(cfg: Mapping[str, Any]) -> SystemModel:
    """Model described by an already parsed configuration mapping."""
    cfg = dict(cfg)
    for k in cfg:
        if k not in TOP_KEYS:
            raise ConfigError(f"unknown top-level key '{k}'; allowed: {', '.join(TOP_KEYS)}",
                              key=k)
    units = _Units(cfg)
    cav = _section(cfg, "cavity")
    _check_keys(cav, ("kappa_a", "kappa_a_prime"), "cavity")
    fields = _section(cfg, "fields")
    _check_keys(fields, ("epsilon_L", "epsilon_a"), "fields")
    try:
        cavity = CavityParams(units.freq(_num(cav, "kappa_a", "cavity")),
                              units.freq(_num(cav, "kappa_a_prime", "cavity", default=0.0)))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"'cavity': {exc}", key="cavity") from None
    freq = FrequencyConfig(units.freq(_num(fields, "epsilon_L", "fields")),
                           units.freq(_num(fields, "epsilon_a", "fields", default=0.0)))
    model = SystemModel(cavity=cavity, modes=_mechanics(cfg, units), opo=_opo(cfg, units),
                        freq=freq, label=str(cfg.get("label", "")))
    net = _section(cfg, "network", required=False)
    if net:
        from .network import build_star_model
        _check_keys(net, ("N", "delta", "couplings"), "network")
        N = net.get("N")
        if not isinstance(N, int) or isinstance(N, bool) or N < 1:
            raise ConfigError("'network.N' must be an integer >= 1", key="network.N")
        delta = units.freq(_num(net, "delta", "network"))
        coup = net.get("couplings")
        try:
            c = np.asarray(coup, dtype=float) / units.ref_hz
            model = build_star_model(N, delta, c, model)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"'network.couplings': {exc}", key="network.couplings") from None
    return model


def evaluation_options(cfg: Mapping[str, Any]) -> dict:
    """Regime, time, 0-based pair and log base from the ``evaluation`` section."""
    sec = _section(cfg, "evaluation", required=False)
    _check_keys(sec, ("regime", "time", "pair", "log_base"), "evaluation")
    regime = sec.get("regime", "full")
    if regime not in REGIMES:
        raise ConfigError(f"'evaluation.regime' must be one of {REGIMES}, got {regime!r}",
                          key="evaluation.regime")
    pair = sec.get("pair", [1, 2])
    if (not isinstance(pair, (list, tuple)) or len(pair) != 2
            or not all(isinstance(p, int) and p >= 1 for p in pair) or pair[0] == pair[1]):
        raise ConfigError("'evaluation.pair' must be two distinct 1-based mode indices",
                          key="evaluation.pair")
    base = sec.get("log_base", "e")
    if base not in ("e", 2, "2"):
        raise ConfigError("'evaluation.log_base' must be 'e' or 2", key="evaluation.log_base")
    units = _Units(cfg) if "mechanics" in cfg else None
    t = _num(sec, "time", "evaluation", default=0.0)
    if units is not None and units.mode == "physical":
        # seconds -> dimensionless time in units of 1 / omega_ref
        t = t * 2 * math.pi * units.ref_hz
    return dict(regime=regime, time=t, pair=(pair[0] - 1, pair[1] - 1),
                log_base=math.e if base == "e" else 2.0)


def sweep_options(cfg: Mapping[str, Any]):
    from .optimize import SweepSpec
    sec = _section(cfg, "sweep")
    _check_keys(sec, ("target", "start", "stop", "count", "scale", "ratio"), "sweep")
    count = sec.get("count")
    if not isinstance(count, int) or isinstance(count, bool):
        raise ConfigError("'sweep.count' must be an integer", key="sweep.count")
    try:
        ratio = sec.get("ratio")
        return SweepSpec(target=str(sec.get("target")), start=_num(sec, "start", "sweep"),
                         stop=_num(sec, "stop", "sweep"), count=count,
                         scale=sec.get("scale", "linear"),
                         ratio=None if ratio is None else _num(sec, "ratio", "sweep"))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"'sweep': {exc}", key="sweep") from None


def optimize_options(cfg: Mapping[str, Any], evaluation: dict):
    from .optimize import OptimizationSpec
    sec = _section(cfg, "optimize")
    _check_keys(sec, ("bounds", "ratio", "maxiter"), "optimize")
    bounds = sec.get("bounds")
    if not isinstance(bounds, Mapping) or not bounds:
        raise ConfigError("'optimize.bounds' must map parameter names to [lo, hi]",
                          key="optimize.bounds")
    parsed = {}
    for name, b in bounds.items():
        key = f"optimize.bounds.{name}"
        if not isinstance(b, (list, tuple)) or len(b) != 2:
            raise ConfigError(f"'{key}' must be [lo, hi]", key=key)
        parsed[name] = (_num({"lo": b[0]}, "lo", key), _num({"hi": b[1]}, "hi", key))
    ratio = sec.get("ratio")
    try:
        return OptimizationSpec(bounds=parsed, regime=evaluation["regime"],
                                pair=evaluation["pair"], t=evaluation["time"],
                                ratio=None if ratio is None else _num(sec, "ratio", "optimize"),
                                maxiter=int(sec.get("maxiter", 400)))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"'optimize': {exc}", key="optimize.bounds") from None


def model_to_config(model: SystemModel) -> dict:
    """Scaled-unit configuration mapping that rebuilds ``model``."""
    def g(v):
        v = complex(v)
        return v.real if v.imag == 0 else [v.real, v.imag]
    return {
        "units": "scaled",
        "label": model.label,
        "cavity": {"kappa_a": model.cavity.kappa_a, "kappa_a_prime": model.cavity.kappa_a_prime},
        "opo": {"chi": model.opo.chi, "kappa_c": model.opo.kappa_c,
                "kappa_c_prime": model.opo.kappa_c_prime},
        "fields": {"epsilon_L": model.freq.epsilon_L, "epsilon_a": model.freq.epsilon_a},
        "mechanics": [{"omega": m.omega, "gamma": m.gamma, "n_T": m.n_T, "G": g(m.G)}
                      for m in model.modes],
    }
