"""Command-line front end.

Every subcommand writes one CSV table (to ``--out`` or stdout). Exit codes:
0 on success, 2 for configuration errors, 3 for physics errors.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .exceptions import ConfigError, PhysicsError
from .measures import entanglement_report
from .optimize import SWEEP_COLUMNS, SweepSpec, maximize_EN, sweep
from .presets import PRESETS, reference_model, run_preset
from .reservoir import broadband_moments, squeezing_db, squeezing_spectrum
from .steadystate import REGIMES, steady_state
from .tables import Table, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS = 0, 2, 3


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, help="YAML or JSON run configuration")
    p.add_argument("--regime", choices=REGIMES, help="steady-state model (default: full)")
    p.add_argument("--time", type=float, help="evaluation time (default: 0)")
    p.add_argument("--out", type=Path, help="CSV destination (default: stdout)")
    p.add_argument("--workers", type=int, default=1, help="worker processes for sweeps")
    p.add_argument("--pair", type=int, nargs=2, metavar=("J", "K"),
                   help="1-based mechanical mode indices")
    p.add_argument("--log-base", choices=("e", "2"), help="base of the logarithmic negativity")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="optomech-epr",
        description="Steady-state mechanical entanglement driven by a squeezed reservoir.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sub.add_parser("steady", parents=[common], help="moments and entanglement report")

    sp = sub.add_parser("sweep", parents=[common], help="one-parameter sweep")
    sp.add_argument("--target", help="parameter to sweep (overrides the config)")
    sp.add_argument("--start", type=float)
    sp.add_argument("--stop", type=float)
    sp.add_argument("--count", type=int)
    sp.add_argument("--scale", choices=("linear", "log"))

    sub.add_parser("optimize", parents=[common], help="maximize E_N over field parameters")

    nw = sub.add_parser("network", parents=[common], help="pairwise E_N of a star network")
    nw.add_argument("--N", type=int, help="number of pairs (overrides the config)")
    nw.add_argument("--delta", type=float, help="detuning unit")
    nw.add_argument("--couplings", type=float, nargs=2, metavar=("G_ODD", "G_EVEN"))

    spc = sub.add_parser("spectrum", parents=[common], help="squeezing spectrum of the source")
    spc.add_argument("--omega-max", type=float, default=5.0)
    spc.add_argument("--count", type=int, default=101)

    rp = sub.add_parser("repro", parents=[common], help="figure presets")
    rp.add_argument("preset", choices=sorted(PRESETS))
    rp.add_argument("--points", type=int, help="grid size override")

    # debugging aid: compare brute-force integration with the analytic steady state
    orc = sub.add_parser("oracle", parents=[common])
    orc.add_argument("--periods", type=float, default=20.0,
                     help="integration length in slowest decay times")
    return parser


def _options(args):
    cfg = cfgmod.load_file(args.config) if args.config else {}
    ev = cfgmod.evaluation_options(cfg) if cfg else dict(regime="full", time=0.0,
                                                          pair=(0, 1), log_base=math.e)
    if args.regime:
        ev["regime"] = args.regime
    if args.time is not None:
        ev["time"] = args.time
    if args.pair:
        j, k = args.pair
        if j < 1 or k < 1 or j == k:
            raise ConfigError("--pair needs two distinct 1-based indices", key="--pair")
        ev["pair"] = (j - 1, k - 1)
    if args.log_base:
        ev["log_base"] = math.e if args.log_base == "e" else 2.0
    return cfg, ev


def _model(cfg):
    return cfgmod.build_model(cfg) if cfg else reference_model()


def _check_pair(model, pair):
    if max(pair) >= model.n_modes:
        raise ConfigError(f"pair {pair[0] + 1} {pair[1] + 1} exceeds the "
                          f"{model.n_modes} mechanical modes", key="pair")


def _meta(cmd, model, ev, **extra):
    from .config import model_to_config
    meta = {"command": cmd, "model": model_to_config(model),
            "evaluation": {"regime": ev["regime"], "time": ev["time"],
                           "pair": [ev["pair"][0] + 1, ev["pair"][1] + 1],
                           "log_base": "e" if ev["log_base"] == math.e else 2}}
    meta.update(extra)
    return meta


def cmd_steady(args, cfg, ev) -> Table:
    model = _model(cfg)
    _check_pair(model, ev["pair"])
    sol = steady_state(model, ev["regime"])
    rep = entanglement_report(sol, t=ev["time"], pair=ev["pair"], base=ev["log_base"])
    rows = [(k, float(v), 0.0) for k, v in rep.as_dict().items()]
    for name in ("V0", "Vminus", "Vplus"):
        M = getattr(sol, name)
        for i in range(M.shape[0]):
            for j in range(M.shape[1]):
                rows.append((f"{name}[{i},{j}]", M[i, j].real, M[i, j].imag))
    return Table(("quantity", "real", "imag"), rows,
                 _meta("steady", model, ev, frame=sol.frame))


def cmd_sweep(args, cfg, ev) -> Table:
    model = _model(cfg)
    _check_pair(model, ev["pair"])
    if args.target:
        try:
            spec = SweepSpec(args.target, args.start, args.stop, args.count,
                             args.scale or "linear")
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"sweep flags: {exc}", key="--target") from None
    else:
        spec = cfgmod.sweep_options(cfg)
    tab = sweep(model, spec, regime=ev["regime"], t=ev["time"], pair=ev["pair"],
                workers=args.workers)
    cols = (spec.target,) + SWEEP_COLUMNS[1:]
    return Table(cols, list(tab.rows()), _meta("sweep", model, ev, sweep=spec.__dict__))


def cmd_optimize(args, cfg, ev) -> Table:
    model = _model(cfg)
    _check_pair(model, ev["pair"])
    if not cfg.get("optimize"):
        raise ConfigError("optimize needs an 'optimize' section in --config", key="optimize")
    spec = cfgmod.optimize_options(cfg, ev)
    res = maximize_EN(model, spec)
    rows = [("E_N", res.E_N)] + [(k, v) for k, v in res.params.items()]
    rows.append(("evaluations", len(res.trace)))
    return Table(("quantity", "value"), rows,
                 _meta("optimize", model, ev, bounds=dict(spec.bounds), notes=res.notes))


def cmd_network(args, cfg, ev) -> Table:
    from .network import build_star_model, pairwise_entanglement_map
    model = _model(cfg)
    if args.N is not None:
        if args.delta is None or args.couplings is None:
            raise ConfigError("--N needs --delta and --couplings", key="--N")
        model = build_star_model(args.N, args.delta, tuple(args.couplings), model)
    if model.n_modes < 2:
        raise ConfigError("network needs at least two mechanical modes", key="network")
    sol = steady_state(model, ev["regime"])
    E = pairwise_entanglement_map(sol, t=ev["time"])
    if ev["log_base"] != math.e:
        E = E / np.log(ev["log_base"])
    M = E.shape[0]
    if args.pair:
        _check_pair(model, ev["pair"])
        pairs = [tuple(sorted(ev["pair"]))]
    else:
        pairs = [(j, k) for j in range(M) for k in range(j + 1, M)]
    rows = [(j + 1, k + 1, j % 2 == 0 and k == j + 1, E[j, k]) for j, k in pairs]
    return Table(("j", "k", "designated", "E_N"), rows, _meta("network", model, ev))


def cmd_spectrum(args, cfg, ev) -> Table:
    model = _model(cfg)
    opo = model.opo
    if args.count < 2:
        raise ConfigError("--count must be >= 2", key="--count")
    w = np.linspace(0.0, args.omega_max, args.count)
    S = squeezing_spectrum(opo, w)
    bb = broadband_moments(opo)
    return Table(("omega", "S"), list(zip(w, S)),
                 _meta("spectrum", model, ev, S0=float(S[0]), squeezing_db=squeezing_db(opo),
                       nbar=bb.nbar, mbar=bb.mbar, r_plus=opo.r_plus, r_minus=opo.r_minus))


def cmd_repro(args, cfg, ev) -> Table:
    if args.points is not None and args.points < 2:
        raise ConfigError("--points must be >= 2", key="--points")
    return run_preset(args.preset, workers=args.workers, points=args.points)


def cmd_oracle(args, cfg, ev) -> Table:
    from .model import drift_matrix_full
    from .oracle import integrate_covariance, slowest_decay_time, vacuum_moments
    model = _model(cfg)
    A = drift_matrix_full(model)
    t_end = args.periods * slowest_decay_time(A)
    V = integrate_covariance(model, vacuum_moments(model.dim), t_end, A=A)
    ref = steady_state(model, "full").evaluate(t_end)
    err = float(np.linalg.norm(V - ref) / np.linalg.norm(ref))
    return Table(("quantity", "value"), [("t_end", t_end), ("relative_error", err)],
                 _meta("oracle", model, ev))


COMMANDS = {"steady": cmd_steady, "sweep": cmd_sweep, "optimize": cmd_optimize,
            "network": cmd_network, "spectrum": cmd_spectrum, "repro": cmd_repro,
            "oracle": cmd_oracle}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg, ev = _options(args)
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1", key="--workers")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            table = COMMANDS[args.command](args, cfg, ev)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv(table, fh)
    else:
        write_csv(table, sys.stdout)
    return EXIT_OK


def main():
    sys.exit(run())
