"""Parameter sweeps and multistart maximization."""

import math

import numpy as np
import pytest

from optomech_epr.exceptions import NoFeasiblePointError
from optomech_epr.optimize import (FREE_PARAMETERS, OptimizationSpec, SweepSpec,
                                   current_params, evaluate_point, maximize_EN,
                                   start_points, sweep, with_param)
from optomech_epr.presets import FIG2E_BOUNDS, reference_model
from optomech_epr.reservoir import squeezing_db


@pytest.fixture(scope="module")
def lossless_optimum():
    return maximize_EN(reference_model(), OptimizationSpec(FIG2E_BOUNDS))


def test_with_param_r_plus_keeps_ratio_and_loss(ref):
    lossy = ref.replace(opo=ref.opo.__class__(0.5, 0.9, 0.09))
    m = with_param(lossy, "r_plus", 2.8)
    assert m.opo.r_plus == pytest.approx(2.8)
    assert m.opo.r_minus / m.opo.r_plus == pytest.approx(2 / 7)
    assert m.opo.kappa_c_prime / m.opo.kappa_c == pytest.approx(0.1)
    assert squeezing_db(m.opo) == pytest.approx(squeezing_db(lossy.opo), rel=1e-12)
    third = with_param(ref, "r_plus", 1.5, ratio=1 / 3)
    assert third.opo.r_minus == pytest.approx(0.5)


def test_with_param_other_targets(ref):
    m = with_param(ref, "G_minus", 0.01)
    np.testing.assert_allclose(m.couplings, [0.04, 0.02])
    m = with_param(ref, "omega_minus", 0.2)
    np.testing.assert_allclose(m.omegas, [1.2, 0.8])
    m = with_param(ref.replace(cavity=ref.cavity.__class__(0.1, 0.01)), "kappa_a", 1.0)
    assert m.cavity.kappa_a_prime == pytest.approx(0.1)
    assert with_param(ref, "epsilon_L", 0.9).omegas.tolist() == ref.omegas.tolist()
    with pytest.raises(ValueError):
        with_param(ref, "bogus", 1.0)
    with pytest.raises(ValueError):
        with_param(ref, "kappa_a_prime", 0.2)


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec("omega_minus", 0, 1, 1)
    with pytest.raises(ValueError):
        SweepSpec("nope", 0, 1, 5)
    with pytest.raises(ValueError):
        SweepSpec("gamma", 0, 1, 5, "log")
    np.testing.assert_allclose(SweepSpec("gamma", 1e-7, 1e-3, 5, "log").grid(),
                               [1e-7, 1e-6, 1e-5, 1e-4, 1e-3])


def test_omega_minus_sweep_shape(ref):
    tab = sweep(ref, SweepSpec("omega_minus", 0.0, 0.5, 51))
    E = tab["E_N"]
    assert E[0] < 1e-3
    k = int(np.nanargmax(E))
    assert 0 < k < len(E) - 1 and E[k] > 1.5
    assert E[-1] == 0.0
    assert tab["stable"].all()


def test_n_T_sweep_is_monotone(ref):
    E = sweep(ref, SweepSpec("n_T", 0.0, 100.0, 21))["E_N"]
    assert (np.diff(E) <= 1e-12).all()


def test_kappa_a_prime_sweep_peaks_at_zero(ref):
    E = sweep(ref, SweepSpec("kappa_a_prime", 0.0, 0.1, 11))["E_N"]
    assert np.argmax(E) == 0 and (np.diff(E) <= 1e-12).all()


def test_time_sweep_and_infeasible_rows(ref):
    tab = sweep(ref, SweepSpec("t", 0.0, np.pi, 5))
    assert tab["E_N"][0] == pytest.approx(evaluate_point(ref)["E_N"])
    bad = sweep(ref, SweepSpec("G_plus", 0.03, 0.6, 4))
    assert not bad["stable"][-1] and math.isnan(bad["E_N"][-1])
    assert "UnstableSystemError" in bad["note"][-1]


def test_sweep_is_deterministic(ref):
    spec = SweepSpec("epsilon_a", -0.05, 0.05, 9)
    a = sweep(ref, spec)
    b = sweep(ref, spec)
    c = sweep(ref, spec, workers=2)
    for col in ("E_N", "var_min", "theta1"):
        assert a[col].tobytes() == b[col].tobytes() == c[col].tobytes()


def test_start_points():
    p = start_points(5)
    assert p.shape == (8, 5)
    np.testing.assert_array_equal(p[0], 0.5)
    assert set(np.unique(p[1:])) == {0.25, 0.75}
    assert len({tuple(r) for r in p}) == 8
    np.testing.assert_array_equal(start_points(5), p)


def test_optimization_spec_validation():
    with pytest.raises(ValueError):
        OptimizationSpec({})
    with pytest.raises(ValueError):
        OptimizationSpec({"kappa_a": (0.1, 1.0)})
    with pytest.raises(ValueError):
        OptimizationSpec({"epsilon_L": (1.0, math.inf)})
    assert OptimizationSpec({"epsilon_L": (0.9, 1.1)}, pair=((0, 1), (2, 3))).pairs == (
        (0, 1), (2, 3))


def test_single_parameter_matches_grid(ref):
    res = maximize_EN(ref, OptimizationSpec({"epsilon_L": (0.99, 1.01)}))
    grid = np.linspace(0.99, 1.01, 201)
    E = [evaluate_point(with_param(ref, "epsilon_L", x))["E_N"] for x in grid]
    assert abs(res.params["epsilon_L"] - grid[int(np.argmax(E))]) <= grid[1] - grid[0]
    assert res.E_N >= max(E) - 1e-9


def test_zero_coupling_bound_gives_no_entanglement(ref):
    m = with_param(with_param(ref, "G_plus", 0.0), "G_minus", 0.0)
    res = maximize_EN(m, OptimizationSpec({"G_plus": (0.0, 1e-12)}))
    assert res.E_N == 0.0
    assert "no entanglement reachable within bounds" in res.notes


def test_no_feasible_point(ref):
    with pytest.raises(NoFeasiblePointError):
        maximize_EN(with_param(ref, "G_plus", 0.6),
                    OptimizationSpec({"G_plus": (0.55, 0.6)}))


def test_lossless_optimum(lossless_optimum, ref):
    res = lossless_optimum
    assert res.params["epsilon_L"] == pytest.approx(1.0, abs=0.01)
    assert res.E_N >= evaluate_point(ref)["E_N"]
    assert res.E_N == pytest.approx(evaluate_point(res.model)["E_N"], rel=1e-12)
    assert set(res.params) == set(FREE_PARAMETERS)
    for name, (lo, hi) in FIG2E_BOUNDS.items():
        assert lo - 1e-12 <= current_params(res.model)[name] <= hi + 1e-12
    assert all(np.isfinite(v) or v == -math.inf for _, v in res.trace)


def test_optimizer_is_deterministic(ref):
    spec = OptimizationSpec({"epsilon_L": (0.99, 1.01), "epsilon_a": (-0.02, 0.02)})
    a, b = maximize_EN(ref, spec), maximize_EN(ref, spec)
    assert a.params == b.params and a.E_N == b.E_N
