"""scikit-learn adapters."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from optomech_epr.estimator import (OUTPUT_COLUMNS, ParameterSweepTransformer,
                                    SteadyStateEntanglement)
from optomech_epr.optimize import SweepSpec, sweep


def test_steady_state_estimator(ref):
    est = SteadyStateEntanglement(regime="full")
    with pytest.raises(NotFittedError):
        est.score()
    est.fit(ref)
    assert est.score() == pytest.approx(1.8968616084827725, rel=1e-12)
    assert est.report_.var_min == pytest.approx(0.12831220062310322, rel=1e-8)
    E = est.predict([0.0, 0.5])
    assert E.shape == (2,) and E[0] == est.score()
    assert est.get_params()["regime"] == "full"
    twin = clone(est).set_params(regime="broadband").fit(ref)
    assert twin.score() == pytest.approx(1.805634623008133, rel=1e-9)


def test_estimator_validation(ref):
    with pytest.raises(TypeError):
        SteadyStateEntanglement().fit(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        SteadyStateEntanglement(regime="bogus").fit(ref)
    with pytest.raises(ValueError):
        SteadyStateEntanglement(pair=(0, 2)).fit(ref)


def test_sweep_transformer_matches_sweep(ref):
    grid = np.linspace(0.0, 0.2, 5)
    tr = ParameterSweepTransformer(model=ref, target="omega_minus")
    out = tr.fit_transform(grid[:, None])
    ref_tab = sweep(ref, SweepSpec("omega_minus", 0.0, 0.2, 5))
    assert out.shape == (5, len(OUTPUT_COLUMNS))
    np.testing.assert_array_equal(out[:, 0], ref_tab["E_N"])
    assert list(tr.get_feature_names_out()) == list(OUTPUT_COLUMNS)


def test_sweep_transformer_in_pipeline(ref):
    pipe = make_pipeline(FunctionTransformer(lambda x: 0.01 * x),
                         ParameterSweepTransformer(model=ref, target="n_T"))
    out = pipe.fit_transform(np.array([[0.0], [1000.0]]))
    assert out[0, 0] > out[1, 0]


def test_sweep_transformer_nan_rows_and_validation(ref):
    tr = ParameterSweepTransformer(model=ref, target="G_plus").fit()
    out = tr.transform(np.array([[0.03], [0.6], [-1.0]]))
    assert np.isfinite(out[0]).all() and np.isnan(out[1]).all()
    with pytest.raises(ValueError):
        tr.transform(np.zeros((2, 2)))
    with pytest.raises(TypeError):
        ParameterSweepTransformer().fit()
    with pytest.raises(ValueError):
        ParameterSweepTransformer(model=ref, target="mass").fit()
    t = ParameterSweepTransformer(model=ref, target="t").fit()
    assert t.transform([[0.0]])[0, 0] == pytest.approx(1.8968616084827725)
