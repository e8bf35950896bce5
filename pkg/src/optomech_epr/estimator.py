"""scikit-learn style wrappers around the steady-state solvers.

These are thin adapters. They give the solvers ``get_params``/``set_params``,
input validation and pipeline compatibility; all physics lives in the
functional modules.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .measures import entanglement_report
from .model import SystemModel
from .optimize import SWEEP_TARGETS, evaluate_point, with_param
from .steadystate import REGIMES, steady_state

OUTPUT_COLUMNS = ("E_N", "var_min", "var_orth", "theta1", "theta2")


def _check_common(regime, pair):
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}, got {regime!r}")
    if len(tuple(pair)) != 2 or pair[0] == pair[1]:
        raise ValueError(f"pair must hold two distinct mode indices, got {pair!r}")


class SteadyStateEntanglement(BaseEstimator):
    """Steady state of one model and its two-mode figures of merit.

    Parameters
    ----------
    regime : str
        One of ``full``, ``broadband``, ``resonant``, ``ideal``.
    t : float
        Evaluation time.
    pair : tuple of int
        0-based mechanical mode indices.
    log_base : float
        Base of the logarithmic negativity.

    Attributes
    ----------
    solution_ : SteadyStateSolution
    report_ : EntanglementReport
    """

    def __init__(self, regime="full", t=0.0, pair=(0, 1), log_base=np.e):
        self.regime = regime
        self.t = t
        self.pair = pair
        self.log_base = log_base

    def fit(self, X: SystemModel, y=None):
        if not isinstance(X, SystemModel):
            raise TypeError(f"fit expects a SystemModel, got {type(X).__name__}")
        _check_common(self.regime, self.pair)
        if max(self.pair) >= X.n_modes:
            raise ValueError(f"pair {self.pair} out of range for {X.n_modes} modes")
        self.solution_ = steady_state(X, self.regime)
        self.report_ = entanglement_report(self.solution_, t=self.t, pair=tuple(self.pair),
                                           base=self.log_base)
        return self

    def predict(self, X=None) -> np.ndarray:
        """``E_N`` at each time in ``X`` (default: the fitted time)."""
        check_is_fitted(self, "solution_")
        ts = np.array([self.t]) if X is None else np.ravel(np.asarray(X, dtype=float))
        return np.array([entanglement_report(self.solution_, t=t, pair=tuple(self.pair),
                                             base=self.log_base).E_N for t in ts])

    def score(self, X=None, y=None) -> float:
        check_is_fitted(self, "report_")
        return self.report_.E_N


class ParameterSweepTransformer(TransformerMixin, BaseEstimator):
    """Map a column of parameter values to the two-mode figures of merit.

    ``transform`` returns an ``(n, 5)`` array with columns
    :data:`OUTPUT_COLUMNS`; unstable points give NaN rows.
    """

    def __init__(self, model: SystemModel | None = None, target="omega_minus",
                 regime="full", t=0.0, pair=(0, 1), ratio=None):
        self.model = model
        self.target = target
        self.regime = regime
        self.t = t
        self.pair = pair
        self.ratio = ratio

    def fit(self, X=None, y=None):
        if not isinstance(self.model, SystemModel):
            raise TypeError("model must be a SystemModel")
        if self.target not in SWEEP_TARGETS:
            raise ValueError(f"unknown target {self.target!r}; choose from {SWEEP_TARGETS}")
        _check_common(self.regime, self.pair)
        if X is not None:
            check_array(X, ensure_2d=True)
        self.n_features_in_ = 1
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, ensure_2d=True)
        if X.shape[1] != 1:
            raise ValueError(f"expected one column of {self.target} values, got {X.shape[1]}")
        out = np.full((X.shape[0], len(OUTPUT_COLUMNS)), np.nan)
        for i, v in enumerate(X[:, 0]):
            try:
                if self.target == "t":
                    row = evaluate_point(self.model, self.regime, float(v), tuple(self.pair))
                else:
                    m = with_param(self.model, self.target, v, self.ratio)
                    row = evaluate_point(m, self.regime, self.t, tuple(self.pair))
            except ValueError:
                continue
            out[i] = [row[c] for c in OUTPUT_COLUMNS]
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array(OUTPUT_COLUMNS, dtype=object)
