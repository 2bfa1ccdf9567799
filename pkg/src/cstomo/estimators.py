"""Scikit-learn style estimator wrappers.

Thin fit/predict adapters around the functional solvers, so the
reconstruction step composes with sklearn tooling (get_params/set_params,
clone, grid search over solver parameters).  `fit` consumes a Dataset;
`predict` returns the expected count matrix for a settings plan.
"""

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import InvalidArgumentError
from .model_selection import epsilon_hat
from .pauli import SettingsPlan, apply_sensing
from .solver import SolverConfig, mle_estimate, reconstruct

__all__ = ["CompressedSensingEstimator", "MaximumLikelihoodEstimator"]


class CompressedSensingEstimator(BaseEstimator):
    """Trace-minimization reconstruction as a fit/predict estimator.

    Parameters
    ----------
    epsilon : float or None
        Data-fit radius in squared-count units; None selects
        ``epsilon_multiplier * epsilon_hat(dataset)`` at fit time.
    epsilon_multiplier : float
        Scaling applied to the automatic epsilon estimate.
    max_iterations, primal_tolerance, constraint_tolerance, penalty_parameter
        Passed through to SolverConfig.
    """

    def __init__(
        self,
        epsilon=None,
        epsilon_multiplier=1.0,
        max_iterations=5000,
        primal_tolerance=1e-9,
        constraint_tolerance=None,
        penalty_parameter=1.0,
    ):
        self.epsilon = epsilon
        self.epsilon_multiplier = epsilon_multiplier
        self.max_iterations = max_iterations
        self.primal_tolerance = primal_tolerance
        self.constraint_tolerance = constraint_tolerance
        self.penalty_parameter = penalty_parameter

    def _config(self):
        return SolverConfig(
            max_iterations=self.max_iterations,
            primal_tolerance=self.primal_tolerance,
            constraint_tolerance=self.constraint_tolerance,
            penalty_parameter=self.penalty_parameter,
        )

    def fit(self, dataset, y=None):
        eps = self.epsilon
        if eps is None:
            eps = self.epsilon_multiplier * epsilon_hat(dataset)
        self.result_ = reconstruct(dataset, eps, self._config())
        self.estimate_ = self.result_.estimate
        self.epsilon_ = eps
        return self

    def predict(self, plan):
        """Expected counts A(estimate) for a SettingsPlan or word list."""
        if self.estimate_ is None:
            raise InvalidArgumentError("fit produced no estimate (infeasible problem)")
        if not isinstance(plan, SettingsPlan):
            plan = SettingsPlan(plan, 1)
        return apply_sensing(self.estimate_, plan)

    def score(self, dataset, y=None):
        """Negative prediction error on held-out data (higher is better)."""
        plan = SettingsPlan(dataset.words, dataset.shots)
        predicted = self.predict(plan)
        return -float(np.linalg.norm(predicted - dataset.counts_matrix()))


class MaximumLikelihoodEstimator(BaseEstimator):
    """Iterative maximum-likelihood reconstruction as a fit estimator."""

    def __init__(self, max_iterations=2000, tolerance=1e-10):
        self.max_iterations = max_iterations
        self.tolerance = tolerance

    def fit(self, dataset, y=None):
        self.estimate_ = mle_estimate(
            dataset, max_iterations=self.max_iterations, tolerance=self.tolerance
        )
        return self

    def predict(self, plan):
        if not isinstance(plan, SettingsPlan):
            plan = SettingsPlan(plan, 1)
        return apply_sensing(self.estimate_, plan)
