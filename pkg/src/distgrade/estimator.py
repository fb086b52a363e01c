"""scikit-learn style front end for column-wise KS normality grading."""

from __future__ import annotations

import secrets

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .distributions import NormalParams, normal_cdf
from .ecdf import Sample
from .kstest import DEFAULT_ALPHA, PMethod, Verdict, check_alpha, ks_normality_test


def _per_column(value, n_features, name):
    if value is None:
        return [None] * n_features
    arr = np.broadcast_to(np.asarray(value, dtype=float), (n_features,))
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr.tolist()


class KSNormalityGrader(TransformerMixin, BaseEstimator):
    """Kolmogorov-Smirnov normality test applied to every column of ``X``.

    Parameters
    ----------
    alpha : float, default=0.05
        Significance level; a column is rejected when its p-value is
        strictly below it.
    method : {"exact", "asymptotic", "montecarlo"}, default="exact"
    n_resamples : int, default=10000
        Monte Carlo replicates (``method="montecarlo"`` only).
    random_state : int or None, default=None
        Seed for the Philox generator behind Monte Carlo p-values.  ``None``
        draws a fresh seed at ``fit``; it is stored in ``seed_``.
    mu, sigma : float or array-like of shape (n_features,), optional
        Hypothesised normal parameters.  Both must be given together; when
        omitted they are estimated per column (mean, n-1 std).
    allow_fallback : bool, default=False
        Use the asymptotic p-value when the exact method is unavailable.

    Attributes
    ----------
    mu_, sigma_ : ndarray of shape (n_features,)
    statistic_, pvalue_ : ndarray of shape (n_features,)
    reject_ : ndarray of bool
    results_ : list of TestResult
    """

    def __init__(
        self,
        alpha=DEFAULT_ALPHA,
        method="exact",
        n_resamples=10_000,
        random_state=None,
        mu=None,
        sigma=None,
        allow_fallback=False,
    ):
        self.alpha = alpha
        self.method = method
        self.n_resamples = n_resamples
        self.random_state = random_state
        self.mu = mu
        self.sigma = sigma
        self.allow_fallback = allow_fallback

    def _pmethod(self):
        if self.method == "montecarlo":
            return PMethod.monte_carlo(self.n_resamples, self.seed_)
        return PMethod(self.method)

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=float, ensure_min_samples=1)
        alpha = check_alpha(self.alpha)
        if (self.mu is None) != (self.sigma is None):
            raise ValueError("mu and sigma must be given together")
        self.seed_ = (
            secrets.randbits(64) if self.random_state is None else int(self.random_state)
        )
        method = self._pmethod()
        mus = _per_column(self.mu, X.shape[1], "mu")
        sigmas = _per_column(self.sigma, X.shape[1], "sigma")
        names = getattr(self, "feature_names_in_", None)

        self.results_ = []
        for j in range(X.shape[1]):
            params = None if mus[j] is None else NormalParams(mus[j], sigmas[j])
            name = str(names[j]) if names is not None else f"x{j}"
            self.results_.append(
                ks_normality_test(
                    Sample(X[:, j]),
                    params,
                    alpha,
                    method,
                    variable=name,
                    allow_fallback=self.allow_fallback,
                )
            )
        self.mu_ = np.array([r.normal_params.mu for r in self.results_])
        self.sigma_ = np.array([r.normal_params.sigma for r in self.results_])
        self.statistic_ = np.array([r.statistic.d for r in self.results_])
        self.pvalue_ = np.array([r.p_value for r in self.results_])
        self.reject_ = np.array([r.verdict is Verdict.REJECT_NULL for r in self.results_])
        return self

    def transform(self, X):
        """Probability integral transform under each column's fitted normal."""
        check_is_fitted(self, "results_")
        X = validate_data(self, X, dtype=float, reset=False)
        out = np.empty_like(X)
        for j, r in enumerate(self.results_):
            out[:, j] = normal_cdf(X[:, j], r.normal_params)
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "results_")
        names = getattr(self, "feature_names_in_", None)
        if input_features is not None:
            names = input_features
        if names is None:
            names = [f"x{j}" for j in range(self.n_features_in_)]
        return np.asarray([f"cdf_{n}" for n in names], dtype=object)
