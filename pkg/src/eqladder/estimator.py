"""scikit-learn style wrappers around the interpolation, front and ladder steps."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .interp import DEFAULT_STEP, AkimaSpline
from .ladder import Method
from .pareto import Domain, mean_composition, pareto_mask
from .pipeline import run_pipeline
from .validation import (
    check_corpus,
    check_ladder_config,
    check_space,
    check_step,
    check_xy,
)


class AkimaInterpolator(RegressorMixin, BaseEstimator):
    """Akima spline regressor on a single feature.

    >>> AkimaInterpolator().fit([10, 20, 30, 40, 50], [1, 3, 5, 7, 9]).predict([25])
    array([4.])
    """

    def fit(self, X, y):
        x, y = check_xy(X, y)
        order = np.argsort(x, kind="stable")
        self.spline_ = AkimaSpline(x[order], y[order])
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "spline_")
        return np.atleast_1d(self.spline_(check_xy(X)))


class ParetoFrontSelector(TransformerMixin, BaseEstimator):
    """Keep the rows of a ``(cost, quality)`` matrix that lie on the Pareto front.

    Optional third and fourth columns (resolution, CRF) break exact ties.
    ``transform`` returns the surviving rows sorted by ascending cost.
    """

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_features=2)
        if X.shape[1] > 4:
            raise ValueError(f"expected 2 to 4 columns, got {X.shape[1]}")
        extra = [X[:, j] if X.shape[1] > j else None for j in (2, 3)]
        self.support_ = pareto_mask(X[:, 0], X[:, 1], *extra)
        self.n_features_in_ = X.shape[1]
        return self

    def get_support(self, indices=False):
        check_is_fitted(self, "support_")
        return np.flatnonzero(self.support_) if indices else self.support_

    def transform(self, X):
        check_is_fitted(self, "support_")
        X = check_array(X, ensure_min_features=2)
        if X.shape[0] != self.support_.size:
            raise ValueError("transform expects the matrix the selector was fitted on")
        kept = X[self.support_]
        return kept[np.argsort(kept[:, 0], kind="stable")]


class LadderBuilder(TransformerMixin, BaseEstimator, auto_wrap_output_keys=None):
    """Build bitrate ladders from rate-quality-energy measurements.

    ``fit`` interpolates every (sequence, resolution) group, extracts the RQ
    and EQ fronts, and builds all four ladders per sequence. ``transform``
    returns, for the configured ``method`` and ``domain``, an array of shape
    ``(n_sequences, n_rungs, 3)`` holding (bitrate, quality, energy) per rung,
    NaN where a rung was skipped. The output is 3-D, so ``set_output``
    containers do not apply.
    """

    def __init__(
        self,
        method="rate_driven",
        domain="EQ",
        step=DEFAULT_STEP,
        space="linear",
        rate_min=500.0,
        rate_max=128_000.0,
        rate_band=0.10,
        quality_min=50.0,
        quality_max=100.0,
        quality_step=10.0,
        quality_band=5.0,
        fallback="skip",
        n_jobs=None,
    ):
        self.method = method
        self.domain = domain
        self.step = step
        self.space = space
        self.rate_min = rate_min
        self.rate_max = rate_max
        self.rate_band = rate_band
        self.quality_min = quality_min
        self.quality_max = quality_max
        self.quality_step = quality_step
        self.quality_band = quality_band
        self.fallback = fallback
        self.n_jobs = n_jobs

    def _run(self, X):
        corpus = check_corpus(X)
        step = check_step(self.step, corpus.crf_grid)
        results = run_pipeline(
            corpus,
            step=step,
            space=check_space(self.space),
            config=self.config_,
            jobs=self.n_jobs or 1,
        )
        return corpus, results

    def fit(self, X, y=None):
        self.config_ = check_ladder_config(self.get_params())
        self.method_ = Method.parse(self.method)
        self.domain_ = Domain.parse(self.domain)
        corpus, results = self._run(X)
        self.sequence_ids_ = [r.sequence_id for r in results]
        self.curves_ = {r.sequence_id: r.curves for r in results}
        self.fronts_ = {r.sequence_id: r.fronts for r in results}
        self.ladders_ = {r.sequence_id: r.ladders for r in results}
        self.composition_ = {
            d: mean_composition((r.composition[d] for r in results), corpus.resolutions)
            for d in Domain
        }
        self.resolutions_ = corpus.resolutions
        return self

    def ladder(self, sequence_id, method=None, domain=None):
        check_is_fitted(self, "ladders_")
        m = self.method_ if method is None else Method.parse(method)
        d = self.domain_ if domain is None else Domain.parse(domain)
        return self.ladders_[sequence_id][(m, d)]

    def transform(self, X=None):
        check_is_fitted(self, "ladders_")
        if X is None:
            ladders = [self.ladders_[s][(self.method_, self.domain_)] for s in self.sequence_ids_]
        else:
            _, results = self._run(X)
            ladders = [r.ladders[(self.method_, self.domain_)] for r in results]
        return ladders_to_array(ladders)

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X, y).transform()


def ladders_to_array(ladders):
    ladders = list(ladders)
    n_rungs = max((len(l.rungs) for l in ladders), default=0)
    out = np.full((len(ladders), n_rungs, 3), np.nan)
    for i, lad in enumerate(ladders):
        for j, r in enumerate(lad.rungs):
            if r.filled:
                out[i, j] = (r.chosen.bitrate, r.chosen.quality, r.chosen.decode_energy)
    return out
