"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import os
from collections.abc import Mapping

import numpy as np

from .exceptions import EmptyCorpus, InvalidConfig
from .ingest import Corpus, MeasurementPoint, build_corpus, from_mapping_rows, load_corpus
from .ladder import LadderConfig

LADDER_PARAMS = (
    "rate_min",
    "rate_max",
    "rate_band",
    "quality_min",
    "quality_max",
    "quality_step",
    "quality_band",
    "fallback",
)


def check_corpus(X) -> Corpus:
    """Coerce ``X`` into a validated `Corpus`.

    Accepts a `Corpus`, a path to a CSV/JSON table, an iterable of
    `MeasurementPoint`, or an iterable of mappings with the schema's column
    names (e.g. ``DataFrame.to_dict("records")``).
    """
    if isinstance(X, Corpus):
        return X
    if isinstance(X, (str, os.PathLike)):
        return load_corpus(X)
    if hasattr(X, "to_dict") and hasattr(X, "columns"):
        X = X.to_dict("records")
    items = list(X)
    if not items:
        raise EmptyCorpus("no measurements given")
    if all(isinstance(p, MeasurementPoint) for p in items):
        return build_corpus(items)
    if all(isinstance(p, Mapping) for p in items):
        return from_mapping_rows(items)
    raise TypeError(
        "expected a Corpus, a file path, MeasurementPoints, or schema-keyed records"
    )


def check_ladder_config(params: Mapping) -> LadderConfig:
    return LadderConfig.from_dict({k: params[k] for k in LADDER_PARAMS if k in params})


def check_step(step, crf_grid):
    span = crf_grid[-1] - crf_grid[0]
    if not isinstance(step, (int, float)) or isinstance(step, bool) or not 0 < step <= span:
        raise InvalidConfig(f"step must satisfy 0 < step <= {span:g}, got {step!r}")
    return float(step)


def check_space(space):
    if space not in ("linear", "log"):
        raise InvalidConfig(f"space must be 'linear' or 'log', got {space!r}")
    return space


def check_xy(x, y=None):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        x = x.reshape(-1) if x.ndim == 2 and 1 in x.shape else x
    if x.ndim != 1:
        raise ValueError(f"expected 1-D input, got shape {np.shape(x)}")
    if not np.all(np.isfinite(x)):
        raise ValueError("input contains NaN or infinity")
    if y is None:
        return x
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape != x.shape:
        raise ValueError(f"x and y lengths differ: {x.size} != {y.size}")
    if not np.all(np.isfinite(y)):
        raise ValueError("target contains NaN or infinity")
    return x, y
