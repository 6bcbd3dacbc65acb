"""Doubly robust ATE / ATET / GATE / CATE estimation from tabular or text covariates."""

import json

from . import _core
from ._core import (
    CrossfitResult,
    Dataset,
    TextCausalError,
    area_ratio,
    cate_quantile_curve,
    clip_propensity,
    dr_label,
    featurize,
    fit_elastic_net,
    fit_ols,
    gbt_fit_predict,
    lift_curve,
    pearson,
    run_cli,
    spearman,
)

__all__ = [
    "CrossfitResult",
    "Dataset",
    "TextCausalError",
    "area_ratio",
    "cate_quantile_curve",
    "clip_propensity",
    "dr_label",
    "featurize",
    "fit_elastic_net",
    "fit_ols",
    "gbt_fit_predict",
    "generate",
    "inject_nuisances",
    "lift_curve",
    "load_dataset",
    "pearson",
    "run_cli",
    "run_crossfit",
    "spearman",
]


def _dump(config):
    return json.dumps(config or {})


def generate(**config):
    """Synthetic dataset with known truth; keyword arguments mirror the [synthetic] config table."""
    return _core._generate(_dump(config))


def load_dataset(path, **schema):
    return _core._load_dataset(str(path), _dump(schema))


def run_crossfit(dataset, config=None):
    """Cross-fit nuisances and estimate effects; `config` mirrors the [crossfit] table."""
    return _core._run_crossfit(dataset, _dump(config))


def inject_nuisances(dataset, g1, g0, mu, config=None):
    """Run scoring and estimation with fixed per-unit nuisance values."""
    return _core._inject_truth(dataset, list(g1), list(g0), list(mu), _dump(config))
