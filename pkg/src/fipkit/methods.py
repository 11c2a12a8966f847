"""One entry point for every predictor, keyed by method tag.

The CLI, the evaluation harness, and the HTTP service all predict
through `run_method`, so a given (history prefix, basket, config) yields
the same ranked items everywhere.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

from . import baselines
from .domain import Basket, CustomerHistory, XmtConfig
from .patterns import TarsPattern, mine_tars, predict_forgotten_tars
from .profiles import CustomerProfile, build_profile
from .scoring import Prediction, ScoreBreakdown, predict_forgotten

METHODS = baselines.METHODS


@dataclass(frozen=True, slots=True)
class MethodResult:
    method: str
    forgotten: tuple[str, ...]
    predicted_basket: tuple[str, ...]
    breakdowns: dict[str, ScoreBreakdown]


def run_method(
    method: str,
    prefix: CustomerHistory,
    profile: CustomerProfile,
    current: Basket,
    cfg: XmtConfig,
    patterns: list[TarsPattern] | None = None,
) -> MethodResult:
    """Predict forgotten items with the given method over a training prefix.

    `profile` must be built from `prefix`. For the pattern-based method,
    `patterns` may be passed to reuse a mined set; otherwise the prefix
    is mined on the fly.
    """
    if method == "xmt":
        return _from_prediction(method, predict_forgotten(profile, current, cfg))
    if method == "txmt":
        mined = patterns if patterns is not None else mine_tars(prefix)
        pred = predict_forgotten_tars(profile, mined, current, prefix.baskets, cfg)
        return _from_prediction(method, pred)
    if method == "top":
        ranked = baselines.top_predict(profile, current, cfg.k)
    elif method == "last":
        ranked = baselines.last_predict(prefix, current, cfg.k)
    elif method == "mc":
        ranked = baselines.mc_predict(prefix, current, cfg.k)
    elif method == "ibp":
        ranked = baselines.ibp_predict(profile, current, cfg.k)
    else:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
    ranked_t = tuple(ranked)
    return MethodResult(method=method, forgotten=ranked_t, predicted_basket=ranked_t, breakdowns={})


def _from_prediction(method: str, pred: Prediction) -> MethodResult:
    return MethodResult(
        method=method,
        forgotten=pred.forgotten,
        predicted_basket=pred.predicted_basket,
        breakdowns=pred.breakdowns,
    )


def profile_for(
    prefix: CustomerHistory, at: dt.date, cfg: XmtConfig, large_basket_threshold: int = 10
) -> CustomerProfile:
    return build_profile(prefix, at, cfg, large_basket_threshold=large_basket_threshold)
