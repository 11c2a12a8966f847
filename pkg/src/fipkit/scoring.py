"""Multi-factor forgotten-item scoring.

Prediction runs in two phases. Phase one ranks every profiled item by a
seasonally adjusted, recency-boosted frequency (sigma) and keeps the top
|basket| + k as the expected purchase set. Phase two re-scores the
expected items that are missing from the basket with two session
signals -- co-purchase affinity with the basket at hand (kappa) and the
tendency to be re-bought right after large trips (psi) -- and returns
the top k by the combined score (map = sigma + kappa + psi).

The combined score is stored decomposed, never re-derived, so each
prediction can be explained term by term.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

from .domain import Basket, XmtConfig
from .profiles import CustomerProfile, ItemStats


@dataclass(frozen=True, slots=True)
class ScoreBreakdown:
    """Per-item score decomposition. `map` is sigma + kappa + psi exactly;
    `tmap` is map + omega exactly (omega is 0 unless pattern scores are used)."""

    item: str
    f: float
    tau: float
    sigma: float
    kappa: float
    psi: float
    omega: float
    map: float
    tmap: float


def make_breakdown(
    item: str, f: float, tau: float, sigma: float, kappa: float, psi: float, omega: float = 0.0
) -> ScoreBreakdown:
    map_score = sigma + kappa + psi
    return ScoreBreakdown(
        item=item,
        f=f,
        tau=tau,
        sigma=sigma,
        kappa=kappa,
        psi=psi,
        omega=omega,
        map=map_score,
        tmap=map_score + omega,
    )


@dataclass(frozen=True, slots=True)
class Prediction:
    customer: str
    at: dt.date
    current_basket: Basket
    predicted_basket: tuple[str, ...]
    forgotten: tuple[str, ...]
    breakdowns: dict[str, ScoreBreakdown]


def temporal_proximity(
    f: float, eta: int | None, phi: int | None, cfg: XmtConfig
) -> float:
    """Boost the base frequency of items currently inside their due window.

    The window is [eta, eta * gamma] days since the last purchase, and
    never fires for items unseen for more than big_g days (likely
    discontinued) or lacking an interval history.
    """
    due = (
        eta is not None
        and phi is not None
        and eta <= phi <= eta * cfg.gamma
        and phi <= cfg.big_g
    )
    return f * (1.0 + (cfg.alpha - 1.0)) if due else f * 1.0


def seasonal_context(tau: float, rho: float, cfg: XmtConfig) -> float:
    """Boost items whose purchases concentrate in the current season."""
    return tau * (1.0 + (cfg.beta - 1.0)) if rho > cfg.upsilon else tau * 1.0


def basket_affinity(
    item: str, current: Basket, profile: CustomerProfile, cfg: XmtConfig
) -> float:
    """Additive boost per basket item frequently co-purchased with `item`."""
    matches = sum(1 for j in current.items if profile.chi(item, j) > cfg.big_upsilon)
    return cfg.big_theta * matches


def repurchase_tendency(stats: ItemStats, cfg: XmtConfig) -> float:
    """Flat boost for items reliably re-bought soon after large trips."""
    lam = stats.repurchase_opportunities
    if lam >= cfg.big_o and stats.repurchase_events / lam > cfg.big_phi:
        return cfg.big_lambda
    return 0.0


def sigma_scores(profile: CustomerProfile, cfg: XmtConfig) -> dict[str, tuple[float, float, float]]:
    """(f, tau, sigma) for every profiled item."""
    out = {}
    for item, st in profile.stats.items():
        f = st.base_freq
        tau = temporal_proximity(f, st.median_interval_days, st.days_since_last, cfg)
        sigma = seasonal_context(tau, st.seasonal_ratio_current, cfg)
        out[item] = (f, tau, sigma)
    return out


def rank_items(scores: dict[str, float], limit: int | None = None) -> list[str]:
    """Descending score, ties broken by ascending canonical item order."""
    ordered = sorted(scores, key=lambda item: (-scores[item], item))
    return ordered if limit is None else ordered[:limit]


def predict_forgotten(
    profile: CustomerProfile,
    current: Basket,
    cfg: XmtConfig,
    omega: dict[str, float] | None = None,
) -> Prediction:
    """Two-phase forgotten-item prediction against a profile.

    When `omega` pattern scores are given, phase two ranks by
    tmap = map + omega instead of map; everything else is identical.
    """
    base = sigma_scores(profile, cfg)
    expected = rank_items({i: s[2] for i, s in base.items()}, len(current.items) + cfg.k)

    omega = omega or {}
    breakdowns: dict[str, ScoreBreakdown] = {}
    for item in expected:
        if item in current.items:
            continue
        f, tau, sigma = base[item]
        kappa = basket_affinity(item, current, profile, cfg)
        psi = repurchase_tendency(profile.stats[item], cfg)
        breakdowns[item] = make_breakdown(item, f, tau, sigma, kappa, psi, omega.get(item, 0.0))

    # tmap == map bit-exactly when no pattern scores are in play, so the
    # final ranking can always read tmap.
    forgotten = tuple(rank_items({i: b.tmap for i, b in breakdowns.items()}, cfg.k))
    return Prediction(
        customer=profile.customer,
        at=profile.as_of,
        current_basket=current,
        predicted_basket=tuple(expected),
        forgotten=forgotten,
        breakdowns=breakdowns,
    )
