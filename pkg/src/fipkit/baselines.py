"""Reference predictors sharing the forgotten-item interface.

Every predictor returns a ranked list of at most k items disjoint from
the current basket, with ties broken by canonical item order, so all of
them plug into the same evaluation harness as the multi-factor scorers.
"""

from __future__ import annotations

from .domain import Basket, CustomerHistory
from .profiles import CustomerProfile
from .scoring import rank_items

METHODS = ("top", "last", "mc", "ibp", "xmt", "txmt")


def top_predict(profile: CustomerProfile, current: Basket, k: int) -> list[str]:
    """Most frequently bought items, by raw appearance count (no minimum)."""
    scores = {
        item: float(st.appearances)
        for item, st in profile.stats.items()
        if item not in current.items
    }
    return rank_items(scores, k)


def last_predict(history: CustomerHistory, current: Basket, k: int) -> list[str]:
    """Items of the most recent training basket, in canonical order."""
    if not history.baskets:
        raise ValueError("last_predict needs a non-empty history")
    carried = sorted(history.baskets[-1].items - current.items)
    return carried[:k]


def mc_predict(history: CustomerHistory, current: Basket, k: int) -> list[str]:
    """First-order transition scores out of the current basket.

    Transition weight w(i' -> i) is the number of consecutive basket
    pairs carrying i' then i, over the number of baskets containing i'
    that have a successor. Items scoring zero are never returned.
    """
    baskets = history.baskets
    if len(baskets) < 2:
        raise ValueError("mc_predict needs at least two training baskets")

    pair_counts: dict[str, dict[str, int]] = {}
    source_counts: dict[str, int] = {}
    for prev, nxt in zip(baskets, baskets[1:]):
        for i_prev in prev.items:
            source_counts[i_prev] = source_counts.get(i_prev, 0) + 1
            row = pair_counts.setdefault(i_prev, {})
            for i_next in nxt.items:
                row[i_next] = row.get(i_next, 0) + 1

    scale = 1.0 / len(current.items)
    scores: dict[str, float] = {}
    for source in current.items:
        denom = source_counts.get(source)
        if not denom:
            continue
        for target, count in pair_counts.get(source, {}).items():
            scores[target] = scores.get(target, 0.0) + scale * (count / denom)

    positive = {
        item: score
        for item, score in scores.items()
        if score > 0.0 and item not in current.items
    }
    return rank_items(positive, k)


def ibp_predict(profile: CustomerProfile, current: Basket, k: int) -> list[str]:
    """Rank items by how overdue they are: days since last purchase over
    the mean inter-purchase gap. Items bought fewer than twice never rank."""
    scores = {}
    for item, st in profile.stats.items():
        if item in current.items or st.mean_interval_days is None:
            continue
        scores[item] = st.days_since_last / st.mean_interval_days
    return rank_items(scores, k)
