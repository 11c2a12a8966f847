"""Forgotten-basket labeling.

A small return trip shortly after a large shopping trip is assumed to
contain items the customer meant to buy on the large trip. An instance
pairs a large basket (strictly more than theta_t items) with the
earliest small basket (at most theta_th items) that follows it within
the horizon. Each small basket can explain at most one large basket --
the nearest preceding qualifying one -- because one return trip has one
cause.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .domain import Basket, CustomerHistory, LabelerConfig


@dataclass(frozen=True, slots=True)
class ForgottenInstance:
    customer: str
    t_index: int
    f_index: int
    gap_days: int
    b_t: Basket
    b_f: Basket


def label_forgotten(history: CustomerHistory, cfg: LabelerConfig) -> list[ForgottenInstance]:
    """All (large trip, forgotten follow-up) pairs of one history, by t_index."""
    baskets = history.baskets
    # Owner of each small basket: the nearest preceding large basket
    # within the horizon. Then each large basket keeps its earliest
    # owned follow-up.
    chosen: dict[int, int] = {}
    last_large = -1
    for m, basket in enumerate(baskets):
        size = len(basket.items)
        # A basket may be both a follow-up of an earlier large trip and,
        # when theta_th > theta_t, a large trip itself; the follow-up
        # role only looks at strictly earlier baskets.
        if size <= cfg.theta_th and last_large >= 0 and last_large not in chosen:
            gap = (basket.date - baskets[last_large].date).days
            if 0 <= gap <= cfg.horizon:
                chosen[last_large] = m
        if size > cfg.theta_t:
            last_large = m
    return [
        ForgottenInstance(
            customer=history.customer,
            t_index=j,
            f_index=m,
            gap_days=(baskets[m].date - baskets[j].date).days,
            b_t=baskets[j],
            b_f=baskets[m],
        )
        for j, m in sorted(chosen.items())
    ]


@dataclass(frozen=True, slots=True)
class LabelingStats:
    instances: int
    total_baskets: int
    forgotten_fraction: float


def labeling_stats(histories: Iterable[CustomerHistory], cfg: LabelerConfig) -> LabelingStats:
    """Instance count and the fraction of all baskets labeled forgotten."""
    count = 0
    total = 0
    for history in histories:
        count += len(label_forgotten(history, cfg))
        total += len(history.baskets)
    fraction = count / total if total else 0.0
    return LabelingStats(instances=count, total_baskets=total, forgotten_fraction=fraction)
