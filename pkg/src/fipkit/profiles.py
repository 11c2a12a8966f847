"""Per-customer, per-item purchase statistics at a reference day.

A profile is built from a training prefix of the history and frozen at
`as_of` (the prediction moment). Everything downstream -- the scorer,
the baselines, the explanations -- reads from here and never touches
raw baskets again.

Interval statistics (median and mean inter-purchase gap) are computed
over distinct purchase dates, so two baskets on the same day count as
one purchase event and the median gap is always positive.
"""

from __future__ import annotations

import datetime as dt
import statistics
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Sequence

from .domain import CustomerHistory, XmtConfig, season_of


def lower_median(values: Sequence[int]) -> int:
    """Deterministic median: the lower of the two middle values."""
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def seasonal_ratio(
    purchase_dates: Sequence[dt.date],
    season_fn: Callable[[dt.date], int],
    current: int,
) -> float:
    """Fraction of purchases falling in the current season."""
    if not purchase_dates:
        raise ValueError("seasonal_ratio needs at least one purchase")
    hits = sum(1 for d in purchase_dates if season_fn(d) == current)
    return hits / len(purchase_dates)


@dataclass(frozen=True, slots=True)
class ItemStats:
    """Statistics of one item inside one customer's training prefix."""

    appearances: int
    base_freq: float
    median_interval_days: int | None
    mean_interval_days: float | None
    days_since_last: int | None
    seasonal_ratio_current: float
    repurchase_events: int
    repurchase_opportunities: int


@dataclass(frozen=True, slots=True)
class CustomerProfile:
    customer: str
    as_of: dt.date
    history_len: int
    stats: dict[str, ItemStats]
    copurchase: dict[str, dict[str, int]]

    def chi(self, i: str, j: str) -> int:
        """Co-occurrence count: number of past baskets containing both items."""
        return self.copurchase.get(i, {}).get(j, 0)

    @property
    def items(self) -> list[str]:
        return sorted(self.stats)


def build_profile(
    history: CustomerHistory,
    as_of: dt.date,
    cfg: XmtConfig,
    large_basket_threshold: int = 10,
) -> CustomerProfile:
    """Build the statistics profile of a training prefix at day `as_of`.

    The whole `history` passed in is treated as the training prefix; the
    caller slices off everything at and after the prediction event.
    `large_basket_threshold` defines the "large basket" used by the
    repurchase statistics (an opportunity is a large basket after the
    item's first purchase that does not contain it; it converts when the
    item shows up in any basket within `cfg.nu` days after).
    """
    baskets = history.baskets
    if not baskets:
        raise ValueError("no training data")
    if as_of < baskets[-1].date:
        raise ValueError("as_of precedes the last training basket")

    n = len(baskets)
    current_season = season_of(as_of)

    # One pass for occurrences and co-occurrences.
    occ_indices: dict[str, list[int]] = {}
    copurchase: dict[str, dict[str, int]] = {}
    for idx, basket in enumerate(baskets):
        items = basket.sorted_items
        for pos, i in enumerate(items):
            occ_indices.setdefault(i, []).append(idx)
            row = copurchase.setdefault(i, {})
            row[i] = row.get(i, 0) + 1
            for j in items[pos + 1 :]:
                row[j] = row.get(j, 0) + 1
                jrow = copurchase.setdefault(j, {})
                jrow[i] = jrow.get(i, 0) + 1

    dates = [b.date for b in baskets]
    large_indices = [idx for idx, b in enumerate(baskets) if len(b.items) > large_basket_threshold]

    stats: dict[str, ItemStats] = {}
    for item, indices in occ_indices.items():
        item_dates = [dates[idx] for idx in indices]
        distinct_dates = sorted(set(item_dates))
        appearances = len(indices)

        base_freq = appearances / n if appearances >= cfg.epsilon else 0.0

        median_gap = mean_gap = None
        if len(distinct_dates) >= 2:
            gaps = [
                (b - a).days for a, b in zip(distinct_dates, distinct_dates[1:])
            ]
            median_gap = lower_median(gaps)
            mean_gap = statistics.fmean(gaps)

        phi = (as_of - distinct_dates[-1]).days
        rho = seasonal_ratio(item_dates, season_of, current_season)
        zeta, lam = _repurchase_stats(indices, dates, large_indices, cfg.nu)

        stats[item] = ItemStats(
            appearances=appearances,
            base_freq=base_freq,
            median_interval_days=median_gap,
            mean_interval_days=mean_gap,
            days_since_last=phi,
            seasonal_ratio_current=rho,
            repurchase_events=zeta,
            repurchase_opportunities=lam,
        )

    return CustomerProfile(
        customer=history.customer,
        as_of=as_of,
        history_len=n,
        stats=stats,
        copurchase=copurchase,
    )


def _repurchase_stats(
    occ: list[int],
    dates: list[dt.date],
    large_indices: list[int],
    nu: int,
) -> tuple[int, int]:
    """Events and opportunities of buying `item` soon after a large basket."""
    first = occ[0]
    occ_set = set(occ)
    zeta = 0
    lam = 0
    for b in large_indices:
        if b <= first or b in occ_set:
            continue
        lam += 1
        # Converted if the item appears in a later basket within nu days;
        # occ is index-sorted and dates are non-decreasing, so the first
        # occurrence after b is the earliest one.
        pos = bisect_right(occ, b)
        if pos < len(occ) and dates[occ[pos]] <= dates[b] + dt.timedelta(days=nu):
            zeta += 1
    return zeta, lam
