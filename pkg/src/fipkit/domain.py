"""Core domain types: items, baskets, customer histories, configuration.

All types here are immutable after construction and safe to share
read-only across threads. Time is day-granular throughout: every
interval statistic downstream (inter-purchase gaps, horizons,
repurchase windows) is denominated in whole days.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, fields


def canonical_item(token: str) -> str:
    """Canonicalize an item token: strip surrounding whitespace, reject empties.

    Two items are the same iff their canonical tokens are equal; the
    total order used for deterministic tie-breaking is plain
    lexicographic order on the canonical token.
    """
    tok = token.strip()
    if not tok:
        raise ValueError("empty item token")
    return tok


def canonical_order(a: str, b: str) -> int:
    """Total order on canonical item tokens: -1, 0, or 1."""
    if a == b:
        return 0
    return -1 if a < b else 1


@dataclass(frozen=True, slots=True)
class Basket:
    """One shopping event: a dated, deduplicated set of items.

    `ordinal` is the basket's 0-based position within its customer's
    history; it disambiguates multiple baskets on the same day.
    """

    date: dt.date
    items: frozenset[str]
    ordinal: int = 0

    def __post_init__(self):
        if not self.items:
            raise ValueError("basket must contain at least one item")

    @property
    def sorted_items(self) -> list[str]:
        return sorted(self.items)

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True, slots=True)
class CustomerHistory:
    """A customer's baskets, strictly ordered by (date, ordinal)."""

    customer: str
    baskets: tuple[Basket, ...]

    def __post_init__(self):
        last = None
        for b in self.baskets:
            key = (b.date, b.ordinal)
            if last is not None and key <= last:
                raise ValueError(
                    f"baskets of customer {self.customer!r} not strictly "
                    f"ordered by (date, ordinal) at {key}"
                )
            last = key

    def __len__(self) -> int:
        return len(self.baskets)

    def prefix(self, n: int) -> "CustomerHistory":
        """First n baskets, as a new history."""
        return CustomerHistory(self.customer, self.baskets[:n])


@dataclass(frozen=True, slots=True)
class XmtConfig:
    """Hyperparameters of the multi-factor scorer.

    Defaults are the published heuristic values: they are educated
    guesses, not tuned optima, and every one can be overridden.

    epsilon       minimum appearances before an item earns a nonzero base frequency
    gamma         how many multiples of the median gap still count as "due"
    big_g         discontinuation threshold: items unseen for more than G days never boost
    alpha         multiplicative boost for items inside their due window
    upsilon       seasonal concentration above which the seasonal boost fires
    beta          multiplicative seasonal boost
    big_upsilon   co-occurrence count a basket partner must exceed to count
    big_theta     additive boost per qualifying basket partner
    nu            days after a large basket within which a repurchase counts
    big_lambda    additive boost for items with a strong repurchase pattern
    big_phi       repurchase rate threshold
    big_o         minimum repurchase opportunities before the rate is trusted
    k             number of forgotten items returned
    """

    epsilon: int = 5
    gamma: float = 3.0
    big_g: int = 90
    alpha: float = 1.5
    upsilon: float = 0.4
    beta: float = 1.5
    big_upsilon: int = 5
    big_theta: float = 0.2
    nu: int = 2
    big_lambda: float = 0.5
    big_phi: float = 0.3
    big_o: int = 5
    k: int = 5

    def __post_init__(self):
        checks = [
            (self.epsilon >= 1, "epsilon >= 1"),
            (self.gamma >= 1, "gamma >= 1"),
            (self.big_g > 0, "big_g > 0"),
            (self.alpha >= 1, "alpha >= 1"),
            (0 < self.upsilon < 1, "0 < upsilon < 1"),
            (self.beta >= 1, "beta >= 1"),
            (self.big_upsilon >= 0, "big_upsilon >= 0"),
            (self.big_theta >= 0, "big_theta >= 0"),
            (self.nu >= 0, "nu >= 0"),
            (self.big_lambda >= 0, "big_lambda >= 0"),
            (0 <= self.big_phi <= 1, "0 <= big_phi <= 1"),
            (self.big_o >= 1, "big_o >= 1"),
            (self.k >= 1, "k >= 1"),
        ]
        for ok, rule in checks:
            if not ok:
                raise ValueError(f"XmtConfig violates {rule}")

    def replace(self, **kwargs) -> "XmtConfig":
        vals = {f.name: getattr(self, f.name) for f in fields(self)}
        vals.update(kwargs)
        return XmtConfig(**vals)


@dataclass(frozen=True, slots=True)
class LabelerConfig:
    """Thresholds of the forgotten-basket heuristic.

    theta_t    a trip qualifies as "large" when it has strictly more items
    theta_th   a follow-up qualifies as "forgotten" when it has at most this many items
    horizon    maximum days between the large trip and its follow-up
    """

    theta_t: int = 10
    theta_th: int = 10
    horizon: int = 2

    def __post_init__(self):
        if self.theta_t < 1:
            raise ValueError("theta_t >= 1")
        if self.theta_th < 1:
            raise ValueError("theta_th >= 1")
        if self.horizon < 0:
            raise ValueError("horizon >= 0")


def season_of(day: dt.date) -> int:
    """Season index of a calendar day: quarters 0..3 (Jan-Mar = 0)."""
    return (day.month - 1) // 3
