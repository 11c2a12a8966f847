"""Transaction-log ingestion and reproducible synthetic data.

Interchange format: UTF-8 CSV with header ``customer_id,date,basket_id,item_id``,
dates as ``YYYY-MM-DD``, LF line endings. Rows may arrive out of order;
grouping and sorting is the parser's job. The synthetic generator is a
pure function of its config and writes the same plain CSV, with planted
forgotten-item ground truth in a separate JSONL sidecar so the main file
stays an ordinary transaction log.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import random
import sys
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from .domain import Basket, CustomerHistory, canonical_item, season_of

CSV_HEADER = ["customer_id", "date", "basket_id", "item_id"]


class ParseError(ValueError):
    """Malformed transaction input; carries the offending 1-based line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _parse_date(token: str, line: int) -> dt.date:
    try:
        return dt.datetime.strptime(token, "%Y-%m-%d").date()
    except ValueError:
        raise ParseError(f"malformed date {token!r} (expected YYYY-MM-DD)", line) from None


def _basket_sort_key(basket_id: str):
    # Numeric basket ids sort numerically so that serialize -> parse
    # round-trips histories with 10+ same-day baskets.
    if basket_id.isdigit():
        return (0, int(basket_id), basket_id)
    return (1, 0, basket_id)


def parse_transactions(source: IO[str] | IO[bytes]) -> list[CustomerHistory]:
    """Parse a transaction CSV into one CustomerHistory per customer.

    Rows are grouped by (customer_id, date, basket_id); duplicate items
    within a basket collapse to one. Baskets are ordered per customer by
    (date, basket_id) and assigned 0-based ordinals. Customers are
    returned sorted by id.
    """
    if isinstance(source.read(0), bytes):
        source = io.TextIOWrapper(source, encoding="utf-8", newline="")
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty input, expected header row", 1) from None
    if [h.strip() for h in header] != CSV_HEADER:
        raise ParseError(f"bad header {header!r}, expected {','.join(CSV_HEADER)}", 1)

    items_seen: dict[str, str] = {}
    grouped: dict[str, dict[tuple[dt.date, str], set[str]]] = defaultdict(dict)
    for row in reader:
        line = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 fields, got {len(row)}", line)
        customer, date_tok, basket_id, item_tok = (f.strip() for f in row)
        if not customer:
            raise ParseError("empty customer_id", line)
        if not basket_id:
            raise ParseError("empty basket_id", line)
        if not item_tok:
            raise ParseError("empty item_id", line)
        day = _parse_date(date_tok, line)
        # Intern item tokens: large logs repeat a small vocabulary.
        item = items_seen.setdefault(item_tok, sys.intern(canonical_item(item_tok)))
        key = (day, basket_id)
        baskets = grouped[customer]
        if key in baskets:
            baskets[key].add(item)
        else:
            baskets[key] = {item}

    histories = []
    for customer in sorted(grouped):
        entries = sorted(grouped[customer], key=lambda k: (k[0], _basket_sort_key(k[1])))
        baskets = tuple(
            Basket(date=day, items=frozenset(grouped[customer][(day, bid)]), ordinal=i)
            for i, (day, bid) in enumerate(entries)
        )
        histories.append(CustomerHistory(customer, baskets))
    return histories


def write_transactions(histories: Iterable[CustomerHistory], sink: IO[str]) -> None:
    """Serialize histories to the transaction CSV format (LF endings).

    Basket ids are the per-customer ordinals, so parse(write(h)) == h.
    """
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for history in histories:
        for basket in history.baskets:
            day = basket.date.isoformat()
            for item in basket.sorted_items:
                writer.writerow([history.customer, day, str(basket.ordinal), item])


def filter_customers(
    histories: Iterable[CustomerHistory],
    min_baskets: int = 10,
    min_basket_size: int = 1,
    min_item_freq: int = 1,
    max_basket_size: int | None = None,
) -> list[CustomerHistory]:
    """Apply the standard customer-filtering rules.

    Removes customers with fewer than `min_baskets` baskets, baskets
    outside [min_basket_size, max_basket_size], and items that occur in
    fewer than `min_item_freq` baskets across the whole collection
    (global counting), dropping baskets emptied by item removal.

    Removing items can shrink baskets and customers below the other
    thresholds, so the pass repeats until stable; the operation is
    therefore idempotent.
    """
    current = list(histories)
    while True:
        nxt = _filter_pass(current, min_baskets, min_basket_size, min_item_freq, max_basket_size)
        if _same_collection(nxt, current):
            return nxt
        current = nxt


def _filter_pass(histories, min_baskets, min_basket_size, min_item_freq, max_basket_size):
    kept = [h for h in histories if len(h.baskets) >= min_baskets]
    sized: list[tuple[str, list[Basket]]] = []
    item_counts: Counter[str] = Counter()
    for h in kept:
        baskets = [
            b
            for b in h.baskets
            if len(b.items) >= min_basket_size
            and (max_basket_size is None or len(b.items) <= max_basket_size)
        ]
        sized.append((h.customer, baskets))
        for b in baskets:
            item_counts.update(b.items)

    frequent = {i for i, c in item_counts.items() if c >= min_item_freq}
    out = []
    for customer, baskets in sized:
        rebuilt = []
        for b in baskets:
            items = b.items & frequent
            if items:
                rebuilt.append((b.date, items))
        if rebuilt:
            out.append(
                CustomerHistory(
                    customer,
                    tuple(
                        Basket(date=day, items=frozenset(items), ordinal=i)
                        for i, (day, items) in enumerate(rebuilt)
                    ),
                )
            )
    return out


def _same_collection(a: list[CustomerHistory], b: list[CustomerHistory]) -> bool:
    if len(a) != len(b):
        return False
    for ha, hb in zip(a, b):
        if ha.customer != hb.customer or len(ha.baskets) != len(hb.baskets):
            return False
        for x, y in zip(ha.baskets, hb.baskets):
            if x.date != y.date or x.items != y.items:
                return False
    return True


@dataclass(frozen=True)
class SyntheticConfig:
    """Everything the synthetic generator needs; the seed fully determines output.

    Planted behaviors apply to every customer:
      periodic_items     (item, period_days, prob): bought when at least
                         `period_days` have passed since its last purchase
      copurchase_pairs   (a, b, joint_prob): both items added together
      seasonal_items     (item, season_index, concentration): bought with
                         prob `concentration` in season, a tenth of that off-season

    Each customer additionally gets `staples_per_customer` personal staple
    items (sampled from the non-planted pool) bought with `staple_prob`
    per trip, plus up to `filler_max` random extras. With probability
    `forget_rate`, a trip larger than `large_basket_threshold` + 1 has one
    planted item withheld and re-purchased as a singleton basket 0-2 days
    later; those events are the ground-truth sidecar.
    """

    n_customers: int = 20
    n_items: int = 50
    n_baskets_per_customer: tuple[int, int] = (40, 60)
    periodic_items: tuple[tuple[str, int, float], ...] = ()
    copurchase_pairs: tuple[tuple[str, str, float], ...] = ()
    seasonal_items: tuple[tuple[str, int, float], ...] = ()
    forget_rate: float = 0.0
    seed: int = 0
    large_basket_threshold: int = 10
    staples_per_customer: int = 12
    staple_prob: float = 0.85
    filler_max: int = 2
    shop_gap_days: tuple[int, int] = (1, 3)
    start_date: dt.date = dt.date(2024, 1, 1)
    # Customers forget specific items, not random ones: each customer
    # forgets only items from a personal subset of the planted items.
    forget_prone_count: int = 4

    def __post_init__(self):
        probs = (
            [p for _, _, p in self.periodic_items]
            + [p for _, _, p in self.copurchase_pairs]
            + [p for _, _, p in self.seasonal_items]
            + [self.forget_rate, self.staple_prob]
        )
        for p in probs:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability {p} outside [0, 1]")
        if self.n_customers < 1 or self.n_items < 1:
            raise ValueError("need at least one customer and one item")
        lo, hi = self.n_baskets_per_customer
        if not 1 <= lo <= hi:
            raise ValueError("bad basket count range")

    @property
    def planted_items(self) -> set[str]:
        out = {i for i, _, _ in self.periodic_items}
        out |= {i for i, _, p in self.seasonal_items}
        for a, b, _ in self.copurchase_pairs:
            out |= {a, b}
        return out


def default_synthetic_config(
    n_customers: int = 20,
    n_items: int = 50,
    forget_rate: float = 0.3,
    seed: int = 0,
    n_baskets_per_customer: tuple[int, int] = (40, 60),
) -> SyntheticConfig:
    """Standard planted config: 7-day periodic items, co-purchase pairs, seasonals.

    Shaped so that the planted signals are recoverable: staples are
    near-certain per trip (pure frequency rankers find little else to
    say), while a dozen same-frequency periodic items can only be told
    apart by which one is currently due.
    """
    names = [f"item{i:03d}" for i in range(n_items)]
    periodic = tuple((names[i], 7, 0.95) for i in range(min(12, max(0, n_items - 8))))
    pairs = []
    if n_items >= 18:
        pairs = [
            (names[12], names[13], 0.3),
            (names[14], names[15], 0.3),
        ]
    seasonal = []
    if n_items >= 20:
        seasonal = [(names[16], 0, 0.5), (names[17], 2, 0.5)]
    return SyntheticConfig(
        n_customers=n_customers,
        n_items=n_items,
        n_baskets_per_customer=n_baskets_per_customer,
        periodic_items=periodic,
        copurchase_pairs=tuple(pairs),
        seasonal_items=tuple(seasonal),
        forget_rate=forget_rate,
        seed=seed,
        staples_per_customer=8,
        staple_prob=0.97,
        filler_max=2,
        shop_gap_days=(2, 3),
    )


@dataclass(frozen=True)
class PlantedEvent:
    """Ground truth for one planted forgotten-item episode."""

    customer_id: str
    t_date: dt.date
    forgotten_items: tuple[str, ...]
    h: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "customer_id": self.customer_id,
                "t_date": self.t_date.isoformat(),
                "forgotten_items": list(self.forgotten_items),
                "h": self.h,
            },
            sort_keys=True,
        )


@dataclass(frozen=True)
class SyntheticDataset:
    histories: tuple[CustomerHistory, ...]
    planted: tuple[PlantedEvent, ...]


def generate_synthetic(config: SyntheticConfig) -> SyntheticDataset:
    """Generate customer histories with planted, recoverable shopping patterns.

    Pure function of the config: the same config always yields the same
    histories and sidecar, byte for byte once serialized.
    """
    master = random.Random(config.seed)
    item_pool = [f"item{i:03d}" for i in range(config.n_items)]
    missing = config.planted_items - set(item_pool)
    if missing:
        raise ValueError(f"planted items outside the item pool: {sorted(missing)}")
    plain_pool = [i for i in item_pool if i not in config.planted_items]

    histories = []
    planted_events = []
    for c in range(config.n_customers):
        rng = random.Random(master.getrandbits(64))
        customer = f"c{c:04d}"
        baskets, events = _simulate_customer(customer, rng, config, plain_pool)
        histories.append(CustomerHistory(customer, baskets))
        planted_events.extend(events)
    return SyntheticDataset(tuple(histories), tuple(planted_events))


def _simulate_customer(
    customer: str,
    rng: random.Random,
    cfg: SyntheticConfig,
    plain_pool: Sequence[str],
) -> tuple[tuple[Basket, ...], list[PlantedEvent]]:
    lo, hi = cfg.n_baskets_per_customer
    n_trips = rng.randint(lo, hi)
    n_staples = min(cfg.staples_per_customer, len(plain_pool))
    staples = rng.sample(list(plain_pool), n_staples) if n_staples else []
    filler_pool = sorted(set(plain_pool) - set(staples))
    # Periodic items make the most plausible forgotten items: they are
    # due on the trip they get skipped and re-bought right after.
    prone_pool = sorted({i for i, _, _ in cfg.periodic_items}) or sorted(cfg.planted_items)
    forget_prone = set(
        rng.sample(prone_pool, min(cfg.forget_prone_count, len(prone_pool))) if prone_pool else []
    )

    last_bought: dict[str, dt.date] = {}
    day = cfg.start_date
    # (date, tiebreak) -> items; follow-ups get tiebreak 1 so a same-day
    # follow-up lands after its trip.
    raw: list[tuple[dt.date, int, set[str]]] = []
    events: list[PlantedEvent] = []

    for _ in range(n_trips):
        trip: set[str] = set()
        for s in staples:
            if rng.random() < cfg.staple_prob:
                trip.add(s)
        for item, period, prob in cfg.periodic_items:
            prev = last_bought.get(item)
            due = prev is None or (day - prev).days >= period
            if due and rng.random() < prob:
                trip.add(item)
        for a, b, prob in cfg.copurchase_pairs:
            if rng.random() < prob:
                trip.add(a)
                trip.add(b)
        for item, season, conc in cfg.seasonal_items:
            prob = conc if season_of(day) == season else conc / 10.0
            if rng.random() < prob:
                trip.add(item)
        if filler_pool and cfg.filler_max:
            for extra in rng.sample(filler_pool, min(rng.randint(0, cfg.filler_max), len(filler_pool))):
                trip.add(extra)
        if not trip:
            trip.add(staples[0] if staples else plain_pool[0])

        bought_on = {item: day for item in trip}
        forgettable = sorted(trip & forget_prone) or sorted(trip & cfg.planted_items)
        if not forgettable and not cfg.planted_items:
            forgettable = sorted(trip)
        if (
            cfg.forget_rate
            and forgettable
            and len(trip) > cfg.large_basket_threshold + 1
            and rng.random() < cfg.forget_rate
        ):
            forgotten = rng.choice(forgettable)
            trip.discard(forgotten)
            gap = rng.randint(0, 2)
            followup_day = day + dt.timedelta(days=gap)
            raw.append((followup_day, 1, {forgotten}))
            bought_on[forgotten] = followup_day
            events.append(PlantedEvent(customer, day, (forgotten,), gap))

        raw.append((day, 0, trip))
        last_bought.update(bought_on)
        day = day + dt.timedelta(days=rng.randint(*cfg.shop_gap_days))

    raw.sort(key=lambda r: (r[0], r[1]))
    baskets = tuple(
        Basket(date=d, items=frozenset(items), ordinal=i) for i, (d, _, items) in enumerate(raw)
    )
    return baskets, events


def write_sidecar(events: Iterable[PlantedEvent], sink: IO[str]) -> None:
    for e in events:
        sink.write(e.to_json())
        sink.write("\n")
