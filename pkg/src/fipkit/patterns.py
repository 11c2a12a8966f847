"""Recurring head-to-tail purchase sequences and the pattern score.

A pattern is a head itemset bought in one basket and a tail itemset
bought in a strictly later basket. Occurrences bind each head basket to
the nearest subsequent tail basket (no quadratic pairing), and the
day gaps observed across occurrences become the pattern's activation
window. A pattern is kept only when minimal: no pattern built from a
strict subset of its head or tail has the identical occurrence list.

At prediction time, a pattern is active when its head appeared in the
recent baskets and the days elapsed since then fall inside the gap
window; active patterns vote for their tail items with their support,
and the votes are normalized by the maximum so the pattern score
(omega) is always in [0, 1].

This mining is a deliberately simple, self-contained variant chosen to
be exhaustively testable; it is configurable via minimum support and
maximum itemset size (defaults 2 and 2).
"""

from __future__ import annotations

import datetime as dt
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .domain import Basket, CustomerHistory, XmtConfig
from .profiles import CustomerProfile
from .scoring import Prediction, predict_forgotten


@dataclass(frozen=True, slots=True)
class TarsPattern:
    head: frozenset[str]
    tail: frozenset[str]
    support: int
    gap_min: int
    gap_median: int
    gap_max: int

    def sort_key(self):
        return (sorted(self.head), sorted(self.tail))


def _candidate_itemsets(
    baskets: Sequence[Basket], max_itemset_size: int
) -> dict[frozenset[str], tuple[int, ...]]:
    """Itemsets of bounded size with their sorted basket-occurrence indices."""
    occ: dict[frozenset[str], list[int]] = {}
    for idx, basket in enumerate(baskets):
        items = basket.sorted_items
        for size in range(1, min(max_itemset_size, len(items)) + 1):
            for combo in combinations(items, size):
                occ.setdefault(frozenset(combo), []).append(idx)
    return {s: tuple(ix) for s, ix in occ.items()}


def _bind_occurrences(
    head_occ: Sequence[int], tail_occ: Sequence[int]
) -> tuple[tuple[int, int], ...]:
    """Each head basket binds to the nearest strictly later tail basket."""
    pairs = []
    for a in head_occ:
        pos = bisect_right(tail_occ, a)
        if pos < len(tail_occ):
            pairs.append((a, tail_occ[pos]))
    return tuple(pairs)


def _next_occurrence_array(occ: Sequence[int], n: int) -> list[int]:
    """next_occ[i] = smallest occurrence index strictly after i, else -1."""
    arr = [-1] * n
    nxt = -1
    j = len(occ) - 1
    for i in range(n - 1, -1, -1):
        arr[i] = nxt
        if j >= 0 and occ[j] == i:
            nxt = i
            j -= 1
    return arr


def mine_tars(
    history: CustomerHistory,
    min_support: int = 2,
    max_itemset_size: int = 2,
) -> list[TarsPattern]:
    """Mine minimal recurring head-to-tail patterns from one history."""
    baskets = history.baskets
    if len(baskets) < 2:
        return []
    day0 = baskets[0].date
    day_numbers = [(b.date - day0).days for b in baskets]
    candidates = _candidate_itemsets(baskets, max_itemset_size)

    # Many itemsets share one occurrence list (items always bought
    # together). Binding, support, and gap statistics depend only on the
    # occurrence lists, so everything is computed once per list pair and
    # fanned out to the itemset pairs of the two groups.
    occ_groups: dict[tuple[int, ...], list[frozenset[str]]] = {}
    for itemset, occ in candidates.items():
        occ_groups.setdefault(occ, []).append(itemset)
    # Support is bounded by the head's occurrence count (one binding per
    # head basket), so low-occurrence heads can be pruned; tails cannot,
    # since several heads may bind to one tail basket.
    head_keys = [occ for occ in occ_groups if len(occ) >= min_support]
    tail_keys = list(occ_groups)

    n_baskets = len(baskets)
    # Dense ids and next-occurrence arrays per occurrence list turn every
    # binding question into list indexing.
    tail_ids = {occ: i for i, occ in enumerate(tail_keys)}
    next_arr = {occ: _next_occurrence_array(occ, n_baskets) for occ in tail_keys}

    counts: dict[tuple, int] = {}
    stats: dict[tuple, tuple] = {}
    for h_occ in head_keys:
        for t_occ in tail_keys:
            # A head basket binds iff a tail basket lies strictly after
            # it, so support is the head count below the last tail index.
            c = bisect_left(h_occ, t_occ[-1])
            key = (h_occ, t_occ)
            counts[key] = c
            if c >= min_support:
                nxt = next_arr[t_occ]
                gaps = sorted(day_numbers[nxt[a]] - day_numbers[a] for a in h_occ[:c])
                stats[key] = (c, gaps[0], gaps[(len(gaps) - 1) // 2], gaps[-1])

    # Occurrence keys of every strict subset, resolved once per itemset.
    sub_keys = {
        itemset: tuple(candidates[sub] for sub in _strict_subsets(itemset))
        for itemset in candidates
    }

    same_binding_memo: dict[tuple[int, int], bool] = {}

    def same_binding(h_occ, h_id: int, sub_occ, t_occ, t_id: int) -> bool:
        memo_key = (h_id, tail_ids[sub_occ] * len(tail_ids) + t_id)
        hit = same_binding_memo.get(memo_key)
        if hit is None:
            a_nxt, b_nxt = next_arr[sub_occ], next_arr[t_occ]
            hit = all(a_nxt[a] == b_nxt[a] for a in h_occ)
            same_binding_memo[memo_key] = hit
        return hit

    patterns = []
    for h_id, h_occ in enumerate(head_keys):
        heads = occ_groups[h_occ]
        for t_occ in tail_keys:
            key = (h_occ, t_occ)
            if counts[key] < min_support:
                continue
            support, gap_min, gap_median, gap_max = stats[key]
            t_id = tail_ids[t_occ]
            for head in heads:
                # A head subset occurs wherever the head does and binds the
                # same targets, so its pair list is a superset: equal
                # counts mean the identical pair list, i.e. domination.
                if any(counts[(sk, t_occ)] == support for sk in sub_keys[head]):
                    continue
                for tail in occ_groups[t_occ]:
                    # Tail subsets can bind earlier baskets, so equal
                    # counts only shortlist; verify the actual targets.
                    if any(
                        counts[(h_occ, sk)] == support
                        and same_binding(h_occ, h_id, sk, t_occ, t_id)
                        for sk in sub_keys[tail]
                    ):
                        continue
                    patterns.append(
                        TarsPattern(
                            head=head,
                            tail=tail,
                            support=support,
                            gap_min=gap_min,
                            gap_median=gap_median,
                            gap_max=gap_max,
                        )
                    )
    # Insertion order is already deterministic (dict order follows the
    # basket scan); consumers that want canonical order sort explicitly.
    return patterns


def _strict_subsets(itemset: frozenset[str]) -> list[frozenset[str]]:
    items = sorted(itemset)
    out = []
    for size in range(1, len(items)):
        out.extend(frozenset(c) for c in combinations(items, size))
    return out


def omega_scores(
    patterns: Iterable[TarsPattern],
    recent: Sequence[Basket],
    at: dt.date,
) -> dict[str, float]:
    """Support-weighted tail-item votes of the currently active patterns.

    A pattern is active when some recent basket contains its whole head
    and the days from the latest such basket to `at` fall inside the
    pattern's observed gap window. Votes are normalized by the maximum;
    an all-zero map means nothing is active.
    """
    # Gap since the latest basket containing a head depends only on the
    # head itemset; resolve it once per distinct head.
    gap_by_head: dict[frozenset[str], int | None] = {}

    def head_gap(head: frozenset[str]) -> int | None:
        if head in gap_by_head:
            return gap_by_head[head]
        gap = None
        for basket in reversed(recent):
            if head <= basket.items:
                gap = (at - basket.date).days
                break
        gap_by_head[head] = gap
        return gap

    raw: dict[str, float] = {}
    for p in patterns:
        gap = head_gap(p.head)
        if gap is None or not p.gap_min <= gap <= p.gap_max:
            continue
        for item in p.tail:
            raw[item] = raw.get(item, 0.0) + p.support
    peak = max(raw.values(), default=0.0)
    if peak <= 0:
        return {}
    return {item: value / peak for item, value in raw.items()}


def predict_forgotten_tars(
    profile: CustomerProfile,
    patterns: Iterable[TarsPattern],
    current: Basket,
    recent: Sequence[Basket],
    cfg: XmtConfig,
) -> Prediction:
    """Two-phase prediction with pattern scores added to the final ranking."""
    omega = omega_scores(patterns, recent, profile.as_of)
    return predict_forgotten(profile, current, cfg, omega=omega)
