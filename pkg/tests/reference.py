"""Independent brute-force reference implementations.

Everything here recomputes results from raw baskets with naive loops and
the score formulas written out directly. These oracles deliberately
share no statistics code with the engine; they only consume the domain
types. Keep them slow and obvious.
"""

from __future__ import annotations

import datetime as dt

from fipkit.domain import Basket, CustomerHistory, LabelerConfig, XmtConfig, season_of


# ---------------------------------------------------------------------------
# per-item statistics, recomputed from scratch


def naive_item_stats(
    baskets: list[Basket], item: str, as_of: dt.date, cfg: XmtConfig, large_threshold: int
) -> dict:
    containing = [b for b in baskets if item in b.items]
    appearances = len(containing)
    n = len(baskets)

    f = appearances / n if appearances >= cfg.epsilon else 0.0

    distinct_days = sorted({b.date for b in containing})
    gaps = [(distinct_days[i + 1] - distinct_days[i]).days for i in range(len(distinct_days) - 1)]
    if gaps:
        ordered = sorted(gaps)
        eta = ordered[(len(ordered) - 1) // 2]
        mean_gap = sum(ordered) / len(ordered)
    else:
        eta = None
        mean_gap = None

    phi = (as_of - distinct_days[-1]).days if distinct_days else None

    current_season = season_of(as_of)
    rho = sum(1 for b in containing if season_of(b.date) == current_season) / appearances

    first_idx = min(i for i, b in enumerate(baskets) if item in b.items)
    zeta = 0
    lam = 0
    for bi, basket in enumerate(baskets):
        if bi <= first_idx or len(basket.items) <= large_threshold or item in basket.items:
            continue
        lam += 1
        converted = any(
            item in later.items and 0 <= (later.date - basket.date).days <= cfg.nu
            for later in baskets[bi + 1 :]
        )
        if converted:
            zeta += 1

    return {
        "appearances": appearances,
        "f": f,
        "eta": eta,
        "mean_gap": mean_gap,
        "phi": phi,
        "rho": rho,
        "zeta": zeta,
        "lam": lam,
    }


def naive_chi(baskets: list[Basket], i: str, j: str) -> int:
    return sum(1 for b in baskets if i in b.items and j in b.items)


# ---------------------------------------------------------------------------
# direct score formulas


def naive_scores(
    baskets: list[Basket],
    item: str,
    current: Basket,
    as_of: dt.date,
    cfg: XmtConfig,
    large_threshold: int = 10,
) -> dict:
    st = naive_item_stats(baskets, item, as_of, cfg, large_threshold)

    f = st["f"]
    due = (
        st["eta"] is not None
        and st["phi"] is not None
        and st["eta"] <= st["phi"] <= st["eta"] * cfg.gamma
        and st["phi"] <= cfg.big_g
    )
    tau = f * (1.0 + (cfg.alpha - 1.0) * (1.0 if due else 0.0))
    sigma = tau * (1.0 + (cfg.beta - 1.0) * (1.0 if st["rho"] > cfg.upsilon else 0.0))

    kappa = 0.0
    for j in current.items:
        if naive_chi(baskets, item, j) > cfg.big_upsilon:
            kappa += cfg.big_theta

    if st["lam"] >= cfg.big_o and st["lam"] > 0 and st["zeta"] / st["lam"] > cfg.big_phi:
        psi = cfg.big_lambda
    else:
        psi = 0.0

    return {"f": f, "tau": tau, "sigma": sigma, "kappa": kappa, "psi": psi, "map": sigma + kappa + psi}


def naive_predict(
    baskets: list[Basket],
    current: Basket,
    as_of: dt.date,
    cfg: XmtConfig,
    large_threshold: int = 10,
    omega: dict[str, float] | None = None,
) -> tuple[list[str], list[str]]:
    """Exhaustive two-phase selection: (expected basket, forgotten items)."""
    omega = omega or {}
    vocabulary = sorted({i for b in baskets for i in b.items})
    scored = {i: naive_scores(baskets, i, current, as_of, cfg, large_threshold) for i in vocabulary}

    by_sigma = sorted(vocabulary, key=lambda i: (-scored[i]["sigma"], i))
    expected = by_sigma[: len(current.items) + cfg.k]

    candidates = [i for i in expected if i not in current.items]
    final = {i: scored[i]["map"] + omega.get(i, 0.0) for i in candidates}
    forgotten = sorted(candidates, key=lambda i: (-final[i], i))[: cfg.k]
    return expected, forgotten


# ---------------------------------------------------------------------------
# labeling by quadratic pair scan


def naive_label(history: CustomerHistory, cfg: LabelerConfig) -> list[tuple[int, int]]:
    baskets = history.baskets
    n = len(baskets)

    def is_large(i):
        return len(baskets[i].items) > cfg.theta_t

    def qualifies(j, m):
        gap = (baskets[m].date - baskets[j].date).days
        return len(baskets[m].items) <= cfg.theta_th and 0 <= gap <= cfg.horizon

    owner = {}
    for m in range(n):
        preceding = [j for j in range(m) if is_large(j) and qualifies(j, m)]
        if preceding:
            owner[m] = max(preceding)

    pairs = []
    for j in range(n):
        if not is_large(j):
            continue
        owned = [m for m, o in owner.items() if o == j]
        if owned:
            pairs.append((j, min(owned)))
    return sorted(pairs)


# ---------------------------------------------------------------------------
# exhaustive pattern enumeration


def naive_patterns(
    history: CustomerHistory, min_support: int = 2, max_itemset_size: int = 2
) -> dict[tuple[frozenset, frozenset], dict]:
    baskets = history.baskets
    if len(baskets) < 2:
        return {}

    def subsets(items):
        from itertools import combinations

        out = []
        ordered = sorted(items)
        for size in range(1, min(max_itemset_size, len(ordered)) + 1):
            out.extend(frozenset(c) for c in combinations(ordered, size))
        return out

    candidates = set()
    for b in baskets:
        candidates.update(subsets(b.items))

    def occurrences(head, tail):
        pairs = []
        for a in range(len(baskets)):
            if not head <= baskets[a].items:
                continue
            for b in range(a + 1, len(baskets)):
                if tail <= baskets[b].items:
                    pairs.append((a, b))
                    break
        return tuple(pairs)

    raw = {}
    for head in candidates:
        for tail in candidates:
            pairs = occurrences(head, tail)
            if len(pairs) >= min_support:
                raw[(head, tail)] = pairs

    result = {}
    for (head, tail), pairs in raw.items():
        dominated = False
        for other_head, other_tail in raw:
            if other_tail == tail and other_head < head and raw[(other_head, other_tail)] == pairs:
                dominated = True
            if other_head == head and other_tail < tail and raw[(other_head, other_tail)] == pairs:
                dominated = True
        if dominated:
            continue
        gaps = sorted((baskets[b].date - baskets[a].date).days for a, b in pairs)
        result[(head, tail)] = {
            "support": len(pairs),
            "gap_min": gaps[0],
            "gap_median": gaps[(len(gaps) - 1) // 2],
            "gap_max": gaps[-1],
        }
    return result


def naive_omega(patterns: dict, recent: list[Basket], at: dt.date) -> dict[str, float]:
    raw: dict[str, float] = {}
    for (head, tail), info in patterns.items():
        dates = [b.date for b in recent if head <= b.items]
        if not dates:
            continue
        gap = (at - max(dates)).days
        if info["gap_min"] <= gap <= info["gap_max"]:
            for item in tail:
                raw[item] = raw.get(item, 0.0) + info["support"]
    peak = max(raw.values(), default=0.0)
    if peak <= 0:
        return {}
    return {i: v / peak for i, v in raw.items()}


# ---------------------------------------------------------------------------
# metrics from set arithmetic


def naive_prf(predicted: set, actual: set) -> tuple[float, float, float]:
    inter = len(predicted & actual)
    p = inter / len(predicted) if predicted else 0.0
    r = inter / len(actual)
    f1 = (2 * inter) / (len(predicted) + len(actual))
    return p, r, f1


# ---------------------------------------------------------------------------
# random history generation for oracle sweeps


def random_history(
    rng, customer="c", max_baskets=50, max_items=30, start=dt.date(2024, 1, 1)
) -> CustomerHistory:
    vocabulary = [f"i{n:02d}" for n in range(rng.randint(2, max_items))]
    n_baskets = rng.randint(2, max_baskets)
    day = start
    baskets = []
    for i in range(n_baskets):
        size = rng.randint(1, min(len(vocabulary), 14))
        items = frozenset(rng.sample(vocabulary, size))
        baskets.append(Basket(date=day, items=items, ordinal=i))
        if rng.random() < 0.15:
            day = day  # same-day follow-up occasionally
        else:
            day = day + dt.timedelta(days=rng.randint(1, 6))
    # ensure strict ordering by ordinal even on shared days
    return CustomerHistory(customer, tuple(baskets))
