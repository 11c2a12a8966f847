"""Human-readable explanations of a scored prediction.

Each explanation line corresponds to one score component and appears
only when that component actually contributed. Rendered numbers are the
profile/breakdown values themselves, formatted but never recomputed;
percentages carry one decimal place.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .domain import Basket, XmtConfig
from .profiles import CustomerProfile
from .scoring import ScoreBreakdown

RECENCY_TEMPLATE = "Last purchased {phi} days ago (typically bought every {gap} days)"
RECENCY_TEMPLATE_NO_GAP = "Last purchased {phi} days ago"
SEASONAL_TEMPLATE = "Strong seasonal preference: {pct}% of purchases fall in the current season"
COPURCHASE_TEMPLATE = "Often bought with current basket items: {partners}"
TARS_TEMPLATE = (
    "TARS pattern analysis suggests this item is likely to be needed (pattern score: {pct}%)"
)
REPURCHASE_TEMPLATE = (
    "Often repurchased soon after large shopping trips ({pct}% of opportunities)"
)


@dataclass(frozen=True, slots=True)
class ExplanationLine:
    kind: str
    text: str
    values: dict[str, Any]


@dataclass(frozen=True, slots=True)
class Explanation:
    item: str
    lines: tuple[ExplanationLine, ...]

    def to_dict(self) -> dict:
        return {
            "item": self.item,
            "lines": [
                {"kind": ln.kind, "text": ln.text, "values": ln.values} for ln in self.lines
            ],
        }


def _pct(value: float) -> str:
    return f"{value * 100:.1f}"


def explain(
    breakdown: ScoreBreakdown,
    profile: CustomerProfile,
    current: Basket,
    cfg: XmtConfig,
) -> Explanation:
    """Explanation card for one predicted item of one prediction."""
    stats = profile.stats.get(breakdown.item)
    if stats is None:
        raise ValueError(f"item {breakdown.item!r} is not in the profile")

    lines: list[ExplanationLine] = []

    if stats.mean_interval_days is None:
        text = RECENCY_TEMPLATE_NO_GAP.format(phi=stats.days_since_last)
    else:
        text = RECENCY_TEMPLATE.format(
            phi=stats.days_since_last, gap=f"{stats.mean_interval_days:.1f}"
        )
    lines.append(
        ExplanationLine(
            kind="recency",
            text=text,
            values={
                "days_since_last": stats.days_since_last,
                "mean_interval_days": stats.mean_interval_days,
            },
        )
    )

    if breakdown.sigma > breakdown.tau:
        lines.append(
            ExplanationLine(
                kind="seasonal",
                text=SEASONAL_TEMPLATE.format(pct=_pct(stats.seasonal_ratio_current)),
                values={"seasonal_ratio_current": stats.seasonal_ratio_current},
            )
        )

    if breakdown.kappa > 0:
        partners = sorted(
            j for j in current.items if profile.chi(breakdown.item, j) > cfg.big_upsilon
        )
        lines.append(
            ExplanationLine(
                kind="copurchase",
                text=COPURCHASE_TEMPLATE.format(partners=", ".join(partners)),
                values={"partners": partners},
            )
        )

    if breakdown.omega > 0:
        lines.append(
            ExplanationLine(
                kind="tars",
                text=TARS_TEMPLATE.format(pct=_pct(breakdown.omega)),
                values={"omega": breakdown.omega},
            )
        )

    if breakdown.psi > 0:
        rate = stats.repurchase_events / stats.repurchase_opportunities
        lines.append(
            ExplanationLine(
                kind="repurchase",
                text=REPURCHASE_TEMPLATE.format(pct=_pct(rate)),
                values={
                    "repurchase_events": stats.repurchase_events,
                    "repurchase_opportunities": stats.repurchase_opportunities,
                    "rate": rate,
                },
            )
        )

    return Explanation(item=breakdown.item, lines=tuple(lines))
