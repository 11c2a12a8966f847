"""Split-based evaluation of forgotten-item predictors.

Each customer's history is split chronologically; the predictor is
scored on the first forgotten-basket instance that falls entirely in
the test segment, against the items actually bought on the return trip.
Metrics are macro-averaged: mean and standard deviation over customers.

By default the profile for a prediction at basket B_t accumulates every
basket strictly before B_t, including test-segment baskets that precede
it (statistics grow up to the prediction moment; the split only decides
which instances are scored). `train_only_profile` restricts statistics
to the training segment instead. Neither mode ever reads B_t or
anything after it.
"""

from __future__ import annotations

import csv
import json
import statistics
import time
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

from .domain import CustomerHistory, LabelerConfig, XmtConfig
from .labeler import label_forgotten
from .methods import run_method
from .patterns import mine_tars
from .profiles import build_profile

REPORT_COLUMNS = [
    "method",
    "k",
    "h",
    "split",
    "precision_mean",
    "precision_std",
    "recall_mean",
    "recall_std",
    "f1_mean",
    "f1_std",
    "n_customers",
    "wall_time_s",
]


@dataclass(frozen=True, slots=True)
class SplitSpec:
    train_fraction: float

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")


def split_history(history: CustomerHistory, spec: SplitSpec) -> tuple[CustomerHistory, CustomerHistory]:
    """Chronological split: first floor(fraction * n) baskets train, rest test."""
    n = len(history.baskets)
    if n < 2:
        raise ValueError("cannot split a history with fewer than 2 baskets")
    cut = max(1, int(spec.train_fraction * n))
    return history.prefix(cut), CustomerHistory(history.customer, history.baskets[cut:])


def prf(predicted: Iterable[str], actual: Iterable[str]) -> tuple[float, float, float]:
    """Precision, recall, and F1 of a predicted item set against the truth."""
    predicted = set(predicted)
    actual = set(actual)
    if not actual:
        raise ValueError("prf needs a non-empty actual set")
    hits = len(predicted & actual)
    precision = hits / len(predicted) if predicted else 0.0
    recall = hits / len(actual)
    f1 = 2 * hits / (len(predicted) + len(actual))
    return precision, recall, f1


@dataclass(frozen=True, slots=True)
class InstanceResult:
    customer: str
    t_index: int
    f_index: int
    predicted: tuple[str, ...]
    actual: tuple[str, ...]
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True, slots=True)
class EvalReport:
    method: str
    k: int
    horizon: int
    split: float
    n_customers: int
    wall_time_s: float
    precision_mean: float | None = None
    precision_std: float | None = None
    recall_mean: float | None = None
    recall_std: float | None = None
    f1_mean: float | None = None
    f1_std: float | None = None
    details: tuple[InstanceResult, ...] = field(default=(), repr=False)

    def row(self) -> list:
        def cell(v):
            return "" if v is None else (f"{v:.6f}" if isinstance(v, float) else v)

        return [
            self.method,
            self.k,
            self.horizon,
            cell(self.split),
            cell(self.precision_mean),
            cell(self.precision_std),
            cell(self.recall_mean),
            cell(self.recall_std),
            cell(self.f1_mean),
            cell(self.f1_std),
            self.n_customers,
            cell(self.wall_time_s),
        ]

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "k": self.k,
            "h": self.horizon,
            "split": self.split,
            "precision_mean": self.precision_mean,
            "precision_std": self.precision_std,
            "recall_mean": self.recall_mean,
            "recall_std": self.recall_std,
            "f1_mean": self.f1_mean,
            "f1_std": self.f1_std,
            "n_customers": self.n_customers,
            "wall_time_s": self.wall_time_s,
        }


def first_test_instance(history: CustomerHistory, train_len: int, lcfg: LabelerConfig):
    """Earliest labeled instance whose large trip and follow-up are both in the test segment."""
    for inst in label_forgotten(history, lcfg):
        if inst.t_index >= train_len:
            return inst
    return None


def evaluate(
    histories: Iterable[CustomerHistory],
    method: str,
    cfg: XmtConfig,
    lcfg: LabelerConfig,
    spec: SplitSpec,
    train_only_profile: bool = False,
    keep_details: bool = False,
    timed: bool = True,
    pattern_cache: dict | None = None,
) -> EvalReport:
    """Score one method over a customer collection; see the module docstring.

    `pattern_cache` memoizes mined pattern sets by (customer, prefix
    length) across calls; mining is pure, so this only saves time.
    """
    started = time.monotonic()
    details: list[InstanceResult] = []
    for history in histories:
        if len(history.baskets) < 2:
            continue
        train, _test = split_history(history, spec)
        inst = first_test_instance(history, len(train.baskets), lcfg)
        if inst is None:
            continue
        prefix_len = len(train.baskets) if train_only_profile else inst.t_index
        prefix = history.prefix(prefix_len)
        profile = build_profile(
            prefix, inst.b_t.date, cfg, large_basket_threshold=lcfg.theta_t
        )
        patterns = None
        if method == "txmt":
            cache_key = (history.customer, prefix_len)
            if pattern_cache is not None and cache_key in pattern_cache:
                patterns = pattern_cache[cache_key]
            else:
                patterns = mine_tars(prefix)
                if pattern_cache is not None:
                    pattern_cache[cache_key] = patterns
        result = run_method(method, prefix, profile, inst.b_t, cfg, patterns=patterns)
        p, r, f1 = prf(result.forgotten, inst.b_f.items)
        details.append(
            InstanceResult(
                customer=history.customer,
                t_index=inst.t_index,
                f_index=inst.f_index,
                predicted=result.forgotten,
                actual=tuple(sorted(inst.b_f.items)),
                precision=p,
                recall=r,
                f1=f1,
            )
        )

    wall = time.monotonic() - started if timed else 0.0
    return _aggregate(method, cfg.k, lcfg.horizon, spec.train_fraction, details, wall, keep_details)


def _aggregate(method, k, horizon, split, details, wall, keep_details) -> EvalReport:
    base = dict(
        method=method,
        k=k,
        horizon=horizon,
        split=split,
        n_customers=len(details),
        wall_time_s=round(wall, 3),
        details=tuple(details) if keep_details else (),
    )
    if not details:
        return EvalReport(**base)

    def agg(values):
        return statistics.fmean(values), statistics.pstdev(values)

    pm, ps = agg([d.precision for d in details])
    rm, rs = agg([d.recall for d in details])
    fm, fs = agg([d.f1 for d in details])
    return EvalReport(
        precision_mean=pm,
        precision_std=ps,
        recall_mean=rm,
        recall_std=rs,
        f1_mean=fm,
        f1_std=fs,
        **base,
    )


def sweep(
    histories: Sequence[CustomerHistory],
    methods: Sequence[str],
    ks: Sequence[int],
    horizons: Sequence[int],
    splits: Sequence[float],
    cfg: XmtConfig,
    lcfg: LabelerConfig,
    train_only_profile: bool = False,
    timed: bool = True,
) -> list[EvalReport | dict]:
    """Cartesian sweep over methods, prediction lengths, horizons, and splits.

    Failed cells are reported as dicts carrying the cell settings and the
    error message instead of aborting the whole sweep.
    """
    histories = list(histories)
    pattern_cache: dict = {}
    out: list[EvalReport | dict] = []
    for split in splits:
        for horizon in horizons:
            for k in ks:
                for method in methods:
                    cell_cfg = cfg.replace(k=k)
                    cell_lcfg = LabelerConfig(lcfg.theta_t, lcfg.theta_th, horizon)
                    try:
                        out.append(
                            evaluate(
                                histories,
                                method,
                                cell_cfg,
                                cell_lcfg,
                                SplitSpec(split),
                                train_only_profile=train_only_profile,
                                timed=timed,
                                pattern_cache=pattern_cache,
                            )
                        )
                    except Exception as exc:  # noqa: BLE001 - cell isolation
                        out.append(
                            {
                                "method": method,
                                "k": k,
                                "h": horizon,
                                "split": split,
                                "error": str(exc),
                            }
                        )
    return out


def write_report_csv(reports: Sequence[EvalReport | dict], sink: IO[str]) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for report in reports:
        if isinstance(report, EvalReport):
            writer.writerow(report.row())


def reports_to_json(reports: Sequence[EvalReport | dict], config_echo: dict) -> str:
    payload = {
        "config": config_echo,
        "reports": [r.to_dict() if isinstance(r, EvalReport) else r for r in reports],
    }
    return json.dumps(payload, indent=2, sort_keys=True)
