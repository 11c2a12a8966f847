"""Acceptance criteria, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL
line per criterion. Expected values and margins were derived with the
brute-force reference implementations (tests/reference.py) before the
engine was accepted against them; dataset seeds are frozen.
"""

import datetime as dt
import hashlib
import json
import random
import resource
import time

import pytest
from click.testing import CliRunner

from fipkit.baselines import top_predict
from fipkit.cli import main as cli_main
from fipkit.domain import Basket, LabelerConfig, XmtConfig
from fipkit.evaluation import SplitSpec, evaluate, prf, sweep
from fipkit.explain import explain
from fipkit.ingest import (
    default_synthetic_config,
    generate_synthetic,
    parse_transactions,
    write_transactions,
)
from fipkit.labeler import label_forgotten
from fipkit.patterns import mine_tars, predict_forgotten_tars
from fipkit.profiles import CustomerProfile, ItemStats, build_profile
from fipkit.scoring import make_breakdown, predict_forgotten

from reference import (
    naive_label,
    naive_predict,
    naive_prf,
    naive_scores,
    random_history,
)


def report(name: str, ok: bool, detail: str = ""):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" - {detail}" if detail else ""))
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def random_instances():
    """100 seeded random (history, as_of, basket, config) tuples."""
    rng = random.Random(20240_100)
    out = []
    for i in range(100):
        cfg = XmtConfig(epsilon=rng.randint(1, 6), k=rng.randint(1, 8))
        h = random_history(rng, customer=f"r{i}", max_baskets=50, max_items=30)
        as_of = h.baskets[-1].date + dt.timedelta(days=rng.randint(0, 3))
        vocabulary = sorted({it for b in h.baskets for it in b.items})
        size = rng.randint(1, min(8, len(vocabulary)))
        current = Basket(as_of, frozenset(rng.sample(vocabulary, size)), len(h.baskets))
        out.append((h, as_of, current, cfg))
    return out


@pytest.fixture(scope="module")
def planted():
    """The frozen planted-pattern dataset used by A7 and A8."""
    cfg = default_synthetic_config(
        n_customers=200, n_items=50, forget_rate=0.3, seed=20240,
        n_baskets_per_customer=(70, 85),
    )
    return generate_synthetic(cfg)


@pytest.fixture(scope="module")
def pattern_cache():
    return {}


def test_a1_formula_oracle_equivalence(random_instances):
    started = time.monotonic()
    worst = 0.0
    checked = 0
    for h, as_of, current, cfg in random_instances:
        profile = build_profile(h, as_of, cfg)
        pred = predict_forgotten(profile, current, cfg)
        for item, got in pred.breakdowns.items():
            want = naive_scores(list(h.baskets), item, current, as_of, cfg)
            for key in ("f", "tau", "sigma", "kappa", "psi", "map"):
                worst = max(worst, abs(getattr(got, key) - want[key]))
            checked += 1
    elapsed = time.monotonic() - started
    report(
        "A1 formula-oracle equivalence",
        worst < 1e-12 and elapsed < 10.0 and checked > 0,
        f"{checked} breakdowns, worst |delta| = {worst:.2e}, {elapsed:.1f}s",
    )


def test_a2_selection_oracle_equivalence(random_instances):
    started = time.monotonic()
    mismatches = 0
    for h, as_of, current, cfg in random_instances:
        profile = build_profile(h, as_of, cfg)
        pred = predict_forgotten(profile, current, cfg)
        expected, forgotten = naive_predict(list(h.baskets), current, as_of, cfg)
        if list(pred.predicted_basket) != expected or list(pred.forgotten) != forgotten:
            mismatches += 1
    elapsed = time.monotonic() - started
    report(
        "A2 two-phase selection vs exhaustive oracle",
        mismatches == 0 and elapsed < 10.0,
        f"100 instances item-for-item, {elapsed:.1f}s",
    )


def test_a3_pattern_degeneration_and_additivity(random_instances):
    empty_equal = True
    additivity = True
    positive_omega = 0
    for h, as_of, current, cfg in random_instances:
        profile = build_profile(h, as_of, cfg)
        plain = predict_forgotten(profile, current, cfg)
        degenerate = predict_forgotten_tars(profile, [], current, h.baskets, cfg)
        if degenerate.forgotten != plain.forgotten:
            empty_equal = False
        mined = predict_forgotten_tars(profile, mine_tars(h), current, h.baskets, cfg)
        for b in mined.breakdowns.values():
            if b.omega > 0:
                positive_omega += 1
            if b.tmap != b.map + b.omega:
                additivity = False
    report(
        "A3 pattern-score degeneration and additivity",
        empty_equal and additivity and positive_omega > 0,
        f"empty-set equality on 100 instances; tmap = map + omega bit-exact "
        f"({positive_omega} breakdowns with positive pattern score)",
    )


def test_a4_frequency_degeneration(random_instances):
    mismatches = 0
    for h, as_of, current, _cfg in random_instances:
        cfg = XmtConfig(epsilon=1, alpha=1.0, beta=1.0, big_theta=0.0, big_lambda=0.0, k=5)
        profile = build_profile(h, as_of, cfg)
        pred = predict_forgotten(profile, current, cfg)
        if list(pred.forgotten) != top_predict(profile, current, cfg.k):
            mismatches += 1
    report(
        "A4 neutral-parameter degeneration to frequency baseline",
        mismatches == 0,
        "100 instances",
    )


def test_a5_labeler_oracle_and_monotonicity():
    rng = random.Random(20240_500)
    mismatches = 0
    for i in range(50):
        h = random_history(rng, customer=f"l{i}", max_baskets=40, max_items=16)
        cfg = LabelerConfig(
            theta_t=rng.randint(2, 12),
            theta_th=rng.randint(1, 12),
            horizon=rng.randint(0, 3),
        )
        got = [(inst.t_index, inst.f_index) for inst in label_forgotten(h, cfg)]
        if got != naive_label(h, cfg):
            mismatches += 1
    monotone = True
    for i in range(20):
        h = random_history(rng, customer=f"m{i}", max_baskets=40, max_items=16)
        counts = [len(label_forgotten(h, LabelerConfig(10, 10, hz))) for hz in (0, 1, 2)]
        if counts != sorted(counts):
            monotone = False
    report(
        "A5 labeler equals brute-force pair scan; counts monotone in horizon",
        mismatches == 0 and monotone,
        "50 oracle histories, 20 horizon sweeps",
    )


def test_a6_metric_identities():
    rng = random.Random(20240_600)
    worst = 0.0
    for _ in range(1000):
        predicted = {f"i{n}" for n in rng.sample(range(40), rng.randint(0, 12))}
        actual = {f"i{n}" for n in rng.sample(range(40), rng.randint(1, 12))}
        p, r, f1 = prf(predicted, actual)
        np_, nr, nf1 = naive_prf(predicted, actual)
        assert (p, r, f1) == (np_, nr, nf1)
        if p + r > 0:
            worst = max(worst, abs(f1 - 2 * p * r / (p + r)))
    report(
        "A6 precision/recall/F1 identities",
        worst < 1e-12,
        f"1000 random set pairs, worst harmonic-mean residual = {worst:.2e}",
    )


def test_a7_planted_pattern_recovery(planted, pattern_cache):
    started = time.monotonic()
    cfg, lcfg, spec = XmtConfig(k=5), LabelerConfig(10, 10, 2), SplitSpec(0.3)
    scores = {}
    for method in ("top", "last", "xmt", "txmt"):
        scores[method] = evaluate(
            planted.histories, method, cfg, lcfg, spec,
            timed=False, pattern_cache=pattern_cache,
        ).f1_mean
    elapsed = time.monotonic() - started
    ok = (
        scores["xmt"] >= scores["top"] + 0.05
        and scores["xmt"] >= scores["last"] + 0.05
        and scores["txmt"] >= scores["xmt"] - 0.01
        and elapsed < 60.0
    )
    report(
        "A7 planted-pattern recovery ordering",
        ok,
        f"xmt={scores['xmt']:.4f} top={scores['top']:.4f} last={scores['last']:.4f} "
        f"txmt={scores['txmt']:.4f}, {elapsed:.1f}s",
    )


def test_a8_k_sweep_shape(planted, pattern_cache):
    cfg, lcfg = XmtConfig(k=5), LabelerConfig(10, 10, 2)
    ks = (5, 10, 15, 20)

    # exact nested-prefix property for the frequency baseline
    nested = True
    details_by_k = {}
    for k in ks:
        details_by_k[k] = {
            d.customer: d
            for d in evaluate(
                planted.histories, "top", cfg.replace(k=k), lcfg, SplitSpec(0.3),
                keep_details=True, timed=False,
            ).details
        }
    for customer in details_by_k[5]:
        rows = [details_by_k[k][customer] for k in ks]
        recalls = [r.recall for r in rows]
        if recalls != sorted(recalls):
            nested = False
        for small, big in zip(rows, rows[1:]):
            if list(big.predicted)[: len(small.predicted)] != list(small.predicted):
                nested = False

    methods = ["top", "last", "mc", "ibp", "xmt", "txmt"]
    reports = sweep(
        planted.histories, methods, list(ks), [2], [0.3], cfg, lcfg, timed=False
    )
    by_method = {}
    for r in reports:
        by_method.setdefault(r.method, {})[r.k] = r.precision_mean
    precision_ok = all(
        by_method[m][ks[i + 1]] <= by_method[m][ks[i]] + 0.02
        for m in methods
        for i in range(len(ks) - 1)
    )
    report(
        "A8 k-sweep shape",
        nested and precision_ok,
        "top-k prefix nesting exact; precision non-increasing within 0.02 "
        "for all six methods over k in {5,10,15,20}",
    )


def test_a9_explanation_goldens():
    stats = ItemStats(
        appearances=50,
        base_freq=0.5,
        median_interval_days=2,
        mean_interval_days=2.0,
        days_since_last=3,
        seasonal_ratio_current=0.25,
        repurchase_events=713,
        repurchase_opportunities=1000,
    )
    profile = CustomerProfile(
        customer="u", as_of=dt.date(2024, 1, 31), history_len=100,
        stats={"vegetables": stats}, copurchase={},
    )
    breakdown = make_breakdown("vegetables", f=0.5, tau=0.75, sigma=0.75, kappa=0.0, psi=0.5)
    basket = Basket(dt.date(2024, 1, 31), frozenset({"bread"}), 0)
    exp = explain(breakdown, profile, basket, XmtConfig())
    texts = {line.kind: line.text for line in exp.lines}
    ok = (
        texts["recency"] == "Last purchased 3 days ago (typically bought every 2.0 days)"
        and texts["repurchase"]
        == "Often repurchased soon after large shopping trips (71.3% of opportunities)"
    )
    report("A9 explanation golden templates", ok, "recency and repurchase lines verbatim")


def test_a10_cli_determinism(tmp_path):
    runner = CliRunner()

    def digest(path):
        return hashlib.sha256(path.read_bytes()).hexdigest()

    hashes = {"generate": [], "evaluate": [], "sweep": []}
    for attempt in ("x", "y"):
        base = tmp_path / attempt
        base.mkdir()
        csv_path = base / "data.csv"
        r = runner.invoke(cli_main, [
            "generate", "--seed", "11", "--customers", "6", "--items", "30",
            "--baskets", "40:50", "--forget-rate", "0.3", "--output", str(csv_path),
        ])
        assert r.exit_code == 0, r.output
        hashes["generate"].append(
            (digest(csv_path), digest(base / "data.csv.planted.jsonl"))
        )
        out_csv = base / "report.csv"
        r = runner.invoke(cli_main, [
            "evaluate", "--input", str(csv_path), "--method", "xmt", "--k", "5",
            "--no-timing", "--output-csv", str(out_csv), "--output-json", str(base / "report.json"),
        ])
        assert r.exit_code == 0, r.output
        hashes["evaluate"].append((digest(out_csv), digest(base / "report.json")))
        sweep_csv = base / "sweep.csv"
        r = runner.invoke(cli_main, [
            "sweep", "--input", str(csv_path), "--methods", "top,xmt", "--ks", "3,5",
            "--horizons", "1,2", "--splits", "0.3", "--no-timing",
            "--output-csv", str(sweep_csv),
        ])
        assert r.exit_code == 0, r.output
        hashes["sweep"].append(digest(sweep_csv))
    ok = all(vals[0] == vals[1] for vals in hashes.values())
    report("A10 byte-identical artifacts across reruns", ok, "generate, evaluate, sweep")


def test_a11_scale_run(tmp_path):
    cfg_syn = default_synthetic_config(
        n_customers=1800, n_items=50, forget_rate=0.3, seed=77,
        n_baskets_per_customer=(45, 55),
    )
    dataset = generate_synthetic(cfg_syn)
    rows = sum(len(b.items) for h in dataset.histories for b in h.baskets)
    assert rows >= 1_000_000, f"dataset too small: {rows} rows"
    path = tmp_path / "big.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        write_transactions(dataset.histories, fh)

    started = time.monotonic()
    with path.open(newline="", encoding="utf-8") as fh:
        histories = parse_transactions(fh)
    result = evaluate(
        histories, "xmt", XmtConfig(k=5), LabelerConfig(10, 10, 2), SplitSpec(0.3),
        timed=False,
    )
    elapsed = time.monotonic() - started
    peak_gb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1e6
    ok = elapsed < 120.0 and peak_gb < 2.0 and result.n_customers > 0
    report(
        "A11 million-row ingest + profile + evaluate",
        ok,
        f"{rows} rows, {elapsed:.1f}s, peak RSS {peak_gb:.2f} GB, "
        f"{result.n_customers} customers evaluated",
    )
