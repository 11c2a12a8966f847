"""Command-line pipeline: generate, label, predict, evaluate, sweep, tars dump, serve.

Every command accepts ``--config FILE`` (flat JSON); explicit flags
override file values, which override built-in defaults. The resolved
configuration is logged on every run and echoed into each output
artifact (inline for JSON outputs, as a ``<output>.meta.json`` sidecar
for plain CSV/JSONL outputs, which stay schema-pure). No command ever
mutates its input files.
"""

from __future__ import annotations

import dataclasses
import datetime as dt
import io
import json
import logging
import os
import sys
from pathlib import Path

import click

from .domain import LabelerConfig, XmtConfig
from .evaluation import (
    SplitSpec,
    evaluate,
    reports_to_json,
    sweep,
    write_report_csv,
)
from .ingest import (
    default_synthetic_config,
    filter_customers,
    generate_synthetic,
    parse_transactions,
    write_sidecar,
    write_transactions,
)
from .labeler import label_forgotten, labeling_stats
from .methods import METHODS
from .patterns import mine_tars
from .payload import build_payload, payload_json
from .profiles import build_profile
from .service import ProfileStore, create_app, default_as_of, whatif_basket

log = logging.getLogger("fipkit")

XMT_KEYS = [f.name for f in dataclasses.fields(XmtConfig)]
LABELER_KEYS = [f.name for f in dataclasses.fields(LabelerConfig)]


def _setup_logging():
    level = os.environ.get("FIPKIT_LOG", "INFO").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise click.ClickException(f"config file {path} must hold a JSON object")
    return data


def _resolve(file_cfg: dict, **flags) -> dict:
    merged = dict(file_cfg)
    merged.update({k: v for k, v in flags.items() if v is not None})
    return merged


def _xmt_from(merged: dict) -> XmtConfig:
    try:
        return XmtConfig(**{k: merged[k] for k in XMT_KEYS if k in merged})
    except (TypeError, ValueError) as exc:
        raise click.ClickException(f"bad scorer config: {exc}") from exc


def _labeler_from(merged: dict) -> LabelerConfig:
    try:
        return LabelerConfig(**{k: merged[k] for k in LABELER_KEYS if k in merged})
    except (TypeError, ValueError) as exc:
        raise click.ClickException(f"bad labeler config: {exc}") from exc


def _read_histories(path: str):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return parse_transactions(fh)
    except OSError as exc:
        raise click.ClickException(str(exc)) from exc
    except ValueError as exc:
        raise click.ClickException(f"{path}: {exc}") from exc


def _echo_config(resolved: dict):
    log.info("resolved config: %s", json.dumps(resolved, sort_keys=True, default=str))


def _write_meta(output: Path, command: str, resolved: dict, extra: dict | None = None):
    meta = {"command": command, "config": resolved}
    if extra:
        meta.update(extra)
    meta_path = output.with_name(output.name + ".meta.json")
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")


def scorer_options(fn):
    opts = [
        click.option("--epsilon", type=int, default=None, help="Minimum appearances for a nonzero base frequency."),
        click.option("--gamma", type=float, default=None, help="Due-window width as a multiple of the median gap."),
        click.option("--big-g", "big_g", type=int, default=None, help="Discontinuation threshold in days."),
        click.option("--alpha", type=float, default=None, help="Due-window boost factor."),
        click.option("--upsilon", type=float, default=None, help="Seasonal concentration threshold."),
        click.option("--beta", type=float, default=None, help="Seasonal boost factor."),
        click.option("--big-upsilon", "big_upsilon", type=int, default=None, help="Co-occurrence count threshold."),
        click.option("--big-theta", "big_theta", type=float, default=None, help="Boost per co-purchased basket item."),
        click.option("--nu", type=int, default=None, help="Repurchase window in days."),
        click.option("--big-lambda", "big_lambda", type=float, default=None, help="Repurchase boost."),
        click.option("--big-phi", "big_phi", type=float, default=None, help="Repurchase rate threshold."),
        click.option("--big-o", "big_o", type=int, default=None, help="Minimum repurchase opportunities."),
        click.option("--k", type=int, default=None, help="Number of forgotten items to return."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def labeler_options(fn):
    opts = [
        click.option("--theta-t", "theta_t", type=int, default=None, help="Large-trip size threshold (strict)."),
        click.option("--theta-th", "theta_th", type=int, default=None, help="Maximum follow-up size."),
        click.option("--h", "horizon", type=int, default=None, help="Maximum days between trip and follow-up."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Forgotten-item prediction toolkit."""
    _setup_logging()


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--seed", type=int, default=None, help="Generator seed; fully determines the output.")
@click.option("--customers", "n_customers", type=int, default=None)
@click.option("--items", "n_items", type=int, default=None)
@click.option("--baskets", "baskets_range", default=None, help="Per-customer trip count range, LO:HI.")
@click.option("--forget-rate", "forget_rate", type=float, default=None)
@click.option("--output", required=True, type=click.Path(dir_okay=False))
@click.option("--sidecar", type=click.Path(dir_okay=False), default=None,
              help="Ground-truth JSONL path (default: <output>.planted.jsonl).")
def generate(config_path, seed, n_customers, n_items, baskets_range, forget_rate, output, sidecar):
    """Write a synthetic transaction CSV plus its planted-forgotten sidecar."""
    merged = _resolve(
        _load_config_file(config_path),
        seed=seed,
        n_customers=n_customers,
        n_items=n_items,
        baskets_range=baskets_range,
        forget_rate=forget_rate,
    )
    rng_range = merged.get("baskets_range")
    if isinstance(rng_range, str):
        lo, _, hi = rng_range.partition(":")
        try:
            rng_range = (int(lo), int(hi))
        except ValueError:
            raise click.ClickException(f"bad --baskets range {rng_range!r}, expected LO:HI") from None
    try:
        cfg = default_synthetic_config(
            n_customers=merged.get("n_customers", 20),
            n_items=merged.get("n_items", 50),
            forget_rate=merged.get("forget_rate", 0.3),
            seed=merged.get("seed", 0),
            n_baskets_per_customer=tuple(rng_range) if rng_range else (40, 60),
        )
    except ValueError as exc:
        raise click.ClickException(f"bad generator config: {exc}") from exc
    resolved = dataclasses.asdict(cfg)
    _echo_config(resolved)

    dataset = generate_synthetic(cfg)
    out = Path(output)
    with out.open("w", newline="", encoding="utf-8") as fh:
        write_transactions(dataset.histories, fh)
    sidecar_path = Path(sidecar) if sidecar else out.with_suffix(out.suffix + ".planted.jsonl")
    with sidecar_path.open("w", encoding="utf-8") as fh:
        write_sidecar(dataset.planted, fh)
    _write_meta(out, "generate", resolved)
    log.info("wrote %s (%d customers) and %s (%d planted events)",
             out, len(dataset.histories), sidecar_path, len(dataset.planted))


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--min-baskets", "min_baskets", type=int, default=None, help="Minimum baskets per customer.")
@click.option("--min-basket-size", "min_basket_size", type=int, default=None)
@click.option("--max-basket-size", "max_basket_size", type=int, default=None)
@click.option("--min-item-freq", "min_item_freq", type=int, default=None,
              help="Minimum global basket count per item.")
@click.option("--output", required=True, type=click.Path(dir_okay=False))
def ingest(config_path, input_path, min_baskets, min_basket_size, max_basket_size, min_item_freq, output):
    """Normalize a raw transaction log: group, sort, and filter customers."""
    merged = _resolve(
        _load_config_file(config_path),
        min_baskets=min_baskets,
        min_basket_size=min_basket_size,
        max_basket_size=max_basket_size,
        min_item_freq=min_item_freq,
    )
    resolved = {
        "min_baskets": merged.get("min_baskets", 10),
        "min_basket_size": merged.get("min_basket_size", 1),
        "max_basket_size": merged.get("max_basket_size"),
        "min_item_freq": merged.get("min_item_freq", 1),
    }
    _echo_config(resolved)
    histories = _read_histories(input_path)
    kept = filter_customers(
        histories,
        min_baskets=resolved["min_baskets"],
        min_basket_size=resolved["min_basket_size"],
        min_item_freq=resolved["min_item_freq"],
        max_basket_size=resolved["max_basket_size"],
    )
    out = Path(output)
    with out.open("w", newline="", encoding="utf-8") as fh:
        write_transactions(kept, fh)
    _write_meta(out, "ingest", resolved, extra={
        "customers_in": len(histories), "customers_out": len(kept),
    })
    log.info("kept %d of %d customers", len(kept), len(histories))


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@labeler_options
@click.option("--output", required=True, type=click.Path(dir_okay=False))
def label(config_path, input_path, theta_t, theta_th, horizon, output):
    """Label forgotten-basket instances as JSONL."""
    merged = _resolve(_load_config_file(config_path), theta_t=theta_t, theta_th=theta_th, horizon=horizon)
    lcfg = _labeler_from(merged)
    resolved = dataclasses.asdict(lcfg)
    _echo_config(resolved)

    histories = _read_histories(input_path)
    out = Path(output)
    count = 0
    with out.open("w", encoding="utf-8") as fh:
        for history in histories:
            for inst in label_forgotten(history, lcfg):
                fh.write(json.dumps(
                    {
                        "customer_id": inst.customer,
                        "t_index": inst.t_index,
                        "f_index": inst.f_index,
                        "gap_days": inst.gap_days,
                    },
                    sort_keys=True,
                ))
                fh.write("\n")
                count += 1
    stats = labeling_stats(histories, lcfg)
    _write_meta(out, "label", resolved, extra={"stats": dataclasses.asdict(stats)})
    log.info("labeled %d instances over %d baskets (%.4f forgotten fraction)",
             stats.instances, stats.total_baskets, stats.forgotten_fraction)
    click.echo(f"instances={count} baskets={stats.total_baskets} fraction={stats.forgotten_fraction:.6f}",
               err=True)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--customer", required=True)
@click.option("--basket", required=True, help="Comma-separated item tokens of the current basket.")
@click.option("--at", "at_str", default=None, help="Reference day YYYY-MM-DD (default: day after last trip).")
@click.option("--method", type=click.Choice(METHODS), default=None)
@click.option("--explain", is_flag=True, default=False, help="Include score breakdowns and explanations.")
@click.option("--mine-patterns/--no-mine-patterns", "mine", default=True,
              help="Mine recurring patterns when the method needs them.")
@scorer_options
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="Write JSON here instead of stdout.")
def predict(config_path, input_path, customer, basket, at_str, method, explain, mine, output, **scorer):
    """Predict forgotten items for one customer and a what-if basket."""
    merged = _resolve(_load_config_file(config_path), method=method, **scorer)
    cfg = _xmt_from(merged)
    method = merged.get("method", "xmt")
    if method not in METHODS:
        raise click.ClickException(f"unknown method {method!r}")
    resolved = {"method": method, **dataclasses.asdict(cfg)}
    _echo_config(resolved)

    histories = {h.customer: h for h in _read_histories(input_path)}
    history = histories.get(customer)
    if history is None:
        raise click.ClickException(f"unknown customer {customer!r}")

    at = dt.date.fromisoformat(at_str) if at_str else default_as_of(history)
    profile = build_profile(history, at, cfg)
    tokens = {t.strip() for t in basket.split(",") if t.strip()}
    if not tokens:
        raise click.ClickException("empty basket")
    unknown = sorted(t for t in tokens if t not in profile.stats)
    if unknown:
        raise click.ClickException(f"unknown item tokens: {', '.join(unknown)}")

    current = whatif_basket(tokens, at, len(history.baskets))
    patterns = mine_tars(history) if (method == "txmt" and mine) else None
    payload = build_payload(
        method, history, profile, current, cfg,
        with_explanations=explain, patterns=patterns,
    )
    text = payload_json(payload)
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


def _eval_common(config_path, input_path, flags):
    merged = _resolve(_load_config_file(config_path), **flags)
    cfg = _xmt_from(merged)
    lcfg = _labeler_from(merged)
    return merged, cfg, lcfg


@main.command(name="evaluate")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--method", type=click.Choice(METHODS), default=None)
@click.option("--split", type=float, default=None, help="Training fraction in (0, 1).")
@click.option("--train-only-profile", is_flag=True, default=False,
              help="Restrict prediction-time statistics to the training segment.")
@click.option("--timing/--no-timing", "timed", default=True,
              help="--no-timing writes wall_time_s as 0.0 for reproducible artifacts.")
@labeler_options
@scorer_options
@click.option("--output-csv", type=click.Path(dir_okay=False), default=None)
@click.option("--output-json", type=click.Path(dir_okay=False), default=None)
def evaluate_cmd(config_path, input_path, method, split, train_only_profile, timed,
                 theta_t, theta_th, horizon, output_csv, output_json, **scorer):
    """Evaluate one method on one split and write a one-row report."""
    merged, cfg, lcfg = _eval_common(
        config_path, input_path,
        dict(method=method, split=split, theta_t=theta_t, theta_th=theta_th, horizon=horizon, **scorer),
    )
    method = merged.get("method", "xmt")
    split_frac = merged.get("split", 0.3)
    resolved = {
        "method": method, "split": split_frac, "train_only_profile": train_only_profile,
        **dataclasses.asdict(cfg), **dataclasses.asdict(lcfg),
    }
    _echo_config(resolved)

    histories = _read_histories(input_path)
    try:
        report = evaluate(
            histories, method, cfg, lcfg, SplitSpec(split_frac),
            train_only_profile=train_only_profile, timed=timed,
        )
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    _emit_reports([report], resolved, output_csv, output_json, "evaluate")


@main.command(name="sweep")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--methods", default=None, help="Comma-separated method list.")
@click.option("--ks", default=None, help="Comma-separated prediction lengths.")
@click.option("--horizons", default=None, help="Comma-separated horizons in days.")
@click.option("--splits", default=None, help="Comma-separated training fractions.")
@click.option("--train-only-profile", is_flag=True, default=False)
@click.option("--timing/--no-timing", "timed", default=True)
@labeler_options
@scorer_options
@click.option("--output-csv", type=click.Path(dir_okay=False), default=None)
@click.option("--output-json", type=click.Path(dir_okay=False), default=None)
def sweep_cmd(config_path, input_path, methods, ks, horizons, splits, train_only_profile, timed,
              theta_t, theta_th, horizon, output_csv, output_json, **scorer):
    """Evaluate the Cartesian product of methods, ks, horizons and splits."""

    def parse_list(raw, conv, fallback):
        if raw is None:
            return fallback
        if isinstance(raw, (list, tuple)):
            return [conv(v) for v in raw]
        try:
            return [conv(v) for v in str(raw).split(",") if str(v).strip()]
        except ValueError:
            raise click.ClickException(f"bad list value {raw!r}") from None

    merged, cfg, lcfg = _eval_common(
        config_path, input_path,
        dict(methods=methods, ks=ks, horizons=horizons, splits=splits,
             theta_t=theta_t, theta_th=theta_th, horizon=horizon, **scorer),
    )
    method_list = parse_list(merged.get("methods"), str, ["xmt"])
    k_list = parse_list(merged.get("ks"), int, [cfg.k])
    horizon_list = parse_list(merged.get("horizons"), int, [lcfg.horizon])
    split_list = parse_list(merged.get("splits"), float, [0.3])
    for m in method_list:
        if m not in METHODS:
            raise click.ClickException(f"unknown method {m!r}")
    resolved = {
        "methods": method_list, "ks": k_list, "horizons": horizon_list, "splits": split_list,
        "train_only_profile": train_only_profile,
        **dataclasses.asdict(cfg), **dataclasses.asdict(lcfg),
    }
    _echo_config(resolved)

    histories = _read_histories(input_path)
    reports = sweep(
        histories, method_list, k_list, horizon_list, split_list, cfg, lcfg,
        train_only_profile=train_only_profile, timed=timed,
    )
    _emit_reports(reports, resolved, output_csv, output_json, "sweep")


def _emit_reports(reports, resolved, output_csv, output_json, command):
    buf = io.StringIO()
    write_report_csv(reports, buf)
    csv_text = buf.getvalue()
    if output_csv:
        out = Path(output_csv)
        out.write_text(csv_text)
        _write_meta(out, command, resolved)
    if output_json:
        Path(output_json).write_text(reports_to_json(reports, resolved) + "\n")
    if not output_csv and not output_json:
        click.echo(csv_text, nl=False)
    else:
        click.echo(csv_text, nl=False, err=True)


@main.group()
def tars():
    """Recurring-pattern utilities."""


@tars.command(name="dump")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--customer", required=True)
@click.option("--min-support", type=int, default=2)
@click.option("--max-size", "max_size", type=int, default=2)
def tars_dump(input_path, customer, min_support, max_size):
    """Dump one customer's mined patterns as JSON."""
    histories = {h.customer: h for h in _read_histories(input_path)}
    history = histories.get(customer)
    if history is None:
        raise click.ClickException(f"unknown customer {customer!r}")
    mined = sorted(
        mine_tars(history, min_support=min_support, max_itemset_size=max_size),
        key=lambda p: p.sort_key(),
    )
    payload = [
        {
            "head": sorted(p.head),
            "tail": sorted(p.tail),
            "support": p.support,
            "gap_days": {"min": p.gap_min, "median": p.gap_median, "max": p.gap_max},
        }
        for p in mined
    ]
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


@main.command()
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Transaction CSV to build profiles from at startup.")
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
@click.option("--mine-patterns", is_flag=True, default=False,
              help="Pre-mine recurring patterns for every customer at startup.")
@scorer_options
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
def serve(data, port, host, mine_patterns, config_path, **scorer):
    """Start the what-if prediction HTTP service."""
    import uvicorn

    merged = _resolve(_load_config_file(config_path), **scorer)
    cfg = _xmt_from(merged)
    _echo_config({"data": data, "port": port, **dataclasses.asdict(cfg)})
    store = ProfileStore.from_csv(data, cfg, mine_patterns=mine_patterns)
    log.info("loaded %d customer profiles", len(store.customers()))
    uvicorn.run(create_app(store), host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
