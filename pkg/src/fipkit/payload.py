"""Prediction payload assembly shared by the CLI and the HTTP service.

Both surfaces must emit byte-identical JSON for identical inputs, so
they build the payload dict and serialize it here and nowhere else.
"""

from __future__ import annotations

import json
from dataclasses import asdict

from .domain import Basket, CustomerHistory, XmtConfig
from .explain import explain
from .methods import MethodResult, run_method
from .patterns import TarsPattern
from .profiles import CustomerProfile


def breakdown_dict(b) -> dict:
    return {
        "f": b.f,
        "tau": b.tau,
        "sigma": b.sigma,
        "kappa": b.kappa,
        "psi": b.psi,
        "omega": b.omega,
        "map": b.map,
        "tmap": b.tmap,
    }


def build_payload(
    method: str,
    prefix: CustomerHistory,
    profile: CustomerProfile,
    current: Basket,
    cfg: XmtConfig,
    with_explanations: bool = False,
    patterns: list[TarsPattern] | None = None,
) -> dict:
    result: MethodResult = run_method(method, prefix, profile, current, cfg, patterns=patterns)
    payload = {
        "customer_id": profile.customer,
        "at": profile.as_of.isoformat(),
        "method": method,
        "k": cfg.k,
        "basket": current.sorted_items,
        "forgotten": list(result.forgotten),
        "predicted_basket": list(result.predicted_basket),
        "config": asdict(cfg),
    }
    if with_explanations:
        payload["breakdowns"] = {
            item: breakdown_dict(b) for item, b in sorted(result.breakdowns.items())
        }
        payload["explanations"] = {
            item: explain(result.breakdowns[item], profile, current, cfg).to_dict()["lines"]
            for item in result.forgotten
            if item in result.breakdowns
        }
    return payload


def payload_json(payload: dict) -> str:
    """Canonical serialization: sorted keys, two-space indent, LF-terminated."""
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
