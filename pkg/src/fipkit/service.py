"""Read-only HTTP JSON API for live what-if predictions.

Profiles are built once at startup from a transaction log and shared
immutably across requests; no request mutates any state. Prediction
responses are serialized by the same function the CLI uses, so the two
surfaces are byte-identical for identical inputs.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Literal

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .domain import Basket, CustomerHistory, XmtConfig
from .ingest import parse_transactions
from .patterns import TarsPattern, mine_tars
from .payload import build_payload, payload_json
from .profiles import CustomerProfile, build_profile


def whatif_basket(items: set[str], at: dt.date, position: int) -> Basket:
    return Basket(date=at, items=frozenset(items), ordinal=position)


def default_as_of(history: CustomerHistory) -> dt.date:
    """Reference day for live prediction: the day after the last recorded trip."""
    return history.baskets[-1].date + dt.timedelta(days=1)


@dataclass(frozen=True)
class CustomerEntry:
    history: CustomerHistory
    profile: CustomerProfile
    patterns: tuple[TarsPattern, ...] | None


class ProfileStore:
    """Immutable per-customer profiles keyed by customer id."""

    def __init__(self, entries: dict[str, CustomerEntry], cfg: XmtConfig):
        self._entries = entries
        self.cfg = cfg

    @classmethod
    def from_histories(
        cls,
        histories: list[CustomerHistory],
        cfg: XmtConfig,
        large_basket_threshold: int = 10,
        mine_patterns: bool = False,
    ) -> "ProfileStore":
        entries = {}
        for history in histories:
            as_of = default_as_of(history)
            profile = build_profile(
                history, as_of, cfg, large_basket_threshold=large_basket_threshold
            )
            patterns = tuple(mine_tars(history)) if mine_patterns else None
            entries[history.customer] = CustomerEntry(history, profile, patterns)
        return cls(entries, cfg)

    @classmethod
    def from_csv(cls, path: str, cfg: XmtConfig, **kwargs) -> "ProfileStore":
        with open(path, newline="", encoding="utf-8") as fh:
            histories = parse_transactions(fh)
        return cls.from_histories(histories, cfg, **kwargs)

    def customers(self) -> list[str]:
        return sorted(self._entries)

    def get(self, customer_id: str) -> CustomerEntry | None:
        return self._entries.get(customer_id)


class PredictRequest(BaseModel):
    customer_id: str
    basket: list[str] = Field(min_length=1)
    k: int = Field(default=5, ge=1)
    method: Literal["top", "last", "mc", "ibp", "xmt", "txmt"] = "xmt"
    explain: bool = False


def create_app(store: ProfileStore) -> FastAPI:
    app = FastAPI(title="fipkit what-if prediction service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        # The request schema is part of the contract: violations are 400s.
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/customers")
    def customers():
        return store.customers()

    @app.get("/customers/{customer_id}/items")
    def customer_items(customer_id: str):
        entry = store.get(customer_id)
        if entry is None:
            return JSONResponse(status_code=404, content={"detail": "unknown customer"})
        return [
            {"item": item, "f": entry.profile.stats[item].base_freq}
            for item in entry.profile.items
        ]

    @app.post("/predict")
    def predict(req: PredictRequest):
        entry = store.get(req.customer_id)
        if entry is None:
            return JSONResponse(status_code=404, content={"detail": "unknown customer"})
        known = entry.profile.stats
        unknown = sorted({tok for tok in req.basket if tok not in known})
        if unknown:
            return JSONResponse(
                status_code=422,
                content={"detail": "unknown item tokens", "unknown_items": unknown},
            )
        cfg = store.cfg.replace(k=req.k)
        basket = whatif_basket(set(req.basket), entry.profile.as_of, len(entry.history.baskets))
        payload = build_payload(
            req.method,
            entry.history,
            entry.profile,
            basket,
            cfg,
            with_explanations=req.explain,
            patterns=list(entry.patterns) if entry.patterns is not None else None,
        )
        return Response(content=payload_json(payload), media_type="application/json")

    return app
