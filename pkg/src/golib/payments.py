"""Reserve -> pay -> confirm saga: intents, ledger, loyalty discounts, refunds.

Providers are in-process simulators driven by an explicit outcome, so every
test is deterministic. Intent and booking state always advance inside one
store transaction; the ledger is append-only and refunds can never exceed
charges for an intent.

Loyalty: 1 point per 1000 minor units captured; tiers None (<500 points,
0%), Silver (500-1999, 5%), Gold (>=2000, 10%). Discounts floor, so a
rounding error can never overcharge.
"""
from __future__ import annotations

import secrets
from typing import Optional

from . import errors, scheduling
from .clock import format_ts
from .config import Config
from .store import Store, Txn

PAYMENT_INTENTS = "payment_intents"
INTENT_INDEX = "intent_index"  # booking_id -> live (non-Failed) intent
LEDGER = "ledger"
LOYALTY = "loyalty"

PROVIDERS = ("Easypaisa", "JazzCash")

INTENT_CREATED = "Created"
INTENT_CAPTURED = "Captured"
INTENT_FAILED = "Failed"
INTENT_REFUNDED = "Refunded"

TIER_NONE = "None"
TIER_SILVER = "Silver"
TIER_GOLD = "Gold"

SILVER_POINTS = 500
GOLD_POINTS = 2000
_TIER_RATE_PCT = {TIER_NONE: 0, TIER_SILVER: 5, TIER_GOLD: 10}

POINTS_PER_MINOR = 1000  # 1 point per 1000 paisa charged


def tier_for_points(points: int) -> str:
    if points >= GOLD_POINTS:
        return TIER_GOLD
    if points >= SILVER_POINTS:
        return TIER_SILVER
    return TIER_NONE


def apply_loyalty_discount(base_amount_minor: int, tier: str) -> int:
    """Discount in minor units: floor(base * tier rate)."""
    if base_amount_minor < 0:
        raise errors.ValidationFailed("amount must be non-negative")
    rate_pct = _TIER_RATE_PCT.get(tier)
    if rate_pct is None:
        raise errors.ValidationFailed(f"unknown loyalty tier {tier!r}")
    return base_amount_minor * rate_pct // 100


def loyalty_view(doc: Optional[dict], account_id: str) -> dict:
    points = doc["points"] if doc else 0
    return {"account_id": account_id, "points": points, "tier": tier_for_points(points)}


class PaymentsService:
    def __init__(self, store: Store, config: Config):
        self.store = store
        self.config = config
        self.clock = config.clock

    # -- intents ---------------------------------------------------------------

    def create_payment_intent(self, actor: dict, booking_id: str, provider: str) -> dict:
        if provider not in PROVIDERS:
            raise errors.UnknownProvider(f"provider must be one of {', '.join(PROVIDERS)}")
        now = self.clock.now()
        intent_id = "pay_" + secrets.token_hex(8)

        def txn_fn(txn: Txn):
            booking = txn.get(scheduling.BOOKINGS, booking_id)
            if booking is None:
                raise errors.UnknownBooking(booking_id)
            if booking["reader_id"] != actor["id"]:
                raise errors.NotOwner("only the booking owner may pay for it")
            if booking["state"] != scheduling.BOOKING_RESERVED:
                raise errors.HoldExpired("booking is not awaiting payment")
            if format_ts(now) > booking["hold_expires_at"]:
                raise errors.HoldExpired("the reservation hold has lapsed")
            index = txn.get(INTENT_INDEX, booking_id)
            if index is not None:
                raise errors.DuplicateIntent(f"intent {index['intent_id']} is already open")
            event = txn.get(scheduling.EVENTS, booking["event_id"])
            base = event["price_minor"]
            tier = loyalty_view(txn.get(LOYALTY, actor["id"]), actor["id"])["tier"]
            discount = apply_loyalty_discount(base, tier)
            intent = {
                "id": intent_id,
                "booking_id": booking_id,
                "payer_id": actor["id"],
                "provider": provider,
                "base_amount_minor": base,
                "discount_minor": discount,
                "amount_minor": base - discount,
                "state": INTENT_CREATED,
                "points_earned": 0,
                "created_at": format_ts(now),
            }
            txn.put(PAYMENT_INTENTS, intent_id, intent)
            txn.put(INTENT_INDEX, booking_id, {"intent_id": intent_id})
            return intent

        return self.store.transact(txn_fn).value

    def confirm_payment(self, intent_id: str, provider_outcome: str) -> dict:
        """Apply the provider's verdict. A success can only capture while the
        booking's hold is still good; a stale success fails the intent (and
        reclaims the dead hold) before reporting HoldExpired."""
        if provider_outcome not in ("success", "failure"):
            raise errors.ValidationFailed("provider_outcome must be success or failure")
        now = self.clock.now()

        def txn_fn(txn: Txn):
            intent = txn.get(PAYMENT_INTENTS, intent_id)
            if intent is None:
                raise errors.UnknownIntent(intent_id)
            if intent["state"] != INTENT_CREATED:
                raise errors.AlreadyFinal(f"intent is already {intent['state']}")
            if provider_outcome == "failure":
                txn.put(PAYMENT_INTENTS, intent_id, {**intent, "state": INTENT_FAILED})
                txn.delete(INTENT_INDEX, intent["booking_id"])
                return {**intent, "state": INTENT_FAILED}, None

            booking = txn.get(scheduling.BOOKINGS, intent["booking_id"])
            hold_good = (
                booking is not None
                and booking["state"] == scheduling.BOOKING_RESERVED
                and format_ts(now) <= booking["hold_expires_at"]
            )
            if not hold_good:
                txn.put(PAYMENT_INTENTS, intent_id, {**intent, "state": INTENT_FAILED})
                txn.delete(INTENT_INDEX, intent["booking_id"])
                if booking is not None and booking["state"] == scheduling.BOOKING_RESERVED:
                    self._reclaim_booking(txn, booking)
                return {**intent, "state": INTENT_FAILED}, errors.HoldExpired(
                    "the reservation hold lapsed before the charge completed"
                )

            points = intent["amount_minor"] // POINTS_PER_MINOR
            captured = {**intent, "state": INTENT_CAPTURED, "points_earned": points}
            txn.put(PAYMENT_INTENTS, intent_id, captured)
            self._append_ledger(txn, intent_id, "Charge", intent["amount_minor"], now)
            txn.put(
                scheduling.BOOKINGS,
                booking["id"],
                {**booking, "state": scheduling.BOOKING_CONFIRMED, "payment_id": intent_id},
            )
            inventory = txn.get(scheduling.SEAT_INVENTORY, booking["event_id"])
            if inventory is not None and booking["id"] in inventory["active"]:
                active = dict(inventory["active"])
                active[booking["id"]] = {**active[booking["id"]], "state": scheduling.BOOKING_CONFIRMED}
                txn.put(scheduling.SEAT_INVENTORY, booking["event_id"], {**inventory, "active": active})
            self._add_points(txn, intent["payer_id"], points)
            return captured, None

        result, stale_error = self.store.transact(txn_fn).value
        if stale_error is not None:
            raise stale_error
        return result

    def refund_payment(self, intent_id: str) -> dict:
        """Standalone refund of a captured intent (cancellation goes through
        scheduling.cancel_booking, which refunds inside its own transaction)."""
        def txn_fn(txn: Txn):
            intent = txn.get(PAYMENT_INTENTS, intent_id)
            if intent is None:
                raise errors.UnknownIntent(intent_id)
            return self._refund_in_txn(txn, intent)

        return self.store.transact(txn_fn).value

    def refund_for_booking_in_txn(self, txn: Txn, booking: dict) -> Optional[dict]:
        """Refund hook for cancel_booking: refunds the booking's captured
        intent, if any, inside the caller's transaction."""
        index = txn.get(INTENT_INDEX, booking["id"])
        if index is None:
            return None
        intent = txn.get(PAYMENT_INTENTS, index["intent_id"])
        if intent is None or intent["state"] != INTENT_CAPTURED:
            return None
        return self._refund_in_txn(txn, intent)

    def _refund_in_txn(self, txn: Txn, intent: dict) -> dict:
        if intent["state"] == INTENT_REFUNDED:
            raise errors.AlreadyRefunded("intent was already refunded")
        if intent["state"] != INTENT_CAPTURED:
            raise errors.NotCaptured(f"cannot refund a {intent['state']} intent")
        refunded = {**intent, "state": INTENT_REFUNDED}
        txn.put(PAYMENT_INTENTS, intent["id"], refunded)
        self._append_ledger(txn, intent["id"], "Refund", intent["amount_minor"], self.clock.now())
        self._add_points(txn, intent["payer_id"], -intent["points_earned"])
        return refunded

    # -- ledger and loyalty ------------------------------------------------------

    def _append_ledger(self, txn: Txn, intent_id: str, direction: str, amount_minor: int, now) -> None:
        entry_id = "led_" + secrets.token_hex(8)
        txn.put(
            LEDGER,
            entry_id,
            {
                "id": entry_id,
                "intent_id": intent_id,
                "direction": direction,
                "amount_minor": amount_minor,
                "recorded_at": format_ts(now),
            },
        )

    def _add_points(self, txn: Txn, account_id: str, delta: int) -> None:
        doc = txn.get(LOYALTY, account_id) or {"account_id": account_id, "points": 0}
        txn.put(LOYALTY, account_id, {**doc, "points": max(0, doc["points"] + delta)})

    def get_intent(self, intent_id: str) -> Optional[dict]:
        return self.store.snapshot().get(PAYMENT_INTENTS, intent_id)

    def get_loyalty(self, account_id: str) -> dict:
        return loyalty_view(self.store.snapshot().get(LOYALTY, account_id), account_id)

    def ledger_entries(self, intent_id: Optional[str] = None) -> list[dict]:
        pred = None if intent_id is None else (lambda d: d["intent_id"] == intent_id)
        rows = self.store.query(LEDGER, predicate=pred, order=lambda d: d["recorded_at"])
        return [r.doc for r in rows]

    def _reclaim_booking(self, txn: Txn, booking: dict) -> None:
        txn.put(scheduling.BOOKINGS, booking["id"], {**booking, "state": scheduling.BOOKING_RELEASED})
        inventory = txn.get(scheduling.SEAT_INVENTORY, booking["event_id"])
        if inventory is not None and booking["id"] in inventory["active"]:
            active = dict(inventory["active"])
            active.pop(booking["id"])
            txn.put(scheduling.SEAT_INVENTORY, booking["event_id"], {**inventory, "active": active})
