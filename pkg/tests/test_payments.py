"""Payments: intent saga, loyalty discounts, ledger, refunds."""
from __future__ import annotations

import pytest

from golib import errors
from golib.payments import apply_loyalty_discount, tier_for_points

from .conftest import make_admin, make_event, register_reader


def reserved_booking(platform, price_minor=150_000, email="payer@x.pk", capacity=10):
    admin = make_admin(platform)
    event = make_event(platform, admin, price_minor=price_minor, capacity=capacity,
                       title=f"paid event {price_minor}")
    reader = register_reader(platform, email=email)
    booking = platform.scheduling.book_seat(reader, event["id"])
    return reader, event, booking


# -- discounts (pure) -----------------------------------------------------------


def test_discount_gold_ten_percent():
    assert apply_loyalty_discount(100_000, "Gold") == 10_000


def test_discount_floors():
    assert apply_loyalty_discount(99_900, "Gold") == 9_990
    assert apply_loyalty_discount(99_999, "Silver") == 4_999


def test_discount_tier_none_identity():
    assert apply_loyalty_discount(123_456, "None") == 0


def test_tier_thresholds():
    assert tier_for_points(0) == "None"
    assert tier_for_points(499) == "None"
    assert tier_for_points(500) == "Silver"
    assert tier_for_points(1999) == "Silver"
    assert tier_for_points(2000) == "Gold"


# -- intent lifecycle ---------------------------------------------------------------


def test_create_intent_on_reserved_booking(platform):
    reader, event, booking = reserved_booking(platform)
    intent = platform.payments.create_payment_intent(reader, booking["id"], "Easypaisa")
    assert intent["state"] == "Created"
    assert intent["provider"] == "Easypaisa"
    assert intent["base_amount_minor"] == 150_000
    assert intent["discount_minor"] == 0
    assert intent["amount_minor"] == 150_000


def test_create_intent_unknown_provider(platform):
    reader, _, booking = reserved_booking(platform)
    with pytest.raises(errors.UnknownProvider):
        platform.payments.create_payment_intent(reader, booking["id"], "PayPal")


def test_create_intent_hold_expired(platform, clock):
    reader, _, booking = reserved_booking(platform)
    clock.advance(platform.config.hold_ttl_seconds + 1)
    with pytest.raises(errors.HoldExpired):
        platform.payments.create_payment_intent(reader, booking["id"], "Easypaisa")


def test_create_intent_not_owner(platform):
    reader, _, booking = reserved_booking(platform)
    other = register_reader(platform, email="intruder@x.pk")
    with pytest.raises(errors.NotOwner):
        platform.payments.create_payment_intent(other, booking["id"], "Easypaisa")


def test_duplicate_intent_while_first_open(platform):
    reader, _, booking = reserved_booking(platform)
    platform.payments.create_payment_intent(reader, booking["id"], "Easypaisa")
    with pytest.raises(errors.DuplicateIntent):
        platform.payments.create_payment_intent(reader, booking["id"], "JazzCash")


def test_confirm_success_captures_confirms_and_earns_points(platform):
    reader, _, booking = reserved_booking(platform, price_minor=150_000)
    intent = platform.payments.create_payment_intent(reader, booking["id"], "Easypaisa")
    captured = platform.payments.confirm_payment(intent["id"], "success")
    assert captured["state"] == "Captured"
    assert platform.scheduling.get_booking(booking["id"])["state"] == "Confirmed"
    assert platform.scheduling.get_booking(booking["id"])["payment_id"] == intent["id"]
    entries = platform.payments.ledger_entries(intent["id"])
    assert [(e["direction"], e["amount_minor"]) for e in entries] == [("Charge", 150_000)]
    assert platform.payments.get_loyalty(reader["id"])["points"] == 150


def test_confirm_failure_keeps_reservation_no_ledger(platform):
    reader, _, booking = reserved_booking(platform)
    before = platform.scheduling.get_booking(booking["id"])
    intent = platform.payments.create_payment_intent(reader, booking["id"], "JazzCash")
    failed = platform.payments.confirm_payment(intent["id"], "failure")
    assert failed["state"] == "Failed"
    after = platform.scheduling.get_booking(booking["id"])
    assert after["state"] == "Reserved"
    assert after["hold_expires_at"] == before["hold_expires_at"]  # hold clock unchanged
    assert platform.payments.ledger_entries(intent["id"]) == []


def test_failed_intent_allows_a_new_one(platform):
    reader, _, booking = reserved_booking(platform)
    intent = platform.payments.create_payment_intent(reader, booking["id"], "JazzCash")
    platform.payments.confirm_payment(intent["id"], "failure")
    retry = platform.payments.create_payment_intent(reader, booking["id"], "Easypaisa")
    assert retry["state"] == "Created"


def test_confirm_twice_already_final(platform):
    reader, _, booking = reserved_booking(platform)
    intent = platform.payments.create_payment_intent(reader, booking["id"], "Easypaisa")
    platform.payments.confirm_payment(intent["id"], "success")
    with pytest.raises(errors.AlreadyFinal):
        platform.payments.confirm_payment(intent["id"], "success")


def test_confirm_unknown_intent(platform):
    with pytest.raises(errors.UnknownIntent):
        platform.payments.confirm_payment("pay_ghost", "success")


def test_confirm_success_after_hold_expiry_fails_intent_and_frees_seat(platform, clock):
    reader, event, booking = reserved_booking(platform, capacity=1)
    intent = platform.payments.create_payment_intent(reader, booking["id"], "Easypaisa")
    clock.advance(platform.config.hold_ttl_seconds + 1)
    with pytest.raises(errors.HoldExpired):
        platform.payments.confirm_payment(intent["id"], "success")
    assert platform.payments.get_intent(intent["id"])["state"] == "Failed"
    assert platform.scheduling.get_booking(booking["id"])["state"] == "Released"
    assert platform.payments.ledger_entries(intent["id"]) == []
    # the seat is free again
    other = register_reader(platform, email="later@x.pk")
    platform.scheduling.book_seat(other, event["id"])


def test_confirm_success_after_cancel_fails_intent(platform):
    reader, _, booking = reserved_booking(platform)
    intent = platform.payments.create_payment_intent(reader, booking["id"], "Easypaisa")
    platform.scheduling.cancel_booking(reader, booking["id"])
    with pytest.raises(errors.HoldExpired):
        platform.payments.confirm_payment(intent["id"], "success")
    assert platform.payments.get_intent(intent["id"])["state"] == "Failed"
    assert platform.payments.ledger_entries(intent["id"]) == []


# -- refunds -------------------------------------------------------------------------


def captured_intent(platform, price_minor=90_000, email="refundee@x.pk"):
    reader, _, booking = reserved_booking(platform, price_minor=price_minor, email=email)
    intent = platform.payments.create_payment_intent(reader, booking["id"], "Easypaisa")
    platform.payments.confirm_payment(intent["id"], "success")
    return reader, intent


def test_refund_captured_intent(platform):
    reader, intent = captured_intent(platform, price_minor=90_000)
    refunded = platform.payments.refund_payment(intent["id"])
    assert refunded["state"] == "Refunded"
    entries = platform.payments.ledger_entries(intent["id"])
    assert ("Refund", 90_000) in [(e["direction"], e["amount_minor"]) for e in entries]


def test_refund_revokes_points_not_below_zero(platform):
    reader, intent = captured_intent(platform, price_minor=90_000)
    assert platform.payments.get_loyalty(reader["id"])["points"] == 90
    platform.payments.refund_payment(intent["id"])
    assert platform.payments.get_loyalty(reader["id"])["points"] == 0
    # a second revocation cannot happen (AlreadyRefunded), so zero is the floor
    with pytest.raises(errors.AlreadyRefunded):
        platform.payments.refund_payment(intent["id"])


def test_refund_failed_intent_not_captured(platform):
    reader, _, booking = reserved_booking(platform)
    intent = platform.payments.create_payment_intent(reader, booking["id"], "JazzCash")
    platform.payments.confirm_payment(intent["id"], "failure")
    with pytest.raises(errors.NotCaptured):
        platform.payments.refund_payment(intent["id"])


def test_refund_created_intent_not_captured(platform):
    reader, _, booking = reserved_booking(platform)
    intent = platform.payments.create_payment_intent(reader, booking["id"], "JazzCash")
    with pytest.raises(errors.NotCaptured):
        platform.payments.refund_payment(intent["id"])


# -- loyalty end to end ----------------------------------------------------------------


def test_discount_applied_at_intent_creation_by_current_tier(platform):
    admin = make_admin(platform)
    reader = register_reader(platform, email="gold@x.pk")
    # earn Gold: capture 2_000_000 paisa => 2000 points
    event = make_event(platform, admin, price_minor=2_000_000, title="expensive retreat")
    booking = platform.scheduling.book_seat(reader, event["id"])
    intent = platform.payments.create_payment_intent(reader, booking["id"], "Easypaisa")
    platform.payments.confirm_payment(intent["id"], "success")
    assert platform.payments.get_loyalty(reader["id"])["tier"] == "Gold"

    event2 = make_event(platform, admin, price_minor=100_000, title="cheap workshop")
    booking2 = platform.scheduling.book_seat(reader, event2["id"])
    intent2 = platform.payments.create_payment_intent(reader, booking2["id"], "JazzCash")
    assert intent2["discount_minor"] == 10_000
    assert intent2["amount_minor"] == 90_000


def test_booking_confirmed_iff_one_captured_or_refunded_intent(platform):
    reader, intent = captured_intent(platform)
    snap = platform.store.snapshot()
    for rec in snap.records("bookings"):
        booking = rec.doc
        referencing = [
            r.doc for r in snap.records("payment_intents")
            if r.doc["booking_id"] == booking["id"] and r.doc["state"] in ("Captured", "Refunded")
        ]
        if booking["state"] == "Confirmed":
            assert len(referencing) == 1
        else:
            assert len(referencing) == 0 or booking["state"] == "Released"
