"""Events, availability calendars, geo search, capacity-safe seat booking.

The no-overbooking guarantee hangs on one record per event, its seat
inventory, which lists every live (Reserved or Confirmed) booking with its
hold deadline. book_seat reclaims expired holds, checks capacity, and
inserts the new hold in a single compare-and-swap transaction, so any
interleaving of concurrent callers admits at most `capacity` live bookings.

All intervals are half-open [start, end): slots that touch do not overlap
and a session may end exactly where its slot does.
"""
from __future__ import annotations

import calendar as _calendar
import secrets
from datetime import datetime, timedelta, timezone
from typing import Optional

from . import errors, identity
from .clock import format_ts, parse_ts
from .config import Config
from .geo import check_coordinates, haversine_km
from .store import Snapshot, Store, Txn

EVENTS = "events"
SLOTS = "availability_slots"
SLOT_INDEX = "slot_index"  # book_id -> that book's slot intervals
BOOKINGS = "bookings"
SEAT_INVENTORY = "seat_inventory"  # event_id -> live bookings keyed by booking id

KIND_PUBLIC = "PublicEvent"
KIND_PRIVATE = "PrivateSession"

BOOKING_RESERVED = "Reserved"
BOOKING_CONFIRMED = "Confirmed"
BOOKING_RELEASED = "Released"

CATEGORY_ALL = "All"
CATEGORY_EVENTS = "Events"
CATEGORY_PRIVATE = "PrivateSession"


def overlaps(start_a: str, end_a: str, start_b: str, end_b: str) -> bool:
    """Half-open interval overlap on RFC 3339 UTC strings (lexicographic
    comparison is chronological for this fixed format)."""
    return start_a < end_b and start_b < end_a


def _parse_range(starts_at, ends_at) -> tuple[datetime, datetime]:
    try:
        start = parse_ts(starts_at) if isinstance(starts_at, str) else starts_at
        end = parse_ts(ends_at) if isinstance(ends_at, str) else ends_at
    except (ValueError, TypeError) as exc:
        raise errors.InvalidTimeRange(f"unparseable timestamps: {exc}")
    if start >= end:
        raise errors.InvalidTimeRange("starts_at must be before ends_at")
    return start, end


def _check_venue(venue: dict) -> dict:
    for field in ("name", "address", "latitude", "longitude"):
        if field not in venue:
            raise errors.ValidationFailed(f"venue is missing {field}")
    check_coordinates(venue["latitude"], venue["longitude"])
    return {
        "name": venue["name"],
        "address": venue["address"],
        "latitude": float(venue["latitude"]),
        "longitude": float(venue["longitude"]),
    }


class SchedulingService:
    def __init__(self, store: Store, config: Config, directory, comms=None, payments=None):
        self.store = store
        self.config = config
        self.clock = config.clock
        self.directory = directory
        self.comms = comms      # wired by the platform
        self.payments = payments

    # -- events ------------------------------------------------------------

    def create_event(
        self,
        actor: dict,
        kind: str,
        title: str,
        venue: dict,
        starts_at: str,
        ends_at: str,
        capacity: int,
        price_minor: int = 0,
    ) -> dict:
        if kind not in (KIND_PUBLIC, KIND_PRIVATE):
            raise errors.ValidationFailed(f"kind must be {KIND_PUBLIC} or {KIND_PRIVATE}")
        start, end = _parse_range(starts_at, ends_at)
        venue = _check_venue(venue)
        if not isinstance(capacity, int) or isinstance(capacity, bool) or capacity < 1:
            raise errors.InvalidCapacity("capacity must be a positive integer")
        if not isinstance(price_minor, int) or price_minor < 0:
            raise errors.ValidationFailed("price_minor must be a non-negative integer")

        role = actor["role"]
        if kind == KIND_PRIVATE:
            if role != identity.ROLE_BOOK:
                raise errors.NotAuthorized("private sessions are created by books")
            capacity = 1  # a private session is one reader with one book
            host_book_id = actor["id"]
        else:
            if role not in (identity.ROLE_BOOK, identity.ROLE_ADMIN):
                raise errors.NotAuthorized("events are created by books or the admin team")
            host_book_id = actor["id"] if role == identity.ROLE_BOOK else None

        event_id = "ev_" + secrets.token_hex(8)
        doc = {
            "id": event_id,
            "kind": kind,
            "title": title,
            "host_book_id": host_book_id,
            "venue": venue,
            "starts_at": format_ts(start),
            "ends_at": format_ts(end),
            "capacity": capacity,
            "price_minor": price_minor,
            "created_by": actor["id"],
            "created_at": format_ts(self.clock.now()),
        }

        def txn_fn(txn: Txn):
            if kind == KIND_PRIVATE:
                index = txn.get(SLOT_INDEX, actor["id"]) or {"slots": []}
                covered = any(
                    s["starts_at"] <= doc["starts_at"] and doc["ends_at"] <= s["ends_at"]
                    for s in index["slots"]
                )
                if not covered:
                    raise errors.OutsideAvailability("session does not fit any posted availability slot")
            txn.put(EVENTS, event_id, doc)
            txn.put(SEAT_INVENTORY, event_id, {"event_id": event_id, "capacity": capacity, "active": {}})
            if self.comms is not None:
                self.comms.fan_out_event_created(txn, doc)

        self.store.transact(txn_fn)
        return doc

    def get_event(self, event_id: str) -> Optional[dict]:
        return self.store.snapshot().get(EVENTS, event_id)

    def search_events(
        self,
        category: str = CATEGORY_ALL,
        text: str = "",
        from_date: Optional[str] = None,
        snap: Optional[Snapshot] = None,
    ) -> list[dict]:
        """Catalog search; guests included. With no from_date only upcoming
        events are returned."""
        if category not in (CATEGORY_ALL, CATEGORY_EVENTS, CATEGORY_PRIVATE):
            raise errors.ValidationFailed(f"unknown category {category!r}")
        snap = snap or self.store.snapshot()
        horizon = from_date if from_date is not None else format_ts(self.clock.now())
        needle = (text or "").lower()

        results = []
        for rec in snap.records(EVENTS):
            event = rec.doc
            if category == CATEGORY_EVENTS and event["kind"] != KIND_PUBLIC:
                continue
            if category == CATEGORY_PRIVATE and event["kind"] != KIND_PRIVATE:
                continue
            if event["starts_at"] < horizon:
                continue
            if needle:
                host_name = self._host_name(snap, event)
                if needle not in event["title"].lower() and needle not in host_name.lower():
                    continue
            results.append(event)
        results.sort(key=lambda e: (e["starts_at"], e["id"]))
        return results

    def _host_name(self, snap: Snapshot, event: dict) -> str:
        host_id = event.get("host_book_id")
        if not host_id:
            return ""
        profile = snap.get("book_profiles", host_id)
        return profile["display_name"] if profile else ""

    def events_near(self, latitude: float, longitude: float, radius_km: float) -> list[dict]:
        check_coordinates(latitude, longitude)
        if not isinstance(radius_km, (int, float)) or radius_km <= 0:
            raise errors.InvalidRadius("radius_km must be positive")
        snap = self.store.snapshot()
        now = format_ts(self.clock.now())
        hits = []
        for rec in snap.records(EVENTS):
            event = rec.doc
            if event["starts_at"] < now:
                continue
            venue = event["venue"]
            distance = haversine_km(latitude, longitude, venue["latitude"], venue["longitude"])
            if distance <= radius_km:
                hits.append({"event": event, "distance_km": distance})
        hits.sort(key=lambda h: (h["distance_km"], h["event"]["starts_at"], h["event"]["id"]))
        return hits

    # -- availability ---------------------------------------------------------

    def post_availability(self, actor: dict, starts_at: str, ends_at: str) -> dict:
        if actor["role"] != identity.ROLE_BOOK:
            raise errors.NotABook("only books post availability")
        start, end = _parse_range(starts_at, ends_at)
        slot_id = "slot_" + secrets.token_hex(8)
        doc = {
            "id": slot_id,
            "book_id": actor["id"],
            "starts_at": format_ts(start),
            "ends_at": format_ts(end),
        }

        def txn_fn(txn: Txn):
            index = txn.get(SLOT_INDEX, actor["id"]) or {"slots": []}
            for s in index["slots"]:
                if overlaps(doc["starts_at"], doc["ends_at"], s["starts_at"], s["ends_at"]):
                    raise errors.OverlappingSlot(
                        f"overlaps existing slot {s['id']} ({s['starts_at']}..{s['ends_at']})"
                    )
            txn.put(SLOT_INDEX, actor["id"], {"slots": index["slots"] + [doc]})
            txn.put(SLOTS, slot_id, doc)
            if self.comms is not None:
                self.comms.fan_out_free_slot(txn, doc)

        self.store.transact(txn_fn)
        return doc

    def list_availability(self, book_id: str) -> list[dict]:
        rows = self.store.query(
            SLOTS, predicate=lambda d: d["book_id"] == book_id, order=lambda d: d["starts_at"]
        )
        return [r.doc for r in rows]

    # -- booking ---------------------------------------------------------------

    def book_seat(self, actor: dict, event_id: str) -> dict:
        now = self.clock.now()
        booking_id = "bk_" + secrets.token_hex(8)

        def txn_fn(txn: Txn):
            event = txn.get(EVENTS, event_id)
            if event is None:
                raise errors.UnknownEvent(event_id)
            account = txn.get(identity.ACCOUNTS, actor["id"])
            if not account.get("vaccination"):
                raise errors.NotVaccinated("upload both sides of your vaccination card first")
            if format_ts(now) >= event["starts_at"]:
                raise errors.EventInPast("the event has already started")
            inventory = txn.get(SEAT_INVENTORY, event_id) or {
                "event_id": event_id,
                "capacity": event["capacity"],
                "active": {},
            }
            active = dict(inventory["active"])
            for stale_id in self._expired_holds(active, now):
                self._release_in_txn(txn, stale_id, active)
            if any(entry["reader_id"] == actor["id"] for entry in active.values()):
                raise errors.DuplicateBooking("you already hold a seat for this event")
            if len(active) >= event["capacity"]:
                raise errors.SoldOut("no seats left")
            booking = {
                "id": booking_id,
                "event_id": event_id,
                "reader_id": actor["id"],
                "state": BOOKING_RESERVED,
                "reserved_at": format_ts(now),
                "hold_expires_at": format_ts(now + timedelta(seconds=self.config.hold_ttl_seconds)),
                "payment_id": None,
            }
            active[booking_id] = {
                "reader_id": actor["id"],
                "state": BOOKING_RESERVED,
                "hold_expires_at": booking["hold_expires_at"],
            }
            txn.put(BOOKINGS, booking_id, booking)
            txn.put(SEAT_INVENTORY, event_id, {**inventory, "active": active})
            return booking

        return self.store.transact(txn_fn).value

    def _expired_holds(self, active: dict, now: datetime) -> list[str]:
        cutoff = format_ts(now)
        return [
            bid
            for bid, entry in active.items()
            if entry["state"] == BOOKING_RESERVED and entry["hold_expires_at"] < cutoff
        ]

    def _release_in_txn(self, txn: Txn, booking_id: str, active: dict) -> None:
        active.pop(booking_id, None)
        booking = txn.get(BOOKINGS, booking_id)
        if booking is not None and booking["state"] != BOOKING_RELEASED:
            txn.put(BOOKINGS, booking_id, {**booking, "state": BOOKING_RELEASED})

    def cancel_booking(self, actor: dict, booking_id: str) -> dict:
        def txn_fn(txn: Txn):
            booking = txn.get(BOOKINGS, booking_id)
            if booking is None:
                raise errors.UnknownBooking(booking_id)
            if booking["reader_id"] != actor["id"]:
                raise errors.NotOwner("only the booking owner may cancel it")
            if booking["state"] == BOOKING_RELEASED:
                raise errors.AlreadyReleased("booking is already released")
            released = {**booking, "state": BOOKING_RELEASED}
            txn.put(BOOKINGS, booking_id, released)
            inventory = txn.get(SEAT_INVENTORY, booking["event_id"])
            if inventory is not None and booking_id in inventory["active"]:
                active = dict(inventory["active"])
                active.pop(booking_id)
                txn.put(SEAT_INVENTORY, booking["event_id"], {**inventory, "active": active})
            if booking["state"] == BOOKING_CONFIRMED and self.payments is not None:
                self.payments.refund_for_booking_in_txn(txn, booking)
            return released

        return self.store.transact(txn_fn).value

    def get_booking(self, booking_id: str) -> Optional[dict]:
        return self.store.snapshot().get(BOOKINGS, booking_id)

    def list_bookings(self, actor: dict) -> list[dict]:
        rows = self.store.query(
            BOOKINGS, predicate=lambda d: d["reader_id"] == actor["id"], order=lambda d: d["reserved_at"]
        )
        return [r.doc for r in rows]

    # -- calendar ---------------------------------------------------------------

    def calendar_month(self, actor: Optional[dict], year: int, month: int) -> dict:
        """Dates in the month that carry at least one event, with those events;
        books additionally see which dates hold their own availability."""
        if not isinstance(year, int) or not isinstance(month, int) or not (1 <= month <= 12) or not (
            1 <= year <= 9999
        ):
            raise errors.InvalidMonth(f"not a valid month: {year}-{month}")
        first = datetime(year, month, 1, tzinfo=timezone.utc)
        days_in_month = _calendar.monthrange(year, month)[1]
        next_first = first + timedelta(days=days_in_month)
        lo, hi = format_ts(first), format_ts(next_first)

        snap = self.store.snapshot()
        by_day: dict[int, list[dict]] = {}
        for rec in snap.records(EVENTS):
            event = rec.doc
            if lo <= event["starts_at"] < hi:
                day = parse_ts(event["starts_at"]).day
                by_day.setdefault(day, []).append(event)
        for day_events in by_day.values():
            day_events.sort(key=lambda e: (e["starts_at"], e["id"]))

        result = {
            "year": year,
            "month": month,
            "highlighted": sorted(by_day),
            "events_by_day": {str(d): evs for d, evs in sorted(by_day.items())},
        }
        if actor is not None and actor["role"] == identity.ROLE_BOOK:
            slot_days = set()
            for rec in snap.records(SLOTS):
                slot = rec.doc
                if slot["book_id"] == actor["id"] and lo <= slot["starts_at"] < hi:
                    slot_days.add(parse_ts(slot["starts_at"]).day)
            result["availability_days"] = sorted(slot_days)
        return result
