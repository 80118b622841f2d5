"""Book catalog: become-a-book approvals, follow graph, reviews, search.

The approval workflow is a Pending -> Accepted | Rejected state machine.
Decisions go through a compare-and-swap on the request record, so two
admins racing on the same request produce exactly one terminal write; the
loser sees AlreadyDecided. Review aggregates (sum + count) live on the
profile and are updated in the same transaction as the review itself.
"""
from __future__ import annotations

import re
import secrets
from typing import Optional

from . import errors, identity
from .clock import format_ts
from .config import Config
from .outbox import Outbox
from .store import BlobStore, Snapshot, Store, Txn

BOOK_REQUESTS = "book_requests"
PENDING_INDEX = "pending_request_index"  # applicant_id -> live pending request
BOOK_PROFILES = "book_profiles"
FOLLOWS = "follows"
REVIEWS = "reviews"

REQUEST_PENDING = "Pending"
REQUEST_ACCEPTED = "Accepted"
REQUEST_REJECTED = "Rejected"

_CNIC_RE = re.compile(r"^\d{13}$")


def follow_edge_id(reader_id: str, book_id: str) -> str:
    return f"{reader_id}:{book_id}"


def review_id(book_id: str, author_id: str) -> str:
    return f"{book_id}:{author_id}"


def profile_view(doc: dict) -> dict:
    """Profile with the derived rating fields the API promises."""
    count = doc["review_count"]
    mean = doc["rating_sum"] / count if count else None
    return {
        "account_id": doc["account_id"],
        "display_name": doc["display_name"],
        "profession": doc["profession"],
        "bio": doc.get("bio", ""),
        "rating_mean": mean,
        "review_count": count,
    }


class DirectoryService:
    def __init__(self, store: Store, blobs: BlobStore, outbox: Outbox, config: Config, comms=None):
        self.store = store
        self.blobs = blobs
        self.outbox = outbox
        self.config = config
        self.clock = config.clock
        self.comms = comms  # wired by the platform after construction

    # -- become-a-book workflow ------------------------------------------------

    def submit_become_book_request(
        self,
        actor: dict,
        name: str,
        phone: str,
        cnic: str,
        field_of_expertise: str,
        vaccination_image: bytes,
        resume: bytes,
    ) -> dict:
        if actor["role"] == identity.ROLE_BOOK:
            raise errors.AlreadyBook("this account is already a book")
        if actor["role"] != identity.ROLE_READER:
            raise errors.NotAuthorized("only readers may apply to become a book")
        fields = {
            "name": name,
            "phone": phone,
            "cnic": cnic,
            "field": field_of_expertise,
            "vaccination_image": vaccination_image,
            "resume": resume,
        }
        missing = [k for k, v in fields.items() if not v]
        if missing:
            raise errors.MissingField(f"missing required fields: {', '.join(missing)}")
        if not _CNIC_RE.match(cnic):
            raise errors.ValidationFailed("cnic must be exactly 13 digits", fields={"cnic": "13 digits"})

        request_id = "req_" + secrets.token_hex(8)
        doc = {
            "id": request_id,
            "applicant_id": actor["id"],
            "name": name,
            "phone": phone,
            "cnic": cnic,
            "field_of_expertise": field_of_expertise,
            "vaccination_image_ref": self.blobs.put(vaccination_image),
            "resume_ref": self.blobs.put(resume),
            "state": REQUEST_PENDING,
            "decided_by": None,
            "decided_at": None,
            "created_at": format_ts(self.clock.now()),
        }

        def txn_fn(txn: Txn):
            if txn.get(PENDING_INDEX, actor["id"]) is not None:
                raise errors.DuplicatePendingRequest("a request is already awaiting review")
            txn.put(PENDING_INDEX, actor["id"], {"request_id": request_id})
            txn.put(BOOK_REQUESTS, request_id, doc)

        self.store.transact(txn_fn)
        return doc

    def decide_become_book_request(self, actor: dict, request_id: str, decision: str) -> dict:
        if actor["role"] != identity.ROLE_ADMIN:
            raise errors.NotAdmin("only admins decide book requests")
        if decision not in (REQUEST_ACCEPTED, REQUEST_REJECTED):
            raise errors.ValidationFailed(f"decision must be Accepted or Rejected, got {decision!r}")
        now = self.clock.now()

        def txn_fn(txn: Txn):
            request = txn.get(BOOK_REQUESTS, request_id)
            if request is None:
                raise errors.UnknownRequest(request_id)
            if request["state"] != REQUEST_PENDING:
                raise errors.AlreadyDecided(f"request is already {request['state']}")
            decided = {**request, "state": decision, "decided_by": actor["id"], "decided_at": format_ts(now)}
            txn.put(BOOK_REQUESTS, request_id, decided)
            txn.delete(PENDING_INDEX, request["applicant_id"])
            applicant = txn.get(identity.ACCOUNTS, request["applicant_id"])
            if decision == REQUEST_ACCEPTED:
                txn.put(identity.ACCOUNTS, applicant["id"], {**applicant, "role": identity.ROLE_BOOK})
                txn.put(
                    BOOK_PROFILES,
                    applicant["id"],
                    {
                        "account_id": applicant["id"],
                        "display_name": request["name"],
                        "profession": request["field_of_expertise"],
                        "bio": "",
                        "rating_sum": 0,
                        "review_count": 0,
                    },
                )
            if self.comms is not None:
                self.comms.fan_out_book_decision(txn, decided)
            return decided, applicant["email"]

        decided, applicant_email = self.store.transact(txn_fn).value
        self.outbox.send(
            to=applicant_email,
            subject=f"Your request to become a book was {decision.lower()}",
            body=f"The admin team has {decision.lower()} your application ({request_id}).",
            at=now,
        )
        return decided

    def list_requests(self, actor: dict, state: Optional[str] = None) -> list[dict]:
        """Admins see every request; applicants see their own."""
        def pred(doc):
            if state is not None and doc["state"] != state:
                return False
            if actor["role"] == identity.ROLE_ADMIN:
                return True
            return doc["applicant_id"] == actor["id"]

        rows = self.store.query(BOOK_REQUESTS, predicate=pred, order=lambda d: d["created_at"])
        return [r.doc for r in rows]

    # -- catalog -----------------------------------------------------------------

    def get_profile(self, book_id: str) -> Optional[dict]:
        doc = self.store.snapshot().get(BOOK_PROFILES, book_id)
        return profile_view(doc) if doc else None

    def search_books(self, query_text: str = "", profession: str = "") -> list[dict]:
        """Name/profession containment search, rated books first (best rating
        wins, names break ties), unrated books trailing."""
        q = (query_text or "").lower()
        p = (profession or "").lower()

        def pred(doc):
            if q and q not in doc["display_name"].lower():
                return False
            if p and p not in doc["profession"].lower():
                return False
            return True

        rows = [r.doc for r in self.store.query(BOOK_PROFILES, predicate=pred)]
        views = [profile_view(d) for d in rows]
        views.sort(
            key=lambda v: (
                v["rating_mean"] is None,
                -(v["rating_mean"] or 0.0),
                v["display_name"],
                v["account_id"],
            )
        )
        return views

    # -- follow graph --------------------------------------------------------------

    def set_follow(self, actor: dict, book_id: str, following: bool) -> dict:
        snap_account = self.store.snapshot().get(identity.ACCOUNTS, book_id)
        if snap_account is None:
            raise errors.UnknownBook(book_id)
        if snap_account["role"] != identity.ROLE_BOOK:
            raise errors.NotABook(f"{book_id} is not a book")
        edge_id = follow_edge_id(actor["id"], book_id)
        now = format_ts(self.clock.now())

        def txn_fn(txn: Txn):
            existing = txn.get(FOLLOWS, edge_id)
            if following and existing is None:
                txn.put(FOLLOWS, edge_id, {"reader_id": actor["id"], "book_id": book_id, "since": now})
            elif not following and existing is not None:
                txn.delete(FOLLOWS, edge_id)

        self.store.transact(txn_fn)
        return {"book_id": book_id, "following": following}

    def is_following(self, reader_id: str, book_id: str, snap: Optional[Snapshot] = None) -> bool:
        snap = snap or self.store.snapshot()
        return snap.get(FOLLOWS, follow_edge_id(reader_id, book_id)) is not None

    def followers_of(self, book_id: str, snap: Optional[Snapshot] = None) -> list[str]:
        snap = snap or self.store.snapshot()
        return [r.doc["reader_id"] for r in snap.records(FOLLOWS) if r.doc["book_id"] == book_id]

    def following_of(self, reader_id: str) -> list[str]:
        snap = self.store.snapshot()
        return [r.doc["book_id"] for r in snap.records(FOLLOWS) if r.doc["reader_id"] == reader_id]

    # -- reviews ---------------------------------------------------------------------

    def post_review(self, actor: dict, book_id: str, stars: int, text: str = "") -> dict:
        if not isinstance(stars, int) or isinstance(stars, bool) or not 1 <= stars <= 5:
            raise errors.StarsOutOfRange("stars must be an integer from 1 to 5")
        if actor["id"] == book_id:
            raise errors.SelfReview("books cannot review themselves")
        rid = review_id(book_id, actor["id"])
        now = format_ts(self.clock.now())

        def txn_fn(txn: Txn):
            profile = txn.get(BOOK_PROFILES, book_id)
            if profile is None:
                raise errors.UnknownBook(book_id)
            if not self._has_confirmed_booking(txn.snapshot, actor["id"], book_id):
                raise errors.NoCompletedBooking("reviews require a completed booking with this book")
            prior = txn.get(REVIEWS, rid)
            review = {
                "id": rid,
                "book_id": book_id,
                "author_id": actor["id"],
                "stars": stars,
                "text": text,
                "created_at": prior["created_at"] if prior else now,
                "updated_at": now,
            }
            txn.put(REVIEWS, rid, review)
            rating_sum = profile["rating_sum"] + stars - (prior["stars"] if prior else 0)
            review_count = profile["review_count"] + (0 if prior else 1)
            updated = {**profile, "rating_sum": rating_sum, "review_count": review_count}
            txn.put(BOOK_PROFILES, book_id, updated)
            return review, updated

        review, profile = self.store.transact(txn_fn).value
        return {"review": review, "profile": profile_view(profile)}

    def list_reviews(self, book_id: str) -> list[dict]:
        rows = self.store.query(
            REVIEWS, predicate=lambda d: d["book_id"] == book_id, order=lambda d: d["created_at"]
        )
        return [r.doc for r in rows]

    def _has_confirmed_booking(self, snap: Snapshot, reader_id: str, book_id: str) -> bool:
        # local import: scheduling depends on directory for host names
        from . import scheduling

        for rec in snap.records(scheduling.BOOKINGS):
            booking = rec.doc
            if booking["reader_id"] != reader_id or booking["state"] != scheduling.BOOKING_CONFIRMED:
                continue
            event = snap.get(scheduling.EVENTS, booking["event_id"])
            if event is not None and event.get("host_book_id") == book_id:
                return True
        return False
