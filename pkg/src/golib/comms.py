"""Follow-gated messaging and notification fan-out.

Notifications are keyed by (recipient, kind, subject), which makes fan-out
idempotent by construction: a retry writes the same ids and changes
nothing. Fan-out runs inside the transaction that creates the triggering
event or slot, so the recipient set is exactly the population visible at
that commit.

Messaging: a conversation pairs one reader with one book (or with the
platform admin, who stands in for "event management"). Readers may only
message books they follow; books and the admin are reply-only.
"""
from __future__ import annotations

import secrets
from typing import Optional

from . import directory, errors, identity
from .clock import format_ts
from .config import Config
from .store import Snapshot, Store, Txn

CONVERSATIONS = "conversations"
MESSAGES = "messages"
NOTIFICATIONS = "notifications"

KIND_EVENT_CREATED = "EventCreated"
KIND_FREE_SLOT = "FreeSlotPosted"
KIND_BOOK_DECISION = "BookDecision"

GATE_FOLLOW = "follow"
GATE_REPLY = "reply"
GATE_ADMIN_CONTACT = "admin_contact"


def conversation_id(reader_id: str, book_id: str) -> str:
    return f"conv_{reader_id}:{book_id}"


def notification_id(recipient_id: str, kind: str, subject_id: str) -> str:
    return f"{recipient_id}:{kind}:{subject_id}"


class CommsService:
    def __init__(self, store: Store, config: Config, directory_service: directory.DirectoryService):
        self.store = store
        self.config = config
        self.clock = config.clock
        self.directory = directory_service

    # -- messaging ---------------------------------------------------------------

    def send_message(self, actor: dict, counterpart_id: str, body: str) -> dict:
        """Send to a book (follow-gated), to the admin (always open), or reply
        in an existing conversation where the sender is the book side."""
        self._check_body(body)
        snap = self.store.snapshot()
        counterpart = snap.get(identity.ACCOUNTS, counterpart_id)
        if counterpart is None:
            raise errors.UnknownBook(counterpart_id)

        reply_conv = snap.get(CONVERSATIONS, conversation_id(counterpart_id, actor["id"]))
        if reply_conv is not None:
            return self._append(actor, reply_conv["id"], body, GATE_REPLY)

        if counterpart["role"] == identity.ROLE_BOOK:
            if not self.directory.is_following(actor["id"], counterpart_id, snap):
                raise errors.NotFollowing("you can only message books you follow")
            gate = GATE_FOLLOW
        elif counterpart["role"] == identity.ROLE_ADMIN:
            gate = GATE_ADMIN_CONTACT
        else:
            if actor["role"] in (identity.ROLE_BOOK, identity.ROLE_ADMIN):
                raise errors.NoConversation("books reply to existing conversations only")
            raise errors.UnknownBook(f"{counterpart_id} is not a messageable book")
        return self._append(actor, conversation_id(actor["id"], counterpart_id), body, gate, create=True)

    def reply_message(self, actor: dict, conv_id: str, body: str) -> dict:
        """Send inside a known conversation; the gate depends on which side
        the sender sits on."""
        self._check_body(body)
        snap = self.store.snapshot()
        conv = snap.get(CONVERSATIONS, conv_id)
        if conv is None or actor["id"] not in (conv["reader_id"], conv["book_id"]):
            raise errors.NotParticipant("no such conversation for this account")
        if actor["id"] == conv["book_id"]:
            gate = GATE_REPLY
        else:
            book = snap.get(identity.ACCOUNTS, conv["book_id"])
            if book is not None and book["role"] == identity.ROLE_ADMIN:
                gate = GATE_ADMIN_CONTACT
            elif self.directory.is_following(conv["reader_id"], conv["book_id"], snap):
                gate = GATE_FOLLOW
            else:
                raise errors.NotFollowing("you can only message books you follow")
        return self._append(actor, conv_id, body, gate)

    def _check_body(self, body: str) -> None:
        if not body or not body.strip():
            raise errors.EmptyBody("message body is empty")
        if len(body) > self.config.message_max_chars:
            raise errors.ValidationFailed(f"message exceeds {self.config.message_max_chars} characters")

    def _append(self, actor: dict, conv_id: str, body: str, gate: str, create: bool = False) -> dict:
        now = format_ts(self.clock.now())

        def txn_fn(txn: Txn):
            conv = txn.get(CONVERSATIONS, conv_id)
            if conv is None:
                if not create:
                    raise errors.NoConversation(conv_id)
                reader_id, book_id = conv_id[len("conv_") :].split(":", 1)
                conv = {
                    "id": conv_id,
                    "reader_id": reader_id,
                    "book_id": book_id,
                    "created_at": now,
                    "message_seq": 0,
                }
            seq = conv["message_seq"] + 1
            message_id = f"{conv_id}/{seq:08d}"
            message = {
                "id": message_id,
                "conversation_id": conv_id,
                "sender_id": actor["id"],
                "body": body,
                "sent_at": now,
                "gate": gate,
            }
            txn.put(MESSAGES, message_id, message)
            txn.put(CONVERSATIONS, conv_id, {**conv, "message_seq": seq, "last_message_at": now})
            return message

        return self.store.transact(txn_fn).value

    def get_conversation(self, conv_id: str) -> Optional[dict]:
        return self.store.snapshot().get(CONVERSATIONS, conv_id)

    def list_conversations(self, actor: dict) -> list[dict]:
        rows = self.store.query(
            CONVERSATIONS,
            predicate=lambda d: actor["id"] in (d["reader_id"], d["book_id"]),
            order=lambda d: d.get("last_message_at", d["created_at"]),
        )
        return [r.doc for r in rows]

    def list_conversation(self, actor: dict, conv_id: str, offset: int = 0, limit: Optional[int] = None) -> list[dict]:
        """Messages in (sent_at, id) order; pagination is stable because ids
        embed a per-conversation sequence number."""
        snap = self.store.snapshot()
        conv = snap.get(CONVERSATIONS, conv_id)
        if conv is None or actor["id"] not in (conv["reader_id"], conv["book_id"]):
            raise errors.NotParticipant("no such conversation for this account")
        rows = snap.query(
            MESSAGES,
            predicate=lambda d: d["conversation_id"] == conv_id,
            order=lambda d: (d["sent_at"], d["id"]),
            offset=offset,
            limit=limit,
        )
        return [r.doc for r in rows]

    # -- notification fan-out -------------------------------------------------------

    def fan_out_event_created(self, txn: Txn, event: dict) -> int:
        """One EventCreated notification per registered account except the
        creator. Idempotent on the event id."""
        count = 0
        for rec in txn.snapshot.records(identity.ACCOUNTS):
            if rec.id == event["created_by"]:
                continue
            count += self._notify(txn, rec.id, KIND_EVENT_CREATED, event["id"])
        return count

    def fan_out_free_slot(self, txn: Txn, slot: dict) -> int:
        """One FreeSlotPosted notification per follower of the posting book."""
        count = 0
        for reader_id in self.directory.followers_of(slot["book_id"], txn.snapshot):
            count += self._notify(txn, reader_id, KIND_FREE_SLOT, slot["id"])
        return count

    def fan_out_book_decision(self, txn: Txn, request: dict) -> int:
        return self._notify(txn, request["applicant_id"], KIND_BOOK_DECISION, request["id"])

    def _notify(self, txn: Txn, recipient_id: str, kind: str, subject_id: str) -> int:
        nid = notification_id(recipient_id, kind, subject_id)
        if txn.get(NOTIFICATIONS, nid) is not None:
            return 0
        txn.put(
            NOTIFICATIONS,
            nid,
            {
                "id": nid,
                "recipient_id": recipient_id,
                "kind": kind,
                "subject_id": subject_id,
                "created_at": format_ts(self.clock.now()),
                "read": False,
            },
        )
        return 1

    def notify_event_created(self, event: dict) -> int:
        """Standalone fan-out (normally it happens inside create_event's
        transaction); safe to repeat."""
        return self.store.transact(lambda txn: self.fan_out_event_created(txn, event)).value

    def notify_free_slot(self, slot: dict) -> int:
        return self.store.transact(lambda txn: self.fan_out_free_slot(txn, slot)).value

    # -- reading notifications ---------------------------------------------------------

    def list_notifications(self, actor: dict, unread_only: bool = False) -> list[dict]:
        def pred(doc):
            if doc["recipient_id"] != actor["id"]:
                return False
            return not (unread_only and doc["read"])

        rows = self.store.query(NOTIFICATIONS, predicate=pred, order=lambda d: d["created_at"])
        rows.reverse()  # newest first
        return [r.doc for r in rows]

    def mark_read(self, actor: dict, notification_id: str) -> dict:
        def txn_fn(txn: Txn):
            doc = txn.get(NOTIFICATIONS, notification_id)
            if doc is None:
                raise errors.UnknownNotification(notification_id)
            if doc["recipient_id"] != actor["id"]:
                raise errors.NotRecipient("not your notification")
            if not doc["read"]:
                doc = {**doc, "read": True}
                txn.put(NOTIFICATIONS, notification_id, doc)
            return doc

        return self.store.transact(txn_fn).value
