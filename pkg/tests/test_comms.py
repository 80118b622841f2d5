"""Comms: follow-gated messaging, conversation ordering, notification fan-out."""
from __future__ import annotations

import random

import pytest

from golib import errors
from golib.comms import KIND_EVENT_CREATED, KIND_FREE_SLOT

from .conftest import make_admin, make_book, make_event, register_reader


# -- messaging -----------------------------------------------------------------


def test_follower_can_message_book(platform):
    reader = register_reader(platform)
    book = make_book(platform)
    platform.directory.set_follow(reader, book["id"], True)
    message = platform.comms.send_message(reader, book["id"], "hello")
    conv = platform.comms.get_conversation(message["conversation_id"])
    assert conv["reader_id"] == reader["id"] and conv["book_id"] == book["id"]
    assert [m["body"] for m in platform.comms.list_conversation(reader, conv["id"])] == ["hello"]


def test_non_follower_blocked(platform):
    reader = register_reader(platform)
    book = make_book(platform)
    with pytest.raises(errors.NotFollowing):
        platform.comms.send_message(reader, book["id"], "hello")


def test_unfollow_blocks_new_messages_but_keeps_history(platform):
    reader = register_reader(platform)
    book = make_book(platform)
    platform.directory.set_follow(reader, book["id"], True)
    message = platform.comms.send_message(reader, book["id"], "hello")
    platform.directory.set_follow(reader, book["id"], False)
    with pytest.raises(errors.NotFollowing):
        platform.comms.send_message(reader, book["id"], "are you there?")
    history = platform.comms.list_conversation(reader, message["conversation_id"])
    assert [m["body"] for m in history] == ["hello"]


def test_book_can_reply_but_not_initiate(platform):
    reader = register_reader(platform)
    book = make_book(platform)
    stranger = register_reader(platform, email="stranger@x.pk")
    platform.directory.set_follow(reader, book["id"], True)
    platform.comms.send_message(reader, book["id"], "hello")
    reply = platform.comms.send_message(book, reader["id"], "hi there")
    assert reply["gate"] == "reply"
    with pytest.raises(errors.NoConversation):
        platform.comms.send_message(book, stranger["id"], "psst")


def test_reader_can_contact_admin_without_follow(platform):
    reader = register_reader(platform)
    admin = make_admin(platform)
    message = platform.comms.send_message(reader, admin["id"], "need help with my booking")
    assert message["gate"] == "admin_contact"
    reply = platform.comms.reply_message(admin, message["conversation_id"], "on it")
    assert reply["gate"] == "reply"


def test_reader_to_reader_not_messageable(platform):
    r1 = register_reader(platform, email="r1@x.pk")
    r2 = register_reader(platform, email="r2@x.pk")
    with pytest.raises(errors.UnknownBook):
        platform.comms.send_message(r1, r2["id"], "hey")


def test_empty_body_rejected(platform):
    reader = register_reader(platform)
    book = make_book(platform)
    platform.directory.set_follow(reader, book["id"], True)
    for body in ("", "   "):
        with pytest.raises(errors.EmptyBody):
            platform.comms.send_message(reader, book["id"], body)


def test_oversized_body_rejected(platform):
    reader = register_reader(platform)
    book = make_book(platform)
    platform.directory.set_follow(reader, book["id"], True)
    with pytest.raises(errors.ValidationFailed):
        platform.comms.send_message(reader, book["id"], "x" * 4097)


def test_messages_ordered_as_sent(platform):
    reader = register_reader(platform)
    book = make_book(platform)
    platform.directory.set_follow(reader, book["id"], True)
    for body in ("A", "B", "C"):
        platform.comms.send_message(reader, book["id"], body)
    conv = platform.comms.list_conversations(reader)[0]
    got = platform.comms.list_conversation(reader, conv["id"])
    assert [m["body"] for m in got] == ["A", "B", "C"]


def test_non_participant_cannot_read(platform):
    reader = register_reader(platform)
    book = make_book(platform)
    nosy = register_reader(platform, email="nosy@x.pk")
    platform.directory.set_follow(reader, book["id"], True)
    message = platform.comms.send_message(reader, book["id"], "private")
    with pytest.raises(errors.NotParticipant):
        platform.comms.list_conversation(nosy, message["conversation_id"])


def test_pagination_250_messages_pages_of_100(platform):
    reader = register_reader(platform)
    book = make_book(platform)
    platform.directory.set_follow(reader, book["id"], True)
    for i in range(250):
        platform.comms.send_message(reader, book["id"], f"message {i}")
    conv = platform.comms.list_conversations(reader)[0]
    full = platform.comms.list_conversation(reader, conv["id"])
    pages = [
        platform.comms.list_conversation(reader, conv["id"], offset=o, limit=100)
        for o in (0, 100, 200)
    ]
    assert [len(p) for p in pages] == [100, 100, 50]
    concatenated = [m["id"] for page in pages for m in page]
    assert concatenated == [m["id"] for m in full]
    assert len(set(concatenated)) == 250  # no duplicates, no gaps


def test_message_records_carry_the_gate_that_admitted_them(platform):
    reader = register_reader(platform)
    book = make_book(platform)
    platform.directory.set_follow(reader, book["id"], True)
    platform.comms.send_message(reader, book["id"], "gated")
    for rec in platform.store.query("messages"):
        edge_existed = rec.doc["gate"] in ("follow", "reply", "admin_contact")
        assert edge_existed


# -- fan-out -------------------------------------------------------------------------


def test_event_fanout_all_minus_creator(platform):
    accounts = [register_reader(platform, email=f"n{i}@x.pk") for i in range(9)]
    book = make_book(platform, email="creator@x.pk")  # account #10
    event = make_event(platform, book)
    notes = [
        r.doc for r in platform.store.query("notifications")
        if r.doc["kind"] == KIND_EVENT_CREATED and r.doc["subject_id"] == event["id"]
    ]
    admin_id = platform.ensure_admin()["id"]
    expected = {a["id"] for a in accounts} | {admin_id}
    assert {n["recipient_id"] for n in notes} == expected
    assert len(notes) == 10  # 9 readers + admin; creator excluded


def test_event_fanout_idempotent(platform):
    register_reader(platform)
    book = make_book(platform, email="creator@x.pk")
    event = make_event(platform, book)
    before = len(platform.comms.list_notifications(platform.identity.get_account(book["id"])))
    added = platform.comms.notify_event_created(event)
    assert added == 0
    snap_count = len([r for r in platform.store.query("notifications")
                      if r.doc["subject_id"] == event["id"]])
    assert snap_count == 2  # reader + admin


def test_event_fanout_recipient_set_matches_oracle_random_population(platform):
    rng = random.Random(31)
    population = [register_reader(platform, email=f"p{i}@x.pk") for i in range(rng.randint(5, 40))]
    book = make_book(platform, email="host@x.pk")
    event = make_event(platform, book)
    snap = platform.store.snapshot()
    oracle = {r.id for r in snap.records("accounts")} - {book["id"]}
    got = {
        r.doc["recipient_id"] for r in snap.records("notifications")
        if r.doc["kind"] == KIND_EVENT_CREATED and r.doc["subject_id"] == event["id"]
    }
    assert got == oracle


def test_free_slot_fanout_exactly_followers(platform):
    book = make_book(platform)
    r1 = register_reader(platform, email="f1@x.pk")
    r2 = register_reader(platform, email="f2@x.pk")
    register_reader(platform, email="f3@x.pk")  # not following
    platform.directory.set_follow(r1, book["id"], True)
    platform.directory.set_follow(r2, book["id"], True)
    slot = platform.scheduling.post_availability(book, "2024-06-09T09:00:00+00:00", "2024-06-09T10:00:00+00:00")
    notes = [
        r.doc for r in platform.store.query("notifications")
        if r.doc["kind"] == KIND_FREE_SLOT and r.doc["subject_id"] == slot["id"]
    ]
    assert {n["recipient_id"] for n in notes} == {r1["id"], r2["id"]}


def test_free_slot_fanout_zero_followers(platform):
    book = make_book(platform)
    register_reader(platform, email="bystander@x.pk")
    slot = platform.scheduling.post_availability(book, "2024-06-09T09:00:00+00:00", "2024-06-09T10:00:00+00:00")
    notes = [
        r.doc for r in platform.store.query("notifications")
        if r.doc["kind"] == KIND_FREE_SLOT and r.doc["subject_id"] == slot["id"]
    ]
    assert notes == []


def test_free_slot_fanout_matches_follower_graph_oracle(platform):
    rng = random.Random(17)
    books = [make_book(platform, email=f"b{i}@x.pk") for i in range(4)]
    readers = [register_reader(platform, email=f"g{i}@x.pk") for i in range(20)]
    follows: dict[str, set[str]] = {b["id"]: set() for b in books}
    for reader in readers:
        for book in books:
            if rng.random() < 0.3:
                platform.directory.set_follow(reader, book["id"], True)
                follows[book["id"]].add(reader["id"])
    for hour, book in enumerate(books):
        slot = platform.scheduling.post_availability(
            book, f"2024-06-09T{9 + hour:02d}:00:00+00:00", f"2024-06-09T{9 + hour:02d}:30:00+00:00"
        )
        notes = [
            r.doc for r in platform.store.query("notifications")
            if r.doc["kind"] == KIND_FREE_SLOT and r.doc["subject_id"] == slot["id"]
        ]
        assert {n["recipient_id"] for n in notes} == follows[book["id"]]
        assert len(notes) == len(follows[book["id"]])  # no duplicates


def test_no_duplicate_notification_per_recipient_kind_subject(platform):
    register_reader(platform)
    book = make_book(platform, email="creator@x.pk")
    event = make_event(platform, book)
    platform.comms.notify_event_created(event)
    platform.comms.notify_event_created(event)
    keys = [
        (r.doc["recipient_id"], r.doc["kind"], r.doc["subject_id"])
        for r in platform.store.query("notifications")
    ]
    assert len(keys) == len(set(keys))


def test_decision_notification_reaches_applicant(platform):
    book = make_book(platform)  # accept path runs inside make_book
    notes = platform.comms.list_notifications(book)
    assert any(n["kind"] == "BookDecision" for n in notes)


# -- read state ---------------------------------------------------------------------


def test_mark_read_idempotent(platform):
    reader = register_reader(platform)
    book = make_book(platform, email="creator@x.pk")
    make_event(platform, book)
    note = platform.comms.list_notifications(reader)[0]
    marked = platform.comms.mark_read(reader, note["id"])
    assert marked["read"] is True
    again = platform.comms.mark_read(reader, note["id"])
    assert again["read"] is True


def test_mark_read_wrong_recipient(platform):
    reader = register_reader(platform)
    other = register_reader(platform, email="other@x.pk")
    book = make_book(platform, email="creator@x.pk")
    make_event(platform, book)
    note = platform.comms.list_notifications(reader)[0]
    with pytest.raises(errors.NotRecipient):
        platform.comms.mark_read(other, note["id"])


def test_mark_read_unknown(platform):
    reader = register_reader(platform)
    with pytest.raises(errors.UnknownNotification):
        platform.comms.mark_read(reader, "ghost:EventCreated:ev_x")
