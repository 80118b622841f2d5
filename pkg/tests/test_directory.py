"""Directory: become-a-book workflow, search, follows, reviews."""
from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from golib import errors
from golib.directory import BOOK_PROFILES, REQUEST_ACCEPTED

from .conftest import PW, make_admin, make_book, make_event, register_reader


def submit(platform, reader, **kw):
    fields = dict(
        name="Dr. Sana Khan",
        phone="0300-7654321",
        cnic="4210112345671",
        field_of_expertise="Psychologist",
        vaccination_image=b"vax",
        resume=b"cv",
    )
    fields.update(kw)
    return platform.directory.submit_become_book_request(reader, **fields)


# -- become-a-book ------------------------------------------------------------


def test_submit_creates_pending_request_visible_to_admin(platform):
    reader = register_reader(platform)
    admin = make_admin(platform)
    request = submit(platform, reader)
    assert request["state"] == "Pending"
    queue = platform.directory.list_requests(admin, state="Pending")
    assert [r["id"] for r in queue] == [request["id"]]


def test_submit_missing_field(platform):
    reader = register_reader(platform)
    with pytest.raises(errors.MissingField):
        submit(platform, reader, phone="")


def test_submit_bad_cnic(platform):
    reader = register_reader(platform)
    with pytest.raises(errors.ValidationFailed):
        submit(platform, reader, cnic="12345")


def test_second_submission_while_pending(platform):
    reader = register_reader(platform)
    submit(platform, reader)
    with pytest.raises(errors.DuplicatePendingRequest):
        submit(platform, reader)


def test_submission_by_book_account(platform):
    book = make_book(platform)
    with pytest.raises(errors.AlreadyBook):
        submit(platform, book)


def test_accept_promotes_creates_profile_and_mails(platform):
    reader = register_reader(platform, email="applicant@x.pk")
    admin = make_admin(platform)
    request = submit(platform, reader, field_of_expertise="Career Coach")
    decided = platform.directory.decide_become_book_request(admin, request["id"], "Accepted")
    assert decided["state"] == "Accepted"
    assert decided["decided_by"] == admin["id"]
    account = platform.identity.get_account(reader["id"])
    assert account["role"] == "Book"
    profile = platform.directory.get_profile(reader["id"])
    assert profile["profession"] == "Career Coach"
    assert profile["rating_mean"] is None and profile["review_count"] == 0
    mails = [m for m in platform.outbox.messages() if m["to"] == "applicant@x.pk"]
    assert any("accepted" in m["subject"] for m in mails)


def test_reject_keeps_reader_and_allows_reapply(platform):
    reader = register_reader(platform)
    admin = make_admin(platform)
    request = submit(platform, reader)
    platform.directory.decide_become_book_request(admin, request["id"], "Rejected")
    assert platform.identity.get_account(reader["id"])["role"] == "Reader"
    assert platform.directory.get_profile(reader["id"]) is None
    submit(platform, reader)  # reapplying after rejection is allowed


def test_decide_twice_already_decided(platform):
    reader = register_reader(platform)
    admin = make_admin(platform)
    request = submit(platform, reader)
    platform.directory.decide_become_book_request(admin, request["id"], "Rejected")
    with pytest.raises(errors.AlreadyDecided):
        platform.directory.decide_become_book_request(admin, request["id"], "Accepted")


def test_decide_requires_admin(platform):
    reader = register_reader(platform)
    other = register_reader(platform, email="other@x.pk")
    request = submit(platform, reader)
    with pytest.raises(errors.NotAdmin):
        platform.directory.decide_become_book_request(other, request["id"], "Accepted")


def test_decide_unknown_request(platform):
    admin = make_admin(platform)
    with pytest.raises(errors.UnknownRequest):
        platform.directory.decide_become_book_request(admin, "req_nope", "Accepted")


def test_concurrent_decisions_exactly_one_wins(platform):
    reader = register_reader(platform)
    admin = make_admin(platform)
    request = submit(platform, reader)

    def decide(decision):
        try:
            platform.directory.decide_become_book_request(admin, request["id"], decision)
            return decision
        except errors.AlreadyDecided:
            return None

    with ThreadPoolExecutor(max_workers=8) as pool:
        outcomes = list(pool.map(decide, ["Accepted", "Rejected"] * 4))
    wins = [o for o in outcomes if o]
    assert len(wins) == 1
    final = platform.store.get("book_requests", request["id"]).doc
    assert final["state"] == wins[0]
    # the request record saw exactly one terminal write: pending(v1) + decision(v2)
    assert platform.store.get("book_requests", request["id"]).version == 2


def test_role_book_iff_accepted_request_random_sequences(platform):
    """Property: after any op sequence, role=Book <=> an Accepted request exists."""
    admin = make_admin(platform)
    rng = random.Random(42)
    readers = [register_reader(platform, email=f"seq{i}@x.pk") for i in range(6)]

    for step in range(120):
        actor = rng.choice(readers)
        actor = platform.identity.get_account(actor["id"])
        op = rng.random()
        try:
            if op < 0.5:
                submit(platform, actor)
            else:
                pending = platform.directory.list_requests(admin, state="Pending")
                if pending:
                    request = rng.choice(pending)
                    decision = rng.choice(["Accepted", "Rejected"])
                    platform.directory.decide_become_book_request(admin, request["id"], decision)
        except (errors.DuplicatePendingRequest, errors.AlreadyBook, errors.AlreadyDecided):
            pass

        snap = platform.store.snapshot()
        accepted = {
            r.doc["applicant_id"]
            for r in snap.records("book_requests")
            if r.doc["state"] == REQUEST_ACCEPTED
        }
        books = {r.id for r in snap.records("accounts") if r.doc["role"] == "Book"}
        assert books == accepted, f"invariant broken at step {step}"


# -- search ----------------------------------------------------------------------


def _search_oracle(profiles, query_text="", profession=""):
    q, p = query_text.lower(), profession.lower()
    hits = [
        v for v in profiles
        if (not q or q in v["display_name"].lower()) and (not p or p in v["profession"].lower())
    ]
    return sorted(
        hits,
        key=lambda v: (
            v["rating_mean"] is None,
            -(v["rating_mean"] or 0.0),
            v["display_name"],
            v["account_id"],
        ),
    )


def test_search_by_profession_fragment(platform):
    make_book(platform, email="psy@x.pk", profession="Psychologist", display_name="Dr. Ayesha")
    make_book(platform, email="eng@x.pk", profession="Engineer", display_name="Hamid")
    hits = platform.directory.search_books(profession="psy")
    assert [h["display_name"] for h in hits] == ["Dr. Ayesha"]


def test_search_no_filters_returns_all_books(platform):
    for i in range(3):
        make_book(platform, email=f"b{i}@x.pk", display_name=f"Book {i}")
    assert len(platform.directory.search_books()) == 3


def test_search_matches_bruteforce_oracle_on_random_dataset(platform):
    rng = random.Random(9)
    professions = ["Psychologist", "Therapist", "Career Coach", "Nutritionist"]
    syllables = ["ra", "mi", "sa", "no", "ke", "lu", "za", "ti"]
    for i in range(50):
        name = "".join(rng.sample(syllables, 3)).title() + f" {i}"
        make_book(
            platform,
            email=f"rand{i}@x.pk",
            profession=rng.choice(professions),
            display_name=name,
        )
    # give a random subset some ratings through the real review path
    books = platform.directory.search_books()
    reader = register_reader(platform, email="critic@x.pk")
    admin = make_admin(platform)
    for book in rng.sample(books, 20):
        host = platform.identity.get_account(book["account_id"])
        platform.scheduling.post_availability(host, "2024-06-11T09:00:00+00:00", "2024-06-11T10:00:00+00:00")
        event = make_event(platform, host, kind="PrivateSession",
                           starts="2024-06-11T09:00:00+00:00", ends="2024-06-11T10:00:00+00:00",
                           capacity=1, price_minor=50_000)
        booking = platform.scheduling.book_seat(reader, event["id"])
        intent = platform.payments.create_payment_intent(reader, booking["id"], "Easypaisa")
        platform.payments.confirm_payment(intent["id"], "success")
        platform.directory.post_review(reader, book["account_id"], rng.randint(1, 5))
        platform.scheduling.cancel_booking(reader, booking["id"])

    profiles = platform.directory.search_books()
    for query_text, profession in [("", ""), ("ra", ""), ("", "psy"), ("mi", "therapist"), ("zz", "")]:
        got = platform.directory.search_books(query_text, profession)
        want = _search_oracle(profiles, query_text, profession)
        assert got == want, (query_text, profession)


# -- follows -------------------------------------------------------------------------


def test_follow_idempotent(platform):
    reader = register_reader(platform)
    book = make_book(platform)
    platform.directory.set_follow(reader, book["id"], True)
    platform.directory.set_follow(reader, book["id"], True)
    assert platform.directory.followers_of(book["id"]) == [reader["id"]]
    platform.directory.set_follow(reader, book["id"], False)
    platform.directory.set_follow(reader, book["id"], False)
    assert platform.directory.followers_of(book["id"]) == []


def test_follow_non_book_target(platform):
    reader = register_reader(platform)
    other = register_reader(platform, email="plain@x.pk")
    with pytest.raises(errors.NotABook):
        platform.directory.set_follow(reader, other["id"], True)
    with pytest.raises(errors.UnknownBook):
        platform.directory.set_follow(reader, "acc_missing", True)


# -- reviews ---------------------------------------------------------------------------


def confirmed_booking(platform, reader, book):
    host = platform.identity.get_account(book["id"])
    nth = len(platform.scheduling.list_availability(host["id"]))
    day, hour = divmod(nth, 12)
    starts = f"2024-07-{day + 1:02d}T{9 + hour:02d}:00:00+00:00"
    ends = f"2024-07-{day + 1:02d}T{9 + hour:02d}:45:00+00:00"
    platform.scheduling.post_availability(host, starts, ends)
    event = make_event(platform, host, kind="PrivateSession",
                       starts=starts, ends=ends,
                       capacity=1, price_minor=100_000)
    booking = platform.scheduling.book_seat(reader, event["id"])
    intent = platform.payments.create_payment_intent(reader, booking["id"], "JazzCash")
    platform.payments.confirm_payment(intent["id"], "success")
    return booking


def test_review_mean_of_two(platform):
    book = make_book(platform)
    r1 = register_reader(platform, email="r1@x.pk")
    r2 = register_reader(platform, email="r2@x.pk")
    confirmed_booking(platform, r1, book)
    confirmed_booking(platform, r2, book)
    platform.directory.post_review(r1, book["id"], 4)
    result = platform.directory.post_review(r2, book["id"], 5)
    assert result["profile"]["rating_mean"] == 4.5
    assert result["profile"]["review_count"] == 2


def test_review_requires_confirmed_booking(platform):
    book = make_book(platform)
    reader = register_reader(platform)
    with pytest.raises(errors.NoCompletedBooking):
        platform.directory.post_review(reader, book["id"], 5)


def test_review_stars_out_of_range(platform):
    book = make_book(platform)
    reader = register_reader(platform)
    confirmed_booking(platform, reader, book)
    for stars in (0, 6, -1):
        with pytest.raises(errors.StarsOutOfRange):
            platform.directory.post_review(reader, book["id"], stars)


def test_self_review_rejected(platform):
    book = make_book(platform)
    with pytest.raises(errors.SelfReview):
        platform.directory.post_review(book, book["id"], 5)


def test_repost_replaces_review(platform):
    book = make_book(platform)
    reader = register_reader(platform)
    confirmed_booking(platform, reader, book)
    platform.directory.post_review(reader, book["id"], 2, "meh")
    result = platform.directory.post_review(reader, book["id"], 5, "actually great")
    assert result["profile"]["review_count"] == 1
    assert result["profile"]["rating_mean"] == 5.0
    reviews = platform.directory.list_reviews(book["id"])
    assert len(reviews) == 1 and reviews[0]["text"] == "actually great"


def test_twenty_random_reviews_mean_matches_oracle(platform):
    rng = random.Random(4)
    book = make_book(platform)
    stars_given = []
    for i in range(20):
        reader = register_reader(platform, email=f"rev{i}@x.pk")
        confirmed_booking(platform, reader, book)
        stars = rng.randint(1, 5)
        stars_given.append(stars)
        platform.directory.post_review(reader, book["id"], stars)
    profile = platform.directory.get_profile(book["id"])
    oracle_mean = sum(stars_given) / len(stars_given)
    assert abs(profile["rating_mean"] - oracle_mean) < 1e-9
    assert profile["review_count"] == 20
    stored = platform.directory.list_reviews(book["id"])
    assert sorted(r["stars"] for r in stored) == sorted(stars_given)


@given(st.lists(st.booleans(), min_size=1, max_size=12))
@settings(max_examples=25, deadline=None)
def test_follow_sequence_final_state_is_last_write(tmp_path_factory, flips):
    from golib.app import Platform
    from .conftest import make_config

    config = make_config(tmp_path_factory.mktemp("follow"))
    platform = Platform(config)
    try:
        reader = register_reader(platform)
        book = make_book(platform)
        for flip in flips:
            platform.directory.set_follow(reader, book["id"], flip)
        following = platform.directory.is_following(reader["id"], book["id"])
        assert following == flips[-1]
    finally:
        platform.close()
