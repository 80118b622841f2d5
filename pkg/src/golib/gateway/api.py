"""HTTP/JSON API surface: route table, role matrix, error envelope, paging.

The route table is data: every route names the exact set of roles allowed
to call it, so the authorization matrix is total and testable by
enumeration. Every non-2xx response is the uniform envelope
{"error": {"code", "message", "status"}}; each domain error code maps to
exactly one HTTP status.
"""
from __future__ import annotations

import base64
import binascii
import json
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .. import errors, identity, payments, scheduling
from ..app import Platform

GUEST = identity.ROLE_GUEST
READER = identity.ROLE_READER
BOOK = identity.ROLE_BOOK
ADMIN = identity.ROLE_ADMIN

ANYONE = frozenset({GUEST, READER, BOOK, ADMIN})
SIGNED_IN = frozenset({READER, BOOK, ADMIN})

# auth failures at the gate
class AuthRequired(errors.DomainError):
    code = "AUTH_REQUIRED"


STATUS_BY_CODE = {
    "AUTH_REQUIRED": 401,
    "INVALID_TOKEN": 401,
    "INVALID_CREDENTIALS": 401,
    "NOT_AUTHORIZED": 403,
    "NOT_ADMIN": 403,
    "NOT_OWNER": 403,
    "NOT_FOLLOWING": 403,
    "NOT_VACCINATED": 403,
    "SELF_REVIEW": 403,
    "NO_COMPLETED_BOOKING": 403,
    "NOT_A_BOOK": 403,
    "UNKNOWN_ROUTE": 404,
    "UNKNOWN_REQUEST": 404,
    "UNKNOWN_BOOK": 404,
    "UNKNOWN_EVENT": 404,
    "UNKNOWN_BOOKING": 404,
    "UNKNOWN_INTENT": 404,
    "UNKNOWN_NOTIFICATION": 404,
    "NOT_PARTICIPANT": 404,
    "NOT_RECIPIENT": 404,
    "METHOD_NOT_ALLOWED": 405,
    "DUPLICATE_EMAIL": 409,
    "DUPLICATE_PENDING_REQUEST": 409,
    "DUPLICATE_REVIEW": 409,
    "DUPLICATE_BOOKING": 409,
    "DUPLICATE_INTENT": 409,
    "ALREADY_BOOK": 409,
    "ALREADY_DECIDED": 409,
    "ALREADY_RELEASED": 409,
    "ALREADY_FINAL": 409,
    "ALREADY_REFUNDED": 409,
    "NOT_CAPTURED": 409,
    "SOLD_OUT": 409,
    "HOLD_EXPIRED": 409,
    "OVERLAPPING_SLOT": 409,
    "OUTSIDE_AVAILABILITY": 409,
    "EVENT_IN_PAST": 409,
    "OTP_CONSUMED": 409,
    "NO_CONVERSATION": 409,
    "INVALID_EMAIL": 400,
    "WEAK_PASSWORD": 400,
    "OTP_INVALID": 400,
    "OTP_EXPIRED": 400,
    "MISSING_SIDE": 400,
    "MISSING_FIELD": 400,
    "STARS_OUT_OF_RANGE": 400,
    "INVALID_TIME_RANGE": 400,
    "INVALID_CAPACITY": 400,
    "INVALID_RADIUS": 400,
    "COORDINATE_OUT_OF_RANGE": 400,
    "INVALID_MONTH": 400,
    "EMPTY_BODY": 400,
    "UNKNOWN_PROVIDER": 400,
    "UNSUPPORTED_AUTH_METHOD": 400,
    "IMAGE_TOO_LARGE": 413,
    "VALIDATION_FAILED": 422,
    "STORAGE_FAILURE": 500,
    "CORRUPT_STORE": 500,
    "CONFLICT_EXHAUSTED": 503,
}

CONTENT_PAGES = {
    "help": {
        "title": "Help & support",
        "body": "Reach the admin team by messaging Event Management from the "
        "conversations screen, or email the address on the About page.",
    },
    "faq": {
        "title": "Frequently asked questions",
        "body": "Booking a seat holds it for 15 minutes while you pay with "
        "Easypaisa or JazzCash. Upload both sides of your vaccination card "
        "before booking. Loyalty points (1 per 1000 paisa paid) unlock "
        "Silver (5%) and Gold (10%) discounts.",
    },
    "about": {
        "title": "About",
        "body": "A human library: borrow time with expert people (books) "
        "instead of printed ones. Browse as a guest, sign up to take part.",
    },
}


@dataclass
class Response:
    status: int
    payload: Any = None
    headers: dict = field(default_factory=dict)

    def body_bytes(self) -> bytes:
        if self.payload is None:
            return b""
        return json.dumps(self.payload).encode("utf-8")


@dataclass
class Ctx:
    platform: Platform
    caller: Optional[dict]  # account doc, or None for guests
    params: dict
    query: dict
    body: dict

    @property
    def role(self) -> str:
        return self.caller["role"] if self.caller else GUEST


def error_response(code: str, message: str, fields: Optional[dict] = None) -> Response:
    status = STATUS_BY_CODE.get(code, 400)
    error = {"code": code, "message": message, "status": status}
    if fields:
        error["fields"] = fields
    return Response(status, {"error": error})


# -- body/query validation helpers -------------------------------------------


def need(body: dict, name: str, kind=str, optional: bool = False, default=None):
    value = body.get(name, default)
    if value is None:
        if optional:
            return None
        raise errors.ValidationFailed(f"missing field {name}", fields={name: "required"})
    if kind is int and isinstance(value, bool):
        raise errors.ValidationFailed(f"{name} must be an integer", fields={name: "integer"})
    if not isinstance(value, kind):
        raise errors.ValidationFailed(
            f"{name} must be {getattr(kind, '__name__', kind)}", fields={name: "wrong type"}
        )
    return value


def need_b64(body: dict, name: str) -> bytes:
    raw = need(body, name)
    try:
        return base64.b64decode(raw, validate=True)
    except (binascii.Error, ValueError):
        raise errors.ValidationFailed(f"{name} must be base64", fields={name: "base64"})


def query_int(query: dict, name: str, default=None):
    if name not in query:
        return default
    try:
        return int(query[name])
    except ValueError:
        raise errors.ValidationFailed(f"{name} must be an integer", fields={name: "integer"})


def query_float(query: dict, name: str, default=None):
    if name not in query:
        return default
    try:
        return float(query[name])
    except ValueError:
        raise errors.ValidationFailed(f"{name} must be a number", fields={name: "number"})


# -- cursor pagination ---------------------------------------------------------


def encode_cursor(offset: int) -> str:
    return base64.urlsafe_b64encode(json.dumps({"o": offset}).encode()).decode()


def decode_cursor(cursor: Optional[str]) -> int:
    if not cursor:
        return 0
    try:
        doc = json.loads(base64.urlsafe_b64decode(cursor.encode()))
        offset = doc["o"]
        if not isinstance(offset, int) or offset < 0:
            raise ValueError(offset)
        return offset
    except (ValueError, KeyError, binascii.Error, json.JSONDecodeError):
        raise errors.ValidationFailed("malformed cursor", fields={"cursor": "opaque cursor"})


def paginate(ctx: Ctx, items: list) -> dict:
    cfg = ctx.platform.config
    offset = decode_cursor(ctx.query.get("cursor"))
    limit = query_int(ctx.query, "limit", cfg.page_size_default)
    limit = max(1, min(limit, cfg.page_size_max))
    window = items[offset : offset + limit]
    next_cursor = encode_cursor(offset + limit) if offset + limit < len(items) else None
    return {"items": window, "next_cursor": next_cursor, "total": len(items)}


# -- handlers ------------------------------------------------------------------


def h_register(ctx: Ctx) -> Response:
    body = ctx.body
    account = ctx.platform.identity.register_user(
        email=need(body, "email"),
        first_name=need(body, "first_name"),
        last_name=need(body, "last_name"),
        city=need(body, "city", optional=True, default="") or "",
        country=need(body, "country", optional=True, default="") or "",
        password=need(body, "password"),
        contact_number=need(body, "contact_number", optional=True, default="") or "",
    )
    return Response(201, account)


def h_login(ctx: Ctx) -> Response:
    session = ctx.platform.identity.authenticate(
        need(ctx.body, "email"),
        need(ctx.body, "password"),
        method=need(ctx.body, "method", optional=True, default="password"),
    )
    account = ctx.platform.identity.get_account(session["account_id"])
    return Response(200, {"token": session["token"], "expires_at": session["expires_at"],
                          "account": identity.public_account(account)})


def h_forgot(ctx: Ctx) -> Response:
    ctx.platform.identity.request_password_reset(need(ctx.body, "email"))
    return Response(202, {"status": "ok"})


def h_reset(ctx: Ctx) -> Response:
    ctx.platform.identity.redeem_otp(
        need(ctx.body, "email"), str(need(ctx.body, "code", (str, int))), need(ctx.body, "new_password")
    )
    return Response(200, {"status": "ok"})


def h_logout(ctx: Ctx) -> Response:
    ctx.platform.identity.revoke_session(ctx.query["_token"])
    return Response(204)


def h_me(ctx: Ctx) -> Response:
    account = identity.public_account(ctx.caller)
    account["loyalty"] = ctx.platform.payments.get_loyalty(ctx.caller["id"])
    return Response(200, account)


def h_update_me(ctx: Ctx) -> Response:
    account = ctx.platform.identity.update_account(
        ctx.caller,
        profile_changes=need(ctx.body, "profile", dict, optional=True),
        old_password=need(ctx.body, "old_password", optional=True),
        new_password=need(ctx.body, "new_password", optional=True),
    )
    return Response(200, account)


def h_vaccination(ctx: Ctx) -> Response:
    record = ctx.platform.identity.upload_vaccination_card(
        ctx.caller, need_b64(ctx.body, "front_image"), need_b64(ctx.body, "back_image")
    )
    return Response(200, record)


def h_books(ctx: Ctx) -> Response:
    profiles = ctx.platform.directory.search_books(
        ctx.query.get("text", ""), ctx.query.get("profession", "")
    )
    return Response(200, paginate(ctx, profiles))


def h_book(ctx: Ctx) -> Response:
    profile = ctx.platform.directory.get_profile(ctx.params["id"])
    if profile is None:
        raise errors.UnknownBook(ctx.params["id"])
    return Response(200, profile)


def h_reviews(ctx: Ctx) -> Response:
    if ctx.platform.directory.get_profile(ctx.params["id"]) is None:
        raise errors.UnknownBook(ctx.params["id"])
    return Response(200, paginate(ctx, ctx.platform.directory.list_reviews(ctx.params["id"])))


def h_post_review(ctx: Ctx) -> Response:
    result = ctx.platform.directory.post_review(
        ctx.caller,
        ctx.params["id"],
        need(ctx.body, "stars", int),
        need(ctx.body, "text", optional=True, default="") or "",
    )
    return Response(201, result)


def h_follow(ctx: Ctx) -> Response:
    result = ctx.platform.directory.set_follow(
        ctx.caller, ctx.params["id"], need(ctx.body, "following", bool)
    )
    return Response(200, result)


def h_submit_book_request(ctx: Ctx) -> Response:
    request = ctx.platform.directory.submit_become_book_request(
        ctx.caller,
        name=need(ctx.body, "name"),
        phone=need(ctx.body, "phone"),
        cnic=need(ctx.body, "cnic"),
        field_of_expertise=need(ctx.body, "field"),
        vaccination_image=need_b64(ctx.body, "vaccination_image"),
        resume=need_b64(ctx.body, "resume"),
    )
    return Response(201, request)


def h_list_book_requests(ctx: Ctx) -> Response:
    rows = ctx.platform.directory.list_requests(ctx.caller, state=ctx.query.get("state"))
    return Response(200, paginate(ctx, rows))


def h_decide_book_request(ctx: Ctx) -> Response:
    request = ctx.platform.directory.decide_become_book_request(
        ctx.caller, ctx.params["id"], need(ctx.body, "decision")
    )
    return Response(200, request)


def h_events(ctx: Ctx) -> Response:
    lat = query_float(ctx.query, "lat")
    lon = query_float(ctx.query, "lon")
    radius = query_float(ctx.query, "radius_km")
    if lat is not None or lon is not None or radius is not None:
        if lat is None or lon is None or radius is None:
            raise errors.ValidationFailed("near-mode needs lat, lon and radius_km together")
        hits = ctx.platform.scheduling.events_near(lat, lon, radius)
        return Response(200, paginate(ctx, hits))
    events = ctx.platform.scheduling.search_events(
        category=ctx.query.get("category", scheduling.CATEGORY_ALL),
        text=ctx.query.get("text", ""),
        from_date=ctx.query.get("from_date"),
    )
    return Response(200, paginate(ctx, events))


def h_create_event(ctx: Ctx) -> Response:
    event = ctx.platform.scheduling.create_event(
        ctx.caller,
        kind=need(ctx.body, "kind"),
        title=need(ctx.body, "title"),
        venue=need(ctx.body, "venue", dict),
        starts_at=need(ctx.body, "starts_at"),
        ends_at=need(ctx.body, "ends_at"),
        capacity=need(ctx.body, "capacity", int),
        price_minor=need(ctx.body, "price_minor", int, optional=True, default=0) or 0,
    )
    return Response(201, event)


def h_event(ctx: Ctx) -> Response:
    event = ctx.platform.scheduling.get_event(ctx.params["id"])
    if event is None:
        raise errors.UnknownEvent(ctx.params["id"])
    return Response(200, event)


def h_book_seat(ctx: Ctx) -> Response:
    return Response(201, ctx.platform.scheduling.book_seat(ctx.caller, ctx.params["id"]))


def h_bookings(ctx: Ctx) -> Response:
    return Response(200, paginate(ctx, ctx.platform.scheduling.list_bookings(ctx.caller)))


def _owned_booking(ctx: Ctx) -> dict:
    booking = ctx.platform.scheduling.get_booking(ctx.params["id"])
    if booking is None:
        raise errors.UnknownBooking(ctx.params["id"])
    if booking["reader_id"] != ctx.caller["id"] and ctx.role != ADMIN:
        raise errors.NotOwner("not your booking")
    return booking


def h_booking(ctx: Ctx) -> Response:
    return Response(200, _owned_booking(ctx))


def h_cancel_booking(ctx: Ctx) -> Response:
    _owned_booking(ctx)
    return Response(200, ctx.platform.scheduling.cancel_booking(ctx.caller, ctx.params["id"]))


def h_create_intent(ctx: Ctx) -> Response:
    intent = ctx.platform.payments.create_payment_intent(
        ctx.caller, ctx.params["id"], need(ctx.body, "provider")
    )
    return Response(201, intent)


def _owned_intent(ctx: Ctx) -> dict:
    intent = ctx.platform.payments.get_intent(ctx.params["id"])
    if intent is None:
        raise errors.UnknownIntent(ctx.params["id"])
    if intent["payer_id"] != ctx.caller["id"] and ctx.role != ADMIN:
        raise errors.NotOwner("not your payment")
    return intent


def h_confirm_payment(ctx: Ctx) -> Response:
    _owned_intent(ctx)
    outcome = need(ctx.body, "outcome")
    return Response(200, ctx.platform.payments.confirm_payment(ctx.params["id"], outcome))


def h_payment(ctx: Ctx) -> Response:
    return Response(200, _owned_intent(ctx))


def h_conversations(ctx: Ctx) -> Response:
    return Response(200, paginate(ctx, ctx.platform.comms.list_conversations(ctx.caller)))


def h_start_conversation(ctx: Ctx) -> Response:
    message = ctx.platform.comms.send_message(
        ctx.caller, need(ctx.body, "book_id"), need(ctx.body, "body")
    )
    return Response(201, message)


def h_messages(ctx: Ctx) -> Response:
    cfg = ctx.platform.config
    offset = decode_cursor(ctx.query.get("cursor"))
    limit = max(1, min(query_int(ctx.query, "limit", cfg.page_size_default), cfg.page_size_max))
    page = ctx.platform.comms.list_conversation(ctx.caller, ctx.params["id"], offset, limit + 1)
    more = len(page) > limit
    return Response(200, {
        "items": page[:limit],
        "next_cursor": encode_cursor(offset + limit) if more else None,
        "total": None,
    })


def h_reply(ctx: Ctx) -> Response:
    message = ctx.platform.comms.reply_message(ctx.caller, ctx.params["id"], need(ctx.body, "body"))
    return Response(201, message)


def h_notifications(ctx: Ctx) -> Response:
    unread_only = ctx.query.get("unread") in ("1", "true", "yes")
    rows = ctx.platform.comms.list_notifications(ctx.caller, unread_only=unread_only)
    page = paginate(ctx, rows)
    page["unread_count"] = sum(
        1 for n in ctx.platform.comms.list_notifications(ctx.caller) if not n["read"]
    )
    return Response(200, page)


def h_mark_read(ctx: Ctx) -> Response:
    return Response(200, ctx.platform.comms.mark_read(ctx.caller, ctx.params["id"]))


def h_calendar(ctx: Ctx) -> Response:
    year = query_int(ctx.query, "year")
    month = query_int(ctx.query, "month")
    if year is None or month is None:
        raise errors.ValidationFailed("year and month are required")
    return Response(200, ctx.platform.scheduling.calendar_month(ctx.caller, year, month))


def h_availability_list(ctx: Ctx) -> Response:
    book_id = ctx.query.get("book_id")
    if not book_id:
        raise errors.ValidationFailed("book_id is required")
    return Response(200, paginate(ctx, ctx.platform.scheduling.list_availability(book_id)))


def h_post_availability(ctx: Ctx) -> Response:
    slot = ctx.platform.scheduling.post_availability(
        ctx.caller, need(ctx.body, "starts_at"), need(ctx.body, "ends_at")
    )
    return Response(201, slot)


def h_content(ctx: Ctx) -> Response:
    page = CONTENT_PAGES.get(ctx.params["page"])
    if page is None:
        raise errors.UnknownRoute(f"no content page {ctx.params['page']!r}")
    return Response(200, page)


# -- route table ------------------------------------------------------------------


@dataclass(frozen=True)
class Route:
    method: str
    pattern: str
    allowed: frozenset
    handler: Callable[[Ctx], Response]

    @property
    def segments(self) -> tuple:
        return tuple(self.pattern.strip("/").split("/"))


ROUTES: list[Route] = [
    Route("POST", "/v1/auth/register", ANYONE, h_register),
    Route("POST", "/v1/auth/login", ANYONE, h_login),
    Route("POST", "/v1/auth/forgot", ANYONE, h_forgot),
    Route("POST", "/v1/auth/reset", ANYONE, h_reset),
    Route("POST", "/v1/auth/logout", SIGNED_IN, h_logout),
    Route("GET", "/v1/me", SIGNED_IN, h_me),
    Route("PATCH", "/v1/me", SIGNED_IN, h_update_me),
    Route("PUT", "/v1/me/vaccination", SIGNED_IN, h_vaccination),
    Route("GET", "/v1/books", ANYONE, h_books),
    Route("GET", "/v1/books/{id}", ANYONE, h_book),
    Route("GET", "/v1/books/{id}/reviews", ANYONE, h_reviews),
    Route("POST", "/v1/books/{id}/reviews", SIGNED_IN, h_post_review),
    Route("PUT", "/v1/books/{id}/follow", SIGNED_IN, h_follow),
    Route("POST", "/v1/book-requests", frozenset({READER, BOOK}), h_submit_book_request),
    Route("GET", "/v1/book-requests", SIGNED_IN, h_list_book_requests),
    Route("POST", "/v1/book-requests/{id}/decision", frozenset({ADMIN}), h_decide_book_request),
    Route("GET", "/v1/events", ANYONE, h_events),
    Route("POST", "/v1/events", frozenset({BOOK, ADMIN}), h_create_event),
    Route("GET", "/v1/events/{id}", ANYONE, h_event),
    Route("POST", "/v1/events/{id}/bookings", SIGNED_IN, h_book_seat),
    Route("GET", "/v1/bookings", SIGNED_IN, h_bookings),
    Route("GET", "/v1/bookings/{id}", SIGNED_IN, h_booking),
    Route("DELETE", "/v1/bookings/{id}", SIGNED_IN, h_cancel_booking),
    Route("POST", "/v1/bookings/{id}/payment", SIGNED_IN, h_create_intent),
    Route("GET", "/v1/payments/{id}", SIGNED_IN, h_payment),
    Route("POST", "/v1/payments/{id}/confirm", SIGNED_IN, h_confirm_payment),
    Route("GET", "/v1/conversations", SIGNED_IN, h_conversations),
    Route("POST", "/v1/conversations", SIGNED_IN, h_start_conversation),
    Route("GET", "/v1/conversations/{id}/messages", SIGNED_IN, h_messages),
    Route("POST", "/v1/conversations/{id}/messages", SIGNED_IN, h_reply),
    Route("GET", "/v1/notifications", SIGNED_IN, h_notifications),
    Route("POST", "/v1/notifications/{id}/read", SIGNED_IN, h_mark_read),
    Route("GET", "/v1/calendar", ANYONE, h_calendar),
    Route("GET", "/v1/availability", ANYONE, h_availability_list),
    Route("POST", "/v1/availability", frozenset({BOOK}), h_post_availability),
    Route("GET", "/v1/content/{page}", ANYONE, h_content),
]


def _match(route: Route, segments: tuple) -> Optional[dict]:
    if len(route.segments) != len(segments):
        return None
    params = {}
    for want, got in zip(route.segments, segments):
        if want.startswith("{") and want.endswith("}"):
            params[want[1:-1]] = got
        elif want != got:
            return None
    return params


def authenticate_request(platform: Platform, headers: dict) -> Optional[dict]:
    """Bearer token -> account; no header -> Guest (None); bad token raises."""
    header = headers.get("authorization") or headers.get("Authorization") or ""
    if not header:
        return None
    scheme, _, token = header.partition(" ")
    if scheme.lower() != "bearer" or not token.strip():
        raise errors.InvalidToken("authorization header must be 'Bearer <token>'")
    return platform.identity.resolve_session(token.strip())


def dispatch(
    platform: Platform,
    method: str,
    path: str,
    query: Optional[dict] = None,
    body: Optional[dict] = None,
    headers: Optional[dict] = None,
) -> Response:
    query = dict(query or {})
    headers = headers or {}
    segments = tuple(path.strip("/").split("/"))

    matched_other_method = False
    for route in ROUTES:
        params = _match(route, segments)
        if params is None:
            continue
        if route.method != method.upper():
            matched_other_method = True
            continue
        try:
            caller = authenticate_request(platform, headers)
            role = caller["role"] if caller else GUEST
            if role not in route.allowed:
                if caller is None:
                    raise AuthRequired("sign up or sign in to continue")
                raise errors.NotAuthorized(f"{role} accounts cannot call {route.method} {route.pattern}")
            if caller is not None:
                # logout needs the raw token; pass it out of band
                _, _, token = (headers.get("authorization") or headers.get("Authorization", "")).partition(" ")
                query["_token"] = token.strip()
            ctx = Ctx(platform, caller, params, query, body or {})
            return route.handler(ctx)
        except errors.DomainError as exc:
            return error_response(exc.code, exc.message, exc.details.get("fields"))
    if matched_other_method:
        return error_response("METHOD_NOT_ALLOWED", f"{method} not supported on {path}")
    return error_response("UNKNOWN_ROUTE", f"no route for {method} {path}")
