"""Accounts, authentication, OTP password reset, profile, vaccination gating.

Accounts are stored under "accounts"; email uniqueness is enforced through
an "email_index" record written in the same transaction, so races resolve
at commit rather than check-then-act. Session invalidation after a password
reset is epoch-based: each account carries a session_epoch and tokens
minted before a bump stop resolving.
"""
from __future__ import annotations

import hashlib
import hmac
import re
import secrets
from datetime import timedelta
from typing import Optional

from . import errors
from .clock import format_ts, parse_ts
from .config import Config
from .outbox import Outbox
from .store import BlobStore, Store, Txn

ROLE_GUEST = "Guest"
ROLE_READER = "Reader"
ROLE_BOOK = "Book"
ROLE_ADMIN = "Admin"

ACCOUNTS = "accounts"
EMAIL_INDEX = "email_index"
SESSIONS = "sessions"
OTP_TOKENS = "otp_tokens"

_EMAIL_RE = re.compile(r"^[^@\s]+@[^@\s]+\.[^@\s]+$")

# fixed-cost digest verified for unknown emails so lookups are not
# timing-distinguishable from wrong passwords
_DUMMY_SALT = "0" * 32


def normalize_email(email: str) -> str:
    return (email or "").strip().lower()


def public_account(doc: dict) -> dict:
    """Account as exposed over the API: everything except secrets."""
    return {
        "id": doc["id"],
        "email": doc["email"],
        "first_name": doc["first_name"],
        "last_name": doc["last_name"],
        "city": doc["city"],
        "country": doc["country"],
        "contact_number": doc.get("contact_number", ""),
        "role": doc["role"],
        "vaccination": doc.get("vaccination"),
        "created_at": doc["created_at"],
    }


class IdentityService:
    def __init__(self, store: Store, blobs: BlobStore, outbox: Outbox, config: Config):
        self.store = store
        self.blobs = blobs
        self.outbox = outbox
        self.config = config
        self.clock = config.clock

    # -- password hashing ----------------------------------------------------

    def _digest(self, password: str, salt: str, iterations: int | None = None) -> dict:
        iterations = iterations or self.config.pbkdf2_iterations
        raw = hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), bytes.fromhex(salt), iterations)
        return {"alg": "pbkdf2-sha256", "salt": salt, "iterations": iterations, "hash": raw.hex()}

    def _new_digest(self, password: str) -> dict:
        return self._digest(password, secrets.token_hex(16))

    def _verify_password(self, password: str, digest: Optional[dict]) -> bool:
        if digest is None:
            # burn the same work as a real check
            self._digest(password, _DUMMY_SALT)
            return False
        candidate = self._digest(password, digest["salt"], digest["iterations"])
        return hmac.compare_digest(candidate["hash"], digest["hash"])

    def _check_password_policy(self, password: str) -> None:
        if not password or len(password) < self.config.password_min_length:
            raise errors.WeakPassword(
                f"password must be at least {self.config.password_min_length} characters"
            )

    # -- registration and login ----------------------------------------------

    def register_user(
        self,
        email: str,
        first_name: str,
        last_name: str,
        city: str,
        country: str,
        password: str,
        contact_number: str = "",
    ) -> dict:
        email = normalize_email(email)
        if not _EMAIL_RE.match(email):
            raise errors.InvalidEmail(f"not a valid email address: {email!r}")
        self._check_password_policy(password)
        account_id = "acc_" + secrets.token_hex(8)
        now = format_ts(self.clock.now())
        doc = {
            "id": account_id,
            "email": email,
            "first_name": first_name,
            "last_name": last_name,
            "city": city,
            "country": country,
            "contact_number": contact_number,
            "role": ROLE_READER,
            "password_digest": self._new_digest(password),
            "vaccination": None,
            "session_epoch": 0,
            "created_at": now,
        }

        def txn_fn(txn: Txn):
            if txn.get(EMAIL_INDEX, email) is not None:
                raise errors.DuplicateEmail(f"{email} is already registered")
            txn.put(EMAIL_INDEX, email, {"account_id": account_id})
            txn.put(ACCOUNTS, account_id, doc)

        self.store.transact(txn_fn)
        return public_account(doc)

    def create_admin(self, email: str, password: str, first_name: str = "Admin", last_name: str = "") -> dict:
        """Provision (or fetch) the platform admin account. Not reachable from
        the API; used by the server bootstrap and the CLI."""
        email = normalize_email(email)
        existing = self.find_by_email(email)
        if existing is not None:
            return public_account(existing)
        self._check_password_policy(password)
        account_id = "acc_" + secrets.token_hex(8)
        doc = {
            "id": account_id,
            "email": email,
            "first_name": first_name,
            "last_name": last_name,
            "city": "",
            "country": "",
            "contact_number": "",
            "role": ROLE_ADMIN,
            "password_digest": self._new_digest(password),
            "vaccination": None,
            "session_epoch": 0,
            "created_at": format_ts(self.clock.now()),
        }

        def txn_fn(txn: Txn):
            if txn.get(EMAIL_INDEX, email) is not None:
                raise errors.DuplicateEmail(email)
            txn.put(EMAIL_INDEX, email, {"account_id": account_id})
            txn.put(ACCOUNTS, account_id, doc)

        self.store.transact(txn_fn)
        return public_account(doc)

    def find_by_email(self, email: str) -> Optional[dict]:
        snap = self.store.snapshot()
        idx = snap.get(EMAIL_INDEX, normalize_email(email))
        if idx is None:
            return None
        return snap.get(ACCOUNTS, idx["account_id"])

    def get_account(self, account_id: str) -> Optional[dict]:
        return self.store.snapshot().get(ACCOUNTS, account_id)

    def authenticate(self, email: str, password: str, method: str = "password") -> dict:
        """Exchange credentials for a session token. Unknown email and wrong
        password produce the identical error."""
        if method != "password":
            raise errors.UnsupportedAuthMethod(f"sign-in method {method!r} is not supported")
        account = self.find_by_email(email)
        digest = account["password_digest"] if account else None
        if not self._verify_password(password, digest):
            raise errors.InvalidCredentials("email or password is incorrect")
        return self._issue_session(account)

    def _issue_session(self, account: dict) -> dict:
        token = secrets.token_urlsafe(32)  # 256 bits
        now = self.clock.now()
        session = {
            "token": token,
            "account_id": account["id"],
            "epoch": account["session_epoch"],
            "expires_at": format_ts(now + timedelta(seconds=self.config.session_ttl_seconds)),
        }
        self.store.transact(lambda txn: txn.put(SESSIONS, token, session))
        return session

    def resolve_session(self, token: str) -> dict:
        """Map a bearer token to its account; raises InvalidToken for anything
        not issued, expired, or minted before the last credential reset."""
        if not token:
            raise errors.InvalidToken("missing token")
        snap = self.store.snapshot()
        session = snap.get(SESSIONS, token)
        if session is None:
            raise errors.InvalidToken("unknown token")
        if self.clock.now() > parse_ts(session["expires_at"]):
            raise errors.InvalidToken("expired token")
        account = snap.get(ACCOUNTS, session["account_id"])
        if account is None or session["epoch"] != account["session_epoch"]:
            raise errors.InvalidToken("revoked token")
        return account

    def revoke_session(self, token: str) -> None:
        self.store.transact(lambda txn: txn.delete(SESSIONS, token))

    # -- password reset --------------------------------------------------------

    def request_password_reset(self, email: str) -> dict:
        """Always acknowledges identically; a reset code reaches the outbox
        only when the address is registered."""
        account = self.find_by_email(email)
        if account is not None:
            code = f"{secrets.randbelow(1_000_000):06d}"
            now = self.clock.now()
            token = {
                "account_id": account["id"],
                "code": code,
                "issued_at": format_ts(now),
                "ttl_seconds": self.config.otp_ttl_seconds,
                "consumed": False,
            }
            # one live token per account: the newest overwrites (voids) any prior
            self.store.transact(lambda txn: txn.put(OTP_TOKENS, account["id"], token))
            self.outbox.send(
                to=account["email"],
                subject="Your password reset code",
                body=f"Use code {code} to choose a new password. "
                f"It expires in {self.config.otp_ttl_seconds // 60} minutes.",
                at=now,
            )
        return {"status": "ok"}

    def redeem_otp(self, email: str, code: str, new_password: str) -> dict:
        self._check_password_policy(new_password)
        account = self.find_by_email(email)
        if account is None:
            raise errors.OtpInvalid("code is not valid")
        new_digest = self._new_digest(new_password)
        now = self.clock.now()

        def txn_fn(txn: Txn):
            token = txn.get(OTP_TOKENS, account["id"])
            if token is None or not hmac.compare_digest(token["code"], str(code)):
                raise errors.OtpInvalid("code is not valid")
            if token["consumed"]:
                raise errors.OtpConsumed("code was already used")
            issued = parse_ts(token["issued_at"])
            if now > issued + timedelta(seconds=token["ttl_seconds"]):
                raise errors.OtpExpired("code has expired")
            txn.put(OTP_TOKENS, account["id"], {**token, "consumed": True})
            fresh = txn.get(ACCOUNTS, account["id"])
            txn.put(
                ACCOUNTS,
                account["id"],
                {**fresh, "password_digest": new_digest, "session_epoch": fresh["session_epoch"] + 1},
            )

        self.store.transact(txn_fn)
        return {"status": "ok"}

    # -- profile and settings ---------------------------------------------------

    def update_account(
        self,
        actor: dict,
        profile_changes: Optional[dict] = None,
        old_password: Optional[str] = None,
        new_password: Optional[str] = None,
    ) -> dict:
        changes = dict(profile_changes or {})
        allowed = {"email", "first_name", "last_name", "city", "country", "contact_number"}
        unknown = set(changes) - allowed
        if unknown:
            raise errors.ValidationFailed(f"unknown profile fields: {sorted(unknown)}")

        new_digest = None
        if new_password is not None:
            self._check_password_policy(new_password)
            if not self._verify_password(old_password or "", actor["password_digest"]):
                raise errors.InvalidCredentials("old password is incorrect")
            new_digest = self._new_digest(new_password)

        new_email = None
        if "email" in changes:
            new_email = normalize_email(changes["email"])
            if not _EMAIL_RE.match(new_email):
                raise errors.InvalidEmail(new_email)
            changes["email"] = new_email

        def txn_fn(txn: Txn):
            doc = txn.get(ACCOUNTS, actor["id"])
            updated = {**doc, **changes}
            if new_email is not None and new_email != doc["email"]:
                claim = txn.get(EMAIL_INDEX, new_email)
                if claim is not None:
                    raise errors.DuplicateEmail(f"{new_email} is already registered")
                txn.delete(EMAIL_INDEX, doc["email"])
                txn.put(EMAIL_INDEX, new_email, {"account_id": doc["id"]})
            if new_digest is not None:
                updated["password_digest"] = new_digest
            txn.put(ACCOUNTS, actor["id"], updated)
            return updated

        result = self.store.transact(txn_fn)
        return public_account(result.value)

    def upload_vaccination_card(self, actor: dict, front_image: bytes, back_image: bytes) -> dict:
        if not front_image or not back_image:
            raise errors.MissingSide("both sides of the vaccination card are required")
        limit = self.config.image_max_bytes
        if len(front_image) > limit or len(back_image) > limit:
            raise errors.ImageTooLarge(f"each side must be at most {limit} bytes")
        record = {
            "front_image_ref": self.blobs.put(front_image),
            "back_image_ref": self.blobs.put(back_image),
            "uploaded_at": format_ts(self.clock.now()),
        }

        def txn_fn(txn: Txn):
            doc = txn.get(ACCOUNTS, actor["id"])
            txn.put(ACCOUNTS, actor["id"], {**doc, "vaccination": record})

        self.store.transact(txn_fn)
        return record
