"""Platform composition: opens the store and wires every service together."""
from __future__ import annotations

import json
import os

from .comms import CommsService
from .config import Config
from .directory import DirectoryService
from .identity import IdentityService
from .outbox import Outbox
from .payments import PaymentsService
from .scheduling import SchedulingService
from .store import BlobStore, Store


class Platform:
    """One running instance over one data directory."""

    def __init__(self, config: Config):
        self.config = config
        self.clock = config.clock
        self.store = Store.open(
            config.data_dir, fsync=config.fsync, retry_limit=config.cas_retry_limit
        )
        self.blobs = BlobStore(os.path.join(config.data_dir, "blobs"))
        self.outbox = Outbox(os.path.join(config.data_dir, "outbox.jsonl"))

        self.identity = IdentityService(self.store, self.blobs, self.outbox, config)
        self.directory = DirectoryService(self.store, self.blobs, self.outbox, config)
        self.payments = PaymentsService(self.store, config)
        self.comms = CommsService(self.store, config, self.directory)
        self.scheduling = SchedulingService(
            self.store, config, self.directory, comms=self.comms, payments=self.payments
        )
        self.directory.comms = self.comms

    @classmethod
    def open(cls, config: Config | None = None, **overrides) -> "Platform":
        return cls(config or Config(**overrides))

    def close(self) -> None:
        self.store.close()

    def ensure_admin(self) -> dict:
        return self.identity.create_admin(self.config.admin_email, self.config.admin_password)

    # -- fixture loading ------------------------------------------------------

    def seed(self, fixture: dict) -> dict:
        """Load a demo/test fixture through the real operations so every
        invariant (roles via approvals, sessions inside slots, ...) holds.

        Shape: {"readers": [...], "books": [...], "events": [...]};
        books carry their own "slots" and "sessions"; readers may "follow"
        books by email and pre-upload a vaccination card.
        """
        admin = self.ensure_admin()
        by_email: dict[str, dict] = {}
        summary = {"accounts": 0, "books": 0, "events": 0, "slots": 0}

        def register(spec) -> dict:
            account = self.identity.register_user(
                email=spec["email"],
                first_name=spec.get("first_name", ""),
                last_name=spec.get("last_name", ""),
                city=spec.get("city", ""),
                country=spec.get("country", "Pakistan"),
                password=spec["password"],
                contact_number=spec.get("contact_number", ""),
            )
            if spec.get("vaccinated", True):
                side = f"fixture vaccination card for {spec['email']}".encode()
                self.identity.upload_vaccination_card(account, side + b"/front", side + b"/back")
                account = self.identity.get_account(account["id"])
            by_email[account["email"]] = account
            summary["accounts"] += 1
            return account

        for spec in fixture.get("readers", []):
            register(spec)

        for spec in fixture.get("books", []):
            account = register(spec)
            request = self.directory.submit_become_book_request(
                account,
                name=spec.get("display_name", f"{account['first_name']} {account['last_name']}".strip()),
                phone=spec.get("contact_number", "0300-0000000"),
                cnic=spec.get("cnic", "4210112345671"),
                field_of_expertise=spec.get("profession", "Psychologist"),
                vaccination_image=b"fixture vaccination image",
                resume=b"fixture resume",
            )
            self.directory.decide_become_book_request(
                self.identity.get_account(admin["id"]), request["id"], "Accepted"
            )
            account = self.identity.get_account(account["id"])
            by_email[account["email"]] = account
            summary["books"] += 1
            for slot in spec.get("slots", []):
                self.scheduling.post_availability(account, slot["starts_at"], slot["ends_at"])
                summary["slots"] += 1
            for session in spec.get("sessions", []):
                self.scheduling.create_event(
                    account,
                    kind="PrivateSession",
                    title=session["title"],
                    venue=session["venue"],
                    starts_at=session["starts_at"],
                    ends_at=session["ends_at"],
                    capacity=1,
                    price_minor=session.get("price_minor", 0),
                )
                summary["events"] += 1

        for spec in fixture.get("events", []):
            creator = by_email.get(spec.get("host_email", ""), None)
            actor = self.identity.get_account((creator or admin)["id"])
            self.scheduling.create_event(
                actor,
                kind="PublicEvent",
                title=spec["title"],
                venue=spec["venue"],
                starts_at=spec["starts_at"],
                ends_at=spec["ends_at"],
                capacity=spec.get("capacity", 10),
                price_minor=spec.get("price_minor", 0),
            )
            summary["events"] += 1

        for spec in fixture.get("readers", []):
            reader = by_email[spec["email"].strip().lower()]
            for book_email in spec.get("follows", []):
                book = by_email[book_email.strip().lower()]
                self.directory.set_follow(reader, book["id"], True)

        return summary

    def seed_file(self, path: str) -> dict:
        with open(path, encoding="utf-8") as f:
            return self.seed(json.load(f))
