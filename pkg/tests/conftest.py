from __future__ import annotations

import pytest

from golib.app import Platform
from golib.clock import FixedClock
from golib.config import Config


def make_config(tmp_path, **overrides) -> Config:
    defaults = dict(
        data_dir=str(tmp_path / "data"),
        clock=FixedClock("2024-06-01T09:00:00+00:00"),
        pbkdf2_iterations=600,  # keep hashing cheap in tests
    )
    defaults.update(overrides)
    return Config(**defaults)


@pytest.fixture
def config(tmp_path):
    return make_config(tmp_path)


@pytest.fixture
def platform(config):
    p = Platform(config)
    yield p
    p.close()


@pytest.fixture
def clock(config):
    return config.clock


# -- common actors -----------------------------------------------------------

PW = "s3cretpw!"


def register_reader(platform, email="reader@x.pk", vaccinated=True, **kw):
    account = platform.identity.register_user(
        email=email,
        first_name=kw.get("first_name", "Asim"),
        last_name=kw.get("last_name", "Irfan"),
        city=kw.get("city", "Hyderabad"),
        country=kw.get("country", "Pakistan"),
        password=kw.get("password", PW),
        contact_number=kw.get("contact_number", "0300-1234567"),
    )
    if vaccinated:
        platform.identity.upload_vaccination_card(account, b"front-image", b"back-image")
    return platform.identity.get_account(account["id"])


def make_admin(platform):
    admin = platform.ensure_admin()
    return platform.identity.get_account(admin["id"])


def make_book(platform, email="book@x.pk", profession="Psychologist", display_name=None, **kw):
    reader = register_reader(platform, email=email, **kw)
    request = platform.directory.submit_become_book_request(
        reader,
        name=display_name or f"{reader['first_name']} {reader['last_name']}",
        phone="0300-7654321",
        cnic="4210112345671",
        field_of_expertise=profession,
        vaccination_image=b"vax-card",
        resume=b"resume.pdf",
    )
    platform.directory.decide_become_book_request(make_admin(platform), request["id"], "Accepted")
    return platform.identity.get_account(reader["id"])


VENUE = {"name": "HM Hall", "address": "Auto Bhan Rd, Hyderabad", "latitude": 25.396, "longitude": 68.377}


def make_event(platform, actor, *, kind="PublicEvent", title="Mindfulness 101",
               starts="2024-06-10T17:00:00+00:00", ends="2024-06-10T19:00:00+00:00",
               capacity=10, price_minor=0, venue=None):
    return platform.scheduling.create_event(
        actor, kind=kind, title=title, venue=venue or VENUE,
        starts_at=starts, ends_at=ends, capacity=capacity, price_minor=price_minor,
    )
