"""Config env parsing and the injectable clock."""
from __future__ import annotations

from golib.clock import FixedClock, SystemClock, format_ts, parse_ts
from golib.config import Config


def test_defaults():
    cfg = Config()
    assert cfg.otp_ttl_seconds == 600
    assert cfg.hold_ttl_seconds == 900
    assert cfg.password_min_length == 8
    assert cfg.image_max_bytes == 10 * 1024 * 1024
    assert isinstance(cfg.clock, SystemClock)


def test_env_overrides():
    env = {
        "GOLIB_DATA_DIR": "/tmp/somewhere",
        "GOLIB_PORT": "9001",
        "GOLIB_OTP_TTL_SECONDS": "60",
        "GOLIB_HOLD_TTL_SECONDS": "120",
        "GOLIB_CLOCK": "2024-03-01T00:00:00Z",
    }
    cfg = Config.from_env(environ=env)
    assert cfg.data_dir == "/tmp/somewhere"
    assert cfg.port == 9001
    assert cfg.otp_ttl_seconds == 60
    assert cfg.hold_ttl_seconds == 120
    assert isinstance(cfg.clock, FixedClock)
    assert format_ts(cfg.clock.now()) == "2024-03-01T00:00:00+00:00"


def test_parse_accepts_z_and_offset():
    assert parse_ts("2024-03-01T00:00:00Z") == parse_ts("2024-03-01T00:00:00+00:00")


def test_fixed_clock_advance_and_set():
    clock = FixedClock("2024-01-01T00:00:00+00:00")
    clock.advance(90)
    assert format_ts(clock.now()) == "2024-01-01T00:01:30+00:00"
    clock.set("2025-06-01T12:00:00Z")
    assert format_ts(clock.now()) == "2025-06-01T12:00:00+00:00"
