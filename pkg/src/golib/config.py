"""Runtime configuration, sourced from defaults and GOLIB_* env vars."""
from __future__ import annotations

import os
from dataclasses import dataclass, field

from .clock import Clock, FixedClock, SystemClock


@dataclass
class Config:
    data_dir: str = "./golib-data"
    port: int = 8080
    otp_ttl_seconds: int = 600
    hold_ttl_seconds: int = 900
    session_ttl_seconds: int = 7 * 24 * 3600
    password_min_length: int = 8
    image_max_bytes: int = 10 * 1024 * 1024
    message_max_chars: int = 4096
    pbkdf2_iterations: int = 60_000
    page_size_default: int = 50
    page_size_max: int = 200
    cas_retry_limit: int = 16
    fsync: bool = False
    admin_email: str = "admin@golib.local"
    admin_password: str = "change-me-now"
    clock: Clock = field(default_factory=SystemClock)

    @classmethod
    def from_env(cls, environ=os.environ, **overrides) -> "Config":
        cfg = cls(**overrides)
        if "GOLIB_DATA_DIR" in environ:
            cfg.data_dir = environ["GOLIB_DATA_DIR"]
        if "GOLIB_PORT" in environ:
            cfg.port = int(environ["GOLIB_PORT"])
        if "GOLIB_OTP_TTL_SECONDS" in environ:
            cfg.otp_ttl_seconds = int(environ["GOLIB_OTP_TTL_SECONDS"])
        if "GOLIB_HOLD_TTL_SECONDS" in environ:
            cfg.hold_ttl_seconds = int(environ["GOLIB_HOLD_TTL_SECONDS"])
        if "GOLIB_ADMIN_EMAIL" in environ:
            cfg.admin_email = environ["GOLIB_ADMIN_EMAIL"]
        if "GOLIB_ADMIN_PASSWORD" in environ:
            cfg.admin_password = environ["GOLIB_ADMIN_PASSWORD"]
        if environ.get("GOLIB_CLOCK"):
            cfg.clock = FixedClock(environ["GOLIB_CLOCK"])
        return cfg
