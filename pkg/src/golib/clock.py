"""Injectable UTC clock and RFC 3339 timestamp helpers.

Every module takes its notion of "now" from a Clock instance so tests can
pin or advance time deterministically (GOLIB_CLOCK serves the same purpose
for a whole process).
"""
from __future__ import annotations

import threading
from datetime import datetime, timedelta, timezone


def utc(dt: datetime) -> datetime:
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_ts(dt: datetime) -> str:
    """Serialize a datetime as an RFC 3339 UTC string."""
    return utc(dt).isoformat()


def parse_ts(value: str) -> datetime:
    """Parse an RFC 3339 timestamp; accepts both 'Z' and '+00:00' offsets."""
    if value.endswith("Z"):
        value = value[:-1] + "+00:00"
    return utc(datetime.fromisoformat(value))


class Clock:
    """Interface: now() returns an aware UTC datetime."""

    def now(self) -> datetime:
        raise NotImplementedError


class SystemClock(Clock):
    def now(self) -> datetime:
        return datetime.now(timezone.utc)


class FixedClock(Clock):
    """Controllable clock for tests and deterministic runs.

    Thread-safe: concurrent readers see a consistent instant while a test
    advances time between phases.
    """

    def __init__(self, start: datetime | str | None = None):
        if isinstance(start, str):
            start = parse_ts(start)
        self._now = utc(start) if start else datetime(2024, 1, 1, tzinfo=timezone.utc)
        self._lock = threading.Lock()

    def now(self) -> datetime:
        with self._lock:
            return self._now

    def advance(self, seconds: float) -> datetime:
        with self._lock:
            self._now += timedelta(seconds=seconds)
            return self._now

    def set(self, dt: datetime | str) -> None:
        if isinstance(dt, str):
            dt = parse_ts(dt)
        with self._lock:
            self._now = utc(dt)
