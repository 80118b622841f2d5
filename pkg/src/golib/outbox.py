"""Mail outbox: an append-only file standing in for real email delivery.

One JSON record per line: {to, subject, body, timestamp}.
"""
from __future__ import annotations

import json
import os
import threading
from datetime import datetime

from .clock import format_ts


class Outbox:
    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)

    def send(self, to: str, subject: str, body: str, at: datetime) -> None:
        record = {"to": to, "subject": subject, "body": body, "timestamp": format_ts(at)}
        line = json.dumps(record, sort_keys=True) + "\n"
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(line)

    def messages(self) -> list[dict]:
        if not os.path.exists(self.path):
            return []
        with open(self.path, encoding="utf-8") as f:
            return [json.loads(line) for line in f if line.strip()]
