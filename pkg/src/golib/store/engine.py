"""Embedded transactional document store.

Single-node, durable, with optimistic compare-and-swap transactions:

- state lives in immutable copy-on-write dicts, so readers always see a
  consistent snapshot and never a torn write;
- commits are serialized under one lock and appended to a write-ahead
  journal (a T line with the write set, then a C commit mark);
- a clean shutdown compacts everything into a snapshot file and truncates
  the journal; recovery replays committed journal entries on top of the
  last snapshot;
- every journal and snapshot line carries a sha256 checksum. A truncated
  final line is a torn write and is healed away on open; a complete line
  that fails its checksum means the file was tampered with or rotted, and
  open fails with CorruptStore instead of silently misreading.

Transactions re-execute their (pure) update function on version conflicts,
up to a bounded retry count, then surface ConflictExhausted.
"""
from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional

from ..errors import ConflictExhausted, CorruptStore, StorageFailure

Key = tuple[str, str]  # (collection, id)

JOURNAL_FILE = "journal.golib"
SNAPSHOT_FILE = "snapshot.golib"
LOCK_FILE = "LOCK"

DEFAULT_RETRY_LIMIT = 16


def canonical(doc: Any) -> str:
    """Field-ordered, whitespace-free JSON; deterministic bytes for checksums."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _digest(body: str) -> str:
    return hashlib.sha256(body.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Record:
    collection: str
    id: str
    version: int
    doc: Optional[dict]  # None for tombstones

    @property
    def deleted(self) -> bool:
        return self.doc is None


class Snapshot:
    """Immutable point-in-time view; all queries against it are mutually consistent."""

    def __init__(self, state: dict[str, dict[str, Record]]):
        self._state = state

    def get(self, collection: str, id: str) -> Optional[dict]:
        rec = self._state.get(collection, {}).get(id)
        return rec.doc if rec is not None and not rec.deleted else None

    def get_record(self, collection: str, id: str) -> Optional[Record]:
        rec = self._state.get(collection, {}).get(id)
        return rec if rec is not None and not rec.deleted else None

    def records(self, collection: str) -> list[Record]:
        return [r for r in self._state.get(collection, {}).values() if not r.deleted]

    def collections(self) -> list[str]:
        return sorted(self._state.keys())

    def query(
        self,
        collection: str,
        predicate: Callable[[dict], bool] | None = None,
        order: Callable[[dict], Any] | None = None,
        offset: int = 0,
        limit: int | None = None,
    ) -> list[Record]:
        """Filter + sort one collection. Ordering is total: the sort key is
        (order(doc), id) so results are deterministic for a fixed snapshot."""
        rows = [r for r in self.records(collection) if predicate is None or predicate(r.doc)]
        if order is None:
            rows.sort(key=lambda r: r.id)
        else:
            rows.sort(key=lambda r: (order(r.doc), r.id))
        if limit is None:
            return rows[offset:]
        return rows[offset : offset + limit]


class Txn:
    """Transaction view. get() is tracked for conflict detection; put/delete
    buffer until commit. Reads observe the txn's own pending writes."""

    def __init__(self, state: dict[str, dict[str, Record]]):
        self._base = state
        self.snapshot = Snapshot(state)
        self.reads: dict[Key, int] = {}
        self.writes: dict[Key, Optional[dict]] = {}  # None => delete

    def _base_record(self, key: Key) -> Optional[Record]:
        return self._base.get(key[0], {}).get(key[1])

    def get(self, collection: str, id: str) -> Optional[dict]:
        key = (collection, id)
        if key in self.writes:
            return self.writes[key]
        rec = self._base_record(key)
        self.reads[key] = rec.version if rec is not None else 0
        return rec.doc if rec is not None and not rec.deleted else None

    def put(self, collection: str, id: str, doc: dict) -> None:
        if not isinstance(doc, dict):
            raise TypeError("documents must be dicts")
        self.writes[(collection, id)] = doc

    def delete(self, collection: str, id: str) -> None:
        self.writes[(collection, id)] = None


@dataclass
class CommitResult:
    value: Any
    versions: dict[Key, int] = field(default_factory=dict)


class Store:
    """Durable store over a data directory (journal + snapshot + LOCK)."""

    def __init__(self, data_dir: str, fsync: bool = False, retry_limit: int = DEFAULT_RETRY_LIMIT):
        self.data_dir = data_dir
        self.fsync = fsync
        self.retry_limit = retry_limit
        self.journal_path = os.path.join(data_dir, JOURNAL_FILE)
        self.snapshot_path = os.path.join(data_dir, SNAPSHOT_FILE)
        self._lock_path = os.path.join(data_dir, LOCK_FILE)
        self._commit_lock = threading.Lock()
        self._state: dict[str, dict[str, Record]] = {}
        self._lsn = 0
        self._journal: Any = None
        self._closed = True

    # -- lifecycle ---------------------------------------------------------

    @classmethod
    def open(cls, data_dir: str, fsync: bool = False, retry_limit: int = DEFAULT_RETRY_LIMIT) -> "Store":
        store = cls(data_dir, fsync=fsync, retry_limit=retry_limit)
        os.makedirs(data_dir, exist_ok=True)
        store._acquire_lock()
        try:
            store._recover()
        except Exception:
            store._release_lock()
            raise
        store._journal = open(store.journal_path, "ab")
        store._closed = False
        return store

    def close(self) -> None:
        if self._closed:
            return
        with self._commit_lock:
            self._journal.flush()
            os.fsync(self._journal.fileno())
            self._journal.close()
            self._write_snapshot()
            self._closed = True
        self._release_lock()

    def compact(self) -> None:
        """Fold the journal into the snapshot file without closing."""
        with self._commit_lock:
            self._journal.flush()
            os.fsync(self._journal.fileno())
            self._write_snapshot()

    def _acquire_lock(self) -> None:
        try:
            fd = os.open(self._lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            try:
                with open(self._lock_path) as f:
                    pid = int(f.read().strip() or "0")
            except (OSError, ValueError):
                pid = 0
            if pid and _pid_alive(pid):
                raise StorageFailure(f"data dir locked by running process {pid}")
            os.unlink(self._lock_path)
            fd = os.open(self._lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)

    def _release_lock(self) -> None:
        try:
            os.unlink(self._lock_path)
        except OSError:
            pass

    # -- reads -------------------------------------------------------------

    def snapshot(self) -> Snapshot:
        return Snapshot(self._state)

    def get(self, collection: str, id: str) -> Optional[Record]:
        return self.snapshot().get_record(collection, id)

    def query(self, collection: str, predicate=None, order=None, offset: int = 0, limit=None) -> list[Record]:
        return self.snapshot().query(collection, predicate, order, offset, limit)

    # -- transactions ------------------------------------------------------

    def transact(self, fn: Callable[[Txn], Any], keys: Iterable[Key] = ()) -> CommitResult:
        """Run fn against a transaction view and commit its writes atomically.

        fn must be pure with respect to the store (it is re-executed after a
        version conflict). A domain error raised by fn aborts with nothing
        committed. Returns fn's value plus the committed versions.
        """
        keys = tuple(keys)
        last_error = None
        for _ in range(max(1, self.retry_limit)):
            txn = Txn(self._state)
            for collection, id in keys:
                txn.get(collection, id)
            value = fn(txn)
            if not txn.writes:
                return CommitResult(value)
            with self._commit_lock:
                if self._validate(txn):
                    versions = self._apply_locked(txn)
                    return CommitResult(value, versions)
            last_error = ConflictExhausted(
                f"transaction conflicted {self.retry_limit} times", keys=sorted(txn.reads)
            )
        raise last_error or ConflictExhausted("retry limit is zero")

    def _validate(self, txn: Txn) -> bool:
        for (collection, id), seen_version in txn.reads.items():
            rec = self._state.get(collection, {}).get(id)
            current = rec.version if rec is not None else 0
            if current != seen_version:
                return False
        return True

    def _apply_locked(self, txn: Txn) -> dict[Key, int]:
        if self._closed:
            raise StorageFailure("store is closed")
        self._lsn += 1
        lsn = self._lsn
        new_state = dict(self._state)
        versions: dict[Key, int] = {}
        write_set = []
        for (collection, id), doc in sorted(txn.writes.items()):
            coll = dict(new_state.get(collection, {}))
            prior = coll.get(id)
            version = (prior.version if prior is not None else 0) + 1
            coll[id] = Record(collection, id, version, doc)
            new_state[collection] = coll
            versions[(collection, id)] = version
            write_set.append([collection, id, version, doc])
        self._append_journal(lsn, write_set)
        self._state = new_state
        return versions

    def _append_journal(self, lsn: int, write_set: list) -> None:
        t_body = canonical({"lsn": lsn, "w": write_set})
        c_body = canonical({"lsn": lsn})
        lines = f"T {_digest(t_body)} {t_body}\nC {_digest(c_body)} {c_body}\n"
        try:
            self._journal.write(lines.encode("utf-8"))
            self._journal.flush()
            if self.fsync:
                os.fsync(self._journal.fileno())
        except OSError as exc:
            raise StorageFailure(f"journal append failed: {exc}") from exc

    # -- durability --------------------------------------------------------

    def _write_snapshot(self) -> None:
        records = [rec for coll in self._state.values() for rec in coll.values()]
        records.sort(key=lambda r: (r.collection, r.id))
        tmp = self.snapshot_path + ".tmp"
        try:
            with open(tmp, "wb") as f:
                header = canonical({"lsn": self._lsn, "count": len(records)})
                f.write(f"S {_digest(header)} {header}\n".encode("utf-8"))
                for rec in records:
                    body = canonical({"c": rec.collection, "i": rec.id, "v": rec.version, "d": rec.doc})
                    f.write(f"R {_digest(body)} {body}\n".encode("utf-8"))
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp, self.snapshot_path)
            with open(self.journal_path, "wb") as f:
                f.flush()
                os.fsync(f.fileno())
        except OSError as exc:
            raise StorageFailure(f"snapshot write failed: {exc}") from exc

    def _recover(self) -> None:
        state: dict[str, dict[str, Record]] = {}
        snapshot_lsn = 0
        if os.path.exists(self.snapshot_path):
            snapshot_lsn = self._load_snapshot(state)
        self._lsn = snapshot_lsn
        if os.path.exists(self.journal_path):
            self._replay_journal(state, snapshot_lsn)
        self._state = state

    def _load_snapshot(self, state: dict[str, dict[str, Record]]) -> int:
        with open(self.snapshot_path, "rb") as f:
            raw = f.read()
        lines = raw.split(b"\n")
        if lines and lines[-1] == b"":
            lines.pop()
        else:
            raise CorruptStore("snapshot file is truncated")
        if not lines:
            raise CorruptStore("snapshot file is empty")
        kind, header = self._parse_line(lines[0], "snapshot header")
        if kind != "S":
            raise CorruptStore("snapshot file lacks a header line")
        count = header["count"]
        if len(lines) - 1 != count:
            raise CorruptStore(f"snapshot row count mismatch: header says {count}, found {len(lines) - 1}")
        for row in lines[1:]:
            kind, body = self._parse_line(row, "snapshot row")
            if kind != "R":
                raise CorruptStore("unexpected line kind in snapshot body")
            rec = Record(body["c"], body["i"], body["v"], body["d"])
            state.setdefault(rec.collection, {})[rec.id] = rec
        return header["lsn"]

    def _replay_journal(self, state: dict[str, dict[str, Record]], snapshot_lsn: int) -> None:
        with open(self.journal_path, "rb") as f:
            raw = f.read()
        offset = 0
        committed_end = 0
        pending: dict[int, list] = {}
        pending_start = None  # byte offset of the first commit-markless T line
        while offset < len(raw):
            newline = raw.find(b"\n", offset)
            if newline == -1:
                # torn tail: a write that never finished; heal it away
                break
            line = raw[offset:newline]
            kind, body = self._parse_line(line, "journal entry")
            lsn = body["lsn"]
            if kind == "T":
                if lsn > snapshot_lsn:
                    if lsn in pending:
                        raise CorruptStore(f"duplicate journal entry for lsn {lsn}")
                    pending[lsn] = body["w"]
                    if pending_start is None:
                        pending_start = offset
            elif kind == "C":
                if lsn > snapshot_lsn:
                    if lsn not in pending:
                        raise CorruptStore(f"commit mark for unknown lsn {lsn}")
                    for collection, id, version, doc in pending.pop(lsn):
                        state.setdefault(collection, {})[id] = Record(collection, id, version, doc)
                    self._lsn = max(self._lsn, lsn)
                if not pending:
                    pending_start = None
            else:
                raise CorruptStore(f"unknown journal line kind {kind!r}")
            offset = newline + 1
            if not pending:
                committed_end = offset
        # anything after the last fully committed entry (a torn tail or a
        # journaled-but-unmarked transaction) leaves no trace
        keep = committed_end if pending_start is not None else min(offset, len(raw))
        if keep < len(raw):
            with open(self.journal_path, "r+b") as f:
                f.truncate(keep)

    @staticmethod
    def _parse_line(line: bytes, what: str) -> tuple[str, dict]:
        parts = line.split(b" ", 2)
        if len(parts) != 3:
            raise CorruptStore(f"malformed {what}")
        kind, digest, body = parts
        if _digest(body.decode("utf-8", errors="replace")) != digest.decode("ascii", errors="replace"):
            raise CorruptStore(f"checksum mismatch in {what}")
        try:
            return kind.decode("ascii"), json.loads(body)
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CorruptStore(f"unparseable {what}: {exc}") from exc


def _pid_alive(pid: int) -> bool:
    try:
        os.kill(pid, 0)
    except ProcessLookupError:
        return False
    except PermissionError:
        return True
    return True
