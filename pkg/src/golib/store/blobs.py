"""Content-addressed blob storage: a directory keyed by sha256."""
from __future__ import annotations

import hashlib
import os

from ..errors import StorageFailure


class BlobStore:
    def __init__(self, directory: str):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def put(self, data: bytes) -> str:
        ref = "sha256:" + hashlib.sha256(data).hexdigest()
        path = self._path(ref)
        if not os.path.exists(path):
            tmp = path + ".tmp"
            try:
                with open(tmp, "wb") as f:
                    f.write(data)
                os.replace(tmp, path)
            except OSError as exc:
                raise StorageFailure(f"blob write failed: {exc}") from exc
        return ref

    def get(self, ref: str) -> bytes:
        try:
            with open(self._path(ref), "rb") as f:
                return f.read()
        except FileNotFoundError:
            raise StorageFailure(f"unknown blob {ref}")

    def exists(self, ref: str) -> bool:
        return os.path.exists(self._path(ref))

    def _path(self, ref: str) -> str:
        digest = ref.split(":", 1)[-1]
        if not digest.isalnum():
            raise StorageFailure(f"malformed blob ref {ref!r}")
        return os.path.join(self.directory, digest)
