from .blobs import BlobStore
from .engine import CommitResult, Record, Snapshot, Store, Txn, canonical

__all__ = ["BlobStore", "CommitResult", "Record", "Snapshot", "Store", "Txn", "canonical"]
