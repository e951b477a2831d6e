"""In-process append-only topic log.

Stands in for the message broker: single partition per topic, total
order, and broker-assigned ingestion timestamps taken from an injected
clock at append time.  Those two properties are what latency measurement
and ordered validation rely on; everything else (consumer groups,
retention, networking) is deliberately absent.

On-disk format, one file per topic: little-endian framed entries of
(u32 payload length, u64 ingestion_ts ms, payload bytes).
"""

from __future__ import annotations

import struct
import threading
from dataclasses import dataclass
from pathlib import Path

from .errors import DuplicateTopic, MissingTopic, OffsetOutOfRange, StorageError

_FRAME_HEADER = struct.Struct("<IQ")


@dataclass(frozen=True)
class LogEntry:
    offset: int
    ingestion_ts: int
    payload: bytes


class TopicLog:
    """Append-only, single-partition record log.

    Appends are serialized by a per-topic lock; reads are snapshot
    slices by offset.  Entries are immutable once appended.
    """

    def __init__(self, name: str):
        self.name = name
        self._entries: list[tuple[int, bytes]] = []  # (ingestion_ts, payload)
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def append(self, payload: bytes, clock) -> int:
        """Append one payload, stamping it with clock.now_ms(); returns its offset."""
        with self._lock:
            ts = clock.now_ms()
            self._entries.append((ts, payload))
            return len(self._entries) - 1

    def read_from(self, offset: int, max_count: int | None = None) -> list[LogEntry]:
        """Entries starting at `offset`, at most `max_count`, in offset order."""
        n = len(self._entries)
        if offset > n or offset < 0:
            raise OffsetOutOfRange(f"offset {offset} not in [0, {n}]")
        end = n if max_count is None else min(n, offset + max_count)
        return [
            LogEntry(i, self._entries[i][0], self._entries[i][1])
            for i in range(offset, end)
        ]

    def entry(self, offset: int) -> LogEntry:
        n = len(self._entries)
        if not 0 <= offset < n:
            raise OffsetOutOfRange(f"offset {offset} not in [0, {n})")
        ts, payload = self._entries[offset]
        return LogEntry(offset, ts, payload)

    def last_ingestion_ts(self) -> int | None:
        if not self._entries:
            return None
        return self._entries[-1][0]


class TopicCatalog:
    """Named collection of topic logs."""

    def __init__(self):
        self._topics: dict[str, TopicLog] = {}
        self._lock = threading.Lock()

    def create_topic(self, name: str) -> TopicLog:
        with self._lock:
            if name in self._topics:
                raise DuplicateTopic(name)
            log = TopicLog(name)
            self._topics[name] = log
            return log

    def topic(self, name: str) -> TopicLog:
        try:
            return self._topics[name]
        except KeyError:
            raise MissingTopic(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self._topics

    def names(self) -> list[str]:
        return sorted(self._topics)


def topic_name(prefix: str, run_id: str, stream: str) -> str:
    """Harness naming convention: {prefix}-{run_id}-{stream}."""
    return f"{prefix}-{run_id}-{stream}"


def persist(catalog: TopicCatalog, directory) -> None:
    """Write every topic to `directory`, one framed file per topic."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in catalog.names():
        log = catalog.topic(name)
        entries = log.read_from(0)
        with open(directory / f"{name}.log", "wb") as fh:
            for e in entries:
                fh.write(_FRAME_HEADER.pack(len(e.payload), e.ingestion_ts))
                fh.write(e.payload)


def load(directory) -> TopicCatalog:
    """Reload a persisted catalog; inverse of persist."""
    directory = Path(directory)
    if not directory.is_dir():
        raise StorageError(f"no such directory: {directory}")
    catalog = TopicCatalog()
    for path in sorted(directory.glob("*.log")):
        log = catalog.create_topic(path.stem)
        data = path.read_bytes()
        pos = 0
        while pos < len(data):
            if pos + _FRAME_HEADER.size > len(data):
                raise StorageError(f"truncated frame header in {path}")
            length, ts = _FRAME_HEADER.unpack_from(data, pos)
            pos += _FRAME_HEADER.size
            if pos + length > len(data):
                raise StorageError(f"truncated payload in {path}")
            log._entries.append((ts, data[pos:pos + length]))
            pos += length
    return catalog
