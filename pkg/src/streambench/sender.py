"""Data sender: business-data import plus rate-controlled publishing.

Publishes each streaming CSV to its broker topic at a constant
per-stream rate.  Pacing is per record with no bursts: record i of a
stream is scheduled at start + i/rate.  With the real clock the sender
sleeps toward each deadline; with the logical clock it advances the
clock along the merged schedule of all streams, which makes ingestion
timestamps exact and runs reproducible.
"""

from __future__ import annotations

import heapq
import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .broker import TopicCatalog
from .clock import LogicalClock
from .errors import StorageError, TopicMissing
from .store import TABLE_ORDER, BusinessDb


@dataclass
class SenderConfig:
    input_rate: float
    duration_s: float
    topics: dict  # stream name -> topic name

    def __post_init__(self):
        if self.input_rate < 1:
            raise ValueError("input_rate must be >= 1")
        if self.duration_s < 1:
            raise ValueError("duration_s must be >= 1")


@dataclass
class SendSummary:
    sent: dict = field(default_factory=dict)
    achieved_rate: float = 0.0
    wall_time_s: float = 0.0

    def to_json(self) -> str:
        return json.dumps({
            "sent": self.sent,
            "achieved_rate": round(self.achieved_rate, 3),
            "wall_time_s": round(self.wall_time_s, 3),
        }, sort_keys=True)


def import_business(db: BusinessDb, directory) -> dict:
    """Import all business tables from `directory`; returns per-table counts."""
    directory = Path(directory)
    counts = {}
    for table in TABLE_ORDER:
        path = directory / f"{table}.csv"
        if not path.is_file():
            raise StorageError(f"missing table file for {table}: {path}")
        counts[table] = db.import_csv(
            table, path.read_text(encoding="utf-8").splitlines()
        )
    return counts


def _schedule_offsets_us(count: int, rate: float) -> list[int]:
    if float(rate).is_integer():
        r = int(rate)
        return [(i * 1_000_000) // r for i in range(count)]
    return [round(i * 1_000_000 / rate) for i in range(count)]


def _load_stream_lines(source) -> list[str]:
    if isinstance(source, (str, Path)):
        return Path(source).read_text(encoding="utf-8").splitlines()
    return list(source)


def stream(cfg: SenderConfig, files: dict, catalog: TopicCatalog,
           clock) -> SendSummary:
    """Publish every configured stream; returns counts and achieved rate.

    `files` maps stream name to a CSV path (or line list).  Stops per
    stream after duration * rate records or file exhaustion, whichever
    comes first.
    """
    streams = []
    for name in sorted(files):
        topic = cfg.topics.get(name)
        if topic is None or topic not in catalog:
            raise TopicMissing(f"stream {name!r} has no topic (wanted {topic!r})")
        lines = _load_stream_lines(files[name])
        cap = int(cfg.input_rate * cfg.duration_s)
        streams.append((name, catalog.topic(topic), lines[:cap]))

    if isinstance(clock, LogicalClock):
        return _stream_logical(cfg, streams, clock)
    return _stream_real(cfg, streams, clock)


def _stream_logical(cfg, streams, clock: LogicalClock) -> SendSummary:
    start_us = clock.now_us()
    heap = []
    for idx, (name, log, lines) in enumerate(streams):
        offsets = _schedule_offsets_us(len(lines), cfg.input_rate)
        if lines:
            heap.append((start_us + offsets[0], idx, 0, offsets))
    heapq.heapify(heap)
    sent = {name: 0 for name, _, _ in streams}
    while heap:
        t_us, idx, i, offsets = heapq.heappop(heap)
        name, log, lines = streams[idx]
        clock.advance_to_us(t_us)
        log.append(lines[i].encode("utf-8"), clock)
        sent[name] += 1
        if i + 1 < len(lines):
            heapq.heappush(heap, (start_us + offsets[i + 1], idx, i + 1, offsets))
    elapsed_s = (clock.now_us() - start_us) / 1e6
    total = sum(sent.values())
    return SendSummary(sent, total / elapsed_s if elapsed_s > 0 else 0.0,
                       elapsed_s)


def _stream_real(cfg, streams, clock) -> SendSummary:
    sent = {name: 0 for name, _, _ in streams}

    def pace(name, log, lines):
        start_us = clock.now_us()
        interval = 1_000_000 / cfg.input_rate
        for i, line in enumerate(lines):
            clock.sleep_until_us(int(start_us + i * interval))
            log.append(line.encode("utf-8"), clock)
            sent[name] += 1

    t0 = time.monotonic()
    threads = [
        threading.Thread(target=pace, args=s, name=f"sender-{s[0]}")
        for s in streams
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    elapsed = time.monotonic() - t0
    total = sum(sent.values())
    return SendSummary(sent, total / elapsed if elapsed > 0 else 0.0, elapsed)
