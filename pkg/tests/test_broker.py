import threading

import pytest

from streambench import broker
from streambench.broker import TopicCatalog
from streambench.clock import LogicalClock
from streambench.errors import DuplicateTopic, OffsetOutOfRange, StorageError


def test_create_topic_empty():
    catalog = TopicCatalog()
    log = catalog.create_topic("esp-r1-sensor1")
    assert len(log) == 0
    assert catalog.names() == ["esp-r1-sensor1"]


def test_create_duplicate_topic():
    catalog = TopicCatalog()
    catalog.create_topic("t")
    with pytest.raises(DuplicateTopic):
        catalog.create_topic("t")


def test_catalog_lists_created_names():
    catalog = TopicCatalog()
    for name in ("b", "a", "c"):
        catalog.create_topic(name)
    assert catalog.names() == ["a", "b", "c"]


def test_append_returns_offset_zero():
    log = TopicCatalog().create_topic("t")
    assert log.append(b"x", LogicalClock(5)) == 0


def test_ingestion_ts_non_decreasing():
    log = TopicCatalog().create_topic("t")
    clock = LogicalClock(10)
    log.append(b"a", clock)
    clock.advance_to_ms(20)
    log.append(b"b", clock)
    entries = log.read_from(0)
    assert [e.ingestion_ts for e in entries] == [10, 20]


def test_10000_appends_contiguous_offsets():
    log = TopicCatalog().create_topic("t")
    clock = LogicalClock(0)
    offsets = [log.append(str(i).encode(), clock) for i in range(10_000)]
    assert offsets == list(range(10_000))
    # exhaustive scan oracle
    scanned = [e.offset for e in log.read_from(0)]
    assert scanned == list(range(10_000))


def test_read_from_semantics():
    log = TopicCatalog().create_topic("t")
    clock = LogicalClock(0)
    payloads = [f"p{i}".encode() for i in range(5)]
    for p in payloads:
        log.append(p, clock)
    assert [e.payload for e in log.read_from(0)] == payloads
    assert log.read_from(5, 3) == []
    assert [e.payload for e in log.read_from(2, 2)] == payloads[2:4]
    with pytest.raises(OffsetOutOfRange):
        log.read_from(6)


def test_concurrent_appenders_preserve_per_appender_order():
    log = TopicCatalog().create_topic("t")
    clock = LogicalClock(0)
    n_threads, per_thread = 8, 500

    def worker(tid):
        for i in range(per_thread):
            log.append(f"{tid}:{i}".encode(), clock)

    threads = [threading.Thread(target=worker, args=(t,)) for t in range(n_threads)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    entries = log.read_from(0)
    assert [e.offset for e in entries] == list(range(n_threads * per_thread))
    # the observed total order must be consistent with each appender's order
    seen = {t: -1 for t in range(n_threads)}
    for e in entries:
        tid, i = (int(v) for v in e.payload.decode().split(":"))
        assert i == seen[tid] + 1
        seen[tid] = i


def test_persist_load_empty(tmp_path):
    catalog = TopicCatalog()
    broker.persist(catalog, tmp_path / "logs")
    loaded = broker.load(tmp_path / "logs")
    assert loaded.names() == []


def test_persist_load_roundtrip(tmp_path):
    catalog = TopicCatalog()
    clock = LogicalClock(0)
    for t in range(3):
        log = catalog.create_topic(f"topic{t}")
        for i in range(1000):
            clock.advance_to_ms(i)
            log.append(f"{t}-{i}".encode(), clock)
    broker.persist(catalog, tmp_path / "logs")
    loaded = broker.load(tmp_path / "logs")
    assert loaded.names() == catalog.names()
    for name in catalog.names():
        original = catalog.topic(name).read_from(0)
        reloaded = loaded.topic(name).read_from(0)
        assert original == reloaded  # deep equality incl. timestamps


def test_load_missing_directory(tmp_path):
    with pytest.raises(StorageError):
        broker.load(tmp_path / "nope")


def test_topic_name_convention():
    assert broker.topic_name("esp", "r1", "sensor1") == "esp-r1-sensor1"
