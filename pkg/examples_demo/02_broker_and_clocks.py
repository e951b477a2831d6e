"""The append-only topic log and the two clocks that drive it.

The broker is a set of single-partition topics.  Each append assigns the
next contiguous offset and stamps the record with the clock's current
millisecond — the ingestion timestamp that all latency measurement is
based on.  Topics can be persisted to disk and loaded back exactly.

Two interchangeable clocks exist:

  * RealClock  — wall time, for throughput-style runs;
  * LogicalClock — starts at a chosen epoch and only moves when told to,
    which makes entire benchmark runs reproducible to the byte.
"""

import tempfile
from pathlib import Path

from streambench.broker import TopicCatalog, load, persist, topic_name
from streambench.clock import LogicalClock

clock = LogicalClock(start_ms=1_000_000)
catalog = TopicCatalog()

name = topic_name("esp", "demo", "sensor1")
log = catalog.create_topic(name)
print(f"created topic {name!r}")

for i in range(5):
    clock.advance_to_ms(1_000_000 + i * 250)
    offset = log.append(f"record-{i}".encode(), clock)
    print(f"  appended offset {offset} at ingestion_ts {log.entry(offset).ingestion_ts}")

print("\nreading from offset 2:")
for entry in log.read_from(2):
    print(f"  offset={entry.offset} ts={entry.ingestion_ts} "
          f"payload={entry.payload.decode()}")

# persistence round-trip
directory = Path(tempfile.mkdtemp(prefix="streambench-demo-"))
persist(catalog, directory)
restored = load(directory)
entries = restored.topic(name).read_from(0)
print(f"\npersisted to {directory} and loaded back: "
      f"{len(entries)} entries, last payload {entries[-1].payload.decode()!r}")
