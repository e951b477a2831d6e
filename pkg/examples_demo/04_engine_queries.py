"""Run the reference engine's five continuous queries over a small run.

  Q1  per-second tumbling event-time window over sensor1's mf01:
      average (3 decimals), min, max, count
  Q2  stochastic outlier selection over (mf01, mf02) in 500-record
      count windows; records with outlier probability >= 0.5 are emitted
      with the probability appended (2 decimals)
  Q3  machine-power errors: records with mf01 > 14963
  Q4  downtime filter: records with mf03 < 8105 from both sensor
      streams, merged by ingestion time, whose event time falls outside
      the workplace's recorded downtime interval
  Q5  persistence: production begin/end events update start/end
      timestamps on the matching PRODUCTION_ORDER_LINE row
"""

import tempfile
from pathlib import Path

from streambench.broker import TopicCatalog
from streambench.clock import LogicalClock
from streambench.datagen import GenConfig, generate_dataset
from streambench.engine import Engine, TopicNames, decode_output
from streambench.sender import SenderConfig, import_business, stream
from streambench.store import BusinessDb

out = Path(tempfile.mkdtemp(prefix="streambench-demo-"))
gen = GenConfig(seed=5, sensor_count=3000)
generate_dataset(gen, out)

names = TopicNames.for_run("esp", "demo")
catalog = TopicCatalog()
for t in names.all_input_topics():
    catalog.create_topic(t)
for q in (1, 2, 3, 4):
    catalog.create_topic(names.outputs[q])

db = BusinessDb()
import_business(db, out / "business")

clock = LogicalClock(gen.base_ts_ms)
engine = Engine({1, 2, 3, 4, 5}, catalog, db, clock, names)

cfg = SenderConfig(
    input_rate=1500, duration_s=2,
    topics={"sensor1": names.sensor1, "sensor2": names.sensor2,
            "times": names.times},
)
files = {n: out / "streams" / f"{n}.csv" for n in cfg.topics}
stream(cfg, files, catalog, clock)
summary = engine.drain()

print(f"inputs consumed: {summary.consumed}")
print(f"outputs per query: {summary.outputs}\n")

for q in (1, 2, 3, 4):
    entries = catalog.topic(names.outputs[q]).read_from(0, 2)
    print(f"Q{q}: {len(catalog.topic(names.outputs[q]))} outputs, first:")
    for e in entries:
        rec = decode_output(e.payload)
        line = rec["line"]
        shown = line if len(line) <= 72 else line[:69] + "..."
        print(f"  anchored to {rec['anchor_topic']}@{rec['anchor_offset']}: {shown}")

updated = [r for r in db.table_rows("PRODUCTION_ORDER_LINE")
           if r["pol_start_ts"] is not None or r["pol_end_ts"] is not None]
print(f"\nQ5 touched {len(updated)} production order lines; first:")
r = updated[0]
print(f"  order={r['pol_o_id']} line={r['pol_ol_number']} pol={r['pol_number']} "
      f"start={r['pol_start_ts']} end={r['pol_end_ts']}")
