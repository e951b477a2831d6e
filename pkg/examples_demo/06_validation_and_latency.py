"""Validate a run against independent oracles and measure latency.

The validator never trusts the engine: it recomputes every query's
expected output from the persisted input logs with brute-force
implementations, compares order-sensitively, and derives per-record
latencies from broker ingestion timestamps (result append time minus
the anchoring input record's append time; for the persistence query,
the row's database update timestamp).  Aggregates are min / max / mean
and the nearest-rank 90th percentile, in seconds to three decimals.
"""

import tempfile
from pathlib import Path

from streambench import broker, cli, store, validator
from streambench.config import RunConfig
from streambench.engine import TopicNames

out = tempfile.mkdtemp(prefix="streambench-demo-")
cfg = RunConfig(run_id="demo", seed=3, input_rate=1000, duration_s=3,
                queries=(1, 3, 5), clock="logical", output_dir=out)
cli.cmd_generate(cfg)
cli.cmd_run(cfg)

catalog = broker.load(cfg.run_dir / "topics")
names = TopicNames.for_run(cfg.topic_prefix, cfg.run_id)
db_snapshot = store.load_from_directory(cfg.run_dir / "db-snapshot")
db_final = store.load_from_directory(cfg.run_dir / "results" / "db")

# oracle comparison, query by query
for q in (1, 3):
    expected = validator.recompute_expected(q, catalog, names,
                                            db_snapshot=db_snapshot)
    actual = validator.actual_outputs(catalog, names, q)
    report = validator.compare(expected, actual, q)
    print(f"Q{q}: {report.verdict} "
          f"({report.matched_count}/{report.expected_count} matched)")

q5_expected = validator.expected_q5_rows(catalog, names, db_snapshot)
print(f"Q5: {validator.compare_q5(q5_expected, db_final).verdict} "
      f"({len(q5_expected)} rows with production timestamps)")

# tamper with one output line and watch the verdict flip
actual = [t[2] for t in validator.actual_outputs(catalog, names, 3)]
actual[0] = "9" + actual[0]
expected = validator.recompute_expected(3, catalog, names)
print(f"Q3 after perturbing one record: "
      f"{validator.compare(expected, actual, 3).verdict}")

# latency statistics
print()
for q in (1, 3, 5):
    samples = validator.compute_latencies(q, catalog, names, db_final=db_final)
    stats = validator.latency_stats(samples)
    print(f"Q{q} latency over {stats.count} outputs: "
          f"min={stats.min_s}s max={stats.max_s}s "
          f"mean={stats.mean_s}s p90={stats.p90_s}s")

# the CLI's validate step writes the same numbers as reports
outcome = cli.cmd_validate(cfg)
print(f"\ncmd_validate overall: "
      f"{'PASS' if outcome['passed'] else 'FAIL'}; reports in "
      f"{cfg.run_dir / 'results'}")
print((cfg.run_dir / "results" / "summary.txt").read_text())
