import json
import random

import pytest

from streambench import validator
from streambench.broker import TopicCatalog
from streambench.clock import LogicalClock
from streambench.engine import Engine, TopicNames, encode_output
from streambench.errors import DanglingAnchor, EmptySamples, MissingTopic
from streambench.validator import (
    LatencySample,
    aggregate,
    compare,
    compute_latencies,
    emit_reports,
    latency_stats,
    recompute_expected,
)

from conftest import make_sensor_line
from test_engine import Rig, tiny_db


def test_recompute_q3_filters_in_order():
    rig = Rig({3})
    lines = [make_sensor_line(ts=i, index=i, mf01=20000 if i in (2, 7) else 5)
             for i in range(10)]
    rig.feed("sensor1", lines)
    expected = recompute_expected(3, rig.catalog, rig.names)
    assert [e[2] for e in expected] == [lines[2], lines[7]]
    assert [e[1] for e in expected] == [2, 7]


def test_recompute_q1_empty_log():
    rig = Rig({1})
    assert recompute_expected(1, rig.catalog, rig.names) == []


def test_recompute_missing_topic():
    names = TopicNames.for_run("t", "y")
    with pytest.raises(MissingTopic):
        recompute_expected(3, TopicCatalog(), names)


def test_recompute_q1_matches_engine():
    rig = Rig({1})
    rng = random.Random(9)
    rig.feed("sensor1", [make_sensor_line(ts=i * 137, index=i,
                                          mf01=rng.randrange(20000))
                         for i in range(200)])
    rig.engine.drain()
    expected = recompute_expected(1, rig.catalog, rig.names)
    assert [e[2] for e in expected] == rig.lines(1)


def test_recompute_q4_matches_engine():
    rig = Rig({4}, db=tiny_db(downtime=(5_000, 9_000)))
    rng = random.Random(10)
    s1 = [make_sensor_line(ts=i * 100, index=i, mf03=rng.randrange(16000))
          for i in range(150)]
    s2 = [make_sensor_line(ts=i * 100, index=i, mf03=rng.randrange(16000))
          for i in range(150)]
    rig.feed("sensor1", s1)
    rig.feed("sensor2", s2)
    rig.engine.drain()
    expected = recompute_expected(4, rig.catalog, rig.names, db_snapshot=rig.db)
    assert [e[2] for e in expected] == rig.lines(4)
    assert len(expected) > 0


def test_compare_identical_pass():
    report = compare(["a", "b"], ["a", "b"], 3)
    assert report.verdict == "PASS" and report.mismatches == []


def test_compare_missing_last_fails():
    report = compare(["a", "b"], ["a"], 3)
    assert report.verdict == "FAIL"
    assert report.expected_count - report.actual_count == 1


def test_compare_q2_rounding_boundary():
    line = make_sensor_line(ts=0)
    report = compare([f"{line},0.50"], [f"{line},0.4951"], 2)
    assert report.verdict == "PASS"  # 0.4951 rounds half-up to 0.50
    report = compare([f"{line},0.50"], [f"{line},0.4949"], 2)
    assert report.verdict == "FAIL"


def test_latency_subtraction():
    sample = LatencySample(3, 0, 1000, 1040)
    assert sample.latency_ms == 40
    stats = latency_stats([sample])
    assert stats.min_s == stats.max_s == stats.mean_s == stats.p90_s == 0.040


def test_no_outputs_stats_na():
    stats = latency_stats([])
    assert stats.count == 0
    assert stats.min_s is stats.max_s is stats.mean_s is stats.p90_s is None


def test_aggregate_empty_raises():
    with pytest.raises(EmptySamples):
        aggregate([])


def test_aggregate_1_to_10_seconds():
    samples = [LatencySample(1, i, 0, (i + 1) * 1000) for i in range(10)]
    mn, mx, mean, p90 = aggregate(samples)
    assert (mn, mx, mean, p90) == (1.0, 10.0, 5.5, 9.0)


def test_aggregate_single_sample():
    mn, mx, mean, p90 = aggregate([LatencySample(1, 0, 0, 5000)])
    assert mn == mx == mean == p90 == 5.0


def test_aggregate_constant_samples():
    samples = [LatencySample(1, i, 0, 250) for i in range(7)]
    mn, mx, mean, p90 = aggregate(samples)
    assert mn == mx == mean == p90 == 0.25


def brute_force_p90(values):
    """Smallest v such that at least 90% of the samples are <= v."""
    for v in sorted(values):
        if sum(1 for x in values if x <= v) >= 0.9 * len(values):
            return v
    raise AssertionError("unreachable")


def test_p90_nearest_rank_matches_brute_force():
    rng = random.Random(11)
    for _ in range(300):
        n = rng.randrange(1, 60)
        values = [rng.randrange(0, 10_000) for _ in range(n)]
        samples = [LatencySample(1, i, 0, v) for i, v in enumerate(values)]
        _, _, _, p90 = aggregate(samples)
        assert p90 == round(brute_force_p90(values) / 1000.0, 3)


def test_compute_latencies_engine_run():
    rig = Rig({3})
    rig.feed("sensor1", [make_sensor_line(ts=i, index=i, mf01=20000)
                         for i in range(5)])
    rig.clock.advance_to_ms(1000)
    rig.engine.drain()
    samples = compute_latencies(3, rig.catalog, rig.names)
    assert len(samples) == 5
    assert all(s.latency_ms >= 0 for s in samples)
    assert samples[0].input_ts == rig.catalog.topic(rig.names.sensor1).entry(0).ingestion_ts


def test_compute_latencies_dangling_anchor():
    rig = Rig({3})
    out = rig.catalog.topic(rig.names.outputs[3])
    out.append(encode_output(3, "x", rig.names.sensor1, 7), rig.clock)
    with pytest.raises(DanglingAnchor):
        compute_latencies(3, rig.catalog, rig.names)


def test_q5_latencies_via_update_ts():
    rig = Rig({5})
    rig.feed("times", ["1,1,1,0", "1,1,2,0", "1,1,1,1"])
    rig.clock.advance_to_ms(500)
    rig.engine.drain()
    samples = compute_latencies(5, rig.catalog, rig.names, db_final=rig.db)
    assert len(samples) == 2  # two touched rows
    assert all(s.latency_ms >= 0 for s in samples)
    # the (1,1,1) row anchors to its last (end) record, offset 2
    offsets = sorted(s.anchor_offset for s in samples)
    assert offsets == [1, 2]


def test_q5_expected_rows_last_writer_wins():
    rig = Rig({5})
    rig.feed("times", ["1,1,1,0", "1,1,1,0", "1,1,1,1"])
    state = validator.expected_q5_rows(rig.catalog, rig.names, rig.db)
    start, end, last_offset = state[(1, 1, 1)]
    assert start == rig.catalog.topic(rig.names.times).entry(1).ingestion_ts
    assert end == rig.catalog.topic(rig.names.times).entry(2).ingestion_ts
    assert last_offset == 2


def test_emit_reports_layout(tmp_path):
    samples = {1: [LatencySample(1, 0, 0, 1500)], 3: []}
    reports = [compare(["x"], ["x"], 1), compare([], [], 3)]
    paths = emit_reports(reports, samples, tmp_path)
    assert (tmp_path / "latencies-q1.csv").is_file()
    assert (tmp_path / "latencies-q3.csv").is_file()
    csv1 = (tmp_path / "latencies-q1.csv").read_text().splitlines()
    assert csv1[0] == "anchor_offset,input_ts_ms,result_ts_ms,latency_ms"
    assert len(csv1) - 1 == 1  # row count equals sample count
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["overall_verdict"] == "PASS"
    # summary parses back to the same aggregates
    assert summary["queries"]["1"]["latency"]["p90_s"] == 1.5
    assert summary["queries"]["3"]["latency"]["min_s"] is None
    assert "n/a" in (tmp_path / "summary.txt").read_text()
    assert len(paths) == 4
