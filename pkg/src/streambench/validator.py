"""Post-run validation and latency calculation.

Recomputes every query's expected output from the persisted input logs
with deliberately independent (brute-force) implementations, compares
them order-sensitively with the engine's output, and computes per-record
latencies from broker ingestion timestamps (db update timestamps for the
persistence query).  Aggregates are min / max / mean / nearest-rank
90th percentile, reported in seconds to three decimals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

import numpy as np

from .broker import TopicCatalog
from .engine import decode_output
from .errors import (
    DanglingAnchor,
    EmptySamples,
    MissingTopic,
    OffsetOutOfRange,
    UnknownWorkplace,
)
from .model import parse_production_time, parse_sensor
from .sos import SosParams
from .store import BusinessDb

MISMATCH_LIMIT = 10


@dataclass
class QueryReport:
    query_id: int
    expected_count: int
    actual_count: int
    matched_count: int
    mismatches: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        ok = self.matched_count == self.expected_count == self.actual_count
        return "PASS" if ok else "FAIL"


@dataclass
class LatencySample:
    query_id: int
    anchor_offset: int
    input_ts: int
    result_ts: int

    @property
    def latency_ms(self) -> int:
        return self.result_ts - self.input_ts


@dataclass
class LatencyStats:
    count: int
    min_s: float | None
    max_s: float | None
    mean_s: float | None
    p90_s: float | None


# -- independent SOS reference ----------------------------------------


def sos_reference(points, perplexity: float, tolerance: float = 1e-5,
                  max_iter: int = 100) -> list[float]:
    """Dense brute-force stochastic outlier selection, one point at a time.

    Bisects log2(variance) per point until the binding distribution's
    perplexity matches the target, then accumulates
    phi(j) = prod_{i != j} (1 - b_{ij}).
    """
    pts = [(float(x), float(y)) for x, y in points]
    n = len(pts)
    one_minus = [[1.0] * n for _ in range(n)]

    for i in range(n):
        xi, yi = pts[i]
        d2 = np.array([(xi - xj) ** 2 + (yi - yj) ** 2 for xj, yj in pts])

        def row_binding(log2_var: float):
            variance = 2.0 ** log2_var
            with np.errstate(under="ignore"):
                a = np.exp(-d2 / (2.0 * variance))
            a[i] = 0.0
            s = a.sum()
            if s <= 0.0:
                return np.zeros(n), 1.0
            b = a / s
            nz = b[b > 0.0]
            entropy = -(nz * np.log2(nz)).sum()
            return b, 2.0 ** entropy

        lo, hi = -100.0, 100.0
        for _ in range(max_iter):
            if hi - lo < tolerance:
                break
            mid = 0.5 * (lo + hi)
            _, perp = row_binding(mid)
            if perp > perplexity:
                hi = mid
            else:
                lo = mid
        b, _ = row_binding(0.5 * (lo + hi))
        for j in range(n):
            if j != i:
                one_minus[j][i] = 1.0 - b[j]

    return [math.prod(one_minus[j]) for j in range(n)]


# -- expected-output recomputation ------------------------------------


def _round3(total: int, count: int) -> str:
    return str((Decimal(total) / Decimal(count))
               .quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))


def _round2(value: float) -> str:
    return str(Decimal(repr(float(value))).quantize(Decimal("0.01"),
                                                    rounding=ROUND_HALF_UP))


def _topic_lines(catalog: TopicCatalog, name: str):
    if name not in catalog:
        raise MissingTopic(name)
    return [(e.offset, e.ingestion_ts, e.payload.decode("utf-8"))
            for e in catalog.topic(name).read_from(0)]


def recompute_expected(query_id: int, catalog: TopicCatalog, names,
                       db_snapshot: BusinessDb | None = None,
                       sos_params: SosParams | None = None,
                       window_ms: int = 1000, count_window: int = 500):
    """Expected (anchor_topic, anchor_offset, line) sequence for q1..q4."""
    if query_id == 1:
        return _expected_q1(catalog, names, window_ms)
    if query_id == 2:
        return _expected_q2(catalog, names, sos_params or SosParams(), count_window)
    if query_id == 3:
        return _expected_q3(catalog, names)
    if query_id == 4:
        return _expected_q4(catalog, names, db_snapshot)
    raise ValueError(f"no recomputation for query {query_id}")


def _expected_q1(catalog, names, window_ms):
    buckets: dict[int, list] = {}
    for offset, _, line in _topic_lines(catalog, names.sensor1):
        rec = parse_sensor(line)
        wid = rec.ts // window_ms
        bucket = buckets.setdefault(wid, [])
        bucket.append((rec.mf01, offset))
    out = []
    for wid in sorted(buckets):
        values = [v for v, _ in buckets[wid]]
        anchor = buckets[wid][-1][1]
        line = f"{_round3(sum(values), len(values))},{min(values)},{max(values)},{len(values)}"
        out.append((names.sensor1, anchor, line))
    return out


def _expected_q2(catalog, names, params: SosParams, count_window):
    rows = _topic_lines(catalog, names.sensor1)
    out = []
    for start in range(0, len(rows) - count_window + 1, count_window):
        window = rows[start:start + count_window]
        points = []
        for _, _, line in window:
            rec = parse_sensor(line)
            points.append((rec.mf01, rec.mf02))
        if len(set(points)) == 1 and len(points) > 2:
            continue  # degenerate window: engine emits nothing
        phi = sos_reference(points, params.perplexity, params.tolerance,
                            params.max_iter)
        anchor = window[-1][0]
        for (offset, _, line), p in zip(window, phi):
            if p >= 0.5:
                out.append((names.sensor1, anchor, f"{line},{_round2(p)}"))
    return out


def _expected_q3(catalog, names):
    out = []
    for offset, _, line in _topic_lines(catalog, names.sensor1):
        if parse_sensor(line).mf01 > 14963:
            out.append((names.sensor1, offset, line))
    return out


def _expected_q4(catalog, names, db_snapshot):
    merged = []
    for idx, topic in enumerate((names.sensor1, names.sensor2)):
        for offset, ing_ts, line in _topic_lines(catalog, topic):
            merged.append((ing_ts, idx, offset, topic, line))
    merged.sort(key=lambda t: (t[0], t[1], t[2]))
    out = []
    for _, _, offset, topic, line in merged:
        rec = parse_sensor(line)
        if rec.mf03 >= 8105:
            continue
        try:
            start, end = db_snapshot.lookup_downtime(rec.workplace_id)
        except UnknownWorkplace:
            continue  # engine routes unknown workplaces to dead letters
        if rec.ts > end or rec.ts < start:
            out.append((topic, offset, line))
    return out


def expected_q5_rows(catalog: TopicCatalog, names,
                     db_snapshot: BusinessDb) -> dict:
    """Final (start_ts, end_ts, anchor_offset) per production order line
    after replaying the times topic with last-writer-wins semantics."""
    known = {
        (r["pol_o_id"], r["pol_ol_number"], r["pol_number"])
        for r in db_snapshot.table_rows("PRODUCTION_ORDER_LINE")
    }
    state: dict = {}
    for offset, ing_ts, line in _topic_lines(catalog, names.times):
        rec = parse_production_time(line)
        key = (rec.pt_o_id, rec.pt_ol_number, rec.pt_pol_number)
        if key not in known:
            continue
        start, end, _ = state.get(key, (None, None, None))
        if rec.pt_is_end:
            end = ing_ts
        else:
            start = ing_ts
        state[key] = (start, end, offset)
    return state


# -- comparison --------------------------------------------------------


def actual_outputs(catalog: TopicCatalog, names, query_id: int):
    """Decoded engine outputs for q1..q4 in topic order."""
    topic = names.outputs[query_id]
    if topic not in catalog:
        raise MissingTopic(topic)
    out = []
    for e in catalog.topic(topic).read_from(0):
        rec = decode_output(e.payload)
        out.append((rec["anchor_topic"], rec["anchor_offset"], rec["line"]))
    return out


def _q2_key(line: str):
    body, prob = line.rsplit(",", 1)
    return body, str(Decimal(prob).quantize(Decimal("0.01"),
                                            rounding=ROUND_HALF_UP))


def compare(expected, actual, query_id: int) -> QueryReport:
    """Order-sensitive element-wise comparison of payload lines."""
    exp_lines = [t[2] if isinstance(t, tuple) else t for t in expected]
    act_lines = [t[2] if isinstance(t, tuple) else t for t in actual]
    matched = 0
    mismatches = []
    for i in range(max(len(exp_lines), len(act_lines))):
        e = exp_lines[i] if i < len(exp_lines) else None
        a = act_lines[i] if i < len(act_lines) else None
        if e is not None and a is not None:
            equal = _q2_key(e) == _q2_key(a) if query_id == 2 else e == a
        else:
            equal = False
        if equal:
            matched += 1
        elif len(mismatches) < MISMATCH_LIMIT:
            mismatches.append({"index": i, "expected": e, "actual": a})
    return QueryReport(query_id, len(exp_lines), len(act_lines), matched,
                       mismatches)


def compare_q5(expected_rows: dict, db_final: BusinessDb) -> QueryReport:
    """Row-state comparison of PRODUCTION_ORDER_LINE timestamps."""
    actual = {}
    for row in db_final.table_rows("PRODUCTION_ORDER_LINE"):
        if row["pol_start_ts"] is not None or row["pol_end_ts"] is not None:
            key = (row["pol_o_id"], row["pol_ol_number"], row["pol_number"])
            actual[key] = (row["pol_start_ts"], row["pol_end_ts"])
    matched = 0
    mismatches = []
    for key in sorted(set(expected_rows) | set(actual)):
        exp = expected_rows.get(key)
        exp_state = (exp[0], exp[1]) if exp else None
        act_state = actual.get(key)
        if exp_state == act_state:
            matched += 1
        elif len(mismatches) < MISMATCH_LIMIT:
            mismatches.append({"key": list(key), "expected": exp_state,
                               "actual": act_state})
    return QueryReport(5, len(expected_rows), len(actual), matched, mismatches)


# -- latency -----------------------------------------------------------


def compute_latencies(query_id: int, catalog: TopicCatalog, names,
                      db_final: BusinessDb | None = None) -> list[LatencySample]:
    """One sample per output record; anchors resolved against the logs."""
    if query_id == 5:
        return _q5_latencies(catalog, names, db_final)
    topic = names.outputs[query_id]
    if topic not in catalog:
        raise MissingTopic(topic)
    samples = []
    for e in catalog.topic(topic).read_from(0):
        rec = decode_output(e.payload)
        try:
            anchor = catalog.topic(rec["anchor_topic"]).entry(rec["anchor_offset"])
        except (MissingTopic, OffsetOutOfRange):
            raise DanglingAnchor(
                f"q{query_id} output at offset {e.offset} references "
                f"{rec['anchor_topic']}@{rec['anchor_offset']}"
            ) from None
        samples.append(LatencySample(query_id, anchor.offset,
                                     anchor.ingestion_ts, e.ingestion_ts))
    return samples


def _q5_latencies(catalog, names, db_final: BusinessDb):
    last_offset: dict = {}
    for e in catalog.topic(names.times).read_from(0):
        rec = parse_production_time(e.payload.decode("utf-8"))
        last_offset[(rec.pt_o_id, rec.pt_ol_number, rec.pt_pol_number)] = e
    samples = []
    for row in db_final.scan_updates("PRODUCTION_ORDER_LINE", 0):
        anchor = last_offset.get(row.key)
        if anchor is None:
            raise DanglingAnchor(f"updated row {row.key} has no times record")
        samples.append(LatencySample(5, anchor.offset, anchor.ingestion_ts,
                                     row.update_ts))
    return samples


def aggregate(samples) -> tuple[float, float, float, float]:
    """(min, max, mean, nearest-rank p90) in seconds, 3 decimals."""
    latencies = sorted(s.latency_ms for s in samples)
    if not latencies:
        raise EmptySamples("no latency samples")
    n = len(latencies)
    p90 = latencies[math.ceil(0.9 * n) - 1]
    mean = sum(latencies) / n
    to_s = lambda ms: round(ms / 1000.0, 3)
    return (to_s(latencies[0]), to_s(latencies[-1]), to_s(mean), to_s(p90))


def latency_stats(samples) -> LatencyStats:
    if not samples:
        return LatencyStats(0, None, None, None, None)
    mn, mx, mean, p90 = aggregate(samples)
    return LatencyStats(len(samples), mn, mx, mean, p90)


# -- reports -----------------------------------------------------------


def emit_reports(reports: list[QueryReport], samples_by_query: dict,
                 directory) -> list[Path]:
    """Write per-query latency CSVs plus a summary (JSON and table)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    summary = {"queries": {}, "overall_verdict": "PASS"}

    for report in reports:
        qid = report.query_id
        samples = samples_by_query.get(qid, [])
        csv_path = directory / f"latencies-q{qid}.csv"
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write("anchor_offset,input_ts_ms,result_ts_ms,latency_ms\n")
            for s in samples:
                fh.write(f"{s.anchor_offset},{s.input_ts},{s.result_ts},"
                         f"{s.latency_ms}\n")
        paths.append(csv_path)
        stats = latency_stats(samples)
        summary["queries"][str(qid)] = {
            "verdict": report.verdict,
            "expected": report.expected_count,
            "actual": report.actual_count,
            "matched": report.matched_count,
            "mismatches": report.mismatches,
            "latency": {
                "count": stats.count,
                "min_s": stats.min_s, "max_s": stats.max_s,
                "mean_s": stats.mean_s, "p90_s": stats.p90_s,
            },
            "latency_csv": csv_path.name,
        }
        if report.verdict != "PASS":
            summary["overall_verdict"] = "FAIL"

    json_path = directory / "summary.json"
    json_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    paths.append(json_path)

    txt_path = directory / "summary.txt"
    lines = [f"{'query':>5} {'verdict':>8} {'outputs':>8} "
             f"{'min_s':>8} {'max_s':>8} {'mean_s':>8} {'p90_s':>8}"]
    for report in reports:
        q = summary["queries"][str(report.query_id)]
        lat = q["latency"]
        fmt = lambda v: "n/a" if v is None else f"{v:.3f}"
        lines.append(f"{report.query_id:>5} {q['verdict']:>8} {q['actual']:>8} "
                     f"{fmt(lat['min_s']):>8} {fmt(lat['max_s']):>8} "
                     f"{fmt(lat['mean_s']):>8} {fmt(lat['p90_s']):>8}")
    txt_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    paths.append(txt_path)
    return paths
