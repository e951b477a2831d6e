"""Reference streaming executor for the five benchmark queries.

Consumes the broker topics and produces:

  q1: per 1-second event-time tumbling window, "avg,min,max,count" of mf01
  q2: per 500-record count window, SOS outliers (phi >= 0.5) of (mf01, mf02)
  q3: sensor records with mf01 > 14,963
  q4: records from either sensor stream with mf03 < 8,105 outside the
      workplace's scheduled downtime (event time)
  q5: production-time events written into the business db

q1..q3 read the first sensor stream; q4 merges both streams
deterministically by (ingestion_ts, stream, offset); q5 reads the times
stream.  Results for q1..q4 go to per-query output topics as JSON
objects carrying the payload line plus the anchoring input record, so
the validator can resolve latencies; q5's result is the db update.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from .broker import TopicCatalog, topic_name
from .errors import DegenerateWindow, UnknownKey, UnknownWorkplace
from .model import parse_production_time
from .sos import SosParams, outlier_probabilities
from .store import BusinessDb

Q3_THRESHOLD = 14963
Q4_THRESHOLD = 8105
DEFAULT_WINDOW_MS = 1000
DEFAULT_COUNT_WINDOW = 500

STREAMS = ("sensor1", "sensor2", "times")


@dataclass(frozen=True)
class TopicNames:
    """Resolved topic names for one run."""

    sensor1: str
    sensor2: str
    times: str
    outputs: dict  # query id -> result topic name

    @classmethod
    def for_run(cls, prefix: str, run_id: str) -> "TopicNames":
        return cls(
            sensor1=topic_name(prefix, run_id, "sensor1"),
            sensor2=topic_name(prefix, run_id, "sensor2"),
            times=topic_name(prefix, run_id, "times"),
            outputs={q: topic_name(prefix, run_id, f"q{q}-out") for q in range(1, 5)},
        )

    def all_input_topics(self) -> list[str]:
        return [self.sensor1, self.sensor2, self.times]


@dataclass
class EngineSummary:
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    dead_letters: dict = field(default_factory=dict)
    degenerate_windows: int = 0
    consumed: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


def format_mean(total: int, count: int) -> str:
    """Arithmetic mean to 3 decimal places, half-up."""
    value = Decimal(total) / Decimal(count)
    return str(value.quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))


def format_probability(phi: float) -> str:
    """Outlier probability to 2 decimal places, half-up."""
    return str(Decimal(repr(float(phi))).quantize(Decimal("0.01"),
                                                  rounding=ROUND_HALF_UP))


def encode_output(query_id: int, payload: str, anchor_topic: str,
                  anchor_offset: int) -> bytes:
    return json.dumps(
        {"q": query_id, "anchor_topic": anchor_topic,
         "anchor_offset": anchor_offset, "line": payload},
        separators=(",", ":"),
    ).encode("utf-8")


def decode_output(payload: bytes) -> dict:
    return json.loads(payload.decode("utf-8"))


class Engine:
    """Single-process executor; call poll() until drained.

    poll(final=False) processes every record currently available;
    poll(final=True) additionally flushes open event-time windows and
    completes the two-stream merge, and must only be called once no
    more input will be appended.
    """

    def __init__(self, selection, catalog: TopicCatalog, db: BusinessDb,
                 clock, names: TopicNames, sos_params: SosParams | None = None,
                 window_ms: int = DEFAULT_WINDOW_MS,
                 count_window: int = DEFAULT_COUNT_WINDOW):
        self.selection = frozenset(selection)
        self.catalog = catalog
        self.db = db
        self.clock = clock
        self.names = names
        self.sos_params = sos_params or SosParams()
        self.window_ms = window_ms
        self.count_window = count_window
        if 2 in self.selection and self.sos_params.perplexity >= count_window:
            raise ValueError("SOS perplexity must be below the count-window size")

        self.summary = EngineSummary(
            inputs={q: 0 for q in sorted(self.selection)},
            outputs={q: 0 for q in sorted(self.selection)},
            dead_letters={q: 0 for q in sorted(self.selection)},
        )
        self._cursors = {q: 0 for q in (1, 2, 3, 5)}
        self._q4_pos = [0, 0]
        self._q1_windows: dict[int, list] = {}  # wid -> [sum,min,max,count,anchor]
        self._q2_buffer: list[tuple[float, float, str, int]] = []

    # -- shared helpers ------------------------------------------------

    def _emit(self, query_id: int, payload: str, anchor_topic: str,
              anchor_offset: int) -> None:
        out = self.catalog.topic(self.names.outputs[query_id])
        out.append(encode_output(query_id, payload, anchor_topic, anchor_offset),
                   self.clock)
        self.summary.outputs[query_id] += 1

    def _new_entries(self, topic: str, query_id: int):
        log = self.catalog.topic(topic)
        pos = self._cursors[query_id]
        entries = log.read_from(pos)
        self._cursors[query_id] = pos + len(entries)
        self.summary.inputs[query_id] += len(entries)
        return entries

    # -- queries -------------------------------------------------------

    def _close_q1_windows(self, up_to_wid: int | None) -> None:
        for wid in sorted(self._q1_windows):
            if up_to_wid is not None and wid >= up_to_wid:
                break
            total, mn, mx, count, anchor = self._q1_windows.pop(wid)
            line = f"{format_mean(total, count)},{mn},{mx},{count}"
            self._emit(1, line, self.names.sensor1, anchor)

    def _poll_q1(self, final: bool) -> int:
        entries = self._new_entries(self.names.sensor1, 1)
        for e in entries:
            fields = e.payload.decode("utf-8").split(",")
            ts, mf01 = int(fields[0]), int(fields[2])
            wid = ts // self.window_ms
            self._close_q1_windows(wid)
            state = self._q1_windows.get(wid)
            if state is None:
                self._q1_windows[wid] = [mf01, mf01, mf01, 1, e.offset]
            else:
                state[0] += mf01
                state[1] = min(state[1], mf01)
                state[2] = max(state[2], mf01)
                state[3] += 1
                state[4] = e.offset
        if final:
            self._close_q1_windows(None)
        return len(entries)

    def _poll_q2(self) -> int:
        entries = self._new_entries(self.names.sensor1, 2)
        for e in entries:
            line = e.payload.decode("utf-8")
            fields = line.split(",")
            self._q2_buffer.append((float(fields[2]), float(fields[3]), line, e.offset))
            if len(self._q2_buffer) == self.count_window:
                self._flush_q2_window()
        return len(entries)

    def _flush_q2_window(self) -> None:
        window = self._q2_buffer
        self._q2_buffer = []
        points = np.array([(w[0], w[1]) for w in window])
        try:
            phi = outlier_probabilities(points, self.sos_params)
        except DegenerateWindow:
            self.summary.degenerate_windows += 1
            return
        anchor = window[-1][3]  # last contributor anchors the window
        for i, (_, _, line, _) in enumerate(window):
            if phi[i] >= 0.5:
                self._emit(2, f"{line},{format_probability(phi[i])}",
                           self.names.sensor1, anchor)

    def _poll_q3(self) -> int:
        entries = self._new_entries(self.names.sensor1, 3)
        for e in entries:
            line = e.payload.decode("utf-8")
            if int(line.split(",", 3)[2]) > Q3_THRESHOLD:
                self._emit(3, line, self.names.sensor1, e.offset)
        return len(entries)

    def _poll_q4(self, final: bool) -> int:
        logs = (self.catalog.topic(self.names.sensor1),
                self.catalog.topic(self.names.sensor2))
        names = (self.names.sensor1, self.names.sensor2)
        processed = 0
        while True:
            avail = [self._q4_pos[i] < len(logs[i]) for i in (0, 1)]
            if not any(avail):
                break
            if all(avail):
                heads = [logs[i].entry(self._q4_pos[i]) for i in (0, 1)]
                pick = 0 if heads[0].ingestion_ts <= heads[1].ingestion_ts else 1
            elif final:
                pick = 0 if avail[0] else 1
            else:
                # can't merge past the end of one stream mid-run: an
                # earlier-stamped record may still arrive on it
                break
            entry = logs[pick].entry(self._q4_pos[pick])
            self._q4_pos[pick] += 1
            processed += 1
            self.summary.inputs[4] += 1
            self._process_q4_record(names[pick], entry)
        return processed

    def _process_q4_record(self, stream_name: str, entry) -> None:
        line = entry.payload.decode("utf-8")
        fields = line.split(",")
        if int(fields[4]) >= Q4_THRESHOLD:
            return
        try:
            start, end = self.db.lookup_downtime(int(fields[66]))
        except UnknownWorkplace:
            self.summary.dead_letters[4] += 1
            return
        ts = int(fields[0])
        if ts > end or ts < start:
            self._emit(4, line, stream_name, entry.offset)

    def _poll_q5(self) -> int:
        entries = self._new_entries(self.names.times, 5)
        for e in entries:
            rec = parse_production_time(e.payload.decode("utf-8"))
            key = (rec.pt_o_id, rec.pt_ol_number, rec.pt_pol_number)
            try:
                # the written timestamp is the record's broker ingestion
                # time, which keeps the final row state recomputable
                self.db.set_production_time(key, rec.pt_is_end,
                                            e.ingestion_ts, self.clock)
                self.summary.outputs[5] += 1
            except UnknownKey:
                self.summary.dead_letters[5] += 1
        return len(entries)

    # -- driver --------------------------------------------------------

    def poll(self, final: bool = False) -> int:
        processed = 0
        if 1 in self.selection:
            processed += self._poll_q1(final)
        if 2 in self.selection:
            processed += self._poll_q2()
        if 3 in self.selection:
            processed += self._poll_q3()
        if 4 in self.selection:
            processed += self._poll_q4(final)
        if 5 in self.selection:
            processed += self._poll_q5()
        self._record_consumed()
        return processed

    def _record_consumed(self) -> None:
        consumed = {}
        if self.selection & {1, 2, 3}:
            consumed[self.names.sensor1] = min(
                self._cursors[q] for q in (1, 2, 3) if q in self.selection
            )
        if 4 in self.selection:
            consumed[self.names.sensor1] = min(
                consumed.get(self.names.sensor1, self._q4_pos[0]), self._q4_pos[0]
            )
            consumed[self.names.sensor2] = self._q4_pos[1]
        if 5 in self.selection:
            consumed[self.names.times] = self._cursors[5]
        self.summary.consumed = consumed

    def backlog(self) -> int:
        """Appended-minus-consumed offsets over this engine's input topics."""
        total = 0
        for topic, consumed in self.summary.consumed.items():
            total += len(self.catalog.topic(topic)) - consumed
        return total

    def drain(self) -> EngineSummary:
        """Process everything currently appended, then flush; for batch use."""
        while self.poll(final=False):
            pass
        self.poll(final=True)
        return self.summary

    def fully_consumed(self) -> bool:
        return self.backlog() == 0


def run_queries(selection, catalog, db, clock, names,
                sos_params: SosParams | None = None,
                window_ms: int = DEFAULT_WINDOW_MS,
                count_window: int = DEFAULT_COUNT_WINDOW) -> EngineSummary:
    """Batch entry point: drain every selected query over the catalog."""
    engine = Engine(selection, catalog, db, clock, names,
                    sos_params=sos_params, window_ms=window_ms,
                    count_window=count_window)
    return engine.drain()
