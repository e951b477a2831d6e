"""Seeded synthetic data generation.

Produces the business tables, the production-times stream, and two
calibrated sensor streams.  Everything is a pure function of
(seed, config): identical inputs give byte-identical files.

Sensor value distributions are piecewise uniform around the two query
thresholds: mf01 exceeds 14,963 with probability `error_rate_mf01` and
mf03 falls below 8,105 with probability `low_rate_mf03`, so the
empirical exceedance rates converge to the configured probabilities by
construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .store import BusinessDb

MF01_ERROR_THRESHOLD = 14963
MF03_LOW_THRESHOLD = 8105

_AUX_EMPTY = "," * 48  # 48 absent optional boolean columns


@dataclass
class GenConfig:
    seed: int = 42
    scale_factor: int = 1
    workplaces_per_sf: int = 10
    orders_per_sf: int = 100
    lines_per_order: int = 3
    items: int = 1000
    sensor_count: int = 10_000
    error_rate_mf01: float = 0.005
    low_rate_mf03: float = 0.09
    # harness knobs not drawn from the benchmark description
    pol_per_order_line: int = 2
    base_ts_ms: int = 1_000_000_000_000
    sensor_interval_ms: int = 1
    downtime_cover_fraction: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.error_rate_mf01 <= 1.0:
            raise ValueError("error_rate_mf01 must be in [0,1]")
        if not 0.0 <= self.low_rate_mf03 <= 1.0:
            raise ValueError("low_rate_mf03 must be in [0,1]")
        for name in ("scale_factor", "workplaces_per_sf", "orders_per_sf",
                     "lines_per_order", "items", "pol_per_order_line"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @property
    def stream_span_ms(self) -> int:
        return self.sensor_count * self.sensor_interval_ms


def generate_business(cfg: GenConfig) -> BusinessDb:
    """Generate the seven business tables as a referentially intact db."""
    rng = random.Random(f"{cfg.seed}:business")
    db = BusinessDb()

    n_workplaces = cfg.scale_factor * cfg.workplaces_per_sf
    n_orders = cfg.scale_factor * cfg.orders_per_sf
    n_customers = max(1, n_orders // 5)

    customers = ["c_id,c_name"]
    for c in range(1, n_customers + 1):
        customers.append(f"{c},customer-{rng.randrange(10**6)}")
    db.import_csv("CUSTOMER", customers)

    items = ["i_id,i_name"]
    for i in range(1, cfg.items + 1):
        items.append(f"{i},item-{rng.randrange(10**6)}")
    db.import_csv("ITEM", items)

    orders = ["o_id,o_c_id,o_name"]
    for o in range(1, n_orders + 1):
        orders.append(f"{o},{rng.randint(1, n_customers)},order-{rng.randrange(10**6)}")
    db.import_csv("ORDER", orders)

    order_lines = ["ol_o_id,ol_number,ol_i_id,ol_name"]
    for o in range(1, n_orders + 1):
        for ol in range(1, cfg.lines_per_order + 1):
            order_lines.append(
                f"{o},{ol},{rng.randint(1, cfg.items)},line-{rng.randrange(10**6)}"
            )
    db.import_csv("ORDER_LINE", order_lines)

    pos = ["po_o_id,po_ol_number,po_name"]
    for o in range(1, n_orders + 1):
        for ol in range(1, cfg.lines_per_order + 1):
            pos.append(f"{o},{ol},prod-{rng.randrange(10**6)}")
    db.import_csv("PRODUCTION_ORDER", pos)

    # one scheduled (next) downtime per workplace, placed either across
    # the whole sensor stream span or entirely after it, so the power
    # check sees both suppressed and emitted low readings
    span_start = cfg.base_ts_ms
    span_end = cfg.base_ts_ms + cfg.stream_span_ms
    workplaces = ["wp_id,wp_name,wp_downtime_start,wp_downtime_end"]
    for wp in range(1, n_workplaces + 1):
        if rng.random() < cfg.downtime_cover_fraction:
            start, end = span_start - 1000, span_end + 1000
        else:
            start, end = span_end + 10_000, span_end + 20_000
        workplaces.append(f"{wp},workplace-{wp},{start},{end}")
    db.import_csv("WORKPLACE", workplaces)

    pols = ["pol_o_id,pol_ol_number,pol_number,pol_workplace_id,pol_start_ts,pol_end_ts"]
    for o in range(1, n_orders + 1):
        for ol in range(1, cfg.lines_per_order + 1):
            for pol in range(1, cfg.pol_per_order_line + 1):
                wp = rng.randint(1, n_workplaces)
                pols.append(f"{o},{ol},{pol},{wp},,")
    db.import_csv("PRODUCTION_ORDER_LINE", pols)

    db.check_integrity()
    return db


def generate_production_times(cfg: GenConfig, db: BusinessDb) -> list[str]:
    """Enter/leave event stream: one begin then one end per order line,
    interleaved across orders."""
    rng = random.Random(f"{cfg.seed}:times")
    keys = [
        (row["pol_o_id"], row["pol_ol_number"], row["pol_number"])
        for row in db.table_rows("PRODUCTION_ORDER_LINE")
    ]
    rng.shuffle(keys)
    begins = list(keys)
    active: list[tuple[int, int, int]] = []
    lines: list[str] = []
    while begins or active:
        take_begin = begins and (not active or rng.random() < 0.6)
        if take_begin:
            key = begins.pop()
            active.append(key)
            flag = 0
        else:
            key = active.pop(rng.randrange(len(active)))
            flag = 1
        lines.append(f"{key[0]},{key[1]},{key[2]},{flag}")
    return lines


def generate_sensor(cfg: GenConfig, machine_id: int, workplace_ids) -> list[str]:
    """One machine's sensor stream as serialized 67-column lines."""
    n = cfg.sensor_count
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, machine_id]))

    err = rng.random(n) < cfg.error_rate_mf01
    mf01 = np.where(
        err,
        rng.integers(MF01_ERROR_THRESHOLD + 1, 18001, n),
        rng.integers(8000, MF01_ERROR_THRESHOLD + 1, n),
    )
    low = rng.random(n) < cfg.low_rate_mf03
    mf03 = np.where(
        low,
        rng.integers(0, MF03_LOW_THRESHOLD, n),
        rng.integers(MF03_LOW_THRESHOLD, 12001, n),
    )
    mf02 = rng.integers(8000, 15001, n)
    pc = rng.integers(0, 100, (6, n))
    bm = rng.integers(0, 2, (6, n))
    wp = rng.choice(np.asarray(sorted(workplace_ids)), n)
    ts = cfg.base_ts_ms + np.arange(n, dtype=np.int64) * cfg.sensor_interval_ms

    cols = [
        ts.tolist(), list(range(n)), mf01.tolist(), mf02.tolist(), mf03.tolist(),
        *(pc[i].tolist() for i in range(6)),
        *(bm[i].tolist() for i in range(6)),
        wp.tolist(),
    ]
    lines = [
        f"{t},{i},{a},{b},{c},{p0},{p1},{p2},{p3},{p4},{p5},0,"
        f"{b0},{b1},{b2},{b3},{b4},{b5}{_AUX_EMPTY},{w}"
        for t, i, a, b, c, p0, p1, p2, p3, p4, p5, b0, b1, b2, b3, b4, b5, w
        in zip(*cols)
    ]
    return lines


def generate_dataset(cfg: GenConfig, directory) -> BusinessDb:
    """Write the full dataset layout:

        business/<TABLE>.csv
        streams/sensor1.csv, streams/sensor2.csv, streams/times.csv
    """
    from .store import export_to_directory

    directory = Path(directory)
    db = generate_business(cfg)
    export_to_directory(db, directory / "business")

    streams = directory / "streams"
    streams.mkdir(parents=True, exist_ok=True)
    wp_ids = db.workplace_ids()
    for machine_id, name in ((1, "sensor1"), (2, "sensor2")):
        lines = generate_sensor(cfg, machine_id, wp_ids)
        (streams / f"{name}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    times = generate_production_times(cfg, db)
    (streams / "times.csv").write_text("\n".join(times) + "\n", encoding="utf-8")
    return db
