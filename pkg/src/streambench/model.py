"""Domain record types and their CSV wire format.

Sensor records carry 67 comma-separated columns in a fixed order:

    ts, index, mf01, mf02, mf03, pc13, pc14, pc15, pc25, pc26, pc27,
    res, bm05..bm10, 48 optional boolean columns, workplace_id

Booleans serialize as 0/1; absent optional values serialize as empty
fields.  Production-time records have 4 columns.  All lines are UTF-8
with LF endings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import FieldCountError

SENSOR_FIELD_COUNT = 67
AUX_FIELD_COUNT = 48
PRODUCTION_TIME_FIELD_COUNT = 4

# required integer columns before the optional block
_REQUIRED_INT_NAMES = (
    "ts", "index", "mf01", "mf02", "mf03",
    "pc13", "pc14", "pc15", "pc25", "pc26", "pc27", "res",
)
_BOOL_NAMES = ("bm05", "bm06", "bm07", "bm08", "bm09", "bm10")


@dataclass(frozen=True)
class SensorRecord:
    """One machine measurement; immutable."""

    ts: int
    index: int
    mf01: int
    mf02: int
    mf03: int
    pc13: int
    pc14: int
    pc15: int
    pc25: int
    pc26: int
    pc27: int
    res: int
    bm05: bool
    bm06: bool
    bm07: bool
    bm08: bool
    bm09: bool
    bm10: bool
    aux: tuple = field(default=tuple([None] * AUX_FIELD_COUNT))
    workplace_id: int = 1

    def __post_init__(self):
        if len(self.aux) != AUX_FIELD_COUNT:
            raise ValueError(f"aux must have {AUX_FIELD_COUNT} entries, got {len(self.aux)}")


@dataclass(frozen=True)
class ProductionTimeRecord:
    """Enter/leave event of a production order line at a workplace."""

    pt_o_id: int
    pt_ol_number: int
    pt_pol_number: int
    pt_is_end: bool


@dataclass(frozen=True)
class QueryOutputRecord:
    """One engine result line plus the input record anchoring its latency."""

    query_id: int
    payload: str
    anchor_topic: str
    anchor_offset: int


def _bool_str(v: bool) -> str:
    return "1" if v else "0"


def _opt_bool_str(v) -> str:
    if v is None:
        return ""
    return _bool_str(v)


def serialize_sensor(r: SensorRecord) -> str:
    """Serialize to the 67-column line; inverse of parse_sensor."""
    parts = [
        str(r.ts), str(r.index), str(r.mf01), str(r.mf02), str(r.mf03),
        str(r.pc13), str(r.pc14), str(r.pc15),
        str(r.pc25), str(r.pc26), str(r.pc27), str(r.res),
        _bool_str(r.bm05), _bool_str(r.bm06), _bool_str(r.bm07),
        _bool_str(r.bm08), _bool_str(r.bm09), _bool_str(r.bm10),
    ]
    parts.extend(_opt_bool_str(v) for v in r.aux)
    parts.append(str(r.workplace_id))
    return ",".join(parts)


def _parse_int(raw: str, name: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise TypeError(f"column {name}: expected integer, got {raw!r}") from None


def _parse_bool(raw: str, name: str) -> bool:
    if raw == "0":
        return False
    if raw == "1":
        return True
    raise TypeError(f"column {name}: expected 0/1, got {raw!r}")


def parse_sensor(line: str) -> SensorRecord:
    """Parse a 67-column line back into a SensorRecord."""
    fields = line.rstrip("\n").split(",")
    if len(fields) != SENSOR_FIELD_COUNT:
        raise FieldCountError(
            f"expected {SENSOR_FIELD_COUNT} fields, got {len(fields)}"
        )
    ints = [_parse_int(fields[i], _REQUIRED_INT_NAMES[i]) for i in range(12)]
    bools = [_parse_bool(fields[12 + i], _BOOL_NAMES[i]) for i in range(6)]
    aux = tuple(
        None if raw == "" else _parse_bool(raw, f"aux{i}")
        for i, raw in enumerate(fields[18:66])
    )
    workplace_id = _parse_int(fields[66], "workplace_id")
    return SensorRecord(*ints, *bools, aux=aux, workplace_id=workplace_id)


def serialize_production_time(r: ProductionTimeRecord) -> str:
    return f"{r.pt_o_id},{r.pt_ol_number},{r.pt_pol_number},{_bool_str(r.pt_is_end)}"


def parse_production_time(line: str) -> ProductionTimeRecord:
    fields = line.rstrip("\n").split(",")
    if len(fields) != PRODUCTION_TIME_FIELD_COUNT:
        raise FieldCountError(
            f"expected {PRODUCTION_TIME_FIELD_COUNT} fields, got {len(fields)}"
        )
    return ProductionTimeRecord(
        _parse_int(fields[0], "pt_o_id"),
        _parse_int(fields[1], "pt_ol_number"),
        _parse_int(fields[2], "pt_pol_number"),
        _parse_bool(fields[3], "pt_is_end"),
    )
