import random

import pytest

from streambench.errors import FieldCountError
from streambench.model import (
    ProductionTimeRecord,
    parse_production_time,
    parse_sensor,
    serialize_production_time,
    serialize_sensor,
)

from conftest import make_sensor_record, random_sensor_record


def test_minimal_record_has_67_fields_19_populated():
    line = serialize_sensor(make_sensor_record())
    fields = line.split(",")
    assert len(fields) == 67
    populated = [f for f in fields if f != ""]
    assert len(populated) == 19
    assert all(f == "" for f in fields[18:66])
    assert fields[66] == "1"  # workplace_id is the trailing column


def test_mf01_is_third_column():
    line = serialize_sensor(make_sensor_record(mf01=14963))
    assert line.split(",")[2] == "14963"


def test_booleans_serialize_as_01():
    line = serialize_sensor(make_sensor_record())
    assert line.split(",")[12:18] == ["0", "1", "0", "1", "0", "1"]


def test_roundtrip_1000_random_records():
    rng = random.Random(1)
    for _ in range(1000):
        rec = random_sensor_record(rng)
        assert parse_sensor(serialize_sensor(rec)) == rec


def test_parse_rejects_66_fields():
    line = serialize_sensor(make_sensor_record())
    with pytest.raises(FieldCountError):
        parse_sensor(line.rsplit(",", 1)[0])


def test_parse_rejects_non_integer_ts():
    line = serialize_sensor(make_sensor_record())
    bad = ",".join(["abc"] + line.split(",")[1:])
    with pytest.raises(TypeError):
        parse_sensor(bad)


def test_aux_values_roundtrip():
    aux = tuple([True, False, None] * 16)
    rec = make_sensor_record(aux=aux)
    line = serialize_sensor(rec)
    assert line.split(",")[18:21] == ["1", "0", ""]
    assert parse_sensor(line).aux == aux


def test_aux_length_enforced():
    with pytest.raises(ValueError):
        make_sensor_record(aux=(None,) * 47)


def test_production_time_roundtrip():
    rec = ProductionTimeRecord(7, 1, 2, False)
    line = serialize_production_time(rec)
    assert line == "7,1,2,0"
    assert parse_production_time(line) == rec


def test_production_time_field_count():
    with pytest.raises(FieldCountError):
        parse_production_time("7,1,2")


def test_production_time_end_flag():
    assert parse_production_time("7,1,2,1").pt_is_end is True


def test_production_time_column_count():
    rng = random.Random(2)
    for _ in range(100):
        rec = ProductionTimeRecord(rng.randrange(1, 10**6), rng.randrange(1, 100),
                                   rng.randrange(1, 100), rng.random() < 0.5)
        line = serialize_production_time(rec)
        assert len(line.split(",")) == 4
        assert parse_production_time(line) == rec
