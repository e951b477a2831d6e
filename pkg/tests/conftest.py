import random

import pytest

from streambench.model import SensorRecord, serialize_sensor


def make_sensor_record(ts=0, index=0, mf01=10000, mf02=10000, mf03=9000,
                       workplace_id=1, **kwargs):
    fields = dict(
        ts=ts, index=index, mf01=mf01, mf02=mf02, mf03=mf03,
        pc13=1, pc14=2, pc15=3, pc25=4, pc26=5, pc27=6, res=0,
        bm05=False, bm06=True, bm07=False, bm08=True, bm09=False, bm10=True,
        workplace_id=workplace_id,
    )
    fields.update(kwargs)
    return SensorRecord(**fields)


def make_sensor_line(ts=0, index=0, mf01=10000, mf02=10000, mf03=9000,
                     workplace_id=1, **kwargs):
    return serialize_sensor(make_sensor_record(
        ts=ts, index=index, mf01=mf01, mf02=mf02, mf03=mf03,
        workplace_id=workplace_id, **kwargs))


def random_sensor_record(rng: random.Random) -> SensorRecord:
    aux = tuple(rng.choice((None, False, True)) for _ in range(48))
    return SensorRecord(
        ts=rng.randrange(10**13),
        index=rng.randrange(10**6),
        mf01=rng.randrange(20000),
        mf02=rng.randrange(20000),
        mf03=rng.randrange(20000),
        pc13=rng.randrange(100), pc14=rng.randrange(100),
        pc15=rng.randrange(100), pc25=rng.randrange(100),
        pc26=rng.randrange(100), pc27=rng.randrange(100),
        res=rng.randrange(100),
        bm05=rng.random() < 0.5, bm06=rng.random() < 0.5,
        bm07=rng.random() < 0.5, bm08=rng.random() < 0.5,
        bm09=rng.random() < 0.5, bm10=rng.random() < 0.5,
        aux=aux,
        workplace_id=rng.randrange(1, 100),
    )


@pytest.fixture
def rng():
    return random.Random(20240817)
