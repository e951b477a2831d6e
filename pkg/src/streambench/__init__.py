"""Desk-scale enterprise stream processing benchmark harness.

A self-contained library: seeded data generation, a rate-controlled
sender feeding an in-process single-partition topic log, a reference
streaming engine executing five benchmark queries against streaming and
stored business data, and an oracle validator computing correctness
verdicts and objective latency statistics.
"""

from .broker import TopicCatalog, TopicLog, topic_name
from .clock import LogicalClock, RealClock
from .config import RunConfig, load_config
from .datagen import GenConfig, generate_dataset
from .engine import Engine, TopicNames, run_queries
from .model import (
    ProductionTimeRecord,
    SensorRecord,
    parse_production_time,
    parse_sensor,
    serialize_production_time,
    serialize_sensor,
)
from .sos import SosParams, outlier_probabilities
from .store import BusinessDb

__version__ = "0.1.0"

__all__ = [
    "BusinessDb", "Engine", "GenConfig", "LogicalClock",
    "ProductionTimeRecord", "RealClock", "RunConfig", "SensorRecord",
    "SosParams", "TopicCatalog", "TopicLog", "TopicNames", "generate_dataset",
    "load_config", "outlier_probabilities", "parse_production_time",
    "parse_sensor", "run_queries", "serialize_production_time",
    "serialize_sensor", "topic_name",
]
