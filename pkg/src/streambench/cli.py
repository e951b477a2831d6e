"""Benchmark orchestration: generate -> run -> validate -> report.

Each command works on a self-contained run directory:

    <output_dir>/<run_id>/
        config.snapshot     resolved configuration of the run
        business/           generated business tables
        streams/            generated streaming CSVs
        topics/             persisted broker logs (inputs and results)
        db-snapshot/        business db before the run
        results/            engine/sender summaries, final db, reports
        sysload.csv         optional resource samples

`validate` needs nothing outside the run directory.  Exit codes:
0 success (all verdicts PASS), 1 validation FAIL, 2 configuration error,
3 missing input, 4 run directory exists, 5 other harness error.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from pathlib import Path

from . import broker, datagen, sender, store, validator
from .broker import TopicCatalog
from .clock import LogicalClock, RealClock
from .config import RunConfig, load_config
from .engine import Engine, TopicNames
from .errors import BenchError, MissingInput, RunExists
from .store import BusinessDb
from .sysload import ResourceSampler

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_MISSING_INPUT = 3
EXIT_RUN_EXISTS = 4
EXIT_ERROR = 5


def _write_snapshot(cfg: RunConfig) -> None:
    cfg.run_dir.mkdir(parents=True, exist_ok=True)
    (cfg.run_dir / "config.snapshot").write_text(cfg.to_file_text(),
                                                 encoding="utf-8")


def cmd_generate(cfg: RunConfig, force: bool = False) -> None:
    """Generate business data and stream files into the run directory."""
    business = cfg.run_dir / "business"
    if business.exists():
        if not force:
            raise RunExists(f"generated data already present in {cfg.run_dir}")
        shutil.rmtree(business)
        shutil.rmtree(cfg.run_dir / "streams", ignore_errors=True)
    _write_snapshot(cfg)
    datagen.generate_dataset(cfg.gen_config(), cfg.run_dir)


def cmd_run(cfg: RunConfig, force: bool = False) -> dict:
    """Create topics, import business data, run sender and engine, persist."""
    run_dir = cfg.run_dir
    if not (run_dir / "business").is_dir() or not (run_dir / "streams").is_dir():
        raise MissingInput(f"no generated data in {run_dir}; run generate first")
    if (run_dir / "topics").exists():
        if not force:
            raise RunExists(f"run artifacts already present in {run_dir}")
        for sub in ("topics", "db-snapshot", "results"):
            shutil.rmtree(run_dir / sub, ignore_errors=True)

    gen = cfg.gen_config()
    clock = LogicalClock(gen.base_ts_ms) if cfg.clock == "logical" else RealClock()
    names = TopicNames.for_run(cfg.topic_prefix, cfg.run_id)

    catalog = TopicCatalog()
    for topic in names.all_input_topics():
        catalog.create_topic(topic)
    for q in sorted(set(cfg.queries) - {5}):
        catalog.create_topic(names.outputs[q])

    db = BusinessDb()
    import_counts = sender.import_business(db, run_dir / "business")
    store.export_to_directory(db, run_dir / "db-snapshot")

    send_cfg = sender.SenderConfig(
        input_rate=cfg.input_rate,
        duration_s=cfg.duration_s,
        topics={"sensor1": names.sensor1, "sensor2": names.sensor2,
                "times": names.times},
    )
    files = {name: run_dir / "streams" / f"{name}.csv"
             for name in ("sensor1", "sensor2", "times")}
    engine = Engine(set(cfg.queries), catalog, db, clock, names,
                    sos_params=cfg.sos_params())

    sampler = None
    if cfg.sample_resources:
        sampler = ResourceSampler(run_dir / "sysload.csv", cfg.sample_interval_s)
        sampler.start()
    try:
        if cfg.clock == "logical":
            send_summary = sender.stream(send_cfg, files, catalog, clock)
            engine.drain()
        else:
            send_summary = _run_concurrent(send_cfg, files, catalog, clock, engine)
    finally:
        if sampler is not None:
            sampler.stop()

    if not engine.fully_consumed():
        raise BenchError("drain incomplete: engine left unconsumed offsets")

    results = run_dir / "results"
    results.mkdir(parents=True, exist_ok=True)
    broker.persist(catalog, run_dir / "topics")
    store.export_to_directory(db, results / "db")
    (results / "send-summary.json").write_text(send_summary.to_json() + "\n",
                                               encoding="utf-8")
    (results / "engine-summary.json").write_text(
        engine.summary.to_json() + "\n", encoding="utf-8")
    (results / "import-counts.json").write_text(
        json.dumps(import_counts, sort_keys=True) + "\n", encoding="utf-8")
    return {"send": send_summary, "engine": engine.summary}


def _run_concurrent(send_cfg, files, catalog, clock, engine):
    """Real-clock mode: engine polls while the sender paces appends."""
    import threading

    done = threading.Event()

    def consume():
        while not done.is_set():
            if engine.poll(final=False) == 0:
                done.wait(0.001)
        while engine.poll(final=False):
            pass
        engine.poll(final=True)

    consumer = threading.Thread(target=consume, name="engine")
    consumer.start()
    try:
        summary = sender.stream(send_cfg, files, catalog, clock)
    finally:
        done.set()
        consumer.join()
    return summary


def cmd_validate(cfg: RunConfig) -> dict:
    """Recompute expected outputs, compare, and compute latency reports."""
    run_dir = cfg.run_dir
    for required in ("topics", "db-snapshot", Path("results") / "db"):
        if not (run_dir / required).is_dir():
            raise MissingInput(f"missing {required} in {run_dir}; run first")

    catalog = broker.load(run_dir / "topics")
    db_snapshot = store.load_from_directory(run_dir / "db-snapshot")
    db_final = store.load_from_directory(run_dir / "results" / "db")
    names = TopicNames.for_run(cfg.topic_prefix, cfg.run_id)

    reports = []
    samples_by_query = {}
    for q in sorted(set(cfg.queries)):
        if q == 5:
            expected = validator.expected_q5_rows(catalog, names, db_snapshot)
            reports.append(validator.compare_q5(expected, db_final))
        else:
            expected = validator.recompute_expected(
                q, catalog, names, db_snapshot=db_snapshot,
                sos_params=cfg.sos_params())
            actual = validator.actual_outputs(catalog, names, q)
            reports.append(validator.compare(expected, actual, q))
        samples_by_query[q] = validator.compute_latencies(
            q, catalog, names, db_final=db_final)

    validator.emit_reports(reports, samples_by_query, run_dir / "results")
    verdicts = {r.query_id: r.verdict for r in reports}
    return {"reports": reports, "verdicts": verdicts,
            "passed": all(v == "PASS" for v in verdicts.values())}


def cmd_report(cfg: RunConfig, out=None) -> None:
    """Print the rendered summary of a validated run."""
    out = out or sys.stdout
    summary_txt = cfg.run_dir / "results" / "summary.txt"
    if not summary_txt.is_file():
        raise MissingInput(f"no summary in {cfg.run_dir}; validate first")
    out.write(summary_txt.read_text(encoding="utf-8"))


def cmd_all(cfg: RunConfig, force: bool = False, out=None) -> bool:
    """Full pipeline; returns True iff every verdict is PASS."""
    cmd_generate(cfg, force=force)
    cmd_run(cfg, force=force)
    outcome = cmd_validate(cfg)
    cmd_report(cfg, out=out)
    return outcome["passed"]


# -- command line ------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streambench",
        description="Desk-scale stream processing benchmark harness.",
    )
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--run-id", dest="run_id")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--scale-factor", dest="scale_factor", type=int)
    parser.add_argument("--input-rate", dest="input_rate", type=float)
    parser.add_argument("--duration", dest="duration_s", type=float)
    parser.add_argument("--queries", help="comma list, e.g. 1,3,5")
    parser.add_argument("--clock", choices=("real", "logical"))
    parser.add_argument("--topic-prefix", dest="topic_prefix")
    parser.add_argument("--output-dir", dest="output_dir")
    parser.add_argument("--sample-resources", action="store_true", default=None)
    parser.add_argument("--force", action="store_true",
                        help="overwrite existing run artifacts")
    parser.add_argument("command",
                        choices=("generate", "run", "validate", "report", "all"))
    return parser


def _resolve_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg = load_config(args.config, base=cfg)
    overrides = {}
    for name in ("run_id", "seed", "scale_factor", "input_rate", "duration_s",
                 "clock", "topic_prefix", "output_dir"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if args.queries is not None:
        overrides["queries"] = tuple(int(q) for q in args.queries.split(","))
    if args.sample_resources is not None:
        overrides["sample_resources"] = args.sample_resources
    if overrides:
        base = {f: getattr(cfg, f) for f in (
            "run_id", "seed", "scale_factor", "input_rate", "duration_s",
            "queries", "clock", "topic_prefix", "output_dir",
            "sos_perplexity", "sos_tolerance", "sos_max_iter",
            "sample_resources", "sample_interval_s", "gen_overrides")}
        base.update(overrides)
        cfg = RunConfig(**base)
    return cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "generate":
            cmd_generate(cfg, force=args.force)
        elif args.command == "run":
            cmd_run(cfg, force=args.force)
        elif args.command == "validate":
            outcome = cmd_validate(cfg)
            cmd_report(cfg)
            return EXIT_OK if outcome["passed"] else EXIT_FAIL
        elif args.command == "report":
            cmd_report(cfg)
        elif args.command == "all":
            return EXIT_OK if cmd_all(cfg, force=args.force) else EXIT_FAIL
    except RunExists as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUN_EXISTS
    except MissingInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
