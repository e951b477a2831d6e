import json

import pytest

from streambench import broker, cli
from streambench.config import RunConfig, load_config, parse_config_text
from streambench.errors import MissingInput, RunExists


def small_cfg(tmp_path, **kwargs):
    defaults = dict(run_id="r1", seed=3, input_rate=200, duration_s=2,
                    queries=(1, 3, 5), clock="logical",
                    output_dir=str(tmp_path / "runs"))
    defaults.update(kwargs)
    return RunConfig(**defaults)


def test_run_without_generate_is_missing_input(tmp_path):
    with pytest.raises(MissingInput):
        cli.cmd_run(small_cfg(tmp_path))


def test_generate_twice_needs_force(tmp_path):
    cfg = small_cfg(tmp_path)
    cli.cmd_generate(cfg)
    with pytest.raises(RunExists):
        cli.cmd_generate(cfg)
    cli.cmd_generate(cfg, force=True)


def test_full_pipeline_passes(tmp_path, capsys):
    cfg = small_cfg(tmp_path)
    assert cli.cmd_all(cfg) is True
    out = capsys.readouterr().out
    assert "PASS" in out
    # run directory is self-contained for validation
    for sub in ("config.snapshot", "business", "streams", "topics",
                "db-snapshot", "results"):
        assert (cfg.run_dir / sub).exists(), sub
    summary = json.loads((cfg.run_dir / "results" / "summary.json").read_text())
    assert summary["overall_verdict"] == "PASS"


def test_rerun_needs_force(tmp_path):
    cfg = small_cfg(tmp_path)
    cli.cmd_all(cfg)
    with pytest.raises(RunExists):
        cli.cmd_run(cfg)
    cli.cmd_run(cfg, force=True)


def test_drain_completeness_recorded(tmp_path):
    cfg = small_cfg(tmp_path)
    cli.cmd_generate(cfg)
    result = cli.cmd_run(cfg)
    engine_summary = result["engine"]
    for topic, consumed in engine_summary.consumed.items():
        log_file = cfg.run_dir / "topics" / f"{topic}.log"
        assert log_file.is_file()
        assert consumed == engine_summary.consumed[topic]
    counts = json.loads((cfg.run_dir / "results" / "engine-summary.json").read_text())
    assert counts["consumed"]["esp-r1-sensor1"] == 400


def test_validate_detects_tampered_output(tmp_path):
    cfg = small_cfg(tmp_path, queries=(3,))
    cli.cmd_generate(cfg)
    cli.cmd_run(cfg)
    assert cli.cmd_validate(cfg)["passed"] is True

    # perturb one q3 output entry in the persisted log
    catalog = broker.load(cfg.run_dir / "topics")
    topic = "esp-r1-q3-out"
    entries = catalog.topic(topic).read_from(0)
    assert entries, "tamper target must exist"
    mutated = broker.TopicCatalog()
    log = mutated.create_topic(topic)
    for e in entries:
        payload = e.payload.replace(b'"line":"', b'"line":"9', 1) \
            if e.offset == 0 else e.payload
        log._entries.append((e.ingestion_ts, payload))
    for name in catalog.names():
        if name != topic:
            other = mutated.create_topic(name)
            other._entries = [(x.ingestion_ts, x.payload)
                              for x in catalog.topic(name).read_from(0)]
    broker.persist(mutated, cfg.run_dir / "topics")
    assert cli.cmd_validate(cfg)["passed"] is False


def test_main_exit_codes(tmp_path):
    out = str(tmp_path / "runs")
    argv_base = ["--output-dir", out, "--run-id", "m1", "--seed", "5",
                 "--input-rate", "200", "--duration", "2", "--queries", "1,3"]
    assert cli.main(argv_base + ["run"]) == cli.EXIT_MISSING_INPUT
    assert cli.main(argv_base + ["generate"]) == cli.EXIT_OK
    assert cli.main(argv_base + ["generate"]) == cli.EXIT_RUN_EXISTS
    assert cli.main(argv_base + ["run"]) == cli.EXIT_OK
    assert cli.main(argv_base + ["validate"]) == cli.EXIT_OK


def test_main_all_pass(tmp_path, capsys):
    out = str(tmp_path / "runs")
    code = cli.main(["--output-dir", out, "--run-id", "m2", "--seed", "5",
                     "--input-rate", "200", "--duration", "2",
                     "--queries", "1,3,5", "all"])
    assert code == cli.EXIT_OK
    assert "PASS" in capsys.readouterr().out


def test_config_file_and_flag_overrides(tmp_path):
    cfg_file = tmp_path / "bench.conf"
    cfg_file.write_text(
        "# comment\n"
        "run_id = filerun\n"
        "seed = 9\n"
        "input_rate = 123\n"
        "queries = 1,4\n"
        "gen_workplaces_per_sf = 4\n"
    )
    cfg = load_config(cfg_file, base=RunConfig())
    assert cfg.run_id == "filerun"
    assert cfg.input_rate == 123
    assert cfg.queries == (1, 4)
    assert cfg.gen_overrides == {"workplaces_per_sf": 4}
    assert cfg.gen_config().workplaces_per_sf == 4


def test_config_unknown_key_rejected():
    with pytest.raises(ValueError):
        parse_config_text("nope = 1\n")


def test_config_snapshot_roundtrip(tmp_path):
    cfg = small_cfg(tmp_path, gen_overrides={"workplaces_per_sf": 3})
    cli.cmd_generate(cfg)
    text = (cfg.run_dir / "config.snapshot").read_text()
    reparsed = parse_config_text(text)
    assert reparsed.run_id == cfg.run_id
    assert reparsed.queries == cfg.queries
    assert reparsed.gen_overrides == {"workplaces_per_sf": 3}


def test_invalid_config_values():
    with pytest.raises(ValueError):
        RunConfig(clock="warped")
    with pytest.raises(ValueError):
        RunConfig(queries=(0, 9))
    with pytest.raises(ValueError):
        RunConfig(run_id="a/b")
    with pytest.raises(ValueError):
        RunConfig(duration_s=0)


def test_report_without_validate(tmp_path):
    cfg = small_cfg(tmp_path)
    with pytest.raises(MissingInput):
        cli.cmd_report(cfg)
