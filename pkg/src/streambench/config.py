"""Run configuration: flat key=value file plus programmatic overrides."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from .datagen import GenConfig
from .sos import SosParams

_GEN_PREFIX = "gen_"


@dataclass
class RunConfig:
    run_id: str = "run1"
    seed: int = 42
    scale_factor: int = 1
    input_rate: float = 1000.0
    duration_s: float = 10.0
    queries: tuple = (1, 2, 3, 4, 5)
    clock: str = "logical"
    topic_prefix: str = "esp"
    output_dir: str = "runs"
    sos_perplexity: float = 30.0
    sos_tolerance: float = 1e-5
    sos_max_iter: int = 100
    sample_resources: bool = False
    sample_interval_s: float = 1.0
    gen_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.duration_s < 1:
            raise ValueError("duration_s must be >= 1")
        if self.clock not in ("real", "logical"):
            raise ValueError("clock must be 'real' or 'logical'")
        bad = set(self.queries) - {1, 2, 3, 4, 5}
        if bad:
            raise ValueError(f"unknown queries: {sorted(bad)}")
        if "/" in self.run_id or self.run_id in ("", ".", ".."):
            raise ValueError(f"run_id not filesystem-safe: {self.run_id!r}")

    @property
    def run_dir(self) -> Path:
        return Path(self.output_dir) / self.run_id

    def sos_params(self) -> SosParams:
        return SosParams(self.sos_perplexity, self.sos_tolerance,
                         self.sos_max_iter)

    def gen_config(self) -> GenConfig:
        kwargs = dict(
            seed=self.seed,
            scale_factor=self.scale_factor,
            sensor_count=int(self.input_rate * self.duration_s),
        )
        kwargs.update(self.gen_overrides)
        return GenConfig(**kwargs)

    def to_file_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "gen_overrides":
                for k, v in sorted(value.items()):
                    lines.append(f"{_GEN_PREFIX}{k} = {v}")
            elif f.name == "queries":
                lines.append(f"queries = {','.join(str(q) for q in value)}")
            else:
                lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"


def _coerce(name: str, raw: str):
    raw = raw.strip()
    if name == "queries":
        return tuple(int(q) for q in raw.split(",") if q.strip())
    if name in ("seed", "scale_factor", "sos_max_iter"):
        return int(raw)
    if name in ("input_rate", "duration_s", "sos_perplexity", "sos_tolerance",
                "sample_interval_s"):
        return float(raw)
    if name == "sample_resources":
        return raw.lower() in ("1", "true", "yes", "on")
    return raw


_GEN_INT_FIELDS = {
    "scale_factor", "workplaces_per_sf", "orders_per_sf", "lines_per_order",
    "items", "sensor_count", "pol_per_order_line", "base_ts_ms",
    "sensor_interval_ms", "seed",
}


def parse_config_text(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse `key = value` lines; '#' starts a comment; later keys win."""
    values: dict = {}
    gen: dict = {}
    if base is not None:
        values = {f.name: getattr(base, f.name) for f in fields(base)
                  if f.name != "gen_overrides"}
        gen = dict(base.gen_overrides)
    for lineno, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key.startswith(_GEN_PREFIX):
            gkey = key[len(_GEN_PREFIX):]
            gen[gkey] = int(raw) if gkey in _GEN_INT_FIELDS else float(raw)
        else:
            values[key] = _coerce(key, raw)
    known = {f.name for f in fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(gen_overrides=gen, **values)


def load_config(path, base: RunConfig | None = None) -> RunConfig:
    return parse_config_text(Path(path).read_text(encoding="utf-8"), base)
