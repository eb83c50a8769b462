"""Scenario configuration: a single JSON document with sensible defaults.

Every field is optional.  The defaults describe a packet dropped from
``z0 = 100`` with width ``sigma = 1`` and entropic indices ``2/3`` and ``4/5``.
Entropic indices may be given as numbers or as ``"p/q"`` strings.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

from .errors import ConfigError

__all__ = ["ScenarioConfig", "GridConfig", "ScanConfig", "DetectorConfig",
           "OutputConfig", "load_config", "parse_config"]

AUTO = "auto"


@dataclass(frozen=True)
class GridConfig:
    z_max: float = 256.0
    num_points: int = 16384


@dataclass(frozen=True)
class ScanConfig:
    t_start: float = 0.0
    t_end: float | str = AUTO  # auto: 1.05 T_rev
    num_samples: int = 8192


@dataclass(frozen=True)
class DetectorConfig:
    smoothing_window: float | str = AUTO  # samples; auto: one classical period
    prominence: float = 0.02
    q_max: int = 4
    matching_window: float | str = AUTO  # time units; auto: 0.02 T_rev


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    formats: tuple = ("csv", "json")


@dataclass(frozen=True)
class ScenarioConfig:
    z0: float = 100.0
    sigma: float = 1.0
    p0: float = 0.0
    alphas: tuple = (2.0 / 3.0, 0.8)
    n_max: int | str = 500
    grid: GridConfig = field(default_factory=GridConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["alphas"] = list(self.alphas)
        d["output"]["formats"] = list(self.output.formats)
        return d


def _number(value: Any, name: str, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite")
    if positive and value <= 0:
        raise ConfigError(f"{name} must be positive, got {value!r}")
    return value


def _integer(value: Any, name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{name} must be at least {minimum}, got {value!r}")
    return int(value)


def _alpha(value: Any) -> float:
    if isinstance(value, str):
        try:
            a = float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"cannot read entropic index {value!r}") from exc
    else:
        a = _number(value, "alphas entry")
    if not 0.5 < a <= 1.0:
        raise ConfigError(f"entropic index {value!r} must lie in (1/2, 1]")
    return a


def _section(doc: dict, key: str, cls):
    raw = doc.get(key, {})
    if not isinstance(raw, dict):
        raise ConfigError(f"'{key}' must be an object")
    known = set(cls.__dataclass_fields__)
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown field(s) in '{key}': {', '.join(sorted(extra))}")
    return raw


def parse_config(doc: dict) -> ScenarioConfig:
    """Validate a decoded JSON document and fill in defaults."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    known = set(ScenarioConfig.__dataclass_fields__)
    extra = set(doc) - known
    if extra:
        raise ConfigError(f"unknown field(s): {', '.join(sorted(extra))}")
    base = ScenarioConfig()
    z0 = _number(doc.get("z0", base.z0), "z0", positive=True)
    sigma = _number(doc.get("sigma", base.sigma), "sigma", positive=True)
    p0 = _number(doc.get("p0", base.p0), "p0")
    if p0 != 0.0:
        raise ConfigError("p0 must be 0: the packet coefficients are only "
                          "available for a packet released at rest")
    alphas = doc.get("alphas", list(base.alphas))
    if not isinstance(alphas, list) or not alphas:
        raise ConfigError("alphas must be a non-empty list")
    alphas = tuple(_alpha(a) for a in alphas)
    if len(set(alphas)) != len(alphas):
        raise ConfigError("alphas must not repeat")
    n_max = doc.get("n_max", base.n_max)
    if n_max != AUTO:
        n_max = _integer(n_max, "n_max", 3)

    g = _section(doc, "grid", GridConfig)
    grid = GridConfig(
        z_max=_number(g.get("z_max", GridConfig.z_max), "grid.z_max", positive=True),
        num_points=_integer(g.get("num_points", GridConfig.num_points), "grid.num_points", 1024),
    )
    if grid.num_points & (grid.num_points - 1):
        raise ConfigError("grid.num_points must be a power of two")

    s = _section(doc, "scan", ScanConfig)
    t_end = s.get("t_end", AUTO)
    scan = ScanConfig(
        t_start=_number(s.get("t_start", 0.0), "scan.t_start"),
        t_end=t_end if t_end == AUTO else _number(t_end, "scan.t_end"),
        num_samples=_integer(s.get("num_samples", ScanConfig.num_samples), "scan.num_samples", 2),
    )
    if scan.t_end != AUTO and scan.t_end <= scan.t_start:
        raise ConfigError("scan.t_end must exceed scan.t_start")

    d = _section(doc, "detector", DetectorConfig)
    sw = d.get("smoothing_window", AUTO)
    mw = d.get("matching_window", AUTO)
    detector = DetectorConfig(
        smoothing_window=sw if sw == AUTO else _number(sw, "detector.smoothing_window", True),
        prominence=_number(d.get("prominence", 0.02), "detector.prominence"),
        q_max=_integer(d.get("q_max", 4), "detector.q_max", 2),
        matching_window=mw if mw == AUTO else _number(mw, "detector.matching_window", True),
    )
    if detector.smoothing_window != AUTO and detector.smoothing_window < 1:
        raise ConfigError("detector.smoothing_window must be at least one sample")
    if detector.prominence < 0:
        raise ConfigError("detector.prominence must be nonnegative")

    o = _section(doc, "output", OutputConfig)
    formats = o.get("formats", list(OutputConfig.formats))
    if not isinstance(formats, list) or not set(formats) <= {"csv", "json"}:
        raise ConfigError("output.formats must be a list drawn from 'csv' and 'json'")
    directory = o.get("directory", OutputConfig.directory)
    if not isinstance(directory, str) or not directory:
        raise ConfigError("output.directory must be a non-empty string")
    output = OutputConfig(directory=directory, formats=tuple(formats))
    return ScenarioConfig(z0, sigma, p0, alphas, n_max, grid, scan, detector, output)


def load_config(path: str | None) -> ScenarioConfig:
    """Read and validate a configuration file; ``None`` gives the defaults."""
    if path is None:
        return ScenarioConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path!r}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration {path!r} is not valid JSON: {exc}") from exc
    return parse_config(doc)
