"""Run configuration and verification records shared by the CLI commands."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Iterable

SCHEMA_VERSION = 1
CONFIG_ENV = "RENORMLAB_CONFIG"

DEFAULT_EPSILONS = (0.98, 0.985, 0.99, 0.995, 1.0, 1.005, 1.01, 1.015, 1.02)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    root_tol: float = 1e-12
    residual_tol: float = 1e-10
    slope_tol: float = 1e-8
    tower_depth: int = 8
    extension_depth: int = 12
    shift_length: int = 7
    shift_count: int = 50
    feasible_grid: int = 100_000
    probe_grid: int = 1000
    epsilons: tuple[float, ...] = DEFAULT_EPSILONS
    eps_window: tuple[float, float] = (0.98, 1.02)
    seed: int = 0
    format: str = "json"

    def __post_init__(self):
        for name in ("root_tol", "residual_tol", "slope_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")
        if not 1 <= self.tower_depth <= 12:
            raise ConfigError("tower_depth must lie in [1, 12]")
        if not 2 <= self.extension_depth <= 40:
            raise ConfigError("extension_depth must lie in [2, 40]")
        if not 2 <= self.shift_length <= 12:
            raise ConfigError("shift_length must lie in [2, 12]")
        if not 0 <= self.shift_count <= 1000:
            raise ConfigError("shift_count must lie in [0, 1000]")
        if self.feasible_grid < 1000:
            raise ConfigError("feasible_grid must be >= 1000")
        if self.probe_grid < 10:
            raise ConfigError("probe_grid must be >= 10")
        lo, hi = self.eps_window
        if not 0 < lo <= 1.0 <= hi:
            raise ConfigError("eps_window must bracket 1")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def as_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["epsilons"] = list(self.epsilons)
        d["eps_window"] = list(self.eps_window)
        return d


def _coerce(name: str, text: str):
    kind = {f.name: f.type for f in fields(RunConfig)}[name]
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if name == "epsilons":
            return tuple(float(t) for t in text.replace(",", " ").split())
        if name == "eps_window":
            lo, hi = (float(t) for t in text.replace(",", " ").split())
            return lo, hi
        return text.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {text!r}") from exc


def parse_config_text(text: str) -> dict[str, Any]:
    """key = value lines; '#' starts a comment."""
    known = {f.name for f in fields(RunConfig)}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def load_config(path: str | None = None, **overrides) -> RunConfig:
    """Defaults, then the config file (argument or $RENORMLAB_CONFIG), then overrides."""
    path = path or os.environ.get(CONFIG_ENV)
    values: dict[str, Any] = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
        values = parse_config_text(text)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)


# -- records ------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckRecord:
    """One verification row.

    ``relation`` is how ``measured`` is compared: ``close`` means
    |measured - expected| <= tolerance, ``le``/``lt``/``gt`` compare with
    ``expected`` directly, ``true`` means measured is a boolean to hold.
    """

    name: str
    anchor: str
    measured: Any
    expected: Any
    tolerance: float | None
    relation: str = "close"
    note: str = ""

    @property
    def passed(self) -> bool:
        m, e = self.measured, self.expected
        if m is None:
            return False
        if self.relation == "true":
            return bool(m)
        if isinstance(m, float) and math.isnan(m):
            return False
        if self.relation == "close":
            return abs(m - e) <= self.tolerance
        if self.relation == "le":
            return m <= e
        if self.relation == "lt":
            return m < e
        if self.relation == "gt":
            return m > e
        if self.relation == "eq":
            return m == e
        raise ValueError(f"unknown relation {self.relation!r}")

    def as_dict(self) -> dict[str, Any]:
        return {"name": self.name, "anchor": self.anchor, "measured": _clean(self.measured),
                "expected": _clean(self.expected), "tolerance": self.tolerance,
                "relation": self.relation, "pass": self.passed, "note": self.note}


def close(name: str, anchor: str, measured, expected, tol: float, note: str = "") -> CheckRecord:
    return CheckRecord(name, anchor, _num(measured), expected, tol, "close", note)


def bound(name: str, anchor: str, measured, limit, relation: str = "lt", note: str = "") -> CheckRecord:
    return CheckRecord(name, anchor, _num(measured), limit, None, relation, note)


def holds(name: str, anchor: str, value: bool, note: str = "") -> CheckRecord:
    return CheckRecord(name, anchor, bool(value), True, None, "true", note)


def _num(v):
    return None if v is None else float(v)


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


@dataclass
class VerificationReport:
    command: str
    records: list[CheckRecord] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def add(self, *records: CheckRecord) -> None:
        self.records.extend(records)

    def extend(self, other: "VerificationReport") -> None:
        self.records.extend(other.records)
        self.data[other.command] = other.data

    def to_json(self, config: RunConfig | None = None) -> str:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config": config.as_dict() if config else None,
            "pass": self.passed,
            "records": [r.as_dict() for r in self.records],
            "data": _clean_tree(self.data),
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"

    def records_csv(self) -> str:
        return to_csv(("name", "anchor", "measured", "expected", "tolerance", "relation", "pass"),
                      ((r.name, r.anchor, r.measured, r.expected, r.tolerance, r.relation, r.passed)
                       for r in self.records))


def _clean_tree(v):
    if isinstance(v, dict):
        return {k: _clean_tree(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean_tree(x) for x in v]
    return _clean(v)


def fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    if v is None:
        return ""
    return str(v)


def to_csv(header: Iterable[str], rows: Iterable[Iterable[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()
