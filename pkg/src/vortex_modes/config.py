"""Run configuration: sectioned key=value text or JSON, validated fail-closed."""
from __future__ import annotations

import configparser
import hashlib
import json
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError
from .profiles import EPS0_DEFAULT

SCHEMA_VERSION = 1
OUT_ENV = "VORTEX_MODES_OUT"

# section -> {key in the file: attribute}
_LAYOUT = {
    "model": {"n": "n", "epsilon": "epsilon", "eps0": "eps0", "alpha": "alpha",
              "lambda2_bound": "lambda2_bound"},
    "tolerances": {"quadrature": "quad_rtol", "ode": "ode_rtol", "root": "root_tol"},
    "output": {"dir": "output_dir"},
    "run": {"seed": "seed"},
}


@dataclass(frozen=True)
class RunConfig:
    n: int = 4
    epsilon: tuple = (0.1,)
    eps0: float = EPS0_DEFAULT
    alpha: float = 0.5
    lambda2_bound: float = 50.0
    quad_rtol: float = 1e-10
    ode_rtol: float = 1e-12
    root_tol: float = 1e-12
    output_dir: str = "vortex_modes_out"
    seed: int = 0                       # nothing is random; kept so runs can state it

    def __post_init__(self):
        object.__setattr__(self, "epsilon", tuple(float(e) for e in self.epsilon))
        self.validate()

    def validate(self):
        if int(self.n) != self.n or self.n < 2:
            raise ConfigError(f"n must be an integer >= 2, got {self.n}")
        if not self.epsilon:
            raise ConfigError("at least one epsilon is required")
        for e in self.epsilon:
            # eps = 0 is accepted: it is reported as the case without a mode
            if not 0.0 <= e <= self.eps0:
                raise ConfigError(f"epsilon must lie in [0, {self.eps0}], got {e}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        for name in ("quad_rtol", "ode_rtol", "root_tol", "lambda2_bound"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")

    # ------------------------------------------------------------ io ---
    def to_dict(self):
        d = asdict(self)
        d["epsilon"] = list(self.epsilon)
        return d

    def to_json(self):
        return json.dumps({"schema": SCHEMA_VERSION, **self.to_dict()}, indent=2, sort_keys=True)

    def to_text(self):
        lines = [f"# vortex_modes config, schema {SCHEMA_VERSION}"]
        d = self.to_dict()
        for section, keys in _LAYOUT.items():
            lines.append(f"[{section}]")
            for key, attr in keys.items():
                v = d[attr]
                if isinstance(v, list):
                    v = ", ".join(repr(x) for x in v)
                elif isinstance(v, float):
                    v = repr(v)
                lines.append(f"{key} = {v}")
        return "\n".join(lines) + "\n"

    @property
    def hash(self):
        """Digest of everything that influences results (not the output path)."""
        d = self.to_dict()
        d.pop("output_dir")
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def with_overrides(self, **kw):
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)

    def resolved_output_dir(self):
        return Path(os.environ.get(OUT_ENV) or self.output_dir)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(attr, raw):
    try:
        if attr == "epsilon":
            if isinstance(raw, (list, tuple)):
                return tuple(float(x) for x in raw)
            if isinstance(raw, (int, float)):
                return (float(raw),)
            return tuple(float(x) for x in str(raw).replace(";", ",").split(",") if x.strip())
        if attr in ("n", "seed"):
            v = float(raw)
            if v != int(v):
                raise ValueError
            return int(v)
        if attr == "output_dir":
            return str(raw)
        return float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {attr}: {raw!r}") from None


def from_mapping(data: dict) -> RunConfig:
    """Nested {section: {key: value}} or flat {attribute: value}."""
    data = dict(data)
    data.pop("schema", None)
    kw = {}
    for key, value in data.items():
        if key in _LAYOUT and isinstance(value, dict):
            known = _LAYOUT[key]
            for k, v in value.items():
                if k not in known:
                    raise ConfigError(f"unknown key [{key}] {k}")
                kw[known[k]] = _coerce(known[k], v)
        elif key in _TYPES:
            kw[key] = _coerce(key, value)
        else:
            raise ConfigError(f"unknown key {key}")
    return RunConfig(**kw)


def parse_text(text: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unreadable config: {exc}") from None
    data = {}
    for section in parser.sections():
        if section not in _LAYOUT:
            raise ConfigError(f"unknown section [{section}]")
        data[section] = dict(parser.items(section))
    return from_mapping(data)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    if text.lstrip().startswith("{"):
        try:
            return from_mapping(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from None
    return parse_text(text)
