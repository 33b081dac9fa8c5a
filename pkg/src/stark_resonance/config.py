"""Run configuration: a flat ``key = value`` file with section headers.

::

    [model]
    alpha1 = -2.8
    alpha2 = -2.0
    a = 5          # or x2; x1 defaults to 0
    F = 0.17

    [state]
    center = 0
    sigma = 0.5

    [sweep]
    f_min = 0.15
    f_max = 0.23
    f_steps = 41

    [time]
    t_min = 100
    t_max = 10000
    t_points = 2000
    spacing = log

    [output]
    path = out.csv
    format = csv
    precision = 17

The JSON written by the CLI carries the resolved configuration under
``"config"``; such a file is accepted by :func:`load` as well, so a run can be
reproduced from its own output.
"""

import configparser
import json
import re
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import InvalidParameters
from .kernel import ModelParams
from .survival import GaussianState

__all__ = ["ConfigError", "RunConfig", "load", "loads", "apply_overrides"]


class ConfigError(ValueError):
    """Malformed or inconsistent configuration; ``line`` is 1-based when known."""

    def __init__(self, message, source=None, line=None):
        self.source = source
        self.line = line
        where = ""
        if source is not None:
            where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


@dataclass
class ModelBlock:
    alpha1: Optional[float] = None
    alpha2: Optional[float] = None
    x1: float = 0.0
    x2: Optional[float] = None
    a: Optional[float] = None
    F: Optional[float] = None


@dataclass
class StateBlock:
    center: float = 0.0
    sigma: float = 0.5


@dataclass
class SweepBlock:
    f_min: Optional[float] = None
    f_max: Optional[float] = None
    f_steps: int = 41


@dataclass
class TimeBlock:
    t_min: float = 1e2
    t_max: float = 1e4
    t_points: int = 2000
    spacing: str = "log"


@dataclass
class OutputBlock:
    path: Optional[str] = None
    format: str = "csv"
    precision: int = 17


_BLOCKS = {
    "model": ModelBlock,
    "state": StateBlock,
    "sweep": SweepBlock,
    "time": TimeBlock,
    "output": OutputBlock,
}


@dataclass
class RunConfig:
    model: ModelBlock = field(default_factory=ModelBlock)
    state: StateBlock = field(default_factory=StateBlock)
    sweep: SweepBlock = field(default_factory=SweepBlock)
    time: TimeBlock = field(default_factory=TimeBlock)
    output: OutputBlock = field(default_factory=OutputBlock)
    source: Optional[str] = None
    # (section, key) -> 1-based line in the source file
    lines: dict = field(default_factory=dict, repr=False, compare=False)

    def as_dict(self):
        return {name: asdict(getattr(self, name)) for name in _BLOCKS}

    def _error(self, message, section=None, key=None):
        line = self.lines.get((section, key)) if section else None
        label = f"[{section}] {key}: " if key else (f"[{section}] " if section else "")
        return ConfigError(label + message, self.source, line)

    def x2(self):
        m = self.model
        if m.x2 is not None:
            return m.x2
        if m.a is not None:
            return m.x1 + m.a
        return None

    def model_params(self, F=None):
        """Validated :class:`ModelParams`; ``F`` overrides ``[model] F``."""
        m = self.model
        for key in ("alpha1", "alpha2"):
            if getattr(m, key) is None:
                raise self._error("required", "model", key)
        x2 = self.x2()
        if x2 is None:
            raise self._error("one of 'x2' or 'a' is required", "model")
        F = m.F if F is None else F
        if F is None:
            raise self._error("required for this command", "model", "F")
        try:
            return ModelParams(alpha1=m.alpha1, alpha2=m.alpha2, x1=m.x1, x2=x2, F=F)
        except InvalidParameters as exc:
            raise self._error(str(exc), "model", _blame(str(exc), m)) from None

    def gaussian(self):
        try:
            return GaussianState(center=self.state.center, sigma=self.state.sigma)
        except ValueError as exc:
            key = "sigma" if "sigma" in str(exc) else "center"
            raise self._error(str(exc), "state", key) from None

    def sweep_grid(self):
        s = self.sweep
        if s.f_min is None or s.f_max is None:
            return None
        return np.linspace(s.f_min, s.f_max, s.f_steps)

    def validate(self):
        """Check everything that does not depend on the command."""
        m = self.model
        if m.x2 is not None and m.a is not None and m.x2 != m.x1 + m.a:
            raise self._error(f"x2 = {m.x2} contradicts x1 + a = {m.x1 + m.a}", "model", "a")
        if m.alpha1 is not None and m.alpha2 is not None and self.x2() is not None:
            probe = m.F if m.F is not None else 1.0
            self.model_params(F=probe)
        self.gaussian()
        s = self.sweep
        if (s.f_min is None) != (s.f_max is None):
            key = "f_max" if s.f_max is None else "f_min"
            raise self._error("f_min and f_max must be given together", "sweep", key)
        if s.f_min is not None:
            if not 0 < s.f_min < s.f_max:
                raise self._error(
                    f"need 0 < f_min < f_max, got {s.f_min}, {s.f_max}", "sweep", "f_max"
                )
        if s.f_steps < 2:
            raise self._error(f"must be >= 2, got {s.f_steps}", "sweep", "f_steps")
        t = self.time
        if not 0 <= t.t_min < t.t_max:
            raise self._error(f"need 0 <= t_min < t_max, got {t.t_min}, {t.t_max}", "time", "t_max")
        if t.t_points < 2:
            raise self._error(f"must be >= 2, got {t.t_points}", "time", "t_points")
        if t.spacing not in ("log", "linear"):
            raise self._error(f"must be 'log' or 'linear', got {t.spacing!r}", "time", "spacing")
        if t.spacing == "log" and t.t_min <= 0:
            raise self._error("log spacing needs t_min > 0", "time", "t_min")
        o = self.output
        if o.format not in ("csv", "json"):
            raise self._error(f"must be 'csv' or 'json', got {o.format!r}", "output", "format")
        if not 1 <= o.precision <= 17:
            raise self._error(f"must be in 1..17, got {o.precision}", "output", "precision")
        return self


def _blame(message, m):
    """The model key an :class:`InvalidParameters` message is about."""
    if message.startswith("need alpha1"):
        return "alpha2"
    if message.startswith("need x1") or message.startswith("x2"):
        return "x2" if m.x2 is not None else "a"
    if "field strength" in message:
        return "F"
    return message.split()[0]


def _coerce(block_cls, key, raw):
    kinds = {f.name: f.type for f in fields(block_cls)}
    kind = kinds[key]
    if raw is None:
        return None
    if "float" in str(kind):
        if isinstance(raw, bool):
            raise ValueError(f"expected a number, got {raw!r}")
        return float(raw)
    if "int" in str(kind):
        value = float(raw)
        if not value.is_integer():
            raise ValueError(f"expected an integer, got {raw!r}")
        return int(value)
    return str(raw)


def _set(cfg, section, key, raw, line=None):
    block_cls = _BLOCKS.get(section)
    if block_cls is None:
        raise ConfigError(f"unknown section [{section}]", cfg.source, line)
    if key not in {f.name for f in fields(block_cls)}:
        raise ConfigError(f"[{section}] unknown key {key!r}", cfg.source, line)
    try:
        value = _coerce(block_cls, key, raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}] {key}: {exc}", cfg.source, line) from None
    setattr(getattr(cfg, section), key, value)
    if line is not None:
        cfg.lines[(section, key)] = line


_SECTION = re.compile(r"^\s*\[([^\]]+)\]")
_KEY = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*[=:]")


def _line_index(text):
    index = {}
    section = None
    for number, line in enumerate(text.splitlines(), start=1):
        match = _SECTION.match(line)
        if match:
            section = match.group(1).strip()
            index.setdefault((section, None), number)
            continue
        match = _KEY.match(line)
        if match and section is not None:
            index[(section, match.group(1))] = number
    return index


def _loads_ini(text, source):
    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#", ";"), interpolation=None, default_section="__defaults__"
    )
    parser.optionxform = str
    try:
        parser.read_string(text, source=source or "<config>")
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(str(exc).splitlines()[0], source, line) from None
    index = _line_index(text)
    cfg = RunConfig(source=source)
    for section in parser.sections():
        for key, raw in parser.items(section):
            _set(cfg, section, key, raw, index.get((section, key), index.get((section, None))))
    return cfg


def _loads_json(text, source):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", source, exc.lineno) from None
    if isinstance(data, dict) and "config" in data:
        data = data["config"]
    if not isinstance(data, dict):
        raise ConfigError("JSON config must be an object", source)
    cfg = RunConfig(source=source)
    for section, values in data.items():
        if not isinstance(values, dict):
            raise ConfigError(f"section {section!r} must be an object", source)
        for key, raw in values.items():
            _set(cfg, section, key, raw)
    return cfg


def loads(text, source=None):
    """Parse config text (INI-style or JSON) and validate it."""
    if text.lstrip().startswith("{"):
        cfg = _loads_json(text, source)
    else:
        cfg = _loads_ini(text, source)
    return cfg.validate()


def load(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from None
    return loads(text, str(path))


def apply_overrides(cfg, overrides):
    """Apply ``section.key=value`` strings (command-line ``--set``) and revalidate."""
    for item in overrides:
        target, sep, raw = item.partition("=")
        section, dot, key = target.strip().partition(".")
        if not sep or not dot:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        value = raw.strip()
        _set(cfg, section, key, None if value.lower() in ("", "none", "null") else value)
        cfg.lines.pop((section, key), None)
    return cfg.validate()
