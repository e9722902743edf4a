"""Run configuration: dataclasses plus a flat ``key = value`` file format.

Keys are dotted, ``section.field``; lists are comma separated; ``#`` starts a
comment. Overrides given as ``key=value`` strings are applied after the file.
"""

from __future__ import annotations

import dataclasses
import math
import typing
from dataclasses import dataclass, field

from .errors import ConfigError

SURFACE_TYPES = ("cylinder", "three_funnel", "n_funnel", "torus", "generators")


@dataclass
class SurfaceConfig:
    type: str = "three_funnel"
    lengths: list = field(default_factory=lambda: [10.0, 10.0, 10.0])
    inner: list = field(default_factory=list)
    phi: float = math.pi / 2
    psi: float = math.pi / 8
    matrices: list = field(default_factory=list)

    def validate(self):
        if self.type not in SURFACE_TYPES:
            raise ConfigError(f"surface.type must be one of {', '.join(SURFACE_TYPES)}, got {self.type!r}")
        need = {"cylinder": 1, "three_funnel": 3, "torus": 2}
        if self.type in need and len(self.lengths) != need[self.type]:
            raise ConfigError(f"surface.type={self.type} needs {need[self.type]} lengths")
        if self.type == "n_funnel" and len(self.lengths) < 3:
            raise ConfigError("surface.type=n_funnel needs at least three lengths")
        if self.type == "generators" and (not self.matrices or len(self.matrices) % 4):
            raise ConfigError("surface.matrices must list a, b, c, d for every generator")

    def build(self, check: bool = True):
        """The Schottky data; raises the geometry errors for invalid parameters."""
        from . import schottky
        from .geometry import MoebiusTransform

        self.validate()
        if self.type == "cylinder":
            return schottky.hyperbolic_cylinder(self.lengths[0])
        if self.type == "three_funnel":
            return schottky.three_funnel(*self.lengths)
        if self.type == "n_funnel":
            return schottky.n_funnel(self.lengths, self.inner or None)
        if self.type == "torus":
            return schottky.funneled_torus(self.lengths[0], self.lengths[1], self.phi, self.psi, check=check)
        gens = [MoebiusTransform(*self.matrices[i : i + 4]) for i in range(0, len(self.matrices), 4)]
        data = schottky.SchottkyData.from_generators(gens, "generators")
        return schottky.checked(data) if check else data


@dataclass
class DiscConfig:
    N: int = 24
    refinement: int = 1
    precision: str = "double"
    dense_cutoff: int = 8192

    def validate(self):
        if self.N < 2:
            raise ConfigError("disc.N must be at least 2")
        if self.refinement < 0:
            raise ConfigError("disc.refinement must be nonnegative")
        if self.precision not in ("double", "extended"):
            raise ConfigError("disc.precision must be double or extended")


@dataclass
class SearchConfig:
    re_min: float = -1.0
    re_max: float = 1.0
    im_min: float = 0.0
    im_max: float = 10.0
    seed_re: list = field(default_factory=list)
    seed_spacing: float = 0.05
    multiplicity: bool = True
    winding_radius: float = 1e-2

    def validate(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ConfigError("search window is empty")
        if not self.seed_spacing > 0 or not self.winding_radius > 0:
            raise ConfigError("search.seed_spacing and search.winding_radius must be positive")

    def window(self):
        from .zerofinder import Window

        return Window(self.re_min, self.re_max, self.im_min, self.im_max)


@dataclass
class NewtonConfig:
    tol: float = 1e-10
    max_iter: int = 100
    fd_step: float = 1e-6
    zero_tol: float = 1e-9

    def validate(self):
        if min(self.tol, self.fd_step, self.zero_tol) <= 0 or self.max_iter < 1:
            raise ConfigError("newton tolerances must be positive and max_iter at least 1")


@dataclass
class DedupConfig:
    tol: float = 1e-6

    def validate(self):
        if not self.tol > 0:
            raise ConfigError("dedup.tol must be positive")


@dataclass
class OracleConfig:
    truncation: int = 12
    points: list = field(default_factory=lambda: [0.3 + 0j])
    tol: float = 1e-6
    dps: str = "auto"

    def validate(self):
        if self.truncation < 1 or not self.tol > 0:
            raise ConfigError("oracle.truncation must be positive and oracle.tol positive")
        if self.dps != "auto" and not (self.dps.isdigit() or self.dps == "double"):
            raise ConfigError("oracle.dps must be auto, double or a digit count")

    @property
    def digits(self):
        if self.dps == "auto":
            return "auto"
        return None if self.dps == "double" else int(self.dps)


@dataclass
class GridConfig:
    re_steps: int = 101
    im_steps: int = 101

    def validate(self):
        if self.re_steps < 1 or self.im_steps < 1:
            raise ConfigError("grid steps must be positive")


@dataclass
class LengthsConfig:
    max_k: int = 4

    def validate(self):
        if self.max_k < 1:
            raise ConfigError("lengths.max_k must be positive")


@dataclass
class OutputConfig:
    path: str = "-"

    def validate(self):
        pass


@dataclass
class RunConfig:
    surface: SurfaceConfig = field(default_factory=SurfaceConfig)
    disc: DiscConfig = field(default_factory=DiscConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    dedup: DedupConfig = field(default_factory=DedupConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    lengths: LengthsConfig = field(default_factory=LengthsConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def validate(self) -> "RunConfig":
        for f in dataclasses.fields(self):
            getattr(self, f.name).validate()
        return self

    def set(self, key: str, raw: str):
        section, _, name = key.strip().partition(".")
        target = getattr(self, section, None) if section in _sections() else None
        if target is None or name not in {f.name for f in dataclasses.fields(target)}:
            raise ConfigError(f"unknown configuration key {key!r}")
        kind = typing.get_type_hints(type(target))[name]
        setattr(target, name, _parse_value(key, raw.strip(), kind, name))

    def items(self) -> list:
        """``(key, formatted value)`` for every setting, in a fixed order."""
        out = []
        for section in _sections():
            obj = getattr(self, section)
            for f in dataclasses.fields(obj):
                out.append((f"{section}.{f.name}", format_value(getattr(obj, f.name))))
        return out


def _sections() -> list:
    return [f.name for f in dataclasses.fields(RunConfig)]


_COMPLEX_FIELDS = {"points"}


def _parse_value(key, raw, kind, name):
    try:
        if kind is bool:
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is list:
            items = [x.strip() for x in raw.split(",") if x.strip()]
            convert = _parse_complex if name in _COMPLEX_FIELDS else float
            return [convert(x) for x in items]
        return raw
    except ValueError as exc:
        raise ConfigError(f"cannot parse {key} = {raw!r}") from exc


def _parse_complex(text: str) -> complex:
    return complex(text.replace(" ", "").replace("i", "j"))


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return ", ".join(format_value(v) for v in value)
    if isinstance(value, complex):
        return f"{value.real:.17g}{value.imag:+.17g}i"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def parse_lines(lines, config: RunConfig | None = None) -> RunConfig:
    config = RunConfig() if config is None else config
    for number, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        key, sep, value = text.partition("=")
        if not sep:
            raise ConfigError(f"line {number}: expected key = value, got {line.strip()!r}")
        config.set(key, value)
    return config


def load(path: str | None = None, overrides=()) -> RunConfig:
    """Defaults, then the file at ``path`` (if any), then ``key=value`` overrides; validated."""
    config = RunConfig()
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                parse_lines(fh, config)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not key=value")
        config.set(key, value)
    return config.validate()
