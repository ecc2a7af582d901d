"""INI-style robot configuration.

Grammar: ``[section]`` headers followed by ``key = value`` lines; ``#`` and
``;`` start comments.  Four sections are recognised:

``[links]``
    ``l0`` .. ``l19``, ``lg1``, ``lg10``, ``lg12``, ``lg13`` in mm.
``[angles]``
    ``c1`` .. ``c4``, ``joint_range`` and ``neutral_a1`` .. ``neutral_a4`` in
    degrees; ``head_assembly``, ``tail_assembly``, ``left_body_branch``,
    ``right_body_branch`` as +1 / -1.
``[legs]``
    ``leg_branch`` (+1 open, -1 crossed), ``toe`` in mm, and per leg
    ``legK_x``, ``legK_y`` (mm), ``legK_heading`` (deg), ``legK_mirror``
    (true/false) for K = 1..4.
``[gait]``
    ``period`` (s), ``walk_amplitude``, ``trot_amplitude``, ``turn_outer``,
    ``turn_inner`` (deg), ``walk_duty``, ``trot_duty``, ``turn_duty``.

Unknown sections or keys are rejected; missing keys take the defaults below.
Values are held in file units so that serialising a parsed file reproduces
it byte for byte.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType

from ..core import LinkSet
from ..fourbar import FourBarGeometry
from ..gait import GaitKind, GaitProfile, profile
from ..robot import ActuatorCommand, LegMount, RobotConfig, default_mounts

__all__ = ["ConfigError", "ConfigFile", "parse_config", "serialize_config", "load_config", "SCHEMA"]


class ConfigError(ValueError):
    """Malformed configuration text or an out-of-domain value."""


def _link_defaults():
    ls = LinkSet()
    names = [f"l{i}" for i in range(20)] + ["lg1", "lg10", "lg12", "lg13"]
    return {n: (getattr(ls, n), float) for n in names}


def _leg_defaults():
    out = {"leg_branch": (1, int), "toe": (0.0, float)}
    for k, m in enumerate(default_mounts(), start=1):
        out[f"leg{k}_x"] = (m.x, float)
        out[f"leg{k}_y"] = (m.y, float)
        out[f"leg{k}_heading"] = (round(math.degrees(m.heading), 9), float)
        out[f"leg{k}_mirror"] = (m.mirror, bool)
    return out


SCHEMA = MappingProxyType({
    "links": _link_defaults(),
    "angles": {
        "c1": (90.0, float), "c2": (90.0, float), "c3": (90.0, float), "c4": (90.0, float),
        "joint_range": (45.0, float),
        "neutral_a1": (105.0, float), "neutral_a2": (105.0, float),
        "neutral_a3": (-75.0, float), "neutral_a4": (-75.0, float),
        "head_assembly": (1, int), "tail_assembly": (-1, int),
        "left_body_branch": (1, int), "right_body_branch": (1, int),
    },
    "legs": _leg_defaults(),
    "gait": {
        "period": (2.0, float),
        "walk_amplitude": (30.0, float), "trot_amplitude": (30.0, float),
        "turn_outer": (30.0, float), "turn_inner": (10.0, float),
        "walk_duty": (0.75, float), "trot_duty": (0.5, float), "turn_duty": (0.5, float),
    },
})


def _defaults(section):
    return {k: v for k, (v, _) in SCHEMA[section].items()}


@dataclass(frozen=True)
class ConfigFile:
    """Parsed configuration in file units (mm, degrees)."""

    links: dict = field(default_factory=lambda: _defaults("links"))
    angles: dict = field(default_factory=lambda: _defaults("angles"))
    legs: dict = field(default_factory=lambda: _defaults("legs"))
    gait: dict = field(default_factory=lambda: _defaults("gait"))

    def robot_config(self) -> RobotConfig:
        """Build the radian-valued :class:`RobotConfig`; raises ConfigError on bad values."""
        a, g = self.angles, self.legs
        rad = math.radians
        try:
            links = LinkSet(**self.links, **{f"c{i}": rad(a[f"c{i}"]) for i in range(1, 5)})
            mounts = tuple(
                LegMount(g[f"leg{k}_x"], g[f"leg{k}_y"], rad(g[f"leg{k}_heading"]), g[f"leg{k}_mirror"])
                for k in range(1, 5)
            )
            leg = FourBarGeometry(links.lg1, links.lg12, links.lg13, links.lg10)
            return RobotConfig(
                links=links,
                leg_geoms=(leg,) * 4,
                leg_mounts=mounts,
                neutral=ActuatorCommand(*(rad(a[f"neutral_a{i}"]) for i in range(1, 5))),
                joint_range=rad(a["joint_range"]),
                head_assembly=a["head_assembly"],
                tail_assembly=a["tail_assembly"],
                body_branch=(a["left_body_branch"], a["right_body_branch"]),
                leg_branch=g["leg_branch"],
                toe=g["toe"],
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def gait_profile(self, kind, config: RobotConfig | None = None, **overrides) -> GaitProfile:
        """Profile of ``kind`` using the ``[gait]`` values; ``overrides`` are in radians/seconds."""
        kind = GaitKind(kind)
        g = self.gait
        params = {"period": g["period"]}
        if kind is GaitKind.WALK:
            params.update(amplitude=math.radians(g["walk_amplitude"]), duty=g["walk_duty"])
        elif kind is GaitKind.TROT:
            params.update(amplitude=math.radians(g["trot_amplitude"]), duty=g["trot_duty"])
        else:
            params.update(outer=math.radians(g["turn_outer"]), inner=math.radians(g["turn_inner"]),
                          duty=g["turn_duty"])
        params.update(overrides)
        return profile(kind, config or self.robot_config(), **params)


def _convert(section, key, raw, kind):
    text = raw.strip()
    if kind is bool:
        low = text.lower()
        if low in ("true", "yes", "1"):
            return True
        if low in ("false", "no", "0"):
            return False
        raise ConfigError(f"[{section}] {key}: expected true/false, got {raw!r}")
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"[{section}] {key}: value must be finite")
    if kind is int:
        if value not in (1.0, -1.0):
            raise ConfigError(f"[{section}] {key}: expected +1 or -1, got {raw!r}")
        return int(value)
    return value


def parse_config(text: str) -> ConfigFile:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse configuration: {exc}") from exc
    sections = {name: _defaults(name) for name in SCHEMA}
    for name in parser.sections():
        if name not in SCHEMA:
            raise ConfigError(f"unknown section [{name}]")
        schema = SCHEMA[name]
        for key, raw in parser.items(name):
            if key not in schema:
                raise ConfigError(f"unknown key {key!r} in [{name}]")
            sections[name][key] = _convert(name, key, raw, schema[key][1])
    return ConfigFile(**sections)


def _format(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return f"{value:+d}"
    return repr(float(value))


def serialize_config(cfg: ConfigFile) -> str:
    lines = []
    for name in SCHEMA:
        lines.append(f"[{name}]")
        values = getattr(cfg, name)
        for key in SCHEMA[name]:
            lines.append(f"{key} = {_format(values[key])}")
        lines.append("")
    return "\n".join(lines)


def load_config(path: str | Path | None) -> tuple[ConfigFile, str]:
    """Parse ``path`` (defaults when None) and return it with the source text."""
    if path is None:
        cfg = ConfigFile()
        return cfg, serialize_config(cfg)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text), text
