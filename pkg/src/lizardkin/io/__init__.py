"""Configuration files, CSV/JSON/SVG emission and run reports."""
from .config import ConfigError, ConfigFile, load_config, parse_config, serialize_config
from .export import RunReport, chart_svg, foot_path_svg, write_table

__all__ = [
    "ConfigError",
    "ConfigFile",
    "load_config",
    "parse_config",
    "serialize_config",
    "RunReport",
    "chart_svg",
    "foot_path_svg",
    "write_table",
]
