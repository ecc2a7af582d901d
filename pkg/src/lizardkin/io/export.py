"""Deterministic CSV/JSON tables, SVG heat maps and foot-path plots, run reports.

Numbers are written at 9 significant digits (``format(v, ".9g")``), booleans
as 0/1, and missing values (NaN) as an empty CSV field or JSON ``null``.

Heat maps colour each grid cell with a fixed 256-entry ramp built by linear
interpolation between five anchors (dark purple, blue, teal, green, yellow;
see ``RAMP_ANCHORS``).  The cell value ``v`` maps to entry
``round(255 * (v - vmin) / (vmax - vmin))``; cells outside the workspace
mask are left white.  Equal inputs always give identical bytes.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "RAMP",
    "RunReport",
    "chart_svg",
    "digest",
    "foot_path_svg",
    "format_value",
    "table_text",
    "write_table",
]

RAMP_ANCHORS = ((68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37))


def _build_ramp():
    anchors = np.array(RAMP_ANCHORS, dtype=float)
    pos = np.linspace(0.0, 1.0, len(anchors))
    t = np.arange(256) / 255.0
    channels = [np.interp(t, pos, anchors[:, c]) for c in range(3)]
    return tuple("#%02x%02x%02x" % tuple(int(round(ch[i])) for ch in channels) for i in range(256))


RAMP = _build_ramp()


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    v = float(value)
    if math.isnan(v):
        return ""
    if v == 0.0:
        v = 0.0  # no "-0"
    return format(v, ".9g")


def _json_value(value):
    if value is None or isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    v = float(value)
    if math.isnan(v):
        return None
    return float(format(v, ".9g"))


def table_text(columns, rows, fmt: str = "csv") -> str:
    """Render rows as CSV (header line first) or JSON ``{column: [values]}``."""
    columns = list(columns)
    if fmt == "csv":
        lines = [",".join(columns)]
        lines.extend(",".join(format_value(v) for v in row) for row in rows)
        return "\n".join(lines) + "\n"
    if fmt == "json":
        data = {c: [] for c in columns}
        for row in rows:
            for c, v in zip(columns, row):
                data[c].append(_json_value(v))
        return json.dumps(data, separators=(",", ":")) + "\n"
    raise ValueError(f"unknown table format {fmt!r}")


def write_table(path, columns, rows, fmt: str = "csv") -> Path:
    path = Path(path)
    path.write_text(table_text(columns, rows, fmt), encoding="utf-8")
    return path


def _num(v: float) -> str:
    return format(round(v, 3) + 0.0, ".3f")


def chart_svg(values: np.ndarray, mask: np.ndarray, title: str = "", vmin: float = 0.0,
              vmax: float = 1.0, cell: int | None = None) -> str:
    """Heat map of ``values[ix, iy]``; x grows to the right, y upward."""
    nx, ny = values.shape
    if cell is None:
        cell = max(1, 600 // max(nx, ny))
    width, height = nx * cell, ny * cell
    bar = 16
    span = vmax - vmin if vmax > vmin else 1.0
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width + 3 * bar}" height="{height + 24}" '
        f'viewBox="0 0 {width + 3 * bar} {height + 24}">',
        f'<rect x="0" y="0" width="{width + 3 * bar}" height="{height + 24}" fill="#ffffff"/>',
        f'<text x="2" y="16" font-family="sans-serif" font-size="12">{title}</text>',
        '<g shape-rendering="crispEdges">',
    ]
    for iy in range(ny):
        row_y = 24 + (ny - 1 - iy) * cell
        ix = 0
        while ix < nx:
            if not mask[ix, iy] or not math.isfinite(values[ix, iy]):
                ix += 1
                continue
            idx = int(round(255 * min(1.0, max(0.0, (values[ix, iy] - vmin) / span))))
            run = ix + 1
            while run < nx and mask[run, iy] and math.isfinite(values[run, iy]) and int(
                round(255 * min(1.0, max(0.0, (values[run, iy] - vmin) / span)))
            ) == idx:
                run += 1
            out.append(
                f'<rect x="{ix * cell}" y="{row_y}" width="{(run - ix) * cell}" height="{cell}" fill="{RAMP[idx]}"/>'
            )
            ix = run
    # colour bar, vmin at the bottom
    step = height / 256
    for i, colour in enumerate(RAMP):
        y = 24 + height - (i + 1) * step
        out.append(
            f'<rect x="{width + bar}" y="{_num(y)}" width="{bar}" height="{_num(step + 0.01)}" fill="{colour}"/>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


LEG_COLOURS = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd")


def foot_path_svg(paths: np.ndarray, title: str = "", size: int = 480) -> str:
    """Foot-tip polylines from an array of shape (n_samples, n_legs, 2) in mm."""
    paths = np.asarray(paths, dtype=float)
    lo = paths.reshape(-1, 2).min(axis=0)
    hi = paths.reshape(-1, 2).max(axis=0)
    extent = max(float(np.max(hi - lo)), 1e-9)
    pad = 20.0
    scale = (size - 2 * pad) / extent

    def xy(p):
        return _num(pad + (p[0] - lo[0]) * scale), _num(size - pad - (p[1] - lo[1]) * scale)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="#ffffff"/>',
        f'<text x="4" y="14" font-family="sans-serif" font-size="12">{title}</text>',
    ]
    for leg in range(paths.shape[1]):
        pts = " ".join("%s,%s" % xy(p) for p in paths[:, leg])
        colour = LEG_COLOURS[leg % len(LEG_COLOURS)]
        out.append(f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="1.5"/>')
        x0, y0 = xy(paths[0, leg])
        out.append(f'<circle cx="{x0}" cy="{y0}" r="3" fill="{colour}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def digest(*parts: str) -> str:
    h = hashlib.sha256()
    for part in parts:
        h.update(part.encode("utf-8"))
        h.update(b"\0")
    return h.hexdigest()


@dataclass
class RunReport:
    command: list[str]
    input_digest: str
    outputs: list[str] = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    passed: bool = True

    def check(self, name: str, value, ok: bool) -> None:
        self.checks[name] = {"value": _json_value(value) if not isinstance(value, (list, dict)) else value,
                             "ok": bool(ok)}
        self.passed = self.passed and bool(ok)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)
