"""Command-line entry point: ``lizardkin <command> ...``.

Angles are given and printed in degrees; lengths in mm.

Exit codes:
    0  success, every invariant check in the run report passed
    2  input or configuration error
    3  geometry error (link lengths that cannot form the mechanism)
    4  kinematic infeasibility (no assembly, outside the workspace, coupling)
    5  the command ran but an invariant check in the run report failed
"""
from __future__ import annotations

import argparse
import itertools
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import fivebar, fourbar, gait, robot, synthesis
from .core import JointCounts, mobility
from .errors import (
    BadParams,
    CommandOutOfRange,
    CouplingInfeasible,
    DegenerateDenominator,
    NoAssembly,
    NoUpperRegion,
    OutOfWorkspace,
    ParameterError,
    SingularHere,
)
from .io.config import ConfigError, load_config
from .io.export import RunReport, chart_svg, digest, foot_path_svg, write_table

logger = logging.getLogger("lizardkin")

EXIT_OK, EXIT_INPUT, EXIT_GEOMETRY, EXIT_KINEMATIC, EXIT_CHECK = 0, 2, 3, 4, 5


class GeometryError(Exception):
    pass


def _fmt(v) -> str:
    return format(float(v) + 0.0, ".9g")


def _branch_pair(text: str) -> fivebar.BranchSelector:
    if len(text) != 2 or any(c not in "+-" for c in text):
        raise ConfigError(f"--branch for ik must be two signs such as '++', got {text!r}")
    return fivebar.BranchSelector(*(1 if c == "+" else -1 for c in text))


def _branch_single(text: str, default: int) -> int:
    if text is None:
        return default
    if text not in ("+", "-"):
        raise ConfigError(f"--branch must be '+' or '-', got {text!r}")
    return 1 if text == "+" else -1


def _grid_2d(text: str | None, default=(200, 200)) -> tuple[int, int]:
    if text is None:
        return default
    try:
        nx, ny = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise ConfigError(f"--grid must look like 200x200, got {text!r}") from None
    if nx < 2 or ny < 2:
        raise ConfigError("--grid needs at least 2 samples per axis")
    return nx, ny


def _report(args, cfg_text: str) -> RunReport:
    argv = [a for a in args.argv]
    return RunReport(command=argv, input_digest=digest(cfg_text, json.dumps(argv)))


def _finish(report: RunReport, args) -> int:
    print(report.to_json())
    return EXIT_OK if report.passed else EXIT_CHECK


def _head_geometry(config: robot.RobotConfig, which: str = "head") -> fivebar.FiveBarGeometry:
    try:
        return config.head_geom if which == "head" else config.tail_geom
    except ValueError as exc:
        raise GeometryError(f"{which} five-bar: {exc}") from exc


# -- commands ---------------------------------------------------------------

def cmd_dof(args) -> int:
    freedoms = args.freedoms if args.freedoms is not None else [1] * args.joints
    try:
        counts = JointCounts(args.links, args.joints, tuple(freedoms))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(f"M = {mobility(counts)}")
    return EXIT_OK


def cmd_synth(args) -> int:
    params = synthesis.validate_params(args.r1, args.r2, args.r3)
    if not args.r3_mm > 0:
        raise ConfigError("r3_mm must be > 0")
    dim = synthesis.dimensionalize(params, args.r3_mm)
    print(f"r1 + r2 + r3 = {_fmt(args.r1 + args.r2 + args.r3)} (ok)")
    print(f"D = {_fmt(dim.d)}")
    print(f"l0 = {_fmt(dim.l0)} mm")
    print(f"l1 = {_fmt(dim.l1)} mm")
    print(f"l2 = {_fmt(dim.l2)} mm")
    return EXIT_OK


def cmd_chart(args) -> int:
    cfg_file, text = load_config(args.config)
    config = cfg_file.robot_config()
    geom = _head_geometry(config)
    nx, ny = _grid_2d(args.grid)
    grid = synthesis.GridSpec.default(geom, nx, ny)
    report = _report(args, text)
    try:
        circle = synthesis.mic(geom)
    except NoUpperRegion as exc:
        raise GeometryError(str(exc)) from exc

    if args.kind == "lci":
        branch = _branch_pair(args.branch or "++")
        chart = synthesis.lci_chart(geom, grid, branch, workers=args.workers)
        values = chart.values
    else:
        chart = synthesis.workspace_mask(geom, grid)
        values = chart.mask.astype(float)
    gx, gy = grid.mesh()

    columns = ["x_mm", "y_mm", "in_workspace"] + (["lci"] if args.kind == "lci" else [])
    rows = []
    for ix in range(nx):
        for iy in range(ny):
            row = [gx[ix, iy], gy[ix, iy], bool(chart.mask[ix, iy])]
            if args.kind == "lci":
                row.append(values[ix, iy])
            rows.append(row)
    if args.out:
        report.outputs.append(str(write_table(args.out, columns, rows, args.format)))
    if args.svg:
        title = f"{args.kind} chart, l0={_fmt(geom.l0)} l1={_fmt(geom.l1)} l2={_fmt(geom.l2)} mm"
        Path(args.svg).write_text(chart_svg(values, chart.mask, title), encoding="utf-8")
        report.outputs.append(args.svg)

    report.check("rows", len(rows), len(rows) == nx * ny)
    inside = circle.contains(gx, gy)
    report.check("mic_inscribed", {"r_mic": circle.r_mic, "y_mic": circle.y_mic},
                 bool(np.all(chart.mask[inside])))
    if args.kind == "lci":
        vals = values[chart.mask]
        report.check("lci_in_unit_interval", [float(vals.min()), float(vals.max())],
                     bool(np.all((vals >= 0) & (vals <= 1))))
        med = synthesis.mic_median_lci(geom, chart, circle)
        report.check("mic_median_lci", med, med > 0.7)
    return _finish(report, args)


def _print_kv(pairs):
    for key, value in pairs:
        print(f"{key} = {value}")


def cmd_fk(args) -> int:
    cfg_file, _ = load_config(args.config)
    config = cfg_file.robot_config()
    ang = [math.radians(a) for a in args.angles]
    need = {"head": 2, "tail": 2, "leg": 1, "robot": 4}[args.mechanism]
    if len(ang) != need:
        raise ConfigError(f"fk {args.mechanism} takes {need} angle(s), got {len(ang)}")

    if args.mechanism in ("head", "tail"):
        geom = _head_geometry(config, args.mechanism)
        default = config.head_assembly if args.mechanism == "head" else config.tail_assembly
        st = fivebar.fk(geom, ang[0], ang[1], _branch_single(args.branch, default))
        res = fivebar.state_residual(geom, st)
        flags = fivebar.is_singular(geom, st)
        _print_kv([
            ("theta1_deg", _fmt(math.degrees(st.theta1))),
            ("theta2_deg", _fmt(math.degrees(st.theta2))),
            ("theta3_deg", _fmt(math.degrees(st.theta3))),
            ("theta4_deg", _fmt(math.degrees(st.theta4))),
            ("endpoint_mm", f"{_fmt(st.endpoint[0])}, {_fmt(st.endpoint[1])}"),
            ("residual_mm", _fmt(float(np.max(np.abs(res))))),
            ("gain_singular", flags.gain),
            ("loss_singular", flags.loss),
        ])
    elif args.mechanism == "leg":
        geom = config.leg_geoms[0]
        st = fourbar.leg_fk(geom, ang[0], _branch_single(args.branch, config.leg_branch), config.toe)
        res = fourbar.leg_residual_state(geom, st)
        _print_kv([
            ("theta_lg1_deg", _fmt(math.degrees(st.theta_lg1))),
            ("theta_lg12_deg", _fmt(math.degrees(st.theta_lg12))),
            ("theta_lg13_deg", _fmt(math.degrees(st.theta_lg13))),
            ("foot_tip_mm", f"{_fmt(st.foot_tip[0])}, {_fmt(st.foot_tip[1])}"),
            ("residual_mm", _fmt(float(np.max(np.abs(res))))),
            ("singular", fourbar.leg_singular(geom, st)),
        ])
    else:
        cmd = robot.ActuatorCommand(*ang)
        state = robot.solve(config, cmd)
        rep = robot.full_singularity(config, state)
        q = state.joints
        pairs = [(f"theta{i}_deg", _fmt(math.degrees(q.theta(i)))) for i in range(1, 17)]
        pairs += [
            ("s_left_mm", _fmt(q.s_left)),
            ("s_right_mm", _fmt(q.s_right)),
            ("head_point_mm", ", ".join(_fmt(v) for v in state.head_point)),
            ("tail_point_mm", ", ".join(_fmt(v) for v in state.tail_point)),
        ]
        pairs += [(f"foot{k + 1}_mm", ", ".join(_fmt(v) for v in tip)) for k, tip in enumerate(state.foot_tips)]
        pairs += [
            ("residual_mm", _fmt(state.max_residual(config))),
            ("det_K", _fmt(rep.det_k)),
            ("det_Kstar", _fmt(rep.det_kstar)),
            ("gain_singular", rep.gain),
            ("loss_singular", rep.loss),
            ("leg_singular", any(rep.legs)),
        ]
        _print_kv(pairs)
    return EXIT_OK


def cmd_ik(args) -> int:
    cfg_file, _ = load_config(args.config)
    config = cfg_file.robot_config()
    geom = _head_geometry(config, args.mechanism)
    branch = _branch_pair(args.branch or "++")
    t1, t4 = fivebar.ik(geom, (args.x, args.y), branch)
    e1, e2 = fivebar.FiveBarState(t1, 0.0, 0.0, t4, (args.x, args.y)).elbows(geom)
    p = np.array([args.x, args.y])
    err = max(abs(np.hypot(*(p - e1)) - geom.l2), abs(np.hypot(*(p - e2)) - geom.l3))
    _print_kv([
        ("theta1_deg", _fmt(math.degrees(t1))),
        ("theta4_deg", _fmt(math.degrees(t4))),
        ("constraint_error_mm", _fmt(err)),
    ])
    return EXIT_OK


SCAN_COLUMNS = [
    "a1_deg", "a2_deg", "a3_deg", "a4_deg", "status", "det_K", "det_Kstar",
    "sin_2theta11", "sin_2theta14", "sin_theta2_theta3", "sin_theta6_theta7",
    "gain", "loss", "leg_singular",
]


def _parse_point(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"--point must be four comma-separated degrees, got {text!r}") from None
    if len(vals) != 4:
        raise ConfigError(f"--point must be four comma-separated degrees, got {text!r}")
    return vals


def cmd_scan(args) -> int:
    cfg_file, text = load_config(args.config)
    config = cfg_file.robot_config()
    try:
        steps = int(args.grid) if args.grid is not None else 5
    except ValueError:
        raise ConfigError(f"--grid for singularity-scan is a sample count per actuator, got {args.grid!r}") from None
    if steps < 0:
        raise ConfigError("--grid must be >= 0")
    axes = [
        np.linspace(m - config.joint_range, m + config.joint_range, steps) if steps > 1 else np.array([m] * steps)
        for m in config.neutral.as_tuple()
    ]
    commands = [tuple(c) for c in itertools.product(*axes)]
    commands += [tuple(math.radians(v) for v in _parse_point(p)) for p in args.point or []]
    if not commands:
        raise ConfigError("empty actuator grid")

    report = _report(args, text)
    rows, n_flagged, n_infeasible = [], 0, 0
    for cmd in commands:
        degs = [math.degrees(a) for a in cmd]
        try:
            state = robot.solve(config, robot.ActuatorCommand(*cmd), check_range=False)
        except (NoAssembly, CouplingInfeasible, DegenerateDenominator) as exc:
            status = "coupling" if isinstance(exc, CouplingInfeasible) else "no-assembly"
            rows.append(degs + [status] + [math.nan] * 6 + [None] * 3)
            n_infeasible += 1
            continue
        rep = robot.full_singularity(config, state, args.tol)
        f = robot.singular_factors(state)
        flagged = rep.gain or rep.loss or any(rep.legs)
        n_flagged += flagged
        rows.append(degs + ["ok", rep.det_k, rep.det_kstar, *f.values(), rep.gain, rep.loss, any(rep.legs)])
    if args.out:
        report.outputs.append(str(write_table(args.out, SCAN_COLUMNS, rows, args.format)))
    report.check("rows", len(rows), len(rows) == len(commands))
    report.checks["flagged"] = {"value": n_flagged, "ok": True}
    report.checks["infeasible"] = {"value": n_infeasible, "ok": True}
    return _finish(report, args)


GAIT_COLUMNS = (
    ["t_s", "a1_deg", "a2_deg", "a3_deg", "a4_deg"]
    + [f"foot{k}_{c}_mm" for k in range(1, 5) for c in "xy"]
    + ["head_x_mm", "head_y_mm", "tail_x_mm", "tail_y_mm", "gain", "loss", "leg_singular"]
)


def cmd_gait(args) -> int:
    cfg_file, text = load_config(args.config)
    config = cfg_file.robot_config()
    overrides = {}
    if args.amplitude is not None:
        if args.kind in ("turn-left", "turn-right"):
            overrides["outer"] = math.radians(args.amplitude)
        else:
            overrides["amplitude"] = math.radians(args.amplitude)
    if args.period is not None:
        overrides["period"] = args.period
    prof = cfg_file.gait_profile(args.kind, config, **overrides)
    dt = args.dt if args.dt is not None else prof.period / 200
    if not args.cycles > 0 or not dt > 0:
        raise ConfigError("cycles and dt must be > 0")
    traj = gait.rollout(config, prof, args.cycles, dt)
    report = _report(args, text)

    rows = []
    for s in traj.samples:
        st = s.state
        rows.append(
            [s.t, *(math.degrees(a) for a in s.cmd.as_tuple())]
            + [v for tip in st.foot_tips for v in tip]
            + [*st.head_point, *st.tail_point, *s.flags]
        )
    if args.out:
        report.outputs.append(str(write_table(args.out, GAIT_COLUMNS, rows, args.format)))
    paths = traj.foot_paths()
    if args.svg:
        Path(args.svg).write_text(foot_path_svg(paths, f"{args.kind} foot paths (mm)"), encoding="utf-8")
        report.outputs.append(args.svg)

    residual = traj.max_residual(config)
    report.check("samples", len(rows), len(rows) == gait.sample_count(prof.period, args.cycles, dt))
    report.check("max_residual_mm", residual, residual < 1e-9)
    report.check("singular_samples", traj.singular_count(), traj.singular_count() == 0)
    per_cycle = prof.period / dt
    if float(args.cycles).is_integer() and abs(per_cycle - round(per_cycle)) < 1e-9:
        gap = float(np.max(np.abs(paths[0] - paths[-1])))
        report.check("foot_path_gap_mm", gap, gap < 1e-6)
    return _finish(report, args)


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="robot configuration file (defaults built in)")
    common.add_argument("--out", help="output table path")
    common.add_argument("--grid", help="sample grid: NXxNY for chart, count per actuator for singularity-scan")
    common.add_argument("--branch", help="'+'/'-' for fk, two signs such as '++' for ik and lci charts")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="output table format")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="lizardkin", description="Planar linkage kinematics for a lizard robot.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dof", parents=[common], help="planar mobility count")
    p.add_argument("links", type=int, help="number of links including ground")
    p.add_argument("joints", type=int)
    p.add_argument("--freedoms", type=int, nargs="+", help="freedom per joint (default: all 1)")
    p.set_defaults(func=cmd_dof)

    p = sub.add_parser("synth", parents=[common], help="dimensionalize (r1, r2, r3)")
    for name in ("r1", "r2", "r3"):
        p.add_argument(name, type=float)
    p.add_argument("r3_mm", type=float, help="physical half base length (mm)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("chart", parents=[common], help="workspace or LCI chart of the head five-bar")
    p.add_argument("--kind", choices=("workspace", "lci"), default="lci")
    p.add_argument("--svg", help="heat map output path")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_chart)

    p = sub.add_parser("fk", parents=[common], help="forward position kinematics")
    p.add_argument("--mechanism", choices=("head", "tail", "leg", "robot"), default="head")
    p.add_argument("angles", type=float, nargs="+", help="active angles in degrees")
    p.set_defaults(func=cmd_fk)

    p = sub.add_parser("ik", parents=[common], help="five-bar inverse position kinematics")
    p.add_argument("--mechanism", choices=("head", "tail"), default="head")
    p.add_argument("x", type=float)
    p.add_argument("y", type=float)
    p.set_defaults(func=cmd_ik)

    p = sub.add_parser("singularity-scan", parents=[common], help="singularity flags over an actuator grid")
    p.add_argument("--point", action="append", help="extra command a1,a2,a3,a4 in degrees (repeatable)")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("gait", parents=[common], help="roll out a gait profile")
    p.add_argument("--kind", choices=[k.value for k in gait.GaitKind], default="walk")
    p.add_argument("--cycles", type=float, default=2)
    p.add_argument("--dt", type=float)
    p.add_argument("--period", type=float)
    p.add_argument("--amplitude", type=float, help="sweep amplitude in degrees (outer side for turns)")
    p.add_argument("--svg", help="foot path plot output path")
    p.set_defaults(func=cmd_gait)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ParameterError, BadParams, CommandOutOfRange) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GeometryError as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except (NoAssembly, OutOfWorkspace, CouplingInfeasible, DegenerateDenominator, SingularHere) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_KINEMATIC


if __name__ == "__main__":
    sys.exit(main())
