"""Acceptance criteria 1-9, one PASS/FAIL line each.

Run under pytest (lines are collected in the terminal summary) or directly
with ``python tests/test_acceptance.py``.
"""
import math
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES  # noqa: E402
from oracles import angle_close, central_diff, fivebar_solutions, fourbar_solutions  # noqa: E402
from sampling import random_command, random_fivebar, random_fourbar  # noqa: E402
from test_robot import random_joint_state, robot_jacobian_errors  # noqa: E402

from lizardkin import fivebar, fourbar, synthesis  # noqa: E402
from lizardkin.cli import main as cli_main  # noqa: E402
from lizardkin.core import JointCounts, mobility  # noqa: E402
from lizardkin.fivebar import FiveBarGeometry  # noqa: E402
from lizardkin.fourbar import CROSSED, OPEN, FourBarState  # noqa: E402
from lizardkin.gait import profile, rollout  # noqa: E402
from lizardkin.io.config import ConfigFile, parse_config, serialize_config  # noqa: E402
from lizardkin.robot import (  # noqa: E402
    RobotConfig,
    assemble_k_matrices,
    kstar_closed_form,
    passive_scale,
    singular_factors,
)

N = 1000
CFG = RobotConfig()
HEAD = FiveBarGeometry.symmetric(20, 30, 50)


def _record(number, title, ok, detail, started):
    line = f"{'PASS' if ok else 'FAIL'} {number}. {title}: {detail} ({time.perf_counter() - started:.2f} s)"
    ACCEPTANCE_LINES[number] = line
    print(line)
    assert ok, line


def _rng(number):
    return np.random.default_rng(1000 + number)


def test_1_mobility():
    t0 = time.perf_counter()
    robot_dof = mobility(JointCounts(13, 16, (1,) * 16))
    leg_dof = mobility(JointCounts(4, 4, (1,) * 4))
    _record(1, "mobility", robot_dof == 4 and leg_dof == 1, f"M(13, 16) = {robot_dof}, M(4, 4) = {leg_dof}", t0)


def test_2_synthesis(capsys):
    t0 = time.perf_counter()
    code = cli_main(["synth", "0.3", "0.5", "0.1", "10"])
    lines = capsys.readouterr().out.splitlines()
    want = ["D = 100", "l1 = 30 mm", "l2 = 50 mm", "l0 = 20 mm"]
    missing = [w for w in want if w not in lines]
    _record(2, "dimensional synthesis", code == 0 and not missing,
            f"exit {code}, printed {', '.join(w for w in want if w in lines)}", t0)


def _inscribes(geom, y, r, res=0.5):
    xs = np.arange(-r, r + res / 2, res)
    ys = np.arange(y - r, y + r + res / 2, res)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    inside = np.hypot(gx, gy - y) <= r
    return bool(np.all(synthesis.in_workspace(geom, gx[inside], gy[inside]) & (gy[inside] >= 0)))


def test_3_mic():
    t0 = time.perf_counter()
    nd = synthesis.mic(FiveBarGeometry.symmetric(0.2, 0.3, 0.5))
    m = synthesis.mic(HEAD)
    ok_r = abs(nd.r_mic - 0.3) <= 1e-12
    ok_in = _inscribes(HEAD, m.y_mic, m.r_mic)
    # a circle 0.5 mm larger must not fit anywhere on the axis
    ok_max = not any(_inscribes(HEAD, y, m.r_mic + 0.5) for y in np.arange(0.0, 90.0, 0.25))
    _record(3, "maximal inscribed circle", ok_r and ok_in and ok_max,
            f"r_MIC = {nd.r_mic!r}, y_MIC = {m.y_mic:.6f} mm, inscribed {ok_in}, maximal {ok_max}", t0)


def test_4_lci():
    t0 = time.perf_counter()
    chart = synthesis.lci_chart(HEAD, synthesis.GridSpec.default(HEAD, 200, 200))
    med = synthesis.mic_median_lci(HEAD, chart)
    _record(4, "LCI over the MIC disk", med > 0.7, f"median LCI = {med:.4f} on 200x200", t0)


def test_5_closed_form_vs_oracle():
    t0 = time.perf_counter()
    rng = _rng(5)
    worst = 0.0
    for _ in range(N):
        geom, t1, t4 = random_fivebar(rng)
        ref = fivebar_solutions(geom.l0, geom.l1, geom.l2, geom.l3, geom.l4, t1, t4)
        for asm in (1, -1):
            st = fivebar.fk(geom, t1, t4, asm)
            worst = max(worst, min(max(abs(math.remainder(st.theta2 - a, 2 * math.pi)),
                                       abs(math.remainder(st.theta3 - b, 2 * math.pi))) for a, b in ref))
    worst_leg = 0.0
    for _ in range(N):
        geom, t = random_fourbar(rng)
        ref = fourbar_solutions(geom.lg1, geom.lg12, geom.lg13, geom.lg10, t)
        for branch in (OPEN, CROSSED):
            st = fourbar.leg_fk(geom, t, branch)
            worst_leg = max(worst_leg, min(max(abs(math.remainder(st.theta_lg12 - a, 2 * math.pi)),
                                               abs(math.remainder(st.theta_lg13 - b, 2 * math.pi)))
                                           for a, b in ref))
    _record(5, "closed form vs oracle", worst < 1e-6 and worst_leg < 1e-6,
            f"max error five-bar {worst:.2e} rad, four-bar {worst_leg:.2e} rad over {N} samples each", t0)


def test_6_jacobians():
    t0 = time.perf_counter()
    rng = _rng(6)
    e5 = 0.0
    for _ in range(N):
        geom, t1, t4 = random_fivebar(rng)
        st = fivebar.fk(geom, t1, t4, int(rng.choice([1, -1])))
        K, Ks = fivebar.jacobians(geom, st)
        J = central_diff(lambda x: fivebar.loop_residual(geom, *x), [st.theta1, st.theta2, st.theta3, st.theta4])
        scale = np.max(np.abs(J))
        e5 = max(e5, np.max(np.abs(K - J[:, [0, 3]])) / scale, np.max(np.abs(Ks - J[:, [1, 2]])) / scale)
    e4 = 0.0
    for _ in range(N):
        geom, t = random_fourbar(rng)
        st = fourbar.leg_fk(geom, t, int(rng.choice([OPEN, CROSSED])))
        K, Ks = fourbar.leg_jacobians(geom, st)
        J = central_diff(lambda x: fourbar.leg_residual_state(geom, FourBarState(x[0], x[1], x[2], (0, 0))),
                         [st.theta_lg1, st.theta_lg12, st.theta_lg13])
        scale = np.max(np.abs(J))
        e4 = max(e4, np.max(np.abs(K.sum(axis=1) - J[:, 0])) / scale, np.max(np.abs(Ks - J[:, [2, 1]])) / scale)
    er = 0.0
    for _ in range(N):
        _, st = random_command(rng, CFG)
        er = max(er, *robot_jacobian_errors(st.joints))
    ok = max(e5, e4, er) < 1e-6
    _record(6, "Jacobians vs central differences", ok,
            f"max relative error five-bar {e5:.1e}, four-bar {e4:.1e}, robot {er:.1e} over {N} states each", t0)


def test_7_singularity_closed_form():
    t0 = time.perf_counter()
    rng = _rng(7)
    worst = 0.0
    for _ in range(N):
        q = random_joint_state(rng)
        _, Ks = assemble_k_matrices(CFG, q)
        det, closed = np.linalg.det(Ks), kstar_closed_form(CFG, q)
        worst = max(worst, abs(det - closed) / max(abs(closed), 1e-12 * passive_scale(CFG.links)))
    # zero each factor in turn
    scale = passive_scale(CFG.links)
    forced = {}
    for name, change in (
        ("sin(2*theta11)", lambda q: {"theta11": 0.0}),
        ("sin(2*theta14)", lambda q: {"theta14": math.pi / 2}),
        ("sin(theta2+theta3)", lambda q: {"theta3": -q.theta2}),
        ("sin(theta6+theta7)", lambda q: {"theta7": math.pi - q.theta6}),
    ):
        worst_forced = 0.0
        for _ in range(50):
            q = random_joint_state(rng)
            q = q.replace(**change(q))
            assert abs(singular_factors(q)[name]) < 1e-12
            _, Ks = assemble_k_matrices(CFG, q)
            worst_forced = max(worst_forced, abs(np.linalg.det(Ks)) / scale)
        forced[name] = worst_forced
    ok = worst < 1e-6 and all(v < 1e-9 for v in forced.values())
    _record(7, "det K* closed form", ok,
            f"max relative error {worst:.1e} over {N} states; forced factors give det/scale <= "
            f"{max(forced.values()):.1e}", t0)


def test_8_round_trips():
    t0 = time.perf_counter()
    rng = _rng(8)
    worst = 0.0
    for _ in range(N):
        geom, t1, t4 = random_fivebar(rng)
        st = fivebar.fk(geom, t1, t4, int(rng.choice([1, -1])))
        r1, r4 = fivebar.ik(geom, st.endpoint, st.working_mode(geom))
        worst = max(worst, abs(math.remainder(r1 - t1, 2 * math.pi)), abs(math.remainder(r4 - t4, 2 * math.pi)))
    text = serialize_config(ConfigFile())
    edited = serialize_config(parse_config(text.replace("joint_range = 45.0", "joint_range = 40.5")))
    stable = serialize_config(parse_config(text)) == text and serialize_config(parse_config(edited)) == edited
    _record(8, "round trips", worst < 1e-9 and stable,
            f"ik(fk) max error {worst:.1e} rad over {N} samples; config bytes stable {stable}", t0)


def test_9_gaits():
    t0 = time.perf_counter()
    details, ok = [], True
    for kind in ("walk", "trot"):
        traj = rollout(CFG, profile(kind, CFG), n_cycles=2)
        paths = traj.foot_paths()
        gap = float(np.max(np.hypot(*(paths[0] - paths[-1]).T)))
        res = traj.max_residual(CFG)
        flags = traj.singular_count()
        ok &= flags == 0 and res < 1e-9 and gap < 1e-6
        details.append(f"{kind}: {flags} flags, residual {res:.1e} mm, gap {gap:.1e} mm")
    left = rollout(CFG, profile("turn-left", CFG), n_cycles=1).foot_paths()
    right = rollout(CFG, profile("turn-right", CFG), n_cycles=1).foot_paths()
    # reflect x and swap left/right legs (1<->2, 3<->4)
    mirrored = right[:, [1, 0, 3, 2]] * np.array([-1.0, 1.0])
    mirror_err = float(np.max(np.abs(left - mirrored)))
    ok &= mirror_err < 1e-9
    details.append(f"turn mirror error {mirror_err:.1e} mm")
    _record(9, "gait properties", ok, "; ".join(details), t0)


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
