import math

import numpy as np
import pytest

from lizardkin import fourbar
from lizardkin.core import JointState, LinkSet, LoopId, loop_residual
from lizardkin.errors import CommandOutOfRange, CouplingInfeasible, NoAssembly
from lizardkin.robot import (
    ACTIVE_COLUMNS,
    PASSIVE_COLUMNS,
    ActuatorCommand,
    LegMount,
    RobotConfig,
    assemble_k_matrices,
    full_singularity,
    kstar_closed_form,
    passive_scale,
    solve,
)
from sampling import random_command

CFG = RobotConfig()
DEG = math.pi / 180
BODY_LOOPS = (LoopId.HEAD, LoopId.TAIL, LoopId.LEFT_BODY, LoopId.RIGHT_BODY)
ACTIVE = ("theta1", "theta4", "theta5", "theta8")
# joints that the couplings move together with each actuator
COUPLED = {"theta1": "theta12", "theta4": "theta16", "theta5": "theta9", "theta8": "theta13"}


def _sub_residual(state):
    return np.concatenate([loop_residual(CFG.links, state, loop) for loop in BODY_LOOPS])


def _shift(state, name, h):
    changes = {name: state.theta(int(name[5:])) + h}
    if name in COUPLED:
        other = COUPLED[name]
        changes[other] = state.theta(int(other[5:])) + h
    return state.replace(**changes)


def test_neutral_pose_is_bilaterally_symmetric():
    st = solve(CFG, CFG.neutral)
    f = np.array(st.foot_tips)
    assert np.allclose(f[0], f[1] * [-1, 1], atol=1e-9)
    assert np.allclose(f[3], f[2] * [-1, 1], atol=1e-9)
    assert abs(st.head_point[0]) < 1e-9 and abs(st.tail_point[0]) < 1e-9
    assert st.joints.theta1 == st.joints.theta4
    assert st.joints.theta2 == pytest.approx(st.joints.theta3, abs=1e-12)


def test_neutral_pose_is_not_singular():
    rep = full_singularity(CFG, solve(CFG, CFG.neutral))
    assert not rep.any and rep.vanishing_factors == ()


def test_random_commands_close_all_loops_and_couplings(rng):
    for _ in range(300):
        _, st = random_command(rng, CFG)
        assert st.max_residual(CFG) < 1e-9
        assert np.max(np.abs(st.coupling_errors(CFG))) < 1e-12
        assert 0 <= st.joints.s_left <= CFG.links.l10
        assert 0 <= st.joints.s_right <= CFG.links.l15


def test_legs_follow_their_actuators(rng):
    cmd, st = random_command(rng, CFG)
    drives = (cmd.a1, cmd.a2, cmd.a3, cmd.a4)
    for k in range(4):
        leg = fourbar.leg_fk(CFG.leg_geoms[k], drives[k])
        assert st.joints.legs[k] == pytest.approx((leg.theta_lg1, leg.theta_lg12, leg.theta_lg13))
        assert st.foot_tips[k] == pytest.approx(CFG.leg_mounts[k].to_world(leg.foot_tip))


def test_mount_transform():
    m = LegMount(1.0, 2.0, math.pi / 2, mirror=True)
    assert m.to_world((3.0, 0.5)) == pytest.approx((0.5, -1.0))


def test_solve_is_deterministic(rng):
    cmd, st = random_command(rng, CFG)
    again = solve(CFG, cmd)
    assert again == st


def test_command_out_of_range():
    with pytest.raises(CommandOutOfRange):
        solve(CFG, ActuatorCommand(160 * DEG, 105 * DEG, -75 * DEG, -75 * DEG))


def test_coupling_infeasible_names_the_body_side():
    cmd = ActuatorCommand(150 * DEG, 105 * DEG, -75 * DEG, -30 * DEG)
    with pytest.raises(CouplingInfeasible) as info:
        solve(CFG, cmd)
    assert info.value.mechanism == "left body"


def test_no_assembly_names_the_mechanism():
    cfg = RobotConfig(links=LinkSet(l2=5.0, l3=5.0))
    with pytest.raises(NoAssembly) as info:
        solve(cfg, cfg.neutral)
    assert info.value.mechanism == "head"


def test_k_is_block_diagonal_and_det_factorizes(rng):
    for _ in range(100):
        _, st = random_command(rng, CFG)
        K, Ks = assemble_k_matrices(CFG, st)
        mask = np.kron(np.eye(4), np.ones((2, 2))).astype(bool)
        assert np.all(K[~mask] == 0) and np.all(Ks[~mask] == 0)
        blocks = np.prod([np.linalg.det(K[i:i + 2, i:i + 2]) for i in (0, 2, 4, 6)])
        assert np.linalg.det(K) == pytest.approx(blocks, rel=1e-9)


def test_printed_entries():
    q = solve(CFG, CFG.neutral).joints
    K, Ks = assemble_k_matrices(CFG, q)
    L = CFG.links
    assert K[4, 5] == pytest.approx(-L.l14 * math.sin(L.c1 + q.theta1))
    assert K[6, 6] == pytest.approx(L.l16 * math.sin(L.c4 - q.theta8))
    assert Ks[0, 1] == pytest.approx(-L.l3 * math.sin(q.theta3))
    assert Ks[5, 5] == pytest.approx(L.l12 * math.cos(q.theta11))


def robot_jacobian_errors(state):
    """Largest relative deviation of K and Kstar from central differences."""
    K, Ks = assemble_k_matrices(CFG, state)
    h = 1e-6
    fd_active = np.zeros((8, 4))
    for j, name in enumerate(ACTIVE):
        fd_active[:, j] = (_sub_residual(_shift(state, name, h)) - _sub_residual(_shift(state, name, -h))) / (2 * h)
    merged = np.zeros((8, 4))
    for col, name in enumerate(ACTIVE_COLUMNS):
        merged[:, ACTIVE.index(name)] += K[:, col]
    fd_passive = np.zeros((8, 8))
    for col, name in enumerate(PASSIVE_COLUMNS):
        i = int(name[5:])
        plus = state.replace(**{name: state.theta(i) + h})
        minus = state.replace(**{name: state.theta(i) - h})
        fd_passive[:, col] = (_sub_residual(plus) - _sub_residual(minus)) / (2 * h)
    ea = np.max(np.abs(merged - fd_active)) / np.max(np.abs(fd_active))
    ep = np.max(np.abs(Ks - fd_passive)) / np.max(np.abs(fd_passive))
    return ea, ep


def test_k_matrices_are_residual_partials(rng):
    for _ in range(100):
        _, st = random_command(rng, CFG)
        ea, ep = robot_jacobian_errors(st.joints)
        assert ea < 1e-6 and ep < 1e-6


def random_joint_state(rng):
    return JointState(*rng.uniform(-math.pi, math.pi, 16))


def test_kstar_determinant_closed_form(rng):
    for _ in range(300):
        q = random_joint_state(rng)
        _, Ks = assemble_k_matrices(CFG, q)
        assert np.linalg.det(Ks) == pytest.approx(kstar_closed_form(CFG, q), rel=1e-6, abs=1e-3)


@pytest.mark.parametrize("changes", [{"theta11": 0.0}, {"theta11": math.pi / 2}, {"theta14": 0.0}])
def test_vanishing_body_factor_zeroes_kstar(changes, rng):
    q = random_joint_state(rng).replace(**changes)
    _, Ks = assemble_k_matrices(CFG, q)
    # sin(2 * pi/2) is 1.2e-16 in floating point, so compare the
    # determinant relative to the product of link lengths that scales it
    assert abs(np.linalg.det(Ks)) / passive_scale(CFG.links) < 1e-9


def test_gain_flag_and_factor_name():
    q = solve(CFG, CFG.neutral).joints
    q = q.replace(theta3=math.pi - q.theta2)
    rep = full_singularity(CFG, q)
    assert rep.gain
    assert "sin(theta2+theta3)" in rep.vanishing_factors


def test_bounded_factors_mean_no_gain():
    q = JointState(theta2=0.3, theta3=0.4, theta6=0.2, theta7=0.5, theta11=0.6, theta14=0.7)
    rep = full_singularity(CFG, q)
    assert not rep.gain and rep.vanishing_factors == ()


def test_parallel_head_cranks_are_loss_singular():
    # mirrored theta4 = pi - theta1: both head cranks point the same way
    q = JointState(theta1=1.2, theta4=math.pi - 1.2, theta5=-1.0, theta8=-1.3)
    K, _ = assemble_k_matrices(CFG, q)
    assert np.linalg.det(K[:2, :2]) == pytest.approx(0.0, abs=1e-9)
    assert full_singularity(CFG, q).loss


def test_ramp_is_continuous():
    start = np.array(CFG.neutral.as_tuple())
    end = start + np.array([25, -20, 20, -25]) * DEG
    steps = np.linspace(0.0, 1.0, 1001)
    total = sum(getattr(CFG.links, n) for n in ("lg1", "lg13")) + 100.0
    max_step = np.max(np.abs(end - start)) / 1000
    prev = None
    for s in steps:
        st = solve(CFG, ActuatorCommand(*(start + s * (end - start))))
        tips = np.array(st.foot_tips)
        assert not full_singularity(CFG, st).any
        if prev is not None:
            assert np.max(np.hypot(*(tips - prev).T)) < max_step * total
        prev = tips


def test_config_validation():
    with pytest.raises(ValueError):
        RobotConfig(head_assembly=0)
    with pytest.raises(ValueError):
        RobotConfig(joint_range=0.0)
