import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lizardkin.io.config import ConfigError, ConfigFile, load_config, parse_config, serialize_config
from lizardkin.io.export import RAMP, RunReport, chart_svg, digest, foot_path_svg, format_value, table_text
from lizardkin.robot import RobotConfig

SVG_NS = "{http://www.w3.org/2000/svg}"


def test_default_file_round_trips_byte_for_byte():
    text = serialize_config(ConfigFile())
    assert serialize_config(parse_config(text)) == text


def test_defaults_build_the_default_robot():
    assert ConfigFile().robot_config() == RobotConfig()
    assert parse_config("").robot_config() == RobotConfig()


@given(
    st.floats(5.0, 80.0, allow_nan=False),
    st.floats(-180.0, 180.0, allow_nan=False),
    st.booleans(),
    st.sampled_from([1, -1]),
)
def test_edited_values_round_trip(l2, heading, mirror, branch):
    cfg = parse_config(
        f"[links]\nl2 = {l2!r}\n[legs]\nleg3_heading = {heading!r}\nleg3_mirror = {str(mirror).lower()}\n"
        f"leg_branch = {branch:+d}\n"
    )
    text = serialize_config(cfg)
    again = parse_config(text)
    assert again == cfg
    assert serialize_config(again) == text
    assert again.links["l2"] == l2 and again.legs["leg3_mirror"] is mirror


def test_comments_and_partial_sections():
    cfg = parse_config("# robot\n[angles]\njoint_range = 30  ; degrees\n")
    assert cfg.angles["joint_range"] == 30.0
    assert cfg.robot_config().joint_range == pytest.approx(math.radians(30))


@pytest.mark.parametrize(
    "text",
    [
        "[wheels]\nn = 4\n",
        "[links]\nl99 = 3\n",
        "[links]\nl2 = long\n",
        "[links]\nl2 = nan\n",
        "[angles]\nhead_assembly = 0\n",
        "[legs]\nleg1_mirror = maybe\n",
        "no header\n",
        "[links]\nl2 = 1\nl2 = 2\n",
    ],
)
def test_rejects_bad_text(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_out_of_domain_value_is_a_config_error():
    with pytest.raises(ConfigError):
        parse_config("[links]\nl2 = -4\n").robot_config()


def test_load_config(tmp_path):
    path = tmp_path / "robot.ini"
    path.write_text("[gait]\nperiod = 3\n", encoding="utf-8")
    cfg, text = load_config(path)
    assert cfg.gait["period"] == 3.0 and text.startswith("[gait]")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini")


def test_gait_profile_from_file():
    cfg = parse_config("[gait]\ntrot_amplitude = 20\nperiod = 1.5\n")
    prof = cfg.gait_profile("trot")
    assert prof.amplitude == (math.radians(20),) * 4 and prof.period == 1.5


@pytest.mark.parametrize(
    "value,expected",
    [(1 / 3, "0.333333333"), (123456.789012, "123456.789"), (-0.0, "0"), (True, "1"), (False, "0"),
     (7, "7"), (math.nan, ""), (None, ""), (2.5e-14, "2.5e-14")],
)
def test_format_value(value, expected):
    assert format_value(value) == expected


def test_csv_table():
    text = table_text(["x", "ok"], [[0.1, True], [math.pi, False]])
    assert text == "x,ok\n0.1,1\n3.14159265,0\n"


def test_json_table():
    data = json.loads(table_text(["x", "ok"], [[math.nan, True], [math.pi, False]], "json"))
    assert data == {"x": [None, 3.14159265], "ok": [True, False]}
    with pytest.raises(ValueError):
        table_text(["x"], [], "xml")


def test_ramp():
    assert len(RAMP) == 256 and len(set(RAMP)) > 200
    assert RAMP[0] == "#440154" and RAMP[-1] == "#fde725"


def test_chart_svg_is_valid_and_deterministic():
    vals = np.linspace(0, 1, 12).reshape(4, 3)
    mask = vals > 0.1
    a = chart_svg(vals, mask, "t")
    assert a == chart_svg(vals.copy(), mask.copy(), "t")
    root = ET.fromstring(a)
    assert root.tag == SVG_NS + "svg"
    cells = [r for r in root.iter(SVG_NS + "rect") if r.get("fill") not in ("#ffffff",)]
    # 256 colour bar entries plus the masked-in cells (runs never merge here)
    assert len(cells) == 256 + int(mask.sum())


def test_foot_path_svg():
    t = np.linspace(0, 2 * math.pi, 30)
    paths = np.stack([np.stack([np.cos(t) + k, np.sin(t)], axis=1) for k in range(4)], axis=1)
    root = ET.fromstring(foot_path_svg(paths, "feet"))
    assert len(list(root.iter(SVG_NS + "polyline"))) == 4


def test_run_report():
    rep = RunReport(command=["x"], input_digest=digest("a"))
    rep.check("fine", 1.0, True)
    assert rep.passed
    rep.check("broken", 2.0, False)
    data = json.loads(rep.to_json())
    assert data["passed"] is False and data["checks"]["broken"] == {"value": 2.0, "ok": False}
    assert digest("a", "b") != digest("ab")
