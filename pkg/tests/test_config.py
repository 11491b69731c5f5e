"""Configuration parsing and validation."""

import math

import pytest

from loopclimb.config import ConfigError, parse_config
from loopclimb.material import calibrated_h0


def test_minimal_config_defaults():
    cfg = parse_config("scenario = ellipse\n")
    assert cfg.nx == cfg.ny == 64
    assert cfg.length_x == pytest.approx(2 * math.pi)
    assert cfg.eps == pytest.approx(2 * math.pi / 64)   # eps_cells = 1 default
    assert cfg.b == pytest.approx(2 * math.pi / 300)
    assert cfg.e0 == 0.005
    assert cfg.nu == 0.3
    assert cfg.shear_g == 1.0
    assert cfg.beta == 0.0
    assert cfg.f_app == 0.0
    assert cfg.h0 == pytest.approx(calibrated_h0(1.0, 0.3, cfg.b))
    assert cfg.dt is None
    assert cfg.t_end == math.inf


def test_comments_and_blanks():
    cfg = parse_config("""
# a comment line
scenario = ellipse   # trailing comment

beta = 2.5
""")
    assert cfg.beta == 2.5


def test_missing_scenario():
    with pytest.raises(ConfigError, match="scenario"):
        parse_config("beta = 1\n")


def test_unknown_key_line_number():
    with pytest.raises(ConfigError, match="line 3"):
        parse_config("scenario = ellipse\nbeta = 1\nbogus_key = 2\n")


def test_duplicate_key():
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config("scenario = ellipse\nbeta = 1\nbeta = 2\n")


def test_bad_value_type():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("scenario = ellipse\nnx = sixty-four\n")


def test_odd_grid_rejected():
    with pytest.raises(ConfigError, match="even"):
        parse_config("scenario = ellipse\nnx = 63\n")


def test_theta_required_in_analysis_mode():
    with pytest.raises(ConfigError, match="theta"):
        parse_config("scenario = ellipse\nmodel_mode = analysis\n")
    cfg = parse_config("scenario = ellipse\nmodel_mode = analysis\ntheta = 0.1\n")
    assert cfg.theta == 0.1


def test_ellipse_semi_axes_absolute_units():
    cfg = parse_config("scenario = ellipse\nellipse_l1 = 80\nellipse_l2 = 40\n")
    kind, cx, cy, a, b_ax = cfg.loops[0]
    assert kind == "ellipse"
    assert a == pytest.approx(80 * cfg.b)
    assert b_ax == pytest.approx(40 * cfg.b)


def test_two_circles_geometry():
    cfg = parse_config(
        "scenario = two_circles\ncircle1_r = 30\ncircle2_r = 20\n"
        "circle1_cx = -40\ncircle2_cx = 35\n")
    (k1, x1, _y1, r1), (k2, x2, _y2, r2) = cfg.loops
    assert k1 == k2 == "circle"
    assert r1 == pytest.approx(30 * cfg.b)
    assert x2 == pytest.approx(35 * cfg.b)


def test_clearance_violation():
    # a 140b semi-axis reaches 2.93, leaving less than 10 eps to the boundary
    with pytest.raises(ConfigError, match="clear"):
        parse_config("scenario = ellipse\nellipse_l1 = 140\nellipse_l2 = 40\n")


def test_clearance_scales_with_eps():
    # valid at eps = dx but not at eps = 3 dx
    text = "scenario = ellipse\nellipse_l1 = 56\nellipse_l2 = 28\neps_cells = {c}\n"
    parse_config(text.format(c=1))
    with pytest.raises(ConfigError, match="clear"):
        parse_config(text.format(c=3))


def test_custom_field_requires_path():
    with pytest.raises(ConfigError, match="field_path"):
        parse_config("scenario = custom_field\n")


def test_scheme_validation():
    cfg = parse_config("scenario = ellipse\nscheme = semi_implicit\n")
    assert cfg.scheme == "semi_implicit"
    with pytest.raises(ConfigError, match="scheme"):
        parse_config("scenario = ellipse\nscheme = rk4\n")


def test_bool_parsing():
    cfg = parse_config("scenario = ellipse\npgm = true\nfigures = off\n")
    assert cfg.pgm is True
    assert cfg.figures is False
    with pytest.raises(ConfigError):
        parse_config("scenario = ellipse\npgm = maybe\n")


def test_explicit_dt_and_t_end():
    cfg = parse_config("scenario = ellipse\ndt = 1e-8\nt_end = 0.5\n")
    assert cfg.dt == 1e-8
    assert cfg.t_end == 0.5
    with pytest.raises(ConfigError, match="dt"):
        parse_config("scenario = ellipse\ndt = -1e-8\n")


def test_params_roundtrip():
    cfg = parse_config(
        "scenario = ellipse\nbeta = 1.5\nm0 = 0.25\nh0 = 0\nnu = 0.25\n")
    p = cfg.params()
    assert p.beta == 1.5
    assert p.m0 == 0.25
    assert p.h0 == 0.0
    assert p.nu == 0.25
