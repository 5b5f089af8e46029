import pytest

from entropy_pf.config import (
    demo_config_path,
    demo_names,
    parse_boundary,
    parse_coefficient,
    parse_config,
    parse_config_text,
    parse_initial,
)
from entropy_pf.errors import ConfigError, SpecValidationError
from entropy_pf.monotone import Coefficient

MINIMAL = """
[source]
kind = singular
R1 = 0.5
[ic]
chi0 = sine_bump 0.0 1.0
"""


def test_demos_parse():
    names = demo_names()
    assert {"demo_first_order", "demo_second_order", "demo_cold", "demo_linear_source"} <= set(names)
    for name in names:
        rc = parse_config(demo_config_path(name))
        assert rc.name == name
        assert rc.defaults_applied == [] or all("." in k for k in rc.defaults_applied)


def test_first_order_demo_values():
    rc = parse_config(demo_config_path("demo_first_order"))
    assert rc.spec.n == 128 and rc.spec.horizon == 1.0
    assert rc.spec.source.kind == "singular"
    assert rc.scheme.eps == 1e-3 and rc.scheme.dt == 1e-3
    assert rc.output.stride == 10 and rc.output.plots is False


def test_defaults_are_recorded():
    rc = parse_config_text(MINIMAL)
    assert "scheme.eps" in rc.defaults_applied
    assert "domain.n" in rc.defaults_applied
    assert "source.kind" not in rc.defaults_applied
    assert rc.scheme.eps == 1e-3


def test_invalid_window_rejected():
    with pytest.raises(SpecValidationError):
        parse_config_text(MINIMAL + "[bounds]\ntheta_star_low = 1.5\n")
    rc = parse_config_text(MINIMAL + "[bounds]\ntheta_star_low = 1.5\n", validate=False)
    assert rc.spec.theta_star_low == 1.5


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_config_text("[scheme]\nepsilon = 0.1\n")
    assert info.value.lineno == 2
    assert "unknown key" in str(info.value)


def test_unknown_section():
    with pytest.raises(ConfigError):
        parse_config_text("[solver]\neps = 0.1\n")


def test_bad_number_reports_line():
    with pytest.raises(ConfigError) as info:
        parse_config_text("[time]\nT = 1.0\ndt = fast\n")
    assert info.value.lineno == 3


def test_inline_comment():
    rc = parse_config_text(MINIMAL + "[scheme]\neps = 0.01  # coarse\n")
    assert rc.scheme.eps == 0.01


def test_resolved_round_trip():
    for name in demo_names():
        rc = parse_config(demo_config_path(name))
        again = parse_config_text(rc.resolved_text())
        assert again.spec == rc.spec
        assert again.scheme == rc.scheme
        assert again.defaults_applied == []


def test_coefficient_syntax():
    assert parse_coefficient("0.5") == Coefficient(0.5)
    assert parse_coefficient("constant 0.5") == Coefficient(0.5)
    assert parse_coefficient("affine 0.5 0.25") == Coefficient(0.5, 0.25)
    assert parse_coefficient("product 1 2 3 4") == Coefficient(1.0, 2.0, 3.0, 4.0)
    for bad in ("", "affine 1", "product 1 2", "half"):
        with pytest.raises(ConfigError):
            parse_coefficient(bad)


def test_boundary_syntax():
    assert parse_boundary("1.25")(0.3) == 1.25
    b = parse_boundary("piecewise 0 1.0, 0.5 1.5, 1 1.5")
    assert b(0.25) == pytest.approx(1.25) and b(0.9) == 1.5
    for bad in ("piecewise 0 1.0", "piecewise 0 1.0, 1", "warm"):
        with pytest.raises(ConfigError):
            parse_boundary(bad)


def test_initial_syntax():
    assert parse_initial("constant 0.3").params == (0.3,)
    assert parse_initial("0.3").kind == "constant"
    assert parse_initial("affine -0.9 1.8").params == (-0.9, 1.8)
    assert parse_initial("sine_bump 1 1.5").kind == "sine_bump"
    assert parse_initial("nodal 0 0.5 1").params == (0.0, 0.5, 1.0)
    with pytest.raises(ConfigError):
        parse_initial("affine 1")


def test_boolean_and_auto():
    rc = parse_config_text(MINIMAL + "[scheme]\ntheta_source_implicit = false\n[output]\nplots = yes\n")
    assert rc.scheme.theta_source_implicit is False
    assert rc.output.plots is True
    with pytest.raises(ConfigError):
        parse_config_text(MINIMAL + "[output]\nplots = maybe\n")
