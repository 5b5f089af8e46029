"""INI-style run configuration.

Sections and keys (every key is optional and falls back to the default shown
in :data:`DEFAULTS`)::

    [domain]     length, n
    [time]       T, dt
    [potentials] preset, F_coeffs, G_coeffs
    [source]     kind, R1, R2, R3, R4, lipschitz_R
    [bounds]     theta_star_low, theta_star_high, chi_star_low, chi_star_high
    [bc]         left, right
    [ic]         theta0, chi0
    [scheme]     eps, newton_tol, newton_max, theta_source_implicit
    [output]     dir, stride, plots

Value syntax for the structured entries:

* coefficient ``R1..R4``: ``0.5`` | ``affine a b`` (``a + b*x``) |
  ``product a b c d`` (``(a + b*x)*(c + d*t)``);
* boundary datum: ``1.0`` | ``piecewise t0 v0, t1 v1, ...``;
* initial field: ``constant c`` | ``affine a b`` | ``sine_bump low high`` |
  ``nodal v0 v1 ...``.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, SpecValidationError
from .model import (
    BoundaryData,
    InitialCondition,
    Potentials,
    ProblemSpec,
    SourceSpec,
    validate_spec,
)
from .monotone import Coefficient
from .stepper import SchemeConfig

DEFAULTS = {
    "domain": {"length": "1.0", "n": "128"},
    "time": {"T": "1.0", "dt": "0.001"},
    "potentials": {"preset": "first_order", "F_coeffs": "", "G_coeffs": ""},
    "source": {"kind": "none", "R1": "0.0", "R2": "0.0", "R3": "0.0", "R4": "0.0", "lipschitz_R": "none"},
    "bounds": {"theta_star_low": "0.5", "theta_star_high": "2.0", "chi_star_low": "0.0", "chi_star_high": "1.0"},
    "bc": {"left": "1.0", "right": "1.0"},
    "ic": {"theta0": "constant 1.0", "chi0": "constant 0.0"},
    "scheme": {"eps": "0.001", "newton_tol": "1e-10", "newton_max": "50", "theta_source_implicit": "auto"},
    "output": {"dir": "output", "stride": "10", "plots": "false"},
}


@dataclass(frozen=True)
class OutputOptions:
    dir: str = "output"
    stride: int = 10
    plots: bool = False


@dataclass
class RunConfig:
    spec: ProblemSpec
    scheme: SchemeConfig
    output: OutputOptions = field(default_factory=OutputOptions)
    values: dict = field(default_factory=dict)  # resolved raw strings per section
    defaults_applied: list = field(default_factory=list)
    source_path: str = ""

    @property
    def name(self) -> str:
        return Path(self.source_path).stem if self.source_path else "run"

    def resolved_text(self) -> str:
        lines = []
        for sec, keys in DEFAULTS.items():
            lines.append(f"[{sec}]")
            for k in keys:
                lines.append(f"{k} = {self.values[sec][k]}")
            lines.append("")
        return "\n".join(lines)


_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^\s*([^=#;\s\[][^=]*?)\s*=")


def _line_map(text):
    where, sec = {}, None
    for no, line in enumerate(text.splitlines(), start=1):
        m = _SECTION_RE.match(line)
        if m:
            sec = m.group(1).strip()
            where.setdefault((sec, None), no)
            continue
        m = _KEY_RE.match(line)
        if m and sec is not None:
            where[(sec, m.group(1).strip())] = no
    return where


def _floats(words, what, lineno):
    try:
        return [float(w) for w in words]
    except ValueError:
        raise ConfigError(f"{what}: expected numbers, got {' '.join(words)!r}", lineno) from None


def parse_coefficient(text: str, lineno=None) -> Coefficient:
    words = text.split()
    if not words:
        raise ConfigError("empty coefficient", lineno)
    if words[0] == "affine":
        v = _floats(words[1:], "affine coefficient", lineno)
        if len(v) != 2:
            raise ConfigError("affine coefficient takes 2 numbers", lineno)
        return Coefficient(v[0], v[1])
    if words[0] == "product":
        v = _floats(words[1:], "product coefficient", lineno)
        if len(v) != 4:
            raise ConfigError("product coefficient takes 4 numbers", lineno)
        return Coefficient(*v)
    if words[0] == "constant":
        words = words[1:]
    v = _floats(words, "coefficient", lineno)
    if len(v) != 1:
        raise ConfigError("constant coefficient takes 1 number", lineno)
    return Coefficient(v[0])


def format_coefficient(c: Coefficient) -> str:
    k = c.kind
    if k == "constant":
        return repr(c.a * c.c)
    if k == "affine_x":
        return f"affine {c.a * c.c!r} {c.b * c.c!r}"
    return f"product {c.a!r} {c.b!r} {c.c!r} {c.d!r}"


def parse_boundary(text: str, lineno=None) -> BoundaryData:
    words = text.split(None, 1)
    if words and words[0] == "piecewise":
        knots = []
        for pair in (words[1] if len(words) > 1 else "").split(","):
            v = _floats(pair.split(), "piecewise knot", lineno)
            if len(v) != 2:
                raise ConfigError(f"piecewise knot needs 't value', got {pair.strip()!r}", lineno)
            knots.append(tuple(v))
        if len(knots) < 2:
            raise ConfigError("piecewise boundary datum needs at least two knots", lineno)
        return BoundaryData.piecewise_linear(knots)
    if words and words[0] == "constant":
        text = words[1] if len(words) > 1 else ""
    v = _floats(text.split(), "boundary datum", lineno)
    if len(v) != 1:
        raise ConfigError("constant boundary datum takes 1 number", lineno)
    return BoundaryData(v[0])


def format_boundary(b: BoundaryData) -> str:
    if b.knots is None:
        return repr(b.value)
    return "piecewise " + ", ".join(f"{t!r} {v!r}" for t, v in b.knots)


def parse_initial(text: str, lineno=None) -> InitialCondition:
    words = text.split()
    if not words:
        raise ConfigError("empty initial condition", lineno)
    kind, params = words[0], words[1:]
    if kind not in ("constant", "affine", "sine_bump", "nodal"):
        # a bare number is a constant
        kind, params = "constant", words
    v = _floats(params, f"{kind} initial condition", lineno)
    try:
        return InitialCondition(kind, tuple(v))
    except ValueError as exc:
        raise ConfigError(str(exc), lineno) from None


def format_initial(ic: InitialCondition) -> str:
    return " ".join([ic.kind] + [repr(float(p)) for p in ic.params])


def _parse_bool(text, what, lineno):
    t = text.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"{what}: expected true/false, got {text!r}", lineno)


def _read(text: str):
    cp = configparser.ConfigParser(
        delimiters=("=",),
        comment_prefixes=("#", ";"),
        inline_comment_prefixes=("#",),
        interpolation=None,
        strict=True,
        default_section="__no_default__",
    )
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("key outside of any [section]", exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"cannot parse {line.strip()!r}", lineno) from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigError(exc.message.split(":")[-1].strip(), exc.lineno) from None
    return cp


def parse_config_text(text: str, source_path: str = "", validate: bool = True) -> RunConfig:
    """Parse configuration text; see the module docstring for the format."""
    where = _line_map(text)
    cp = _read(text)
    for sec in cp.sections():
        if sec not in DEFAULTS:
            raise ConfigError(f"unknown section [{sec}]", where.get((sec, None)))
        for key in cp[sec]:
            if key not in DEFAULTS[sec]:
                raise ConfigError(f"unknown key {key!r} in [{sec}]", where.get((sec, key)))

    values, applied = {}, []
    for sec, keys in DEFAULTS.items():
        values[sec] = {}
        for key, default in keys.items():
            if cp.has_option(sec, key):
                values[sec][key] = cp[sec][key].strip()
            else:
                values[sec][key] = default
                applied.append(f"{sec}.{key}")

    def line(sec, key):
        return where.get((sec, key))

    def num(sec, key, kind=float):
        raw = values[sec][key]
        try:
            return kind(raw)
        except ValueError:
            raise ConfigError(f"{sec}.{key}: expected {kind.__name__}, got {raw!r}", line(sec, key)) from None

    v = values
    pot_preset = v["potentials"]["preset"]
    try:
        if pot_preset == "custom_polynomial":
            fc = _floats(v["potentials"]["F_coeffs"].replace(",", " ").split(), "F_coeffs", line("potentials", "F_coeffs"))
            gc = _floats(v["potentials"]["G_coeffs"].replace(",", " ").split(), "G_coeffs", line("potentials", "G_coeffs"))
            potentials = Potentials(pot_preset, tuple(fc), tuple(gc))
        else:
            potentials = Potentials(pot_preset)
    except ValueError as exc:
        raise ConfigError(str(exc), line("potentials", "preset")) from None

    lip = v["source"]["lipschitz_R"]
    lip_value = None if lip.lower() in ("", "none") else num("source", "lipschitz_R")
    coeffs = {k: parse_coefficient(v["source"][k], line("source", k)) for k in ("R1", "R2", "R3", "R4")}
    try:
        source = SourceSpec(v["source"]["kind"], lipschitz_R=lip_value, **coeffs)
    except ValueError as exc:
        raise ConfigError(str(exc), line("source", "kind")) from None

    try:
        spec = ProblemSpec(
            length=num("domain", "length"),
            horizon=num("time", "T"),
            n=num("domain", "n", int),
            potentials=potentials,
            source=source,
            theta_star_low=num("bounds", "theta_star_low"),
            theta_star_high=num("bounds", "theta_star_high"),
            chi_star_low=num("bounds", "chi_star_low"),
            chi_star_high=num("bounds", "chi_star_high"),
            bc_left=parse_boundary(v["bc"]["left"], line("bc", "left")),
            bc_right=parse_boundary(v["bc"]["right"], line("bc", "right")),
            theta0=parse_initial(v["ic"]["theta0"], line("ic", "theta0")),
            chi0=parse_initial(v["ic"]["chi0"], line("ic", "chi0")),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    implicit_raw = v["scheme"]["theta_source_implicit"]
    implicit = None if implicit_raw.lower() == "auto" else _parse_bool(
        implicit_raw, "scheme.theta_source_implicit", line("scheme", "theta_source_implicit")
    )
    try:
        scheme = SchemeConfig(
            dt=num("time", "dt"),
            eps=num("scheme", "eps"),
            newton_tol=num("scheme", "newton_tol"),
            newton_max=num("scheme", "newton_max", int),
            theta_source_implicit=implicit,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    stride = num("output", "stride", int)
    if stride < 1:
        raise ConfigError("output.stride must be >= 1", line("output", "stride"))
    output = OutputOptions(
        dir=v["output"]["dir"],
        stride=stride,
        plots=_parse_bool(v["output"]["plots"], "output.plots", line("output", "plots")),
    )

    # canonical spelling in the echoed file
    v["source"].update({k: format_coefficient(c) for k, c in coeffs.items()})
    v["bc"]["left"], v["bc"]["right"] = format_boundary(spec.bc_left), format_boundary(spec.bc_right)
    v["ic"]["theta0"], v["ic"]["chi0"] = format_initial(spec.theta0), format_initial(spec.chi0)

    if validate:
        report = validate_spec(spec)
        if report:
            raise SpecValidationError(report)
    return RunConfig(spec, scheme, output, v, applied, source_path)


def parse_config(path, validate: bool = True) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise
    return parse_config_text(text, str(path), validate)


def demo_config_path(name: str) -> Path:
    """Path of a shipped demo configuration (``name`` without extension)."""
    from importlib.resources import files

    p = Path(str(files("entropy_pf") / "data" / f"{name}.cfg"))
    if not p.exists():
        raise FileNotFoundError(f"no shipped demo named {name!r}")
    return p


def demo_names():
    from importlib.resources import files

    d = Path(str(files("entropy_pf") / "data"))
    return sorted(p.stem for p in d.glob("*.cfg"))
