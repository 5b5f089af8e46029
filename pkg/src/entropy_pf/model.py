"""Problem data: potentials, source decomposition, bounds, boundary and
initial data, and the structural hypotheses as a validation report.

All physical constants (heat capacity, conductivity, relaxation and
interface coefficients, critical temperature) are fixed to 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DomainError
from .grid import Grid1D
from .monotone import BaseBeta, Coefficient

# ascending coefficients of F and G
POTENTIAL_PRESETS = {
    "first_order": ((0.0, 0.0, 0.0, -1.0 / 3.0, 0.25), (0.0, 0.0, 0.5, -2.0 / 3.0, 0.25)),
    "second_order": ((0.0, 0.0, -0.5, 0.0, 0.25), (0.0, 0.0, 0.5)),
}


@dataclass(frozen=True)
class Potentials:
    """Polynomial potentials ``F`` and ``G`` of the phase equation."""

    preset: str = "first_order"
    F_coeffs: Optional[tuple] = None
    G_coeffs: Optional[tuple] = None

    def __post_init__(self):
        if self.preset == "custom_polynomial":
            if self.F_coeffs is None or self.G_coeffs is None:
                raise ValueError("custom_polynomial needs F_coeffs and G_coeffs")
        elif self.preset not in POTENTIAL_PRESETS:
            raise ValueError(f"unknown potential preset {self.preset!r}")

    @property
    def coefficients(self):
        if self.preset == "custom_polynomial":
            return tuple(map(float, self.F_coeffs)), tuple(map(float, self.G_coeffs))
        return POTENTIAL_PRESETS[self.preset]

    @cached_property
    def _polys(self):
        f, g = (Polynomial(c) for c in self.coefficients)
        return f, f.deriv(), f.deriv(2), g, g.deriv(), g.deriv(2)

    def F(self, r):
        return self._polys[0](r)

    def F_prime(self, r):
        return self._polys[1](r)

    def F_second(self, r):
        return self._polys[2](r)

    def G(self, r):
        return self._polys[3](r)

    def G_prime(self, r):
        return self._polys[4](r)

    def G_second(self, r):
        return self._polys[5](r)


def eval_F(p: Potentials, r):
    return p.F(r)


def eval_F_prime(p: Potentials, r):
    return p.F_prime(r)


def eval_G(p: Potentials, r):
    return p.G(r)


def eval_G_prime(p: Potentials, r):
    return p.G_prime(r)


SOURCE_KINDS = ("singular", "linear", "none")


@dataclass(frozen=True)
class SourceSpec:
    """Entropy source ``R = pi - beta``.

    * ``singular``: ``R = R1/r**2 + R2`` split as ``beta = R1*(1 - 1/r**2)``,
      ``pi = R1 + R2``;
    * ``linear``: ``R = R3*r - R4`` with ``beta = 0``, ``pi = R``;
    * ``none``: ``R = 0``.
    """

    kind: str = "none"
    R1: Coefficient = field(default_factory=lambda: Coefficient(0.0))
    R2: Coefficient = field(default_factory=lambda: Coefficient(0.0))
    R3: Coefficient = field(default_factory=lambda: Coefficient(0.0))
    R4: Coefficient = field(default_factory=lambda: Coefficient(0.0))
    lipschitz_R: Optional[float] = None

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ValueError(f"unknown source kind {self.kind!r}")

    def pi(self, x, t, r):
        if self.kind == "singular":
            return self.R1(x, t) + self.R2(x, t) + 0.0 * r
        if self.kind == "linear":
            return self.R3(x, t) * r - self.R4(x, t)
        return 0.0 * r

    def pi_prime(self, x, t, r):
        """``d pi / dr``."""
        if self.kind == "linear":
            return self.R3(x, t) + 0.0 * r
        return 0.0 * r

    def beta_base(self, x, t, r):
        if self.kind != "singular":
            return 0.0 * r
        if np.any(np.asarray(r) <= 0.0):
            raise DomainError(
                "singular beta evaluated at r <= 0; only the regularized beta_eps is defined there"
            )
        return self.R1(x, t) * (1.0 - 1.0 / (r * r))

    def R(self, x, t, r):
        return self.pi(x, t, r) - self.beta_base(x, t, r)

    def base_beta(self) -> BaseBeta:
        if self.kind == "singular":
            return BaseBeta("singular", self.R1)
        return BaseBeta("zero")

    def growth_lambda(self, length, horizon) -> float:
        """``lambda`` in ``|pi| <= lambda*|r| + pi0``."""
        if self.kind == "linear":
            return self.R3.sup_abs(length, horizon)
        return 0.0

    def pi0_bound(self, length, horizon) -> float:
        """Sup of ``pi0`` (a bounded function for every preset)."""
        if self.kind == "singular":
            return self.R1.sup_abs(length, horizon) + self.R2.sup_abs(length, horizon)
        if self.kind == "linear":
            return self.R4.sup_abs(length, horizon)
        return 0.0

    def sup_R3_positive(self, length, horizon) -> float:
        if self.kind != "linear":
            return 0.0
        return max(0.0, max(self.R3(x, t) for x in (0.0, length) for t in (0.0, horizon)))


def eval_pi(s: SourceSpec, x, t, r):
    return s.pi(x, t, r)


def eval_beta_base(s: SourceSpec, x, t, r):
    return s.beta_base(x, t, r)


def eval_R(s: SourceSpec, x, t, r):
    return s.R(x, t, r)


@dataclass(frozen=True)
class BoundaryData:
    """Dirichlet temperature datum on one end: constant or piecewise linear in t."""

    value: float = 1.0
    knots: Optional[tuple] = None  # ((t0, v0), (t1, v1), ...) for piecewise linear

    @classmethod
    def piecewise_linear(cls, knots):
        knots = tuple((float(t), float(v)) for t, v in sorted(knots))
        return cls(value=knots[0][1], knots=knots)

    @property
    def kind(self) -> str:
        return "constant" if self.knots is None else "piecewise_linear"

    def __call__(self, t):
        if self.knots is None:
            return self.value
        ts, vs = self._knot_arrays
        return float(np.interp(t, ts, vs))

    @cached_property
    def _knot_arrays(self):
        a = np.asarray(self.knots, dtype=float)
        return a[:, 0], a[:, 1]

    def extrema(self):
        if self.knots is None:
            return self.value, self.value
        vs = [v for _, v in self.knots]
        return min(vs), max(vs)


IC_KINDS = ("constant", "affine", "sine_bump", "nodal")


@dataclass(frozen=True)
class InitialCondition:
    """Initial field preset.

    * ``constant(c)``;
    * ``affine(a, b)``: ``a + b*x``;
    * ``sine_bump(low, high)``: ``low + (high - low)*sin(pi*x/L)**2``;
    * ``nodal(v_0, ..., v_{n+1})``: explicit node values.

    ``shift`` is added everywhere (used for perturbed twin runs).
    """

    kind: str = "constant"
    params: tuple = (1.0,)
    shift: float = 0.0

    def __post_init__(self):
        if self.kind not in IC_KINDS:
            raise ValueError(f"unknown initial-condition kind {self.kind!r}")
        need = {"constant": 1, "affine": 2, "sine_bump": 2}.get(self.kind)
        if need is not None and len(self.params) != need:
            raise ValueError(f"{self.kind} takes {need} parameter(s), got {len(self.params)}")

    def __call__(self, x, length):
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind == "constant":
            v = np.full_like(x, p[0])
        elif self.kind == "affine":
            v = p[0] + p[1] * x
        elif self.kind == "sine_bump":
            v = p[0] + (p[1] - p[0]) * np.sin(np.pi * x / length) ** 2
        else:
            v = np.asarray(p, dtype=float)
            if v.shape != x.shape:
                raise ValueError(f"nodal initial data has {v.size} values for {x.size} nodes")
            v = v.copy()
        return v + self.shift

    def shifted(self, delta: float) -> "InitialCondition":
        return replace(self, shift=self.shift + delta)


@dataclass(frozen=True)
class ProblemSpec:
    """Complete description of one initial-boundary value problem on ``(0, length)``."""

    length: float = 1.0
    horizon: float = 1.0
    n: int = 128
    potentials: Potentials = field(default_factory=Potentials)
    source: SourceSpec = field(default_factory=SourceSpec)
    theta_star_low: float = 0.5
    theta_star_high: float = 2.0
    chi_star_low: float = 0.0
    chi_star_high: float = 1.0
    bc_left: BoundaryData = field(default_factory=BoundaryData)
    bc_right: BoundaryData = field(default_factory=BoundaryData)
    theta0: InitialCondition = field(default_factory=InitialCondition)
    chi0: InitialCondition = field(default_factory=lambda: InitialCondition("constant", (0.0,)))

    @property
    def grid(self) -> Grid1D:
        return Grid1D(self.n, self.length)

    def initial_theta(self) -> np.ndarray:
        g = self.grid
        th = self.theta0(g.x, self.length)
        th[0], th[-1] = self.bc_left(0.0), self.bc_right(0.0)
        return th

    def initial_chi(self) -> np.ndarray:
        g = self.grid
        return self.chi0(g.x, self.length)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self):
        return f"[{self.code}] {self.message}"


SIGN_MARGIN = 1e-12


def check_sign_condition(p: Potentials, chi_low: float, chi_high: float, samples: int = 1000):
    """Violations of ``F', G' <= 0`` below ``chi_low`` and ``>= 0`` above ``chi_high``."""
    out = []
    left = np.linspace(chi_low - 5.0, chi_low, samples, endpoint=False)
    right = np.linspace(chi_high, chi_high + 5.0, samples + 1)[1:]
    for name, fn in (("F'", p.F_prime), ("G'", p.G_prime)):
        vl, vr = fn(left), fn(right)
        if np.any(vl > SIGN_MARGIN):
            k = int(np.argmax(vl))
            out.append(Violation("sign_condition", f"{name}({left[k]:.6g}) = {vl[k]:.6g} > 0 below chi_star_low"))
        if np.any(vr < -SIGN_MARGIN):
            k = int(np.argmin(vr))
            out.append(Violation("sign_condition", f"{name}({right[k]:.6g}) = {vr[k]:.6g} < 0 above chi_star_high"))
    return out


def validate_spec(spec: ProblemSpec) -> list:
    """Return the list of violated hypotheses; an empty list means valid."""
    v = []
    L, T = spec.length, spec.horizon
    if not (spec.length > 0.0 and spec.horizon > 0.0):
        v.append(Violation("domain", "length and horizon must be positive"))
        return v
    if spec.n < 3:
        v.append(Violation("domain", f"need at least 3 interior nodes, got n={spec.n}"))
        return v
    tl, th = spec.theta_star_low, spec.theta_star_high
    if not (0.0 < tl <= 1.0 <= th):
        v.append(Violation("temperature_window", f"need 0 < theta_star_low <= 1 <= theta_star_high, got {tl}, {th}"))
    cl, ch = spec.chi_star_low, spec.chi_star_high
    if not cl < ch:
        v.append(Violation("phase_window", f"need chi_star_low < chi_star_high, got {cl}, {ch}"))

    pot = spec.potentials
    fc, gc = pot.coefficients
    if pot.preset == "custom_polynomial":
        fdeg = max((i for i, c in enumerate(fc) if c != 0.0), default=0)
        if fdeg > 0 and (fdeg % 2 == 1 or fc[fdeg] < 0.0):
            v.append(Violation("potential_lower_bound", "F is not bounded from below"))
        win = np.linspace(cl - 1.0, ch + 1.0, 1001)
        if np.any(pot.G(win) < -SIGN_MARGIN):
            v.append(Violation("potential_nonnegative", "G takes negative values"))
    if cl < ch:
        v.extend(check_sign_condition(pot, cl, ch))

    src = spec.source
    if src.kind == "singular":
        if src.R1.inf(L, T) < 0.0:
            v.append(Violation("source_R1_negative", "R1 must be nonnegative on the space-time box"))
        elif not np.isfinite(src.R1.growth_constant(L, T)):
            v.append(Violation("source_growth", "|grad R1| + |dR1/dt| <= M R1 fails (R1 vanishes while varying)"))
        if src.lipschitz_R is not None:
            v.append(Violation("source_lipschitz", "a singular source is never uniformly Lipschitz"))
    if src.kind == "linear" and src.lipschitz_R is not None:
        need = src.R3.sup_abs(L, T)
        if src.lipschitz_R < need:
            v.append(Violation("source_lipschitz", f"lipschitz_R={src.lipschitz_R} < sup|R3|={need}"))

    for side, bc in (("left", spec.bc_left), ("right", spec.bc_right)):
        lo, hi = bc.extrema()
        if lo < tl or hi > th:
            v.append(Violation("boundary_data", f"{side} temperature datum leaves [{tl}, {th}]"))
    if v and any(x.code == "domain" for x in v):
        return v
    try:
        g = spec.grid
        th0 = spec.theta0(g.x, L)[1:-1]
        ch0 = spec.chi0(g.x, L)
    except ValueError as exc:
        v.append(Violation("initial_data", str(exc)))
        return v
    if th0.min() < tl or th0.max() > th:
        v.append(Violation("initial_theta", f"theta0 in [{th0.min():.6g}, {th0.max():.6g}] leaves [{tl}, {th}]"))
    if ch0.min() < cl or ch0.max() > ch:
        v.append(Violation("initial_chi", f"chi0 in [{ch0.min():.6g}, {ch0.max():.6g}] leaves [{cl}, {ch}]"))
    return v
