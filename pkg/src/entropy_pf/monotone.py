"""Scalar nonlinear kernels: the Yosida-regularized logarithm and the
truncated, mollified singular source.

The regularized logarithm is built from the resolvent ``rho`` of the
logarithm, i.e. the positive root of ``rho + eps*ln(rho) = r``. The root is
computed in the variable ``y = ln(rho)`` because ``ln_eps(r) = (r - rho)/eps``
coincides with ``ln(rho)`` exactly, which avoids underflow of ``rho`` for very
negative ``r``.

The singular source ``beta(x, t, r) = R1(x, t) * (1 - 1/r**2)`` is truncated
to ``r in [eps, 1/eps]`` and then mollified *in r only* with a unit-mass bump
kernel of half-width ``delta_eps = eps / (1 + L_eps)``. Mollifying only in
the value variable is a deliberate simplification of a full space-time-value
convolution: for coefficient fields that are smooth in ``(x, t)`` it keeps
monotonicity, the ``O(eps)`` truncation error, the lower bound on the
primitive and the derivative-growth bound in ``(x, t)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NumericFailure


@dataclass(frozen=True)
class Coefficient:
    """Coefficient field ``(a + b*x) * (c + d*t)``.

    ``Coefficient(a)`` is a constant, ``Coefficient(a, b)`` is affine in x and
    the four-parameter form is a product of affine factors in x and t.
    """

    a: float
    b: float = 0.0
    c: float = 1.0
    d: float = 0.0

    def __call__(self, x, t):
        return (self.a + self.b * x) * (self.c + self.d * t)

    @property
    def kind(self) -> str:
        if self.b == 0.0 and self.d == 0.0:
            return "constant"
        if self.d == 0.0:
            return "affine_x"
        return "product"

    @property
    def depends_on_x(self) -> bool:
        return self.b != 0.0 and (self.c != 0.0 or self.d != 0.0)

    def _corners(self, length, horizon):
        return [(x, t) for x in (0.0, length) for t in (0.0, horizon)]

    def sup_abs(self, length, horizon) -> float:
        return max(abs(self(x, t)) for x, t in self._corners(length, horizon))

    def inf(self, length, horizon) -> float:
        # bilinear in (x, t): extrema sit at the corners of the box
        return min(self(x, t) for x, t in self._corners(length, horizon))

    def lipschitz(self, length, horizon) -> float:
        """Upper bound of ``|d/dx| + |d/dt|`` over the space-time box."""
        sx = max(abs(self.b * (self.c + self.d * t)) for t in (0.0, horizon))
        st = max(abs((self.a + self.b * x) * self.d) for x in (0.0, length))
        return sx + st

    def growth_constant(self, length, horizon) -> float:
        """Smallest ``M`` with ``|dR/dx| + |dR/dt| <= M * R`` on the box.

        Infinite when the field vanishes somewhere while varying.
        """
        if self.b == 0.0 and self.d == 0.0:
            return 0.0
        fx = [self.a + self.b * x for x in (0.0, length)]
        ft = [self.c + self.d * t for t in (0.0, horizon)]
        if (self.b != 0.0 and min(abs(v) for v in fx) == 0.0) or (
            self.d != 0.0 and min(abs(v) for v in ft) == 0.0
        ):
            return float("inf")
        if (fx[0] * fx[1] <= 0.0 and self.b != 0.0) or (ft[0] * ft[1] <= 0.0 and self.d != 0.0):
            return float("inf")
        mx = max(abs(self.b) / abs(v) for v in fx)
        mt = max(abs(self.d) / abs(v) for v in ft)
        return mx + mt


def _scalar_or_array(value, like):
    if np.ndim(like) == 0:
        return float(value)
    return value


@dataclass(frozen=True)
class RegularizedLog:
    """Yosida regularization ``ln_eps`` of the logarithm and ``Ln_eps = eps*r + ln_eps``.

    All methods accept scalars or arrays and are vectorized.
    """

    eps: float
    resolvent_tol: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        # eps = 1 is admitted here: the resolvent is well defined for any eps > 0
        if not 0.0 < self.eps <= 1.0:
            raise ValueError(f"eps must lie in (0, 1], got {self.eps}")
        if self.resolvent_tol <= 0.0:
            raise ValueError("resolvent_tol must be positive")

    def _bracket(self, r):
        """Analytic bracket ``lo <= ln(rho) <= hi`` with ``g(hi) >= 0``."""
        eps = self.eps
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            big = r >= 1.0
            mid = (r > 0.0) & ~big
            neg = r <= 0.0
            rs = np.where(r > 0.0, r, 1.0)
            lnr = np.log(rs)
            hi = np.where(big, lnr, 0.0)
            lo = np.where(big, np.log(np.maximum(rs - eps * lnr, 1e-300)), 0.0)
            hi = np.where(mid, np.minimum(np.log(rs + eps * np.abs(lnr)), 0.0), hi)
            lo = np.where(mid, lnr, lo)
            rn = np.where(neg, r, 0.0)
            hi = np.where(neg, rn / eps, hi)
            lo = np.where(neg, (rn - np.exp(rn / eps)) / eps, lo)
        return lo, hi

    def log_resolvent(self, r):
        """Return ``ln(rho_eps(r))``, which equals ``ln_eps(r)``.

        Newton's method on the convex increasing map ``y -> e^y + eps*y - r``,
        started from the upper end of an analytic bracket, decreases
        monotonically to the root.
        """
        ra = np.asarray(r, dtype=float)
        lo, y = self._bracket(ra)
        scale = self.resolvent_tol * np.maximum(1.0, np.abs(ra))
        eps = self.eps
        for _ in range(self.max_iter):
            ey = np.exp(y)
            g = ey + eps * y - ra
            done = np.abs(g) <= scale
            # a final correction is applied to converged entries as well
            y = np.maximum(y - g / (ey + eps), lo)
            if np.all(done):
                return _scalar_or_array(y, r)
        bad = np.flatnonzero(~done)
        k = bad[0] if bad.size else 0
        raise NumericFailure(
            f"resolvent did not converge in {self.max_iter} iterations",
            eps=eps,
            r=float(ra.flat[k]),
            bracket=(float(np.exp(np.ravel(lo)[k])), float(np.exp(np.ravel(y)[k]))),
        )

    def resolvent(self, r):
        """Resolvent ``rho_eps(r)``: positive root of ``rho + eps*ln(rho) = r``.

        Underflows to 0.0 only when ``r/eps`` is below about -745.
        """
        return _scalar_or_array(np.exp(self.log_resolvent(r)), r)

    def ln_eps(self, r):
        return self.log_resolvent(r)

    def Ln_eps(self, r):
        return _scalar_or_array(self.eps * np.asarray(r, dtype=float) + self.log_resolvent(r), r)

    def ln_eps_prime(self, r):
        return _scalar_or_array(1.0 / (np.exp(self.log_resolvent(r)) + self.eps), r)

    def Ln_eps_prime(self, r):
        return _scalar_or_array(self.eps + 1.0 / (np.exp(self.log_resolvent(r)) + self.eps), r)

    def Ln_eps_and_prime(self, r):
        """Both ``Ln_eps(r)`` and ``Ln_eps'(r)`` from a single root find."""
        y = np.asarray(self.log_resolvent(r))
        ra = np.asarray(r, dtype=float)
        return self.eps * ra + y, self.eps + 1.0 / (np.exp(y) + self.eps)

    def ln_eps_inverse(self, s):
        s = np.asarray(s, dtype=float) if np.ndim(s) else float(s)
        return _scalar_or_array(np.exp(s) + self.eps * s, s)

    @staticmethod
    def window_bounds(theta_low: float, theta_high: float):
        """``(min(0, ln theta_low), max(0, ln theta_high))``: the band holding
        ``ln_eps`` on ``[theta_low, theta_high]`` for every eps."""
        return min(0.0, np.log(theta_low)), max(0.0, np.log(theta_high))


BETA_KINDS = ("singular", "zero")


@dataclass(frozen=True)
class BaseBeta:
    """Monotone part of the source, ``R1(x, t) * (1 - 1/r**2)`` or zero."""

    kind: str = "zero"
    R1: Coefficient = field(default_factory=lambda: Coefficient(0.0))

    def __post_init__(self):
        if self.kind not in BETA_KINDS:
            raise ValueError(f"unknown beta kind {self.kind!r}")

    @property
    def coefficient(self) -> Coefficient:
        return self.R1 if self.kind == "singular" else Coefficient(0.0)

    @staticmethod
    def profile(r):
        return 1.0 - 1.0 / (r * r)

    @staticmethod
    def profile_prime(r):
        return 2.0 / (r * r * r)

    @staticmethod
    def profile_primitive(r):
        """``int_1^r (1 - 1/s**2) ds``."""
        return r + 1.0 / r - 2.0

    def __call__(self, x, t, r):
        return self.coefficient(x, t) * self.profile(r)

    def derivative(self, x, t, r):
        return self.coefficient(x, t) * self.profile_prime(r)

    def slope_bound(self, r, length, horizon):
        """``beta_1(r)``: bound on ``d beta / dr`` uniform in (x, t)."""
        if self.kind == "zero":
            return 0.0 * r
        return 2.0 * self.R1.sup_abs(length, horizon) / r**3

    def growth_constant(self, length, horizon) -> float:
        if self.kind == "zero":
            return 0.0
        return self.R1.growth_constant(length, horizon)


def bump(s):
    """Unnormalized C-infinity bump ``exp(-1/(1 - s**2))`` on (-1, 1)."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


@dataclass(frozen=True)
class MollifiedBeta:
    """Truncated and r-mollified version ``beta_eps`` of a :class:`BaseBeta`.

    ``length`` and ``horizon`` describe the space-time box on which the
    coefficient bounds (and hence ``L_eps``) are taken.
    """

    base: BaseBeta
    eps: float
    length: float = 1.0
    horizon: float = 1.0
    quadrature_order: int = 16

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if self.quadrature_order < 8:
            raise ValueError("quadrature_order must be at least 8")

    @cached_property
    def L_eps(self) -> float:
        """Lipschitz constant of ``beta`` on the box times ``[eps, 1/eps]``."""
        if self.base.kind == "zero":
            return 0.0
        R1 = self.base.R1
        e = self.eps
        return (
            2.0 * R1.sup_abs(self.length, self.horizon) / e**3
            + R1.lipschitz(self.length, self.horizon) * (1.0 - e * e)
        )

    @cached_property
    def delta_eps(self) -> float:
        return self.eps / (1.0 + self.L_eps)

    @cached_property
    def _rule(self):
        nodes, weights = np.polynomial.legendre.leggauss(self.quadrature_order)
        w = weights * bump(nodes)
        return nodes, w / w.sum()

    @property
    def kinks(self):
        return (self.eps, 1.0 / self.eps)

    def clamp(self, r):
        return np.clip(r, self.eps, 1.0 / self.eps)

    # truncated profile and its r-derivative / primitive; beta~ = R1 * g~
    def _g(self, r):
        return BaseBeta.profile(self.clamp(r))

    def _g_prime(self, r):
        inside = (r > self.eps) & (r < 1.0 / self.eps)
        return np.where(inside, BaseBeta.profile_prime(self.clamp(r)), 0.0)

    def _g_primitive(self, r):
        c = self.clamp(r)
        return BaseBeta.profile_primitive(c) + BaseBeta.profile(c) * (r - c)

    def _convolve(self, func, r):
        """``int func(r - delta*s) zeta(s) ds`` with kink-aware Gauss rules."""
        r = np.asarray(r, dtype=float)
        nodes, w = self._rule
        delta = self.delta_eps
        vals = func(r[..., None] - delta * nodes) @ w
        lo, hi = self.kinks
        near = (np.abs(r - lo) < delta) | (np.abs(r - hi) < delta)
        if np.any(near):
            vals = np.array(vals, dtype=float, copy=True)
            flat = vals.reshape(-1)
            rflat = np.broadcast_to(r, vals.shape).reshape(-1)
            for k in np.flatnonzero(near.reshape(-1)):
                flat[k] = self._convolve_split(func, rflat[k])
        return vals

    @cached_property
    def _split_rule(self):
        # the bump is flat to all orders at the ends of a cut piece; a longer rule pays off
        return np.polynomial.legendre.leggauss(max(3 * self.quadrature_order, 48))

    def _convolve_split(self, func, r):
        nodes, weights = self._split_rule
        delta = self.delta_eps
        cuts = sorted((r - k) / delta for k in self.kinks if abs(r - k) < delta)
        edges = [-1.0, *cuts, 1.0]
        num = 0.0
        mass = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            half = 0.5 * (b - a)
            s = 0.5 * (a + b) + half * nodes
            ws = half * weights * bump(s)
            num += float(func(r - delta * s) @ ws)
            mass += float(ws.sum())
        return num / mass

    def profile_eps(self, r):
        """``g_eps(r)`` such that ``beta_eps(x, t, r) = R1(x, t) * g_eps(r)``."""
        return self._convolve(self._g, r)

    def __call__(self, x, t, r):
        return self.beta_eps(x, t, r)

    def beta_eps(self, x, t, r):
        if self.base.kind == "zero":
            return _scalar_or_array(np.zeros(np.broadcast(x, t, r).shape), r)
        out = self.base.R1(x, t) * self.profile_eps(r)
        return _scalar_or_array(out, out)

    def beta_eps_prime(self, x, t, r):
        """``d beta_eps / dr`` from differentiating the quadrature rule."""
        if self.base.kind == "zero":
            return _scalar_or_array(np.zeros(np.broadcast(x, t, r).shape), r)
        out = self.base.R1(x, t) * self._convolve(self._g_prime, r)
        return _scalar_or_array(out, out)

    def beta_eps_and_prime(self, x, t, r):
        if self.base.kind == "zero":
            z = np.zeros(np.broadcast(x, t, r).shape)
            return z, z.copy()
        c = self.base.R1(x, t)
        return c * self._convolve(self._g, r), c * self._convolve(self._g_prime, r)

    def beta_eps_primitive(self, x, t, r):
        """``int_1^r beta_eps(x, t, s) ds`` (mollification commutes with the integral)."""
        if self.base.kind == "zero":
            return _scalar_or_array(np.zeros(np.broadcast(x, t, r).shape), r)
        g1 = self._convolve(self._g_primitive, np.array(1.0))
        out = self.base.R1(x, t) * (self._convolve(self._g_primitive, r) - g1)
        return _scalar_or_array(out, out)

    def truncated(self, x, t, r):
        """``beta(x, t, clamp(r))`` without mollification."""
        out = self.base.coefficient(x, t) * self._g(np.asarray(r, dtype=float))
        return _scalar_or_array(out, out)

    @cached_property
    def error_constant(self) -> float:
        """Empirical ``M`` with ``|beta_eps - beta(clamp r)| <= M * eps``.

        Sampled on a log grid plus the truncation kinks (where the error
        peaks) and stored with a 10% margin.
        """
        if self.base.kind == "zero":
            return 0.0
        e, d = self.eps, self.delta_eps
        grid = np.geomspace(e / 4.0, 4.0 / e, 2001)
        offsets = d * np.linspace(-1.5, 1.5, 61)
        samples = np.concatenate([grid, e + offsets, 1.0 / e + offsets, [1.0]])
        err = np.abs(self.profile_eps(samples) - self._g(samples)).max()
        return 1.1 * self.base.R1.sup_abs(self.length, self.horizon) * err / e

    @property
    def analytic_error_bound(self) -> float:
        """``L_eps * delta_eps / eps`` (< 1): the constant a Lipschitz argument gives."""
        return self.L_eps * self.delta_eps / self.eps
