"""Independent reference computations used by the tests and the acceptance
suite. Nothing here calls the regularized-log, mollifier or Laplacian code
that it is meant to check; only the base potentials and source formulas are
shared."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import ConfigError, OracleWindowError
from .model import ProblemSpec
from .monotone import MollifiedBeta, bump

WINDOW = (1e-6, 1e6)


def _deriv(coeffs):
    return tuple(k * c for k, c in enumerate(coeffs))[1:] or (0.0,)


def _horner(coeffs, x):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class OdeReduction:
    """Spatially homogeneous data: the PDE collapses to two ODEs,
    ``chi' = -F'(chi) - G'(chi)*theta`` and ``theta' = G'(chi)*chi' + pi(theta) - beta(theta)``."""

    spec: ProblemSpec

    def __post_init__(self):
        s = self.spec
        g = s.grid
        th = s.theta0(g.x, s.length)[1:-1]
        ch = s.chi0(g.x, s.length)
        if np.ptp(th) > 1e-14 * max(1.0, abs(th[0])) or np.ptp(ch) > 1e-14 * max(1.0, abs(ch[0])):
            raise ValueError("initial data are not spatially constant")
        src = s.source
        for c in (src.R1, src.R2, src.R3, src.R4):
            if c.b != 0.0:
                raise ValueError("source coefficients depend on x")

    @property
    def theta0(self) -> float:
        s = self.spec
        return float(s.theta0(s.grid.x, s.length)[1])

    @property
    def chi0(self) -> float:
        s = self.spec
        return float(s.chi0(s.grid.x, s.length)[0])

    def rhs(self):
        fc, gc = self.spec.potentials.coefficients
        dF, dG = _deriv(fc), _deriv(gc)
        src = self.spec.source
        kind = src.kind
        R1, R2, R3, R4 = src.R1, src.R2, src.R3, src.R4

        def f(t, th, ch):
            g1 = _horner(dG, ch)
            dch = -_horner(dF, ch) - g1 * th
            if kind == "singular":
                r1 = R1(0.0, t)
                src_term = r1 + R2(0.0, t) - r1 * (1.0 - 1.0 / (th * th))
            elif kind == "linear":
                src_term = R3(0.0, t) * th - R4(0.0, t)
            else:
                src_term = 0.0
            return g1 * dch + src_term, dch

        return f


@dataclass
class ScalarTrajectory:
    times: np.ndarray
    theta: np.ndarray
    chi: np.ndarray

    def at(self, t):
        return float(np.interp(t, self.times, self.theta)), float(np.interp(t, self.times, self.chi))


def rk4_reference(red: OdeReduction, dt_ref: float = 1e-6, record_every: int = 100, horizon=None) -> ScalarTrajectory:
    """Classical RK4 for the homogeneous reduction with the unregularized source."""
    T = red.spec.horizon if horizon is None else horizon
    k_steps = int(round(T / dt_ref))
    h = T / k_steps
    f = red.rhs()
    th, ch = red.theta0, red.chi0
    lo, hi = WINDOW
    ts, ths, chs = [0.0], [th], [ch]
    t = 0.0
    for k in range(1, k_steps + 1):
        a1, b1 = f(t, th, ch)
        a2, b2 = f(t + 0.5 * h, th + 0.5 * h * a1, ch + 0.5 * h * b1)
        a3, b3 = f(t + 0.5 * h, th + 0.5 * h * a2, ch + 0.5 * h * b2)
        a4, b4 = f(t + h, th + h * a3, ch + h * b3)
        th += h * (a1 + 2.0 * a2 + 2.0 * a3 + a4) / 6.0
        ch += h * (b1 + 2.0 * b2 + 2.0 * b3 + b4) / 6.0
        t = k * h
        if not lo <= th <= hi:
            raise OracleWindowError(f"theta={th:.3g} left the trusted window at t={t:.6g}")
        if k % record_every == 0 or k == k_steps:
            ts.append(t)
            ths.append(th)
            chs.append(ch)
    return ScalarTrajectory(np.array(ts), np.array(ths), np.array(chs))


def _ln_eps_newton(r, eps, y):
    """Solve ``exp(y) + eps*y = r`` by plain Newton from the supplied start."""
    for _ in range(200):
        ey = np.exp(y)
        step = (ey + eps * y - r) / (ey + eps)
        y = y - step
        if np.all(np.abs(step) <= 1e-15 * (1.0 + np.abs(y))):
            return y
    raise OracleWindowError("reference ln_eps iteration did not converge")


def fine_explicit_reference(spec: ProblemSpec, eps: float, dt_ref: float, t_out) -> dict:
    """Forward-Euler reference on the same grid at a tiny step.

    Returns ``{t: (theta, chi)}`` for each requested output time (which must be
    multiples of ``dt_ref``).
    """
    n, L = spec.n, spec.length
    h = L / (n + 1)
    if dt_ref > h * h / (2.0 * (eps + 1.0 / eps)):
        raise ConfigError(
            f"dt_ref={dt_ref:.3g} violates the explicit stability guard h^2/(2(eps+1/eps))={h * h / (2 * (eps + 1 / eps)):.3g}"
        )
    x = np.arange(n + 2) * h
    xi = x[1:-1]
    fc, gc = spec.potentials.coefficients
    dF, dG = _deriv(fc), _deriv(gc)
    Gp, dFp, dGp = (np.polynomial.Polynomial(c) for c in (gc, dF, dG))
    src = spec.source
    theta = spec.theta0(x, L)
    theta[0], theta[-1] = spec.bc_left(0.0), spec.bc_right(0.0)
    chi = spec.chi0(x, L)
    y = np.log(theta)
    lo, hi = WINDOW
    outs = sorted(float(t) for t in t_out)
    marks = {int(round(t / dt_ref)): t for t in outs}
    result = {}
    if 0 in marks:
        result[marks[0]] = (theta.copy(), chi.copy())
    k_end = max(marks)
    for k in range(k_end):
        t = k * dt_ref
        ghost = np.concatenate(([chi[1]], chi, [chi[-2]]))
        lap_chi = (ghost[:-2] - 2.0 * chi + ghost[2:]) / (h * h)
        chi_new = chi + dt_ref * (lap_chi - dFp(chi) - dGp(chi) * theta)
        y = _ln_eps_newton(theta, eps, y)
        U = eps * theta + y
        lap_U = (U[:-2] - 2.0 * U[1:-1] + U[2:]) / (h * h)
        th_i = theta[1:-1]
        if src.kind == "singular":
            r1 = src.R1(xi, t)
            s_term = r1 + src.R2(xi, t) - r1 * (1.0 - 1.0 / (th_i * th_i))
        elif src.kind == "linear":
            s_term = src.R3(xi, t) * th_i - src.R4(xi, t)
        else:
            s_term = 0.0
        th_new = theta.copy()
        th_new[1:-1] = th_i + (Gp(chi_new[1:-1]) - Gp(chi[1:-1])) + dt_ref * (lap_U + s_term)
        th_new[0], th_new[-1] = spec.bc_left(t + dt_ref), spec.bc_right(t + dt_ref)
        theta, chi = th_new, chi_new
        if theta.min() < lo or theta.max() > hi:
            raise OracleWindowError(f"reference temperature left the trusted window at t={t + dt_ref:.6g}")
        if k + 1 in marks:
            result[marks[k + 1]] = (theta.copy(), chi.copy())
    return result


def _adaptive_simpson(f, a, b, tol, depth=60):
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
        right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        return rec(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)

    return rec(a, b, fa, fm, fb, whole, tol, depth)


_BUMP_MASS = None


def _bump_mass():
    global _BUMP_MASS
    if _BUMP_MASS is None:
        _BUMP_MASS = _adaptive_simpson(lambda s: math.exp(-1.0 / (1.0 - s * s)) if abs(s) < 1.0 else 0.0, -1.0, 1.0, 1e-15)
    return _BUMP_MASS


def mollifier_quadrature_oracle(mb: MollifiedBeta, x: float, t: float, r: float, tol: float = 1e-12) -> float:
    """Adaptive-Simpson evaluation of ``int beta(x, t, clamp(r - delta*s)) zeta(s) ds``."""
    if mb.base.kind == "zero":
        return 0.0
    c = float(mb.base.R1(x, t))
    e, d = mb.eps, mb.delta_eps
    lo, hi = e, 1.0 / e

    def g(u):
        u = min(max(u, lo), hi)
        return 1.0 - 1.0 / (u * u)

    def integrand(s):
        if abs(s) >= 1.0:
            return 0.0
        return g(r - d * s) * math.exp(-1.0 / (1.0 - s * s))

    scale = max(1.0, abs(g(r)))
    return c * _adaptive_simpson(integrand, -1.0, 1.0, tol * scale * _bump_mass()) / _bump_mass()


def moser_phi_quadrature(theta_star_high: float, n: int, r: float) -> float:
    """Brute-force ``int_{theta*}^r (exp(2 min(n, (ln s - u*)+)) - 1) ds``."""
    ts = theta_star_high
    if r <= ts:
        return 0.0
    u = math.log(ts)

    def integrand(s):
        return math.exp(2.0 * min(n, max(math.log(s) - u, 0.0))) - 1.0

    rp = ts * math.exp(n)
    if r <= rp:
        return quad(integrand, ts, r, epsabs=0.0, epsrel=1e-13, limit=200)[0]
    head = quad(integrand, ts, rp, epsabs=0.0, epsrel=1e-13, limit=200)[0]
    return head + (math.exp(2.0 * n) - 1.0) * (r - rp)


def moser_psi_series(theta_star_high: float, n: int, p: float, r: float) -> float:
    """``psi_n`` through the positive series ``int_0^z e^y y^a dy = sum z^(m+a+1) / (m! (m+a+1))``."""
    ts = theta_star_high
    if r <= ts:
        return 0.0
    a = 2.0 * p - 1.0
    z = min(math.log(r) - math.log(ts), float(n))
    total, m = 0.0, 0
    log_term_base = math.log(z) if z > 0.0 else -math.inf
    while True:
        term = math.exp((m + a + 1.0) * log_term_base - math.lgamma(m + 1.0)) / (m + a + 1.0)
        total += term
        if m > z and term <= 1e-17 * total:
            break
        m += 1
    rp = ts * math.exp(n)
    tail = float(n) ** a * (r - rp) if r > rp else 0.0
    return ts * total + tail


__all__ = [
    "OdeReduction",
    "ScalarTrajectory",
    "rk4_reference",
    "fine_explicit_reference",
    "mollifier_quadrature_oracle",
    "moser_phi_quadrature",
    "moser_psi_series",
    "bump",
]
