"""Run-level diagnostics: extrema, the phase maximum principle, energy
monitors, the Moser weight functions and a twin-run stability probe."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .grid import Grid1D, dual_norm, harmonic_extension, norm_H1, norm_L2, seminorm_H1
from .monotone import MollifiedBeta, RegularizedLog
from .stepper import SchemeConfig, Trajectory, simulate


@dataclass
class CheckRecord:
    """Outcome of one invariant; ``margin >= 0`` means satisfied with room to spare."""

    name: str
    passed: bool
    margin: float
    detail: str = ""


@dataclass
class DiagnosticsReport:
    chi_min: float = math.nan
    chi_max: float = math.nan
    theta_min: float = math.nan
    theta_max: float = math.nan
    norms: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    moser: dict = field(default_factory=dict)
    stability: Optional["StabilityResult"] = None
    run: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_lines(self):
        """``section.key = value`` lines."""
        out = [f"run.{k} = {_fmt(v)}" for k, v in self.run.items()]
        for k in ("theta_min", "theta_max", "chi_min", "chi_max"):
            out.append(f"extrema.{k} = {_fmt(getattr(self, k))}")
        out += [f"norms.{k} = {_fmt(v)}" for k, v in self.norms.items()]
        for c in self.checks:
            out.append(f"check.{c.name}.passed = {_fmt(c.passed)}")
            out.append(f"check.{c.name}.margin = {_fmt(c.margin)}")
            if c.detail:
                out.append(f"check.{c.name}.detail = {c.detail}")
        out += [f"moser.{k} = {_fmt(v)}" for k, v in self.moser.items()]
        if self.stability is not None:
            s = self.stability
            out += [
                f"stability.delta0 = {_fmt(s.delta0)}",
                f"stability.C_fit = {_fmt(s.C_fit)}",
                f"stability.max_ratio = {_fmt(s.max_ratio)}",
                f"stability.final_difference = {_fmt(s.final_difference)}",
            ]
        return out

    def to_text(self) -> str:
        return "\n".join(self.to_lines()) + "\n"


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def max_principle_check(traj: Trajectory, chi_low: float, chi_high: float, tol: float) -> CheckRecord:
    """Scan every stored time level for phase values outside ``[chi_low - tol, chi_high + tol]``."""
    times, _, chi = traj.arrays()
    below = chi_low - chi
    above = chi - chi_high
    worst = np.maximum(below, above)
    k, i = np.unravel_index(int(np.argmax(worst)), worst.shape)
    excess = float(worst[k, i])
    margin = tol - excess
    passed = excess <= tol
    detail = "" if passed else f"node {i}, t={times[k]:.6g}, chi={chi[k, i]:.12g}"
    return CheckRecord("max_principle", bool(passed), float(margin), detail)


def energy_monitors(traj: Trajectory, eps: Optional[float] = None) -> dict:
    """Space-time norms controlled by the basic energy estimate, evaluated on
    the stored history (left-rectangle rule in time, trapezoid in space)."""
    eps = traj.cfg.eps if eps is None else eps
    spec = traj.spec
    grid = spec.grid
    log = RegularizedLog(eps)
    beta = MollifiedBeta(spec.source.base_beta(), eps, spec.length, spec.horizon, traj.cfg.quadrature_order)
    times, theta, chi = traj.arrays()
    dts = np.diff(times)
    x = grid.x
    ln_sq = 0.0
    weighted_grad_sq = 0.0
    beta_sq = 0.0
    dchi_sq = 0.0
    dtheta_sq = 0.0
    for k, dt in enumerate(dts):
        th = theta[k]
        U = log.Ln_eps(th)
        ln_sq += dt * norm_H1(U, grid) ** 2
        weighted_grad_sq += dt * float(np.dot(np.diff(U), np.diff(th)) / grid.h)
        beta_sq += dt * norm_L2(beta.beta_eps(x, times[k], th), grid) ** 2
        dchi = (chi[k + 1] - chi[k]) / dt
        dchi_sq += dt * norm_L2(dchi, grid) ** 2
        dth = (theta[k + 1][1:-1] - theta[k][1:-1]) / dt
        dtheta_sq += dt * dual_norm(dth, grid.h) ** 2
    return {
        "theta_sup_L2": max(norm_L2(th, grid) for th in theta),
        "weighted_grad_theta_L2Q": math.sqrt(max(weighted_grad_sq, 0.0)),
        "Ln_theta_L2_H1": math.sqrt(ln_sq),
        "chi_sup_H1": max(norm_H1(c, grid) for c in chi),
        "dt_chi_L2Q": math.sqrt(dchi_sq),
        "beta_theta_L2Q": math.sqrt(beta_sq),
        "dt_theta_L2_dual": math.sqrt(dtheta_sq),
    }


def harmonic_log_window(spec, eps: float, times) -> CheckRecord:
    """``Ln_eps`` of the harmonic lifting stays in the band
    ``[l_low + eps*theta_low, l_high + eps*theta_high]``."""
    log = RegularizedLog(eps)
    lo, hi = log.window_bounds(spec.theta_star_low, spec.theta_star_high)
    lo += eps * spec.theta_star_low
    hi += eps * spec.theta_star_high
    grid = spec.grid
    margin = math.inf
    for t in times:
        U = log.Ln_eps(harmonic_extension(spec.bc_left(t), spec.bc_right(t), grid))
        margin = min(margin, float(np.min(U - lo)), float(np.min(hi - U)))
    return CheckRecord("harmonic_log_window", margin >= -1e-12, margin)


def build_report(traj: Trajectory) -> DiagnosticsReport:
    spec, cfg = traj.spec, traj.cfg
    times, theta, chi = traj.arrays()
    rep = DiagnosticsReport(
        chi_min=float(chi.min()), chi_max=float(chi.max()),
        theta_min=float(theta.min()), theta_max=float(theta.max()),
    )
    rep.run = {
        "completed": traj.completed,
        "steps": len(traj.reports),
        "t_final": float(times[-1]),
        "eps": cfg.eps,
        "dt": cfg.dt,
        "n": spec.n,
        "newton_iterations_chi": int(sum(r.chi_iterations for r in traj.reports)),
        "newton_iterations_theta": int(sum(r.theta_iterations for r in traj.reports)),
    }
    rep.norms = energy_monitors(traj)
    rep.checks.append(max_principle_check(traj, spec.chi_star_low, spec.chi_star_high, 10.0 * cfg.newton_tol))
    rep.checks.append(CheckRecord("theta_positive", rep.theta_min > 0.0, rep.theta_min))
    finite = all(math.isfinite(v) for v in rep.norms.values())
    rep.checks.append(CheckRecord("norms_finite", finite, 0.0 if finite else -math.inf))
    rep.checks.append(harmonic_log_window(spec, cfg.eps, times[:: max(1, len(times) // 50)]))
    return rep


@dataclass(frozen=True)
class MoserWeights:
    theta_star_high: float

    def __post_init__(self):
        if self.theta_star_high < 1.0:
            raise ValueError("theta_star_high must be >= 1")

    @property
    def u_star(self) -> float:
        return math.log(self.theta_star_high)


def _truncated_log_excess(w: MoserWeights, n, r):
    return np.minimum(n, np.maximum(np.log(r) - w.u_star, 0.0))


def moser_phi(w: MoserWeights, n: int, r):
    """Closed form of ``int_{theta*}^r (exp(2*min(n, (ln s - u*)+)) - 1) ds``."""
    ts = w.theta_star_high
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0) or n < 1:
        raise ValueError("moser_phi needs r > 0 and n >= 1")
    rp = ts * math.exp(n)

    def middle(s):
        return ts / 3.0 * (s / ts) ** 3 - s + 2.0 * ts / 3.0

    out = np.where(r <= ts, 0.0, middle(np.minimum(r, rp)))
    out = out + np.where(r > rp, (math.exp(2.0 * n) - 1.0) * (r - rp), 0.0)
    return float(out) if out.ndim == 0 else out


def moser_phi_constant(w: MoserWeights, n: int) -> float:
    """``C*`` for ``phi_n(r) >= (theta*/6) exp(3 min(n, (ln r - u*)+)) - C*``.

    On ``[theta*, theta* e^n]`` the gap is ``theta* (x - x**3/6 - 2/3)`` with
    ``x = r/theta*``; its maximum is at ``x = sqrt 2`` when that point is in range.
    """
    ts = w.theta_star_high
    cand = [1.0, math.exp(n)]
    if 1.0 <= math.sqrt(2.0) <= math.exp(n):
        cand.append(math.sqrt(2.0))
    gap = max(ts * (x - x**3 / 6.0 - 2.0 / 3.0) for x in cand)
    return max(ts / 6.0, gap)


def moser_phi_lower(w: MoserWeights, n: int, r):
    """Right-hand side ``alpha* exp(3 min(n, (ln r - u*)+)) - C*`` with ``alpha* = theta*/6``."""
    alpha = w.theta_star_high / 6.0
    return alpha * np.exp(3.0 * _truncated_log_excess(w, n, np.asarray(r, dtype=float))) - moser_phi_constant(w, n)


def moser_psi(w: MoserWeights, n: int, p: float, r: float) -> float:
    """``int_{theta*}^r min(n, (ln s - u*)+)^(2p-1) ds`` by quadrature in ``y = ln s``."""
    if r <= 0.0 or p < 1.0:
        raise ValueError("moser_psi needs r > 0 and p >= 1")
    ts = w.theta_star_high
    if r <= ts:
        return 0.0
    z = min(math.log(r) - w.u_star, float(n))
    # int_0^z e^{u*} e^y y^(2p-1) dy, algebraic endpoint weight handled exactly
    head, _ = quad(np.exp, 0.0, z, weight="alg", wvar=(2.0 * p - 1.0, 0.0), epsabs=0.0, epsrel=1e-13, limit=200)
    tail = 0.0
    rp = ts * math.exp(n)
    if r > rp:
        tail = float(n) ** (2.0 * p - 1.0) * (r - rp)
    return ts * head + tail


def moser_psi_lower(w: MoserWeights, n: int, p: float, r: float) -> float:
    return float(_truncated_log_excess(w, n, r)) ** (2.0 * p) / (2.0 * p)


@dataclass
class StabilityResult:
    delta0: float
    times: np.ndarray
    differences: np.ndarray
    C_fit: float
    max_ratio: float
    final_difference: float
    base: Trajectory
    perturbed: Trajectory


def twin_difference(a: Trajectory, b: Trajectory) -> np.ndarray:
    """Per time level: dual norm of the temperature gap plus L2 norm of the phase gap."""
    grid: Grid1D = a.grid
    _, ta, ca = a.arrays()
    _, tb, cb = b.arrays()
    return np.array([
        dual_norm(ta[k, 1:-1] - tb[k, 1:-1], grid.h) + norm_L2(ca[k] - cb[k], grid)
        for k in range(len(ta))
    ])


def stability_probe(spec, cfg: SchemeConfig, delta0: float, base: Optional[Trajectory] = None) -> StabilityResult:
    """Twin runs from ``theta0`` and ``theta0 + delta0``; fits the smallest
    exponential envelope ``diff(t) <= diff(0) * exp(C t)``."""
    if spec.source.kind == "singular":
        raise ValueError("the stability probe needs a Lipschitz source; a singular beta is excluded")
    if base is None:
        base = simulate(spec, cfg)
    pert_spec = replace(spec, theta0=spec.theta0.shifted(delta0))
    pert = simulate(pert_spec, cfg)
    diffs = twin_difference(base, pert)
    times = np.asarray(base.times)
    d0 = diffs[0]
    if d0 == 0.0:
        c_fit = 0.0 if not np.any(diffs) else math.inf
        ratio = 0.0 if not np.any(diffs) else math.inf
    else:
        ratios = diffs / d0
        with np.errstate(divide="ignore"):
            rates = np.log(np.maximum(ratios[1:], 1e-300)) / times[1:]
        c_fit = float(np.max(rates))
        ratio = float(np.max(ratios))
    return StabilityResult(delta0, times, diffs, c_fit, ratio, float(diffs[-1]), base, pert)
