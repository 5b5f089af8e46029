"""Backward-Euler time integration of the eps-regularized system.

Each step is decoupled: the phase equation is solved first with the old
temperature, then the temperature equation with the new phase. Both
nonlinear systems are tridiagonal-plus-diagonal and are solved by damped
Newton iterations. No positivity clamp is ever applied to the temperature.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from .errors import NewtonDivergence, SpecValidationError, StepFailure
from .grid import Grid1D, laplacian_dirichlet, laplacian_neumann
from .model import ProblemSpec, validate_spec
from .monotone import MollifiedBeta, RegularizedLog


class ConditioningWarning(RuntimeWarning):
    """The implicit linear source makes the temperature Jacobian nearly singular."""


@dataclass(frozen=True)
class SchemeConfig:
    dt: float = 1e-3
    eps: float = 1e-3
    newton_tol: float = 1e-10
    newton_max: int = 50
    # None: implicit for the linear source kind, explicit otherwise
    theta_source_implicit: Optional[bool] = None
    resolvent_tol: float = 1e-12
    quadrature_order: int = 16

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if self.newton_tol <= 0.0 or self.newton_max < 1:
            raise ValueError("newton_tol must be positive and newton_max >= 1")

    def source_implicit(self, spec: ProblemSpec) -> bool:
        if spec.source.kind != "linear":
            return False
        return True if self.theta_source_implicit is None else bool(self.theta_source_implicit)


@dataclass
class State:
    t: float
    theta: np.ndarray
    chi: np.ndarray


@dataclass
class StepReport:
    t: float
    chi_iterations: int
    theta_iterations: int
    chi_residual: float
    theta_residual: float
    theta_min: float
    theta_max: float
    chi_min: float
    chi_max: float
    wall_time: float


@dataclass
class Trajectory:
    """Full time history (every step is kept; ``stride`` only thins output)."""

    spec: ProblemSpec
    cfg: SchemeConfig
    times: list = field(default_factory=list)
    theta: list = field(default_factory=list)
    chi: list = field(default_factory=list)
    reports: list = field(default_factory=list)
    stride: int = 1
    completed: bool = False

    @property
    def grid(self) -> Grid1D:
        return self.spec.grid

    def append(self, state: State):
        self.times.append(state.t)
        self.theta.append(state.theta)
        self.chi.append(state.chi)

    def arrays(self):
        return np.asarray(self.times), np.asarray(self.theta), np.asarray(self.chi)

    @property
    def final(self) -> State:
        return State(self.times[-1], self.theta[-1], self.chi[-1])

    def snapshot_indices(self):
        k = len(self.times)
        idx = list(range(0, k, self.stride))
        if idx[-1] != k - 1:
            idx.append(k - 1)
        return idx


class _Context:
    """Discretization objects shared by all steps of one (spec, cfg) pair."""

    def __init__(self, spec: ProblemSpec, cfg: SchemeConfig):
        self.spec = spec
        self.cfg = cfg
        self.grid = spec.grid
        self.x = self.grid.x
        self.xi = self.grid.interior
        self.h = self.grid.h
        self.log = RegularizedLog(cfg.eps, cfg.resolvent_tol)
        self.beta = MollifiedBeta(
            spec.source.base_beta(), cfg.eps, spec.length, spec.horizon, cfg.quadrature_order
        )
        self.implicit_source = cfg.source_implicit(spec)


@lru_cache(maxsize=32)
def _context(spec: ProblemSpec, cfg: SchemeConfig) -> _Context:
    return _Context(spec, cfg)


def _check_source_conditioning(spec: ProblemSpec, cfg: SchemeConfig, dt: float):
    if not cfg.source_implicit(spec):
        return
    k = dt * spec.source.sup_R3_positive(spec.length, spec.horizon)
    if k >= 1.0:
        raise ValueError(f"dt * sup(R3+) = {k:.3g} >= 1: implicit temperature Jacobian loses the M-matrix property")
    if k >= 0.5:
        warnings.warn(f"dt * sup(R3+) = {k:.3g} >= 0.5; temperature Jacobian is poorly conditioned", ConditioningWarning)


def _damped_newton(residual, jacobian_banded, u0, tol, max_iter, what):
    """Newton's method with step halving whenever the residual grows."""
    u = u0.copy()
    res = residual(u)
    rnorm = float(np.max(np.abs(res)))
    for it in range(max_iter + 1):
        if rnorm <= tol:
            return u, it, rnorm
        if it == max_iter:
            break
        step = solve_banded((1, 1), jacobian_banded(u), res)
        lam = 1.0
        for _ in range(30):
            trial = u - lam * step
            tres = residual(trial)
            tnorm = float(np.max(np.abs(tres)))
            if np.isfinite(tnorm) and tnorm < rnorm:
                break
            lam *= 0.5
        else:
            # no decrease along the Newton direction; accept the smallest step only if finite
            if not np.isfinite(tnorm):
                break
        u, res, rnorm = trial, tres, tnorm
    raise NewtonDivergence(
        f"{what}: Newton failed after {max_iter} iterations (residual {rnorm:.3e}, tolerance {tol:.3e})",
        residual=rnorm,
        iterate_min=float(np.min(u)),
        iterate_max=float(np.max(u)),
    )


def _chi_solve(ctx: _Context, state: State, dt: float):
    pot = ctx.spec.potentials
    h2 = ctx.h * ctx.h
    chi_old, theta_old = state.chi, state.theta
    n = chi_old.size

    def residual(c):
        return c - chi_old - dt * laplacian_neumann(c, ctx.h) + dt * (pot.F_prime(c) + pot.G_prime(c) * theta_old)

    def jacobian(c):
        ab = np.empty((3, n))
        ab[1] = 1.0 + dt * (2.0 / h2 + pot.F_second(c) + pot.G_second(c) * theta_old)
        ab[0] = -dt / h2
        ab[2] = -dt / h2
        ab[0, 1] = -2.0 * dt / h2
        ab[2, n - 2] = -2.0 * dt / h2
        return ab

    tol = ctx.cfg.newton_tol * (1.0 + float(np.max(np.abs(chi_old))))
    return _damped_newton(residual, jacobian, chi_old, tol, ctx.cfg.newton_max, "phase step")


def _theta_solve(ctx: _Context, state: State, chi_next: np.ndarray, dt: float):
    spec = ctx.spec
    pot, src = spec.potentials, spec.source
    h2 = ctx.h * ctx.h
    t1 = state.t + dt
    gl, gr = spec.bc_left(t1), spec.bc_right(t1)
    Ugl, Ugr = ctx.log.Ln_eps(gl), ctx.log.Ln_eps(gr)
    th_old = state.theta[1:-1]
    xi = ctx.xi
    dG = pot.G(chi_next[1:-1]) - pot.G(state.chi[1:-1])
    implicit = ctx.implicit_source
    pi_explicit = None if implicit else src.pi(xi, t1, th_old)
    n = th_old.size

    def full(u):
        return np.concatenate(([gl], u, [gr]))

    def residual(u):
        U = ctx.log.Ln_eps(full(u))
        lap = laplacian_dirichlet(U, Ugl, Ugr, ctx.h)
        p = src.pi(xi, t1, u) if implicit else pi_explicit
        return u - th_old - dG - dt * lap + dt * ctx.beta.beta_eps(xi, t1, u) - dt * p

    def jacobian(u):
        dU = ctx.log.Ln_eps_prime(u)
        dB = ctx.beta.beta_eps_prime(xi, t1, u)
        ab = np.empty((3, n))
        ab[1] = 1.0 + dt * (2.0 * dU / h2 + dB)
        if implicit:
            ab[1] -= dt * src.pi_prime(xi, t1, u)
        ab[0, 1:] = -dt * dU[1:] / h2
        ab[2, :-1] = -dt * dU[:-1] / h2
        ab[0, 0] = ab[2, -1] = 0.0
        return ab

    tol = ctx.cfg.newton_tol * (1.0 + float(np.max(np.abs(th_old))))
    u, it, r = _damped_newton(residual, jacobian, th_old, tol, ctx.cfg.newton_max, "temperature step")
    return full(u), it, r


def chi_step(state: State, spec: ProblemSpec, cfg: SchemeConfig, dt: Optional[float] = None) -> np.ndarray:
    """New phase field from ``(chi - chi_old)/dt - Laplace chi + F'(chi) + G'(chi)*theta_old = 0``
    (homogeneous Neumann data). The residual is measured multiplied by ``dt``."""
    ctx = _context(spec, cfg)
    return _chi_solve(ctx, state, cfg.dt if dt is None else dt)[0]


def theta_step(state: State, chi_next, spec: ProblemSpec, cfg: SchemeConfig, dt: Optional[float] = None) -> np.ndarray:
    """New temperature from the implicit temperature equation with the
    Dirichlet datum at the new time level; returns all nodes."""
    ctx = _context(spec, cfg)
    dt = cfg.dt if dt is None else dt
    _check_source_conditioning(spec, cfg, dt)
    return _theta_solve(ctx, state, np.asarray(chi_next, dtype=float), dt)[0]


def advance(state: State, spec: ProblemSpec, cfg: SchemeConfig, dt: Optional[float] = None):
    """One full step; returns the new state and its :class:`StepReport`."""
    return _advance(_context(spec, cfg), state, cfg.dt if dt is None else dt)


def _advance(ctx: _Context, state: State, dt: float):
    t0 = time.perf_counter()
    chi, ci, cr = _chi_solve(ctx, state, dt)
    theta, ti, tr = _theta_solve(ctx, state, chi, dt)
    new = State(state.t + dt, theta, chi)
    rep = StepReport(
        new.t, ci, ti, cr, tr,
        float(theta.min()), float(theta.max()), float(chi.min()), float(chi.max()),
        time.perf_counter() - t0,
    )
    return new, rep


def time_levels(horizon: float, dt: float):
    """Step sizes reaching ``horizon`` in ``ceil(horizon/dt)`` steps (last one may be shorter)."""
    k = max(1, math.ceil(horizon / dt - 1e-9))
    steps = [dt] * k
    steps[-1] = horizon - dt * (k - 1)
    return steps


def simulate(spec: ProblemSpec, cfg: SchemeConfig, snapshot_every: int = 1, validate: bool = True) -> Trajectory:
    """Advance from ``t = 0`` to the horizon; raise :class:`StepFailure` (with the
    partial trajectory attached) if a step fails."""
    if validate:
        report = validate_spec(spec)
        if report:
            raise SpecValidationError(report)
    _check_source_conditioning(spec, cfg, cfg.dt)
    traj = Trajectory(spec, cfg, stride=max(1, int(snapshot_every)))
    state = State(0.0, spec.initial_theta(), spec.initial_chi())
    traj.append(state)
    ctx = _Context(spec, cfg)
    for dt in time_levels(spec.horizon, cfg.dt):
        try:
            state, rep = _advance(ctx, state, dt)
        except NewtonDivergence as exc:
            raise StepFailure(exc, traj) from exc
        traj.append(state)
        traj.reports.append(rep)
    traj.completed = True
    return traj


def run(spec: ProblemSpec, cfg: SchemeConfig, snapshot_every: int = 1, validate: bool = True):
    """Simulate and evaluate all run-level diagnostics; returns ``(trajectory, report)``."""
    from .diagnostics import build_report

    traj = simulate(spec, cfg, snapshot_every, validate)
    return traj, build_report(traj)
