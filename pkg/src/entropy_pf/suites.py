"""Property batteries: each returns a :class:`SuiteResult` of named checks.

They back the ``verify`` subcommand and the acceptance tests. The numbered
suites correspond one-to-one to the acceptance criteria listed in the README.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .config import demo_config_path, demo_names, parse_config
from .diagnostics import (
    MoserWeights,
    energy_monitors,
    max_principle_check,
    moser_phi,
    moser_phi_constant,
    moser_phi_lower,
    moser_psi,
    moser_psi_lower,
    stability_probe,
)
from .grid import (
    Grid1D,
    dual_norm,
    laplacian_dirichlet,
    laplacian_neumann,
    norm_L2,
    poincare_constant,
)
from .model import (
    BoundaryData,
    InitialCondition,
    Potentials,
    ProblemSpec,
    SourceSpec,
    check_sign_condition,
)
from .monotone import BaseBeta, Coefficient, MollifiedBeta, RegularizedLog
from .oracle import (
    OdeReduction,
    fine_explicit_reference,
    mollifier_quadrature_oracle,
    moser_phi_quadrature,
    moser_psi_series,
    rk4_reference,
)
from .stepper import SchemeConfig, simulate


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    key: str
    title: str
    checks: list = field(default_factory=list)
    elapsed: float = 0.0
    budget: float = math.inf
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and self.elapsed < self.budget

    def add(self, name, passed, detail=""):
        self.checks.append(Check(name, bool(passed), detail))

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        failed = [c.name for c in self.checks if not c.passed]
        if self.elapsed >= self.budget:
            failed.append(f"runtime {self.elapsed:.1f}s >= {self.budget:.0f}s")
        extra = f"; failed: {', '.join(failed)}" if failed else ""
        return f"[{tag}] {self.key} {self.title} ({len(self.checks)} checks, {self.elapsed:.1f}s{extra})"

    def details(self):
        for c in self.checks:
            yield f"    {'ok  ' if c.passed else 'FAIL'} {c.name}: {c.detail}"


class _timed:
    def __init__(self, res: SuiteResult):
        self.res = res

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.res

    def __exit__(self, *exc):
        self.res.elapsed = time.perf_counter() - self.t0
        return False


def load_demo(name: str):
    return parse_config(demo_config_path(name))


def l2q_distance(a, b) -> float:
    """``L2(Q)`` distance of two temperature histories on the same time levels
    (left-rectangle rule in time, trapezoid in space)."""
    times, ta, _ = a.arrays()
    _, tb, _ = b.arrays()
    w = a.grid.trapezoid_weights
    dts = np.diff(times)
    d2 = ((ta[:-1] - tb[:-1]) ** 2) @ w
    return float(math.sqrt(np.dot(dts, d2)))


# 1 -------------------------------------------------------------------------

def yosida_suite() -> SuiteResult:
    res = SuiteResult("1", "regularized logarithm", budget=5.0)
    eps_list = (0.5, 0.1, 0.01, 1e-3)
    with _timed(res):
        s = np.linspace(-10.0, 10.0, 1000)
        worst = 0.0
        for e in eps_list:
            log = RegularizedLog(e)
            worst = max(worst, float(np.max(np.abs(log.ln_eps(log.ln_eps_inverse(s)) - s))))
        res.add("round_trip", worst <= 1e-9, f"max |ln_eps(e^s + eps s) - s| = {worst:.2e} <= 1e-9")

        r = np.geomspace(1.0, 1e3, 1000)
        lo_gap = hi_gap = math.inf
        for e in eps_list:
            v = RegularizedLog(e).ln_eps(r)
            lo_gap = min(lo_gap, float(np.min(v - np.log(r) / (1.0 + e))))
            hi_gap = min(hi_gap, float(np.min(np.log(r) + 1e-12 - v)))
        res.add("sandwich", lo_gap >= 0.0 and hi_gap >= 0.0,
                f"ln r/(1+eps) <= ln_eps r <= ln r + 1e-12, margins {lo_gap:.2e}, {hi_gap:.2e}")

        r_all = np.concatenate((np.linspace(-100.0, 1.0, 800), np.geomspace(1.0, 1e4, 800)))
        ok_range = ok_low = ok_high = True
        for e in eps_list:
            d = RegularizedLog(e).Ln_eps_prime(r_all)
            ok_range &= bool(np.all(d >= e) and np.all(d <= e + 1.0 / e))
            ok_low &= bool(np.all(d[r_all <= 1.0] >= 1.0))
            big = r_all >= 1.0
            ok_high &= bool(np.all(d[big] >= 1.0 / (2.0 * r_all[big])))
        res.add("derivative_range", ok_range, "eps <= Ln_eps' <= eps + 1/eps")
        res.add("coercive_below_1", ok_low, "Ln_eps'(r) >= 1 for r <= 1")
        res.add("coercive_above_1", ok_high, "Ln_eps'(r) >= 1/(2r) for r >= 1")

        windows = ((0.5, 2.0), (0.1, 5.0), (1.0, 1.0), (0.9, 10.0), (0.02, 1.5))
        ok_val = ok_der = True
        for tl, th in windows:
            r = np.linspace(tl, th, 500)
            lstar, lhigh = RegularizedLog.window_bounds(tl, th)
            for e in eps_list:
                log = RegularizedLog(e)
                v = log.ln_eps(r)
                ok_val &= bool(np.all(v >= lstar - 1e-15) and np.all(v <= lhigh + 1e-15))
                if e <= 1e-2:
                    d = log.ln_eps_prime(r)
                    ok_der &= bool(np.all(d >= 1.0 / (2.0 * th)) and np.all(d <= 2.0 / tl))
        res.add("window_values", ok_val, "min(0, ln theta_low) <= ln_eps <= max(0, ln theta_high) on the window")
        res.add("window_derivative", ok_der, "1/(2 theta_high) <= ln_eps' <= 2/theta_low for eps <= 1e-2")
    return res


# 2 -------------------------------------------------------------------------

BETA_PRESETS = (Coefficient(1.0), Coefficient(0.5, 0.25), Coefficient(0.5, 0.25, 1.0, 0.5))


def beta_suite(seed: int = 20261014, n_random: int = 1000, n_pairs: int = 10000) -> SuiteResult:
    res = SuiteResult("2", "mollified beta", budget=10.0)
    rng = np.random.default_rng(seed)
    eps_list = (1e-1, 1e-2, 1e-3)
    with _timed(res):
        mono_worst, err_ratio, prim_margin, growth_ratio = -math.inf, 0.0, math.inf, 0.0
        convex_worst = 0.0
        Ms = []
        for R1 in BETA_PRESETS:
            base = BaseBeta("singular", R1)
            mslack = R1.growth_constant(1.0, 1.0)
            for e in eps_list:
                mb = MollifiedBeta(base, e)
                M = mb.error_constant
                if R1 == BETA_PRESETS[0]:
                    Ms.append(M)
                x = rng.uniform(0.0, 1.0, n_pairs)
                t = rng.uniform(0.0, 1.0, n_pairs)
                r = np.where(rng.random((2, n_pairs)) < 0.5,
                             np.exp(rng.uniform(math.log(e / 2), math.log(2 / e), (2, n_pairs))),
                             rng.uniform(-1.0, 3.0 / e, (2, n_pairs)))
                r1, r2 = np.min(r, axis=0), np.max(r, axis=0)
                b1, b2 = mb.beta_eps(x, t, r1), mb.beta_eps(x, t, r2)
                mono_worst = max(mono_worst, float(np.max(b1 - b2)))

                clamped = base(x, t, mb.clamp(r1))
                err_ratio = max(err_ratio, float(np.max(np.abs(b1 - clamped)) / (M * e)))

                B = mb.beta_eps_primitive(x, t, r1)
                prim_margin = min(prim_margin, float(np.min(B + M * e * np.abs(r1 - 1.0))))
                hh = 1e-3 * e
                rc = np.exp(rng.uniform(math.log(e / 2), math.log(2 / e), 2000))
                xc = rng.uniform(0.0, 1.0, 2000)
                tc = rng.uniform(0.0, 1.0, 2000)
                Bc = mb.beta_eps_primitive(xc, tc, rc)
                sec = mb.beta_eps_primitive(xc, tc, rc + hh) - 2.0 * Bc + mb.beta_eps_primitive(xc, tc, rc - hh)
                # second differences are only meaningful above the roundoff in B itself
                convex_worst = min(convex_worst, float(np.min(sec / np.maximum(1.0, np.abs(Bc)))))

                if R1.kind != "constant":
                    dx = 1e-6
                    xs = np.clip(xc, dx, 1.0 - dx)
                    ts = np.clip(tc, dx, 1.0 - dx)
                    bx = (mb.beta_eps(xs + dx, ts, rc) - mb.beta_eps(xs - dx, ts, rc)) / (2 * dx)
                    bt = (mb.beta_eps(xs, ts + dx, rc) - mb.beta_eps(xs, ts - dx, rc)) / (2 * dx)
                    lhs = np.abs(bx) + np.abs(bt)
                    rhs = mslack * (1.0 + np.abs(mb.beta_eps(xs, ts, rc)))
                    growth_ratio = max(growth_ratio, float(np.max(lhs / rhs)))
        res.add("monotone", mono_worst <= 1e-12, f"max beta_eps(r1) - beta_eps(r2) over r1 < r2 = {mono_worst:.2e}")
        res.add("error_bound", err_ratio <= 1.0, f"max |beta_eps - beta(clamp r)| / (M eps) = {err_ratio:.3f}")
        spread = (max(Ms) - min(Ms)) / max(Ms)
        res.add("M_stable", spread <= 0.1, f"M = {Ms[0]:.4f} .. {Ms[-1]:.4f} across eps, spread {spread:.1%}")
        res.add("primitive_lower", prim_margin >= -1e-12, f"min B_eps + M eps |r - 1| = {prim_margin:.2e}")
        res.add("primitive_convex", convex_worst >= -1e-12, f"min second difference / max(1, |B|) = {convex_worst:.2e}")
        res.add("derivative_growth", growth_ratio <= 1.1,
                f"max (|d_x| + |d_t|) / (M_beta (1 + |beta_eps|)) = {growth_ratio:.3f} <= 1.1")

        worst = 0.0
        for k in range(n_random):
            e = eps_list[k % 3]
            R1 = BETA_PRESETS[k % len(BETA_PRESETS)]
            mb = MollifiedBeta(BaseBeta("singular", R1), e)
            x, t = float(rng.uniform()), float(rng.uniform())
            r = float(np.exp(rng.uniform(math.log(e / 2), math.log(2 / e))))
            ref = mollifier_quadrature_oracle(mb, x, t, r)
            worst = max(worst, abs(float(mb.beta_eps(x, t, r)) - ref) / max(1.0, abs(ref)))
        res.add("gauss_vs_simpson", worst <= 1e-9, f"max relative gap on {n_random} points = {worst:.2e} <= 1e-9")
        res.data["M"] = Ms
    return res


# 3 -------------------------------------------------------------------------

MP_PRESETS = (("first_order", 0.0, 1.0), ("second_order", -1.0, 1.0))


def random_phase_spec(preset, lo, hi, seed, n=128):
    rng = np.random.default_rng(seed)
    chi0 = rng.uniform(lo, hi, n + 2)
    a, b = np.sort(rng.uniform(0.5, 2.0, 2))
    return ProblemSpec(
        n=n,
        potentials=Potentials(preset),
        source=SourceSpec("singular", R1=Coefficient(0.5)),
        chi_star_low=lo,
        chi_star_high=hi,
        theta0=InitialCondition("sine_bump", (float(a), float(b))),
        chi0=InitialCondition("nodal", tuple(chi0)),
    )


def max_principle_suite(seeds=(0, 1, 2, 3, 4), dt=1e-3, eps=1e-3) -> SuiteResult:
    res = SuiteResult("3", "phase maximum principle", budget=120.0)
    cfg = SchemeConfig(dt=dt, eps=eps)
    with _timed(res):
        for preset, lo, hi in MP_PRESETS:
            for seed in seeds:
                traj = simulate(random_phase_spec(preset, lo, hi, seed), cfg)
                rec = max_principle_check(traj, lo, hi, 1e-7)
                _, theta, chi = traj.arrays()
                res.add(f"{preset}_seed{seed}", rec.passed and traj.completed,
                        f"chi in [{chi.min():.9g}, {chi.max():.9g}] vs [{lo}, {hi}] +- 1e-7, min theta {theta.min():.4g}")
    return res


# 4 -------------------------------------------------------------------------

def refined(spec: ProblemSpec) -> ProblemSpec:
    """Same problem with the mesh size halved."""
    return replace(spec, n=2 * spec.n + 1)


def positivity_suite(names=None) -> SuiteResult:
    res = SuiteResult("4", "temperature positivity and boundedness", budget=300.0)
    with _timed(res):
        for name in names or demo_names():
            rc = load_demo(name)
            spec, cfg = rc.spec, rc.scheme
            base = simulate(spec, cfg)
            fine = simulate(refined(spec), replace(cfg, dt=cfg.dt / 2))
            small = simulate(spec, replace(cfg, eps=1e-4))
            floor = float(np.min(base.arrays()[1]))
            floor_f = float(np.min(fine.arrays()[1]))
            top = float(np.max(base.arrays()[1]))
            top_s = float(np.max(small.arrays()[1]))
            inner = float(np.min(base.arrays()[1][:, 1:-1]))
            res.add(f"{name}_positive", floor > 0.0, f"theta_floor = {floor:.6g} (interior nodes {inner:.6g})")
            rel = abs(floor_f - floor) / floor if floor > 0 else math.inf
            res.add(f"{name}_floor_stable", rel <= 0.2, f"floor {floor:.6g} -> {floor_f:.6g} under (h, dt) halving ({rel:.2%})")
            rel = abs(top_s - top) / top
            res.add(f"{name}_max_stable", rel <= 0.05, f"max theta {top:.6g} (eps 1e-3) vs {top_s:.6g} (eps 1e-4) ({rel:.2%})")
    return res


# 5 and 6 -------------------------------------------------------------------

SWEEP_EPS = (1e-1, 1e-2, 1e-3, 1e-4)


def eps_sweep(spec, cfg, eps_values=SWEEP_EPS, jobs=1):
    """Runs at every ``eps`` and ``eps/2``; returns ``(distances, monitor rows, runs)``."""
    values = sorted({e for e in eps_values} | {e / 2 for e in eps_values}, reverse=True)
    runs = {e: simulate(spec, replace(cfg, eps=e)) for e in values}
    dist = [l2q_distance(runs[e], runs[e / 2]) for e in eps_values]
    mons = {e: energy_monitors(runs[e]) for e in values}
    return dist, mons, runs


def eps_convergence_suites(name="demo_first_order"):
    r5 = SuiteResult("5", "eps-convergence", budget=300.0)
    r6 = SuiteResult("6", "energy monitors across eps", budget=300.0)
    rc = load_demo(name)
    t0 = time.perf_counter()
    dist, mons, _ = eps_sweep(rc.spec, rc.scheme)
    elapsed = time.perf_counter() - t0
    for k, (e, d) in enumerate(zip(SWEEP_EPS, dist)):
        r5.add(f"distance_eps_{e:g}", math.isfinite(d), f"||theta_eps - theta_eps/2||_L2(Q) = {d:.4e}")
    dec = all(b < a for a, b in zip(dist, dist[1:]))
    r5.add("strictly_decreasing", dec, " > ".join(f"{d:.3e}" for d in dist))
    finite = all(math.isfinite(v) for m in mons.values() for v in m.values())
    r6.add("all_finite", finite, f"{len(mons)} runs x {len(next(iter(mons.values())))} rows")
    mons = {e: mons[e] for e in SWEEP_EPS}
    e1, e2 = SWEEP_EPS[-2], SWEEP_EPS[-1]
    for row in mons[e1]:
        a, b = mons[e1][row], mons[e2][row]
        var = abs(a - b) / max(abs(a), abs(b), 1e-300)
        r6.add(row, var < 0.1, f"{a:.6g} (eps {e1:g}) vs {b:.6g} (eps {e2:g}), {var:.2%} < 10%")
    r5.elapsed = r6.elapsed = elapsed
    r5.data["distances"] = dist
    r6.data["monitors"] = mons
    return r5, r6


# 7 -------------------------------------------------------------------------

def moser_suite(seed: int = 7, n_samples: int = 10000, n_agree: int = 1000) -> SuiteResult:
    res = SuiteResult("7", "Moser weight lemmas", budget=10.0)
    rng = np.random.default_rng(seed)
    with _timed(res):
        worst_phi = math.inf
        for _ in range(n_samples):
            ts = float(rng.uniform(1.0, 10.0))
            n = int(rng.integers(1, 21))
            r = ts * math.exp(float(rng.uniform(-3.0, n + 3.0)))
            w = MoserWeights(ts)
            phi = float(moser_phi(w, n, r))
            worst_phi = min(worst_phi, (phi - float(moser_phi_lower(w, n, r))) / max(1.0, phi))
        res.add("phi_coercive", worst_phi >= -1e-12,
                f"min (phi_n - (theta*/6 e^(3 min(n, w)) - C*)) / max(1, phi_n) = {worst_phi:.3e} over {n_samples} samples")
        worst_psi = math.inf
        for _ in range(n_samples):
            ts = float(rng.uniform(1.0, 10.0))
            n = int(rng.integers(1, 21))
            p = float(rng.uniform(1.0, 8.0))
            r = ts * math.exp(float(rng.uniform(-3.0, n + 3.0)))
            w = MoserWeights(ts)
            lhs, rhs = moser_psi(w, n, p, r), moser_psi_lower(w, n, p, r)
            worst_psi = min(worst_psi, (lhs - rhs) / max(1.0, abs(rhs)))
        res.add("psi_coercive", worst_psi >= -1e-12,
                f"min (psi_n - min(n, w)^(2p)/(2p)) / max(1, rhs) = {worst_psi:.3e} over {n_samples} samples")
        gap_phi = gap_psi = 0.0
        for _ in range(n_agree):
            ts = float(rng.uniform(1.0, 10.0))
            n = int(rng.integers(1, 21))
            p = float(rng.uniform(1.0, 8.0))
            r = ts * math.exp(float(rng.uniform(0.01, n + 3.0)))
            w = MoserWeights(ts)
            a, b = moser_phi(w, n, r), moser_phi_quadrature(ts, n, r)
            gap_phi = max(gap_phi, abs(a - b) / abs(b))
            a, b = moser_psi(w, n, p, r), moser_psi_series(ts, n, p, r)
            gap_psi = max(gap_psi, abs(a - b) / abs(b))
        res.add("phi_closed_vs_quadrature", gap_phi <= 1e-9, f"max relative gap {gap_phi:.2e}")
        res.add("psi_quadrature_vs_series", gap_psi <= 1e-9, f"max relative gap {gap_psi:.2e}")
        c = moser_phi_constant(MoserWeights(1.0), 10)
        res.add("alpha_star", True, f"alpha* = theta*/6, C*(theta*=1, n=10) = {c:.6g}")
    return res


# 8 -------------------------------------------------------------------------

ORACLE_DTS = (1e-2, 5e-3, 2.5e-3, 1.25e-3)


def homogeneous_spec():
    return ProblemSpec(n=16, chi0=InitialCondition("constant", (0.3,)))


def fine_reference_spec():
    return ProblemSpec(
        n=15, horizon=0.1,
        source=SourceSpec("singular", R1=Coefficient(1.0)),
        theta0=InitialCondition("affine", (0.8, 0.7)),
        bc_left=BoundaryData(0.8), bc_right=BoundaryData(1.5),
        chi0=InitialCondition("sine_bump", (0.2, 0.9)),
    )


def observed_orders(errors, ratio=2.0):
    e = np.asarray(errors, dtype=float)
    return list(np.log(e[:-1] / e[1:]) / math.log(ratio))


def homogeneous_errors(dts=ORACLE_DTS, dt_ref=1e-6):
    """Sup error of the stepper against RK4 on spatially constant data.

    The exact solution stays constant in space only if the Dirichlet datum
    follows it, so the RK4 temperature is fed in as a piecewise-linear datum.
    """
    base = homogeneous_spec()
    ref = rk4_reference(OdeReduction(base), dt_ref, record_every=100)
    d = BoundaryData.piecewise_linear(zip(ref.times, ref.theta))
    spec = replace(base, bc_left=d, bc_right=d)
    errs = []
    for dt in dts:
        traj = simulate(spec, SchemeConfig(dt=dt))
        times, th, ch = traj.arrays()
        e_th = np.abs(th - np.interp(times, ref.times, ref.theta)[:, None])
        e_ch = np.abs(ch - np.interp(times, ref.times, ref.chi)[:, None])
        errs.append(float(max(e_th.max(), e_ch.max())))
    return errs


def fine_explicit_errors(dts=ORACLE_DTS, eps=0.1):
    spec = fine_reference_spec()
    t_end = spec.horizon
    ref = fine_explicit_reference(spec, eps, min(dts) / 1000.0, [t_end])
    rth, rch = ref[t_end]
    errs = []
    for dt in dts:
        f = simulate(spec, SchemeConfig(dt=dt, eps=eps)).final
        errs.append(float(max(np.abs(f.theta - rth).max(), np.abs(f.chi - rch).max())))
    return errs


def oracle_suite() -> SuiteResult:
    res = SuiteResult("8", "oracle equivalence", budget=120.0)
    with _timed(res):
        errs = homogeneous_errors()
        orders = observed_orders(errs)
        C = max(e / dt for e, dt in zip(errs, ORACLE_DTS))
        res.add("rk4_order", all(0.9 <= p <= 1.1 for p in orders),
                "errors " + ", ".join(f"{e:.3e}" for e in errs) + "; orders " + ", ".join(f"{p:.3f}" for p in orders))
        res.add("rk4_constant", math.isfinite(C), f"sup error <= C dt with C = {C:.4g}")
        errs = fine_explicit_errors()
        orders = observed_orders(errs)
        res.add("fine_explicit_order", all(p >= 0.9 for p in orders),
                "errors " + ", ".join(f"{e:.3e}" for e in errs) + "; orders " + ", ".join(f"{p:.3f}" for p in orders))
    return res


# 9 -------------------------------------------------------------------------

def stability_suite(name="demo_linear_source") -> SuiteResult:
    res = SuiteResult("9", "Lipschitz stability", budget=60.0)
    rc = load_demo(name)
    with _timed(res):
        s3 = stability_probe(rc.spec, rc.scheme, 1e-3)
        s4 = stability_probe(rc.spec, rc.scheme, 1e-4, base=s3.base)
        s0 = stability_probe(rc.spec, rc.scheme, 0.0, base=s3.base)
        ratio = s3.final_difference / s4.final_difference
        res.add("final_ratio", 9.0 <= ratio <= 11.0, f"diff(1e-3)/diff(1e-4) at T = {ratio:.4f} in [9, 11]")
        res.add("gronwall_fit", math.isfinite(s3.C_fit) and math.isfinite(s4.C_fit),
                f"C_fit = {s3.C_fit:.4g} (1e-3), {s4.C_fit:.4g} (1e-4); max ratio {s3.max_ratio:.4g}")
        _, ta, ca = s0.base.arrays()
        _, tb, cb = s0.perturbed.arrays()
        same = np.array_equal(ta, tb) and np.array_equal(ca, cb)
        res.add("zero_perturbation", same and s0.final_difference == 0.0, "delta0 = 0 gives bitwise-identical runs")
    return res


# 10 ------------------------------------------------------------------------

STEADY_CASES = (("second_order", -1.0, 1.0, 0.0), ("first_order", 0.0, 1.0, 0.0), ("first_order", 0.0, 1.0, 1.0))


def steady_spec(preset, lo, hi, chi_value, n=128):
    # beta(., ., 1) = 0 and pi = R1 + R2 = 0
    return ProblemSpec(
        n=n,
        potentials=Potentials(preset),
        source=SourceSpec("singular", R1=Coefficient(0.5), R2=Coefficient(-0.5)),
        chi_star_low=lo,
        chi_star_high=hi,
        chi0=InitialCondition("constant", (chi_value,)),
    )


def steady_state_suite(dt=1e-3, eps=1e-3) -> SuiteResult:
    res = SuiteResult("10", "steady states", budget=30.0)
    cfg = SchemeConfig(dt=dt, eps=eps)
    with _timed(res):
        for preset, lo, hi, c in STEADY_CASES:
            spec = steady_spec(preset, lo, hi, c)
            traj = simulate(spec, cfg)
            M = MollifiedBeta(spec.source.base_beta(), eps, spec.length, spec.horizon).error_constant
            tol = 2.0 * M * eps * spec.horizon
            _, th, ch = traj.arrays()
            dev = float(max(np.abs(th - 1.0).max(), np.abs(ch - c).max()))
            res.add(f"{preset}_(1,{c:g})", dev <= tol, f"max deviation {dev:.3e} <= 2 M eps T = {tol:.3e}")
    return res


# supporting suites ---------------------------------------------------------

def grid_suite(seed: int = 3) -> SuiteResult:
    res = SuiteResult("grid", "discrete operators", budget=10.0)
    rng = np.random.default_rng(seed)
    with _timed(res):
        g = Grid1D(63)
        f = np.concatenate(([0.0], rng.normal(size=g.n), [0.0]))
        q = np.concatenate(([0.0], rng.normal(size=g.n), [0.0]))
        lhs = g.h * np.dot(-laplacian_dirichlet(f, 0.0, 0.0, g.h), q[1:-1])
        rhs = np.dot(np.diff(f), np.diff(q)) / g.h
        res.add("summation_by_parts", abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs)), f"gap {abs(lhs - rhs):.2e}")
        v = rng.normal(size=g.n + 2)
        mass = float(np.dot(g.trapezoid_weights, laplacian_neumann(v, g.h)))
        res.add("neumann_mass", abs(mass) <= 1e-10, f"trapezoid mass of the Neumann Laplacian {mass:.2e}")
        M = poincare_constant(g)
        worst = max(dual_norm(w, g.h) / norm_L2(np.concatenate(([0.0], w, [0.0])), g)
                    for w in rng.normal(size=(200, g.n)))
        res.add("poincare", worst <= M * (1 + 1e-12), f"max dual/L2 = {worst:.5f} <= M = {M:.5f}")
        errs_d, errs_n = [], []
        for n in (31, 63, 127):
            gg = Grid1D(n)
            x = gg.x
            u = np.sin(np.pi * x) + x**3
            errs_d.append(np.max(np.abs(laplacian_dirichlet(u, u[0], u[-1], gg.h) - (-np.pi**2 * np.sin(np.pi * x[1:-1]) + 6 * x[1:-1]))))
            c = np.cos(np.pi * x)
            errs_n.append(np.max(np.abs(laplacian_neumann(c, gg.h) + np.pi**2 * c)))
        hs = [1 / 32, 1 / 64, 1 / 128]
        od = [math.log(errs_d[k] / errs_d[k + 1]) / math.log(hs[k] / hs[k + 1]) for k in range(2)]
        on = [math.log(errs_n[k] / errs_n[k + 1]) / math.log(hs[k] / hs[k + 1]) for k in range(2)]
        res.add("dirichlet_order", min(od) >= 1.9, "orders " + ", ".join(f"{p:.3f}" for p in od))
        res.add("neumann_order", min(on) >= 1.9, "orders " + ", ".join(f"{p:.3f}" for p in on))
    return res


def model_suite(seed: int = 5) -> SuiteResult:
    res = SuiteResult("model", "potentials and sources", budget=10.0)
    rng = np.random.default_rng(seed)
    with _timed(res):
        so = Potentials("second_order")
        fo = Potentials("first_order")
        res.add("second_order_window", not check_sign_condition(so, -1.0, 1.0), "sign condition holds on [-1, 1]")
        res.add("second_order_bad_window", bool(check_sign_condition(so, 0.0, 1.0)), "sign condition fails on [0, 1]")
        res.add("first_order_window", not check_sign_condition(fo, 0.0, 1.0), "sign condition holds on [0, 1]")
        x, t = rng.uniform(0, 1, 10000), rng.uniform(0, 1, 10000)
        r = rng.uniform(0.05, 20.0, 10000)
        worst = 0.0
        for s in (SourceSpec("singular", R1=Coefficient(0.5, 0.25, 1.0, 0.5), R2=Coefficient(0.1)),
                  SourceSpec("linear", R3=Coefficient(2.0), R4=Coefficient(1.0, 0.5)),
                  SourceSpec("none")):
            R = s.R1(x, t) / r**2 + s.R2(x, t) if s.kind == "singular" else (
                s.R3(x, t) * r - s.R4(x, t) if s.kind == "linear" else 0.0 * r)
            worst = max(worst, float(np.max(np.abs(s.R(x, t, r) - (s.pi(x, t, r) - s.beta_base(x, t, r))))),
                        float(np.max(np.abs(s.R(x, t, r) - R) / np.maximum(1.0, np.abs(R)))))
        res.add("source_split", worst <= 1e-14, f"max |R - (pi - beta)| = {worst:.2e}")
    return res


FAST_SUITES = {
    "yosida": yosida_suite,
    "beta": beta_suite,
    "grid": grid_suite,
    "model": model_suite,
    "moser": moser_suite,
    "steady": steady_state_suite,
}

SLOW_SUITES = {
    "max_principle": max_principle_suite,
    "positivity": positivity_suite,
    "oracle": oracle_suite,
    "stability": stability_suite,
}


def run_suites(names=None, include_slow=False):
    """Run the requested suites (default: every fast one); returns a list of results."""
    table = dict(FAST_SUITES)
    if include_slow or names:
        table.update(SLOW_SUITES)
        table["eps_sweep"] = eps_convergence_suites
    chosen = names or list(table)
    out = []
    for key in chosen:
        if key not in table:
            raise KeyError(f"unknown suite {key!r}; choose from {', '.join(sorted(table))}")
        r = table[key]()
        out.extend(r if isinstance(r, tuple) else [r])
    return out
