"""Study runners behind the CLI; each returns tables, plot series and a summary."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InsufficientDataError, ResolutionError
from .gevrey_analysis import (
    analyticity_radius,
    bilinear_estimate_check,
    decay_fit,
    default_bilinear_params,
    derivative_besov_norm,
    kernel_l1_norm,
)
from .initial_data import build_initial
from .littlewood_paley import BesovParams, besov_norm, besov_report, build_filter_bank, critical_besov
from .solver import (
    BlowupThresholds,
    SERIES_COLUMNS,
    SolverConfig,
    picard_iterate,
    scaling_transform,
    simulate,
)
from .spectral_core import ModelParams, make_grid
from .validation import check_exponent


class NumericalFailure(RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass
class Plot:
    name: str
    x: list
    y: list
    xlabel: str
    ylabel: str
    loglog: bool = False


@dataclass
class StudyResult:
    tables: dict = field(default_factory=dict)
    plots: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    snapshots: dict = field(default_factory=dict)


def _grid(cfg):
    g = cfg["grid"]
    return make_grid(g["dim"], g["N"], g["period"])


def _model(cfg, grid):
    m = cfg["model"]
    return ModelParams(float(m["alpha"]), grid, bool(m["dealias"]), m["gevrey_theta"])


def solver_config(cfg, grid=None) -> SolverConfig:
    grid = grid or _grid(cfg)
    s = cfg["solver"]
    model = _model(cfg, grid)
    return SolverConfig(
        model,
        T=float(s["T"]),
        dt=s["dt"],
        integrator=s["integrator"],
        samples=int(s["samples"]),
        nonlinear=bool(s["nonlinear"]),
        blowup=BlowupThresholds(linf_factor=float(s["linf_factor"]), tail_fraction=float(s["tail_fraction"])),
        besov=critical_besov(model.alpha, grid.dim, check_exponent(s["p"], "p"), check_exponent(s["q"], "q")),
    )


def _initial(cfg, grid):
    return build_initial(grid, cfg["initial"], float(cfg["model"]["alpha"]), int(cfg["seed"]))


def _trajectory_table(traj):
    return (list(SERIES_COLUMNS), traj.rows())


def _run(cfg):
    grid = _grid(cfg)
    sc = solver_config(cfg, grid)
    u0 = _initial(cfg, grid)
    traj, outcome = simulate(u0, sc)
    return grid, sc, u0, traj, outcome


def _require_completed(outcome):
    # fits need the whole window; a collapse signal or breakdown leaves gaps
    if not outcome.completed:
        diag = {"status": outcome.status, "status_time": outcome.time, **outcome.diagnostics}
        raise NumericalFailure(f"run ended early ({outcome.status} at t={outcome.time})", diag)


def run_simulate(cfg) -> StudyResult:
    grid, sc, u0, traj, outcome = _run(cfg)
    res = StudyResult()
    res.tables["trajectory"] = _trajectory_table(traj)
    t = list(traj.times)
    for col in ("linf", "besov_critical", "tail_fraction", "mass"):
        res.plots.append(Plot(col, t, list(traj.series[col]), "t", col))
    res.summary = {
        "status": outcome.status,
        "status_time": outcome.time,
        "heuristic_detector": True,
        **{k: v for k, v in outcome.diagnostics.items() if k != "error"},
    }
    if "error" in outcome.diagnostics:
        res.summary["error"] = outcome.diagnostics["error"]
    res.snapshots["final"] = traj.snapshots[-1]
    return res


def run_decay(cfg) -> StudyResult:
    grid, sc, u0, traj, outcome = _run(cfg)
    _require_completed(outcome)
    p = cfg["params"]
    sigma = float(p.get("sigma", 1.0))
    alpha = sc.alpha
    params = critical_besov(alpha, grid.dim, check_exponent(p.get("p", 2.0), "p"), check_exponent(p.get("q", 2.0), "q"))
    bank = build_filter_bank(grid)
    window = tuple(p.get("window", [0.5, sc.T]))
    times = traj.times[1:]
    vals = np.array([derivative_besov_norm(u, sigma, params, bank) for u in traj.snapshots[1:]])
    fit = decay_fit(times, vals, window)
    res = StudyResult()
    res.tables["trajectory"] = _trajectory_table(traj)
    res.tables["decay_series"] = (["t", "derivative_norm"], [{"t": float(a), "derivative_norm": float(b)} for a, b in zip(times, vals)])
    target = -sigma / alpha
    row = {
        "sigma": sigma,
        "alpha": alpha,
        "exponent": fit.exponent,
        "target": target,
        "residual": fit.residual,
        "window_start": window[0],
        "window_end": window[1],
    }
    res.tables["decay_fit"] = (list(row), [row])
    res.plots.append(Plot("derivative_norm", list(times), list(vals), "t", f"||Lambda^{sigma:g} u||", True))
    res.summary = {"status": outcome.status, "exponent": fit.exponent, "target": target, "mass_drift": outcome.diagnostics["mass_drift"]}
    return res


def run_gevrey(cfg) -> StudyResult:
    grid, sc, u0, traj, outcome = _run(cfg)
    _require_completed(outcome)
    lo, hi = cfg["params"].get("window", [0.1, sc.T])
    rows = []
    for t, u in zip(traj.times, traj.snapshots):
        if t < lo - 1e-12 or t > hi + 1e-12:
            continue
        rep = analyticity_radius(u, t, sc.alpha, sc.model.theta)
        rows.append({"t": float(t), "fitted_radius": rep.radius, "predicted_radius": rep.predicted_radius, "residual": rep.residual})
    ts = np.array([r["t"] for r in rows])
    rs = np.array([r["fitted_radius"] for r in rows])
    slope = float(np.polyfit(np.log(ts), np.log(rs), 1)[0])
    res = StudyResult()
    res.tables["trajectory"] = _trajectory_table(traj)
    res.tables["gevrey_study"] = (["t", "fitted_radius", "predicted_radius", "residual"], rows)
    summ = {"alpha": sc.alpha, "loglog_slope": slope, "target_slope": 1 / sc.alpha, "window_start": lo, "window_end": hi}
    res.tables["gevrey_slope"] = (list(summ), [summ])
    res.plots.append(Plot("fitted_radius", list(ts), list(rs), "t", "radius", True))
    res.summary = {"status": outcome.status, **summ, "mass_drift": outcome.diagnostics["mass_drift"]}
    return res


def run_besov(cfg) -> StudyResult:
    grid = _grid(cfg)
    u0 = _initial(cfg, grid)
    p = cfg["params"]
    params = BesovParams(float(p.get("s", 0.0)), check_exponent(p.get("p", 2.0), "p"), check_exponent(p.get("q", 2.0), "q"))
    bank = build_filter_bank(grid)
    rows, summary = besov_report(u0, params, bank)
    summary = {**summary, "realizable": params.realizable(grid.dim)}
    res = StudyResult()
    res.tables["norm_report"] = (["j", "block_lp_norm", "weight", "contribution"], rows)
    res.tables["besov_summary"] = (["s", "p", "q", "value", "j_min", "j_max"], [summary])
    res.plots.append(Plot("contribution", [r["j"] for r in rows], [r["contribution"] for r in rows], "j", "2^(js) ||Delta_j u||"))
    res.summary = summary
    return res


def run_bilinear(cfg) -> StudyResult:
    p = cfg["params"]
    tags = p.get("estimates", ["split", "endpoint", "critical"])
    resolutions = p.get("resolutions", [64, 128])
    size = int(p.get("ensemble", 50))
    alpha = float(p.get("alpha", 1.5))
    g = cfg["grid"]
    res = StudyResult()
    summary_rows = []
    for tag in tags:
        params = default_bilinear_params(tag, alpha)
        maxima = []
        for N in resolutions:
            rep = bilinear_estimate_check(tag, params, size, int(cfg["seed"]), g["dim"], int(N), g["period"])
            res.tables[f"bilinear_{tag}_N{N}"] = (["member", "lhs", "rhs", "ratio"], rep.rows())
            maxima.append(rep.max_ratio)
            summary_rows.append({"estimate": tag, "N": int(N), "max_ratio": rep.max_ratio, "median_ratio": rep.median_ratio})
        res.summary[f"{tag}_drift"] = max(maxima) / min(maxima) - 1
    res.tables["bilinear_summary"] = (["estimate", "N", "max_ratio", "median_ratio"], summary_rows)
    return res


def run_kernel(cfg) -> StudyResult:
    p = cfg["params"]
    pairs = p.get("pairs", [[1.0, 2.0]])
    times = p.get("times", [0.5, 1.0, 2.0, 4.0])
    theta = float(p.get("theta", 1.0))
    rows = []
    res = StudyResult()
    for sigma, alpha in pairs:
        consts = []
        for t in times:
            est = kernel_l1_norm(float(sigma), float(alpha), float(t), theta, cfg["grid"]["dim"], int(p.get("N", 1024)), float(p.get("period", 128.0)))
            rows.append({"sigma": est.sigma, "alpha": est.alpha, "t": est.t, "value": est.value, "rescaled_constant": est.rescaled_constant})
            consts.append(est.rescaled_constant)
        res.summary[f"drift_sigma{sigma:g}_alpha{alpha:g}"] = max(consts) / min(consts) - 1
        res.plots.append(Plot(f"rescaled_sigma{sigma:g}_alpha{alpha:g}", list(times), consts, "t", "value t^(sigma/alpha)"))
    res.tables["kernel_norms"] = (["sigma", "alpha", "t", "value", "rescaled_constant"], rows)
    return res


def run_picard(cfg) -> StudyResult:
    grid = _grid(cfg)
    p = cfg["params"]
    T = float(p.get("T", 0.5))
    steps = int(p.get("etd_steps", 4000))
    base = dict(cfg)
    base["solver"] = {**cfg["solver"], "T": T, "dt": T / steps, "samples": 2}
    sc = solver_config(base, grid)
    u0 = _initial(cfg, grid)
    pr = picard_iterate(u0, T, int(p.get("K", 8)), sc, nodes=int(p.get("nodes", 65)))
    traj, outcome = simulate(u0, sc)
    if outcome.status != "completed":
        raise NumericalFailure("reference ETD run did not complete", outcome.diagnostics)
    ref = traj.snapshots[-1].coeffs
    fixed = pr.fixed_point[-1].coeffs
    agreement = float(np.linalg.norm(fixed - ref) / np.linalg.norm(ref))
    rows = []
    for k, d in enumerate(pr.increments, start=1):
        r = float(pr.ratios[k - 2]) if k >= 2 else math.nan
        rows.append({"k": k, "increment": float(d), "ratio": r})
    res = StudyResult()
    res.tables["picard_increments"] = (["k", "increment", "ratio"], rows)
    res.plots.append(Plot("increment", [r["k"] for r in rows], [r["increment"] for r in rows], "k", "d_k"))
    res.summary = {
        "contracting": pr.contracting,
        "max_ratio": float(np.max(pr.ratios)) if len(pr.ratios) else math.nan,
        "etd_agreement": agreement,
        "mass_drift": outcome.diagnostics["mass_drift"],
    }
    return res


def run_scaling(cfg) -> StudyResult:
    grid = _grid(cfg)
    p = cfg["params"]
    bank = build_filter_bank(grid)
    rows = []
    q = check_exponent(p.get("q", 2.0), "q")
    for alpha in p.get("alphas", [1.0, 1.5, 2.0]):
        u0 = build_initial(grid, cfg["initial"], float(alpha), int(cfg["seed"]))
        for lam in p.get("lambdas", [2]):
            v = scaling_transform(u0, int(lam), float(alpha))
            for pp in p.get("ps", [2.0, "inf"]):
                params = critical_besov(float(alpha), grid.dim, check_exponent(pp, "p"), q)
                a = besov_norm(u0, params, bank)
                b = besov_norm(v, params, bank)
                rows.append({"alpha": float(alpha), "p": params.p, "lambda": int(lam), "norm_original": a, "norm_scaled": b, "rel_change": b / a - 1})
    res = StudyResult()
    res.tables["scaling"] = (["alpha", "p", "lambda", "norm_original", "norm_scaled", "rel_change"], rows)
    res.summary = {"max_abs_rel_change": max(abs(r["rel_change"]) for r in rows)}
    return res


RUNNERS = {
    "simulate": run_simulate,
    "decay-study": run_decay,
    "gevrey-study": run_gevrey,
    "besov-norm": run_besov,
    "bilinear-check": run_bilinear,
    "kernel-norms": run_kernel,
    "picard-study": run_picard,
    "scaling-check": run_scaling,
}


def run_study(cfg) -> StudyResult:
    try:
        return RUNNERS[cfg["study"]](cfg)
    except (ResolutionError, InsufficientDataError, OverflowError, FloatingPointError) as exc:
        raise NumericalFailure(str(exc)) from exc
