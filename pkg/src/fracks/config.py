"""Experiment configuration: schema, defaults, presets and YAML loading."""

from __future__ import annotations

import copy
import math
from pathlib import Path

import yaml

from .initial_data import INITIAL_KEYS

STUDIES = (
    "simulate",
    "decay-study",
    "gevrey-study",
    "besov-norm",
    "bilinear-check",
    "kernel-norms",
    "picard-study",
    "scaling-check",
)

TOP_KEYS = {"study", "preset", "description", "seed", "output", "grid", "model", "solver", "initial", "params"}
GRID_KEYS = {"dim", "N", "period"}
MODEL_KEYS = {"alpha", "dealias", "gevrey_theta"}
SOLVER_KEYS = {"T", "dt", "integrator", "samples", "nonlinear", "linf_factor", "tail_fraction", "p", "q"}

PARAM_KEYS = {
    "simulate": set(),
    "decay-study": {"sigma", "window", "p", "q"},
    "gevrey-study": {"window"},
    "besov-norm": {"s", "p", "q"},
    "bilinear-check": {"estimates", "resolutions", "ensemble", "alpha"},
    "kernel-norms": {"pairs", "times", "theta", "N", "period"},
    "picard-study": {"K", "nodes", "T", "etd_steps"},
    "scaling-check": {"lambdas", "alphas", "ps", "q"},
}

DEFAULTS = {
    "seed": 0,
    "output": "fracks-out",
    "grid": {"dim": 2, "N": 64, "period": 2 * math.pi},
    "model": {"alpha": 2.0, "dealias": True, "gevrey_theta": None},
    "solver": {
        "T": 1.0,
        "dt": None,
        "integrator": "ETD2RK",
        "samples": 101,
        "nonlinear": True,
        "linf_factor": 1000.0,
        "tail_fraction": 0.2,
        "p": 2.0,
        "q": 2.0,
    },
    "initial": {"kind": "critical-spectrum", "amplitude": 0.1, "cutoff": 3.0},
    "params": {},
}


class SchemaError(ValueError):
    """Config contains unknown keys or values of the wrong shape."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def _preset(study, description, **blocks):
    cfg = {"study": study, "description": description}
    cfg.update(blocks)
    return cfg


_L16 = 16 * math.pi

PRESETS = {
    "smalldata-2d": _preset(
        "simulate",
        "small Gaussian bump (mass 0.4 pi), alpha=2: global decay",
        grid={"dim": 2, "N": 64, "period": 2 * math.pi},
        model={"alpha": 2.0},
        solver={"T": 1.0, "samples": 101},
        initial={"kind": "gaussian", "mass": 0.4 * math.pi, "width": 0.3},
    ),
    "largemass-2d": _preset(
        "simulate",
        "radial Gaussian of mass 32 pi, alpha=2: heuristic collapse indicator",
        grid={"dim": 2, "N": 128, "period": 2 * math.pi},
        model={"alpha": 2.0},
        solver={"T": 1.0, "samples": 5001},
        initial={"kind": "gaussian", "mass": 32 * math.pi, "width": 0.3},
    ),
    "decay-alpha2-sigma1": _preset(
        "decay-study",
        "critical-spectrum small data, alpha=2, sigma=1: t^(-1/2) decay",
        grid={"dim": 2, "N": 128, "period": _L16},
        model={"alpha": 2.0},
        solver={"T": 5.0, "samples": 101},
        initial={"kind": "critical-spectrum", "amplitude": 0.1, "cutoff": 3.0},
        params={"sigma": 1.0, "window": [0.5, 5.0], "p": 2.0, "q": 2.0},
    ),
    "decay-alpha15-sigma1": _preset(
        "decay-study",
        "critical-spectrum small data, alpha=1.5, sigma=1: t^(-2/3) decay",
        grid={"dim": 2, "N": 128, "period": _L16},
        model={"alpha": 1.5},
        solver={"T": 5.0, "samples": 101},
        initial={"kind": "critical-spectrum", "amplitude": 0.1, "cutoff": 3.0},
        params={"sigma": 1.0, "window": [0.5, 5.0], "p": 2.0, "q": 2.0},
    ),
    "decay-alpha1-sigma1": _preset(
        "decay-study",
        "critical-spectrum small data, alpha=1, sigma=1: t^(-1) decay",
        grid={"dim": 2, "N": 128, "period": _L16},
        model={"alpha": 1.0},
        solver={"T": 5.0, "samples": 101},
        initial={"kind": "critical-spectrum", "amplitude": 0.1, "cutoff": 3.0},
        params={"sigma": 1.0, "window": [0.5, 5.0], "p": 2.0, "q": 1.0},
    ),
    "gevrey-alpha15": _preset(
        "gevrey-study",
        "analyticity radius growth for small data, alpha=1.5",
        grid={"dim": 2, "N": 128, "period": 2 * math.pi},
        model={"alpha": 1.5},
        solver={"T": 1.0, "samples": 91},
        initial={"kind": "critical-spectrum", "amplitude": 0.1, "cutoff": 16.0},
        params={"window": [0.1, 1.0]},
    ),
    "besov-report": _preset(
        "besov-norm",
        "per-shell Besov report of critical-spectrum data",
        grid={"dim": 2, "N": 128, "period": 2 * math.pi},
        model={"alpha": 2.0},
        initial={"kind": "critical-spectrum", "amplitude": 1.0, "cutoff": 8.0},
        params={"s": 0.0, "p": 2.0, "q": 2.0},
    ),
    "besov-scaling": _preset(
        "scaling-check",
        "critical Besov norm under dyadic rescaling",
        grid={"dim": 2, "N": 128, "period": 2 * math.pi},
        initial={"kind": "mexican-hat", "width": 0.3, "amplitude": 1.0},
        params={"lambdas": [2], "alphas": [1.0, 1.5, 2.0], "ps": [2.0, "inf"], "q": 2.0},
    ),
    "bilinear-estimates": _preset(
        "bilinear-check",
        "empirical constants of the three bilinear estimates at two resolutions",
        grid={"dim": 2, "N": 64, "period": 2 * math.pi},
        params={"estimates": ["split", "endpoint", "critical"], "resolutions": [64, 128], "ensemble": 50, "alpha": 1.5},
    ),
    "kernel-norms": _preset(
        "kernel-norms",
        "L1 norms of Lambda^sigma exp(-t^(1/alpha) Lambda_1) and their rescaling",
        params={
            "pairs": [[0.0, 2.0], [1.0, 2.0], [1.0, 1.5]],
            "times": [0.5, 1.0, 2.0, 4.0],
            "theta": 1.0,
            "N": 1024,
            "period": 128.0,
        },
    ),
    "picard-small": _preset(
        "picard-study",
        "Picard iteration of the integral equation against the ETD2RK solution",
        grid={"dim": 2, "N": 32, "period": 2 * math.pi},
        model={"alpha": 1.5},
        initial={"kind": "power-spectrum", "exponent": 0.0, "amplitude": 1.0, "cutoff": 2.0},
        params={"K": 8, "nodes": 65, "T": 0.5, "etd_steps": 4000},
    ),
}


def list_presets():
    """``(name, description)`` pairs in a fixed order."""
    return [(name, PRESETS[name]["description"]) for name in sorted(PRESETS)]


def _check_block(cfg, block, allowed, problems):
    val = cfg.get(block)
    if val is None:
        return
    if not isinstance(val, dict):
        problems.append(f"{block}: expected a mapping")
        return
    for k in sorted(set(val) - allowed):
        problems.append(f"{block}.{k}")


def validate_config(cfg: dict) -> None:
    """Raise :class:`SchemaError` naming every unknown or malformed key."""
    if not isinstance(cfg, dict):
        raise SchemaError(["top level: expected a mapping"])
    problems = [k for k in sorted(set(cfg) - TOP_KEYS)]
    study = cfg.get("study")
    if study not in STUDIES:
        problems.append(f"study: expected one of {', '.join(STUDIES)}, got {study!r}")
    _check_block(cfg, "grid", GRID_KEYS, problems)
    _check_block(cfg, "model", MODEL_KEYS, problems)
    _check_block(cfg, "solver", SOLVER_KEYS, problems)
    _check_block(cfg, "initial", INITIAL_KEYS, problems)
    if study in PARAM_KEYS:
        _check_block(cfg, "params", PARAM_KEYS[study], problems)
    if problems:
        raise SchemaError(problems)


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def resolve(cfg: dict) -> dict:
    """Expand a preset reference, apply defaults and validate."""
    cfg = dict(cfg)
    name = cfg.pop("preset", None)
    if name is not None:
        if name not in PRESETS:
            raise SchemaError([f"preset: unknown name {name!r}"])
        cfg = _merge(PRESETS[name], cfg)
        cfg["preset"] = name
    validate_config(cfg)
    return _merge(DEFAULTS, cfg)


def preset_config(name: str, seed=None, output=None) -> dict:
    cfg = {"preset": name}
    if seed is not None:
        cfg["seed"] = int(seed)
    if output is not None:
        cfg["output"] = str(output)
    return resolve(cfg)


def load_config(path) -> dict:
    """Read YAML from ``path``; raises ``FileNotFoundError`` or :class:`SchemaError`."""
    text = Path(path).read_text()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SchemaError([f"unparseable YAML: {exc}"]) from exc
    return resolve(raw if raw is not None else {})


def dump_config(cfg: dict) -> str:
    return yaml.safe_dump(cfg, sort_keys=True, default_flow_style=False)
