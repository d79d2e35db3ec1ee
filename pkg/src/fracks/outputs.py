"""Deterministic writers for CSV tables, SVG plots and run metadata."""

from __future__ import annotations

import csv
import math
from pathlib import Path

from . import __version__


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def write_csv(path, columns, rows) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r.get(c)) for c in columns])
    return path


def write_svg(path, x, y, xlabel, ylabel, loglog=False) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "fracks"
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(x, y, marker=".", lw=1)
    if loglog:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return Path(path)


def write_metadata(path, cfg: dict, summary: dict) -> Path:
    lines = [
        f"version: fracks-{__version__}",
        f"study: {cfg['study']}",
        f"preset: {cfg.get('preset', '')}",
        f"seed: {cfg['seed']}",
        "config_echo: config.resolved.yaml",
    ]
    if cfg["study"] in ("simulate", "decay-study", "gevrey-study"):
        lines.append("blowup_detector: heuristic (L-infinity growth factor or spectral tail fraction)")
    for k in sorted(summary):
        lines.append(f"summary.{k}: {_cell(summary[k])}")
    Path(path).write_text("\n".join(lines) + "\n")
    return Path(path)
