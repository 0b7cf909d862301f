"""Render solver artifacts into figures.

Four kinds, all reading only the documented CSV schemas of a run directory
(``diagnostics.csv``, ``snapshots/t_*.csv``, ``summary``) or a sweep
directory (``phase.csv``):

* ``profiles``      — snapshot evolution, final profile highlighted;
* ``profiles_log``  — the same on a logarithmic density axis (blow-up view);
* ``convergence``   — self-similar convergence; for pure-diffusion rescaled
  runs the analytic Cauchy density ``M/(pi(1+y^2))`` is overlaid;
* ``phase``         — outcome heatmap over the (mass, scale) sweep axes.

Rendering is read-only with respect to the artifacts, deterministic under
the Agg backend, and every figure carries the source run's config hash in
its caption.
"""

from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FigureSpec", "SchemaError", "render", "build_figure", "FIGURE_KINDS"]

FIGURE_KINDS = ("profiles", "profiles_log", "convergence", "phase")

DIAGNOSTICS_COLUMNS = (
    "time",
    "mass",
    "l2",
    "l_inv_alpha",
    "l_inf",
    "first_moment",
    "i_lambda",
    "min_value",
    "tail_fraction",
)

PHASE_COLUMNS = (
    "alpha",
    "mass",
    "scale",
    "first_moment",
    "thm11_satisfied",
    "thm12_satisfied",
    "outcome",
    "time_of_detection",
)

OUTCOME_ORDER = (
    "completed",
    "blowup_detected",
    "resolution_lost",
    "step_floor",
    "max_steps",
    "failed",
)

OUTCOME_COLORS = {
    "completed": "#3a7ca5",
    "blowup_detected": "#d1495b",
    "resolution_lost": "#e8a13c",
    "step_floor": "#9067c6",
    "max_steps": "#6c757d",
    "failed": "#212529",
}


class SchemaError(ValueError):
    """Input file does not match its documented schema."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw and where to put it."""

    kind: str
    run_dir: str
    out_path: str
    xlim: tuple | None = None
    ylim: tuple | None = None
    title: str | None = None

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {FIGURE_KINDS}")


def _read_csv_table(path, expected_columns, numeric=True):
    if not os.path.exists(path):
        raise SchemaError(f"missing input {path}")
    with open(path) as fh:
        header = tuple(fh.readline().strip().split(","))
        for col in expected_columns:
            if col not in header:
                raise SchemaError(f"{path}: missing column {col!r} (found {list(header)})")
        extra = [c for c in header if c not in expected_columns]
        if extra:
            raise SchemaError(f"{path}: unexpected column {extra[0]!r}")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    table = {}
    for j, col in enumerate(header):
        vals = [r[j] for r in rows]
        if numeric or col != "outcome":
            try:
                table[col] = np.array([float(v) for v in vals])
            except ValueError:
                if col == "outcome":
                    table[col] = np.array(vals)
                else:
                    raise SchemaError(f"{path}: non-numeric value in column {col!r}")
        else:
            table[col] = np.array(vals)
    return table


def read_diagnostics(run_dir):
    return _read_csv_table(os.path.join(run_dir, "diagnostics.csv"), DIAGNOSTICS_COLUMNS)


def read_phase(path):
    return _read_csv_table(path, PHASE_COLUMNS, numeric=False)


def read_summary(run_dir):
    path = os.path.join(run_dir, "summary")
    if not os.path.exists(path):
        raise SchemaError(f"missing input {path}")
    out = {}
    with open(path) as fh:
        for line in fh:
            key, _, val = line.strip().partition("=")
            out[key] = val
    return out


def read_snapshots(run_dir):
    """Time-sorted (time, x, values) triples from snapshots/t_*.csv."""
    snap_dir = os.path.join(run_dir, "snapshots")
    if not os.path.isdir(snap_dir):
        raise SchemaError(f"missing snapshot directory {snap_dir}")
    names = [n for n in os.listdir(snap_dir) if n.startswith("t_") and n.endswith(".csv")]
    if not names:
        raise SchemaError(f"no snapshots in {snap_dir}")
    snaps = []
    for name in names:
        t = float(name[2:-4])
        path = os.path.join(snap_dir, name)
        with open(path) as fh:
            header = fh.readline().strip()
            if header != "x,value":
                raise SchemaError(f"{path}: expected header 'x,value', got {header!r}")
            data = np.array([[float(tok) for tok in line.split(",")] for line in fh])
        snaps.append((t, data[:, 0], data[:, 1]))
    snaps.sort(key=lambda s: s[0])
    return snaps


def _provenance(run_dir, kind):
    if kind == "phase":
        payload = open(os.path.join(run_dir, "phase.csv"), "rb").read()
        return "phase " + hashlib.sha256(payload).hexdigest()[:12]
    return "config " + read_summary(run_dir).get("config_hash", "unknown")


def _profile_axes(ax, snaps, logscale):
    cmap = plt.get_cmap("viridis")
    t_max = max(s[0] for s in snaps) or 1.0
    for t, x, v in snaps[:-1]:
        ax.plot(x, np.clip(v, 1e-16, None) if logscale else v,
                color=cmap(0.85 * t / t_max), lw=0.7)
    t, x, v = snaps[-1]
    ax.plot(x, np.clip(v, 1e-16, None) if logscale else v,
            color="#d1495b", lw=1.8, label=f"final (t = {t:g})")
    if logscale:
        ax.set_yscale("log")
        ax.set_ylim(bottom=max(1e-12, np.clip(snaps[0][2], 1e-16, None).min() * 0.1))
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax.legend(loc="upper right", fontsize=8)


def build_figure(spec: FigureSpec):
    """Build (but do not save) the matplotlib figure for a spec."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2), dpi=130)
    if spec.kind in ("profiles", "profiles_log"):
        snaps = read_snapshots(spec.run_dir)
        _profile_axes(ax, snaps, logscale=spec.kind == "profiles_log")
        default_title = "density evolution" + (" (log scale)" if spec.kind == "profiles_log" else "")
    elif spec.kind == "convergence":
        snaps = read_snapshots(spec.run_dir)
        summary = read_summary(spec.run_dir)
        _profile_axes(ax, snaps, logscale=False)
        if summary.get("frame") == "rescaled" and float(summary.get("chi", 1.0)) == 0.0:
            mass = float(summary["mass_final"])
            x = snaps[-1][1]
            ax.plot(x, mass / (math.pi * (1.0 + x**2)), "k--", lw=1.4,
                    label="Cauchy density M/(pi(1+y^2))")
            ax.legend(loc="upper right", fontsize=8)
        ax.set_xlabel("y")
        default_title = "self-similar convergence"
    else:  # phase
        table = read_phase(os.path.join(spec.run_dir, "phase.csv"))
        masses = np.unique(table["mass"].astype(float))
        scales = np.unique(table["scale"].astype(float))
        img = np.full((scales.size, masses.size), np.nan)
        marks = []
        for i in range(table["mass"].size):
            col = int(np.searchsorted(masses, float(table["mass"][i])))
            row = int(np.searchsorted(scales, float(table["scale"][i])))
            img[row, col] = OUTCOME_ORDER.index(str(table["outcome"][i]))
            if str(table["thm12_satisfied"][i]) in ("1", "1.0", "True"):
                marks.append((col, row))
        cmap = matplotlib.colors.ListedColormap([OUTCOME_COLORS[o] for o in OUTCOME_ORDER])
        ax.imshow(img, origin="lower", cmap=cmap, vmin=-0.5, vmax=len(OUTCOME_ORDER) - 0.5,
                  aspect="auto")
        if marks:
            ax.scatter([c for c, _ in marks], [r for _, r in marks], marker="*",
                       s=90, c="white", edgecolors="black", linewidths=0.5,
                       label="concentration criterion holds")
            ax.legend(loc="upper left", fontsize=8)
        ax.set_xticks(range(masses.size), [f"{m:g}" for m in masses])
        ax.set_yticks(range(scales.size), [f"{s:g}" for s in scales])
        ax.set_xlabel("mass")
        ax.set_ylabel("scale")
        handles = [plt.Rectangle((0, 0), 1, 1, color=OUTCOME_COLORS[o])
                   for o in OUTCOME_ORDER if o in set(map(str, table["outcome"]))]
        labels = [o for o in OUTCOME_ORDER if o in set(map(str, table["outcome"]))]
        fig.legend(handles, labels, loc="lower center", ncol=min(4, len(labels)),
                   fontsize=7, frameon=False)
        default_title = "phase diagram"
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    if spec.ylim:
        ax.set_ylim(*spec.ylim)
    ax.set_title(spec.title or default_title, fontsize=11)
    fig.text(0.99, 0.01, _provenance(spec.run_dir, spec.kind),
             ha="right", va="bottom", fontsize=6, color="#555555")
    fig.tight_layout(rect=(0, 0.05, 1, 1) if spec.kind == "phase" else None)
    return fig


def render(spec: FigureSpec) -> str:
    """Build and write the figure; returns the output path.  Nothing is
    written when the inputs are rejected."""
    fig = build_figure(spec)
    try:
        fig.savefig(spec.out_path)
    finally:
        plt.close(fig)
    return spec.out_path
