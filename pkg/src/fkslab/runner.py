"""Run orchestration: validated configuration, theorem-scenario presets,
single runs with self-describing artifact directories, and phase-diagram
sweeps.

Artifact layout of a run directory:

    config.yaml        exact configuration (schema_version'd, round-trips)
    diagnostics.csv    pinned schema, one row per observation
    snapshots/t_*.csv  observed fields (when snapshot retention is on)
    criteria.csv       evaluated theorem hypotheses for the initial datum
    summary            key=value outcome and final norms

Everything numeric is written at 17 significant digits; identical configs
produce byte-identical artifacts.
"""

from __future__ import annotations

import hashlib
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import yaml

from . import analysis
from .analysis import (
    BlowupDetector,
    build_test_function,
    check_blowup_criterion,
    check_global_smallness,
    make_blowup_criterion,
    write_diagnostics_csv,
)
from .inequalities import default_gns_estimate
from .integrate import SimState, StepControl, Trajectory, advance, suggest_safety
from .operators import check_alpha
from .spectral import make_grid, synthesize_initial, write_field_csv

__all__ = [
    "SCHEMA_VERSION",
    "ConfigError",
    "GridConfig",
    "InitialConfig",
    "ControlConfig",
    "DetectorConfig",
    "BlowupCheckConfig",
    "RunConfig",
    "SweepConfig",
    "PhasePoint",
    "RunResult",
    "load_run_config",
    "save_run_config",
    "load_sweep_config",
    "preset",
    "PRESETS",
    "run",
    "sweep",
]

SCHEMA_VERSION = 1

CRITERIA_COLUMNS = (
    "criterion",
    "satisfied",
    "margin",
    "alpha",
    "threshold",
    "critical_norm",
    "C_hat",
    "mass",
    "first_moment",
    "K2_effective",
    "lambda",
    "mu",
    "margin_factor",
)


class ConfigError(ValueError):
    """Configuration violates a module precondition."""


@dataclass(frozen=True)
class GridConfig:
    n: int = 1024
    half_width: float = 20.0


@dataclass(frozen=True)
class InitialConfig:
    family: str = "gaussian"
    mass: float = 1.0
    scale: float = 1.0
    center: float = 0.0
    boundary_tol: float = 1e-12


@dataclass(frozen=True)
class ControlConfig:
    safety: float | None = None  # None -> stability-calibrated automatically
    dt_min: float = 1e-9
    dt_max: float = 0.05
    max_steps: int = 10_000_000


@dataclass(frozen=True)
class DetectorConfig:
    enabled: bool = True
    growth_factor: float = 1e4
    tail_threshold: float = 0.1


@dataclass(frozen=True)
class BlowupCheckConfig:
    enabled: bool = False
    beta: float | None = None  # None -> 1 - alpha/2


@dataclass(frozen=True)
class RunConfig:
    alpha: float = 1.0
    chi: float = 1.0
    frame: str = "physical"
    grid: GridConfig = field(default_factory=GridConfig)
    initial: InitialConfig = field(default_factory=InitialConfig)
    control: ControlConfig = field(default_factory=ControlConfig)
    horizon: float = 1.0
    observation_interval: float = 0.1
    keep_snapshots: bool = False
    dealias: bool = False
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    blowup_check: BlowupCheckConfig = field(default_factory=BlowupCheckConfig)
    seed: int = 0
    output_dir: str | None = None
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(d: dict) -> "RunConfig":
        d = dict(d)
        try:
            for key, cls in (
                ("grid", GridConfig),
                ("initial", InitialConfig),
                ("control", ControlConfig),
                ("detector", DetectorConfig),
                ("blowup_check", BlowupCheckConfig),
            ):
                if key in d and isinstance(d[key], dict):
                    d[key] = cls(**d[key])
            cfg = RunConfig(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        cfg.validate()
        return cfg

    def validate(self) -> None:
        """Reject any parameter violating a module precondition before any
        computation starts."""
        try:
            check_alpha(self.alpha)
            grid = make_grid(self.grid.n, self.grid.half_width)
            synthesize_initial(
                self.initial.family,
                self.initial.mass,
                self.initial.scale,
                self.initial.center,
                grid,
                boundary_tol=self.initial.boundary_tol,
            )
            StepControl(
                safety=self.control.safety if self.control.safety is not None else 0.4,
                dt_min=self.control.dt_min,
                dt_max=self.control.dt_max,
                max_steps=self.control.max_steps,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.frame not in ("physical", "rescaled"):
            raise ConfigError(f"unknown frame {self.frame!r}")
        if self.frame == "rescaled" and float(self.alpha) != 1.0:
            raise ConfigError("the rescaled frame requires alpha = 1")
        if self.chi not in (0, 1, 0.0, 1.0):
            raise ConfigError(f"chi must be 0 or 1, got {self.chi}")
        if not (self.horizon >= 0.0):
            raise ConfigError("horizon must be nonnegative")
        if not (self.observation_interval > 0.0):
            raise ConfigError("observation_interval must be positive")
        if self.blowup_check.enabled:
            if not (0.0 < self.alpha < 1.0):
                raise ConfigError("blow-up criterion requires 0 < alpha < 1")
            beta = self.blowup_check.beta
            if beta is not None and not (0.0 < beta < 1.0 and self.alpha + beta > 1.0):
                raise ConfigError("blow-up check needs 0 < beta < 1 with alpha + beta > 1")
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {self.schema_version}")


def config_yaml(config: RunConfig) -> str:
    return yaml.safe_dump(config.to_dict(), sort_keys=True)


def config_hash(config: RunConfig) -> str:
    """Provenance hash of the physics (the artifact destination is excluded,
    so reruns of the same scenario share a hash)."""
    canonical = replace(config, output_dir=None)
    return hashlib.sha256(config_yaml(canonical).encode()).hexdigest()[:12]


def save_run_config(config: RunConfig, path) -> None:
    with open(path, "w") as fh:
        fh.write(config_yaml(config))


def load_run_config(path) -> RunConfig:
    with open(path) as fh:
        d = yaml.safe_load(fh)
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected a mapping")
    return RunConfig.from_dict(d)


# ---------------------------------------------------------------------------
# presets encoding the two figure scenarios and the two theorem scenarios


def _critical_threshold() -> float:
    """Effective smallness threshold 4/C_hat(1,1) at alpha = 1."""
    return 4.0 / default_gns_estimate(1.0, 1.0).C_hat


def _preset_subcritical_alpha1() -> RunConfig:
    return RunConfig(
        alpha=1.0,
        chi=1.0,
        frame="physical",
        grid=GridConfig(n=2048, half_width=80.0),
        initial=InitialConfig(family="gaussian", mass=0.5 * _critical_threshold(), scale=1.0),
        control=ControlConfig(dt_max=0.02),
        horizon=10.0,
        observation_interval=0.1,
        keep_snapshots=True,
    )


def _preset_fig1_rescaled() -> RunConfig:
    return RunConfig(
        alpha=1.0,
        chi=1.0,
        frame="rescaled",
        grid=GridConfig(n=1024, half_width=40.0),
        initial=InitialConfig(family="gaussian", mass=0.5 * _critical_threshold(), scale=1.0),
        control=ControlConfig(dt_max=5e-3),
        horizon=6.0,
        observation_interval=0.25,
        keep_snapshots=True,
    )


def _preset_pure_diffusion_rescaled() -> RunConfig:
    return RunConfig(
        alpha=1.0,
        chi=0.0,
        frame="rescaled",
        grid=GridConfig(n=2048, half_width=40.0),
        initial=InitialConfig(family="gaussian", mass=1.0, scale=1.0),
        control=ControlConfig(dt_max=5e-3),
        horizon=8.0,
        observation_interval=0.5,
        keep_snapshots=True,
    )


def _preset_supercritical_alpha05() -> RunConfig:
    # scale chosen so the concentration criterion holds with ~2x margin
    # (computed from the fitted test-function constants)
    alpha, mass, margin = 0.5, 100.0, 2.05
    tf = _test_function_cached(alpha, 1.0 - alpha / 2.0)
    crit = make_blowup_criterion(tf, mass)
    fm = (crit.K2_effective * mass ** (2.0 - alpha) / margin) ** (1.0 / (1.0 - alpha))
    scale = fm / (mass * math.sqrt(2.0 / math.pi))
    return RunConfig(
        alpha=alpha,
        chi=1.0,
        frame="physical",
        grid=GridConfig(n=4096, half_width=10.0),
        initial=InitialConfig(family="gaussian", mass=mass, scale=scale),
        control=ControlConfig(dt_min=1e-7, dt_max=1e-4),
        horizon=0.5,
        observation_interval=1e-4,
        keep_snapshots=False,
        # a fixed grid can only show sup-norm growth ~ scale/dx before
        # saturating, so the conservative default threshold is lowered here
        detector=DetectorConfig(growth_factor=5.0),
        blowup_check=BlowupCheckConfig(enabled=True),
    )


def _preset_fig2_alpha1_large_mass() -> RunConfig:
    return RunConfig(
        alpha=1.0,
        chi=1.0,
        frame="physical",
        grid=GridConfig(n=2048, half_width=20.0),
        initial=InitialConfig(family="gaussian", mass=4.0 * _critical_threshold(), scale=1.0),
        control=ControlConfig(dt_max=1e-3),
        horizon=5.0,
        observation_interval=0.002,
        keep_snapshots=True,
    )


PRESETS = {
    "subcritical-alpha1": _preset_subcritical_alpha1,
    "supercritical-alpha05": _preset_supercritical_alpha05,
    "pure-diffusion-rescaled": _preset_pure_diffusion_rescaled,
    "fig1-rescaled-subcritical": _preset_fig1_rescaled,
    "fig2-alpha1-large-mass": _preset_fig2_alpha1_large_mass,
}


def preset(name: str, output_dir: str | None = None) -> RunConfig:
    """Materialize a named preset into a concrete, self-contained config."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    cfg = PRESETS[name]()
    if output_dir is not None:
        cfg = replace(cfg, output_dir=output_dir)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# running

_TF_CACHE: dict = {}


def _test_function_cached(alpha: float, beta: float):
    key = (float(alpha), float(beta))
    if key not in _TF_CACHE:
        _TF_CACHE[key] = build_test_function(alpha, beta)
    return _TF_CACHE[key]


@dataclass
class RunResult:
    config: RunConfig
    trajectory: Trajectory
    reports: list
    out_dir: str | None


def _auto_safety(config: RunConfig, grid) -> float:
    vmax = config.chi * 0.6 * config.initial.mass
    if config.frame == "rescaled":
        vmax += grid.half_width
    return suggest_safety(grid, config.alpha, vmax)


def run(config: RunConfig) -> RunResult:
    """Execute one configured run and write its artifact directory (if
    ``output_dir`` is set).  Deterministic: identical configs give
    byte-identical artifacts."""
    config.validate()
    grid = make_grid(config.grid.n, config.grid.half_width)
    rho0 = synthesize_initial(
        config.initial.family,
        config.initial.mass,
        config.initial.scale,
        config.initial.center,
        grid,
        boundary_tol=config.initial.boundary_tol,
    )
    safety = config.control.safety
    if safety is None:
        safety = _auto_safety(config, grid)
    control = StepControl(
        safety=safety,
        dt_min=config.control.dt_min,
        dt_max=config.control.dt_max,
        max_steps=config.control.max_steps,
    )
    detector = None
    if config.detector.enabled:
        detector = BlowupDetector(
            growth_factor=config.detector.growth_factor,
            tail_threshold=config.detector.tail_threshold,
        )

    reports = []
    tf = lam = None
    if config.alpha <= 1.0:
        est = default_gns_estimate(1.0 / config.alpha, config.alpha)
        reports.append(check_global_smallness(rho0, config.alpha, est.C_hat))
    if config.blowup_check.enabled:
        beta = config.blowup_check.beta
        if beta is None:
            beta = 1.0 - config.alpha / 2.0
        tf = _test_function_cached(config.alpha, beta)
        crit = make_blowup_criterion(tf, config.initial.mass)
        lam = crit.lam
        reports.append(check_blowup_criterion(rho0, config.alpha, crit))

    state = SimState(config.frame, 0.0, rho0, config.alpha, config.chi)
    mass0 = state.mass
    traj = advance(
        state,
        config.horizon,
        control,
        observation_interval=config.observation_interval,
        detector=detector,
        test_function=tf,
        lam=lam,
        keep_snapshots=config.keep_snapshots,
        dealias=config.dealias,
    )

    out_dir = config.output_dir
    if out_dir is not None:
        _write_artifacts(config, traj, reports, mass0, out_dir)
    return RunResult(config=config, trajectory=traj, reports=reports, out_dir=out_dir)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _write_criteria_csv(reports, path) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(CRITERIA_COLUMNS) + "\n")
        for rep in reports:
            row = rep.as_row()
            fh.write(
                ",".join(_fmt(row.get(col, "")) for col in CRITERIA_COLUMNS) + "\n"
            )


def _write_artifacts(config, traj, reports, mass0, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    save_run_config(config, os.path.join(out_dir, "config.yaml"))
    write_diagnostics_csv(traj.rows, os.path.join(out_dir, "diagnostics.csv"))
    _write_criteria_csv(reports, os.path.join(out_dir, "criteria.csv"))
    if traj.snapshots is not None:
        snap_dir = os.path.join(out_dir, "snapshots")
        os.makedirs(snap_dir, exist_ok=True)
        for row, f in zip(traj.rows, traj.snapshots):
            write_field_csv(f, os.path.join(snap_dir, f"t_{row.time:.17g}.csv"))
    final = traj.final_state
    mass_final = final.mass
    summary = {
        "schema_version": SCHEMA_VERSION,
        "config_hash": config_hash(config),
        "outcome": traj.outcome,
        "n_steps": traj.n_steps,
        "final_time": final.time,
        "frame": config.frame,
        "alpha": config.alpha,
        "chi": config.chi,
        "mass_initial": mass0,
        "mass_final": mass_final,
        "mass_drift_rel": abs(mass_final - mass0) / abs(mass0) if mass0 else 0.0,
        "l2_final": traj.rows[-1].l2,
        "linf_final": traj.rows[-1].l_inf,
        "min_value": traj.min_value,
        "max_boundary_ratio": traj.max_boundary_ratio,
        "negativity_flagged": traj.negativity_flagged,
    }
    with open(os.path.join(out_dir, "summary"), "w") as fh:
        for k, v in summary.items():
            fh.write(f"{k}={_fmt(v)}\n")


def read_summary(out_dir) -> dict:
    path = os.path.join(out_dir, "summary")
    out = {}
    with open(path) as fh:
        for line in fh:
            k, _, v = line.strip().partition("=")
            out[k] = v
    return out


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepConfig:
    base: RunConfig
    alphas: tuple = (1.0,)
    masses: tuple = (1.0,)
    scales: tuple = (1.0,)
    parallelism: int = 1

    def __post_init__(self):
        if not self.alphas or not self.masses or not self.scales:
            raise ConfigError("sweep axes must be nonempty")
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")

    @staticmethod
    def from_dict(d: dict) -> "SweepConfig":
        d = dict(d)
        base = RunConfig.from_dict(d.pop("base", {}))
        axes = d.pop("axes", {})
        return SweepConfig(
            base=base,
            alphas=tuple(axes.get("alphas", (base.alpha,))),
            masses=tuple(axes.get("masses", (base.initial.mass,))),
            scales=tuple(axes.get("scales", (base.initial.scale,))),
            parallelism=int(d.pop("parallelism", 1)),
        )


def load_sweep_config(path) -> SweepConfig:
    with open(path) as fh:
        d = yaml.safe_load(fh)
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected a mapping")
    return SweepConfig.from_dict(d)


@dataclass(frozen=True)
class PhasePoint:
    """One sweep cell: configuration coordinates, criteria flags, and outcome."""

    alpha: float
    mass: float
    scale: float
    first_moment: float
    thm11_satisfied: bool
    thm12_satisfied: bool
    outcome: str
    time_of_detection: float

    def csv_row(self) -> str:
        return ",".join(
            [
                f"{self.alpha:.17g}",
                f"{self.mass:.17g}",
                f"{self.scale:.17g}",
                f"{self.first_moment:.17g}",
                str(int(self.thm11_satisfied)),
                str(int(self.thm12_satisfied)),
                self.outcome,
                f"{self.time_of_detection:.17g}",
            ]
        )


PHASE_COLUMNS = (
    "alpha,mass,scale,first_moment,thm11_satisfied,thm12_satisfied,outcome,time_of_detection"
)


def _cell_config(sweep_cfg: SweepConfig, alpha: float, mass: float, scale: float) -> RunConfig:
    base = sweep_cfg.base
    cell_dir = None
    if base.output_dir is not None:
        cell_dir = os.path.join(
            base.output_dir, f"cell_a{alpha:g}_m{mass:g}_s{scale:g}"
        )
    return replace(
        base,
        alpha=alpha,
        initial=replace(base.initial, mass=mass, scale=scale),
        blowup_check=replace(base.blowup_check, enabled=bool(alpha < 1.0)),
        output_dir=cell_dir,
    )


def _run_cell(cfg: RunConfig) -> PhasePoint:
    result = run(cfg)
    fm = result.trajectory.rows[0].first_moment
    thm11 = thm12 = False
    for rep in result.reports:
        if rep.name == "global_smallness":
            thm11 = rep.satisfied
        elif rep.name == "blowup_concentration":
            thm12 = rep.satisfied
    return PhasePoint(
        alpha=cfg.alpha,
        mass=cfg.initial.mass,
        scale=cfg.initial.scale,
        first_moment=fm,
        thm11_satisfied=thm11,
        thm12_satisfied=thm12,
        outcome=result.trajectory.outcome,
        time_of_detection=result.trajectory.final_state.time,
    )


def _phase_point_from_artifacts(cfg: RunConfig) -> PhasePoint:
    summary = read_summary(cfg.output_dir)
    rows = analysis.read_diagnostics_csv(os.path.join(cfg.output_dir, "diagnostics.csv"))
    thm11 = thm12 = False
    crit_path = os.path.join(cfg.output_dir, "criteria.csv")
    if os.path.exists(crit_path):
        with open(crit_path) as fh:
            header = fh.readline().strip().split(",")
            for line in fh:
                row = dict(zip(header, line.strip().split(",")))
                if row.get("criterion") == "global_smallness":
                    thm11 = row.get("satisfied") == "1"
                elif row.get("criterion") == "blowup_concentration":
                    thm12 = row.get("satisfied") == "1"
    return PhasePoint(
        alpha=cfg.alpha,
        mass=cfg.initial.mass,
        scale=cfg.initial.scale,
        first_moment=rows[0].first_moment,
        thm11_satisfied=thm11,
        thm12_satisfied=thm12,
        outcome=summary["outcome"],
        time_of_detection=float(summary["final_time"]),
    )


def _safe_run_cell(cfg: RunConfig) -> PhasePoint:
    try:
        return _run_cell(cfg)
    except Exception:
        return PhasePoint(
            alpha=cfg.alpha,
            mass=cfg.initial.mass,
            scale=cfg.initial.scale,
            first_moment=math.nan,
            thm11_satisfied=False,
            thm12_satisfied=False,
            outcome="failed",
            time_of_detection=math.nan,
        )


def sweep(sweep_cfg: SweepConfig) -> list[PhasePoint]:
    """Run every (alpha, mass, scale) cell, reusing completed cells (a cell
    whose summary exists is never re-run or altered), and write phase.csv.
    Cell failures are recorded as outcome 'failed' and the sweep continues."""
    cells = [
        _cell_config(sweep_cfg, a, m, s)
        for a in sweep_cfg.alphas
        for m in sweep_cfg.masses
        for s in sweep_cfg.scales
    ]
    points: list[PhasePoint | None] = [None] * len(cells)
    pending: list[tuple[int, RunConfig]] = []
    for i, cfg in enumerate(cells):
        if cfg.output_dir is not None and os.path.exists(
            os.path.join(cfg.output_dir, "summary")
        ):
            points[i] = _phase_point_from_artifacts(cfg)
        else:
            pending.append((i, cfg))

    if sweep_cfg.parallelism > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=sweep_cfg.parallelism) as pool:
            for (i, _), pt in zip(pending, pool.map(_safe_run_cell, [c for _, c in pending])):
                points[i] = pt
    else:
        for i, cfg in pending:
            points[i] = _safe_run_cell(cfg)

    if sweep_cfg.base.output_dir is not None:
        os.makedirs(sweep_cfg.base.output_dir, exist_ok=True)
        with open(os.path.join(sweep_cfg.base.output_dir, "phase.csv"), "w") as fh:
            fh.write(PHASE_COLUMNS + "\n")
            for pt in points:
                fh.write(pt.csv_row() + "\n")
    return points
