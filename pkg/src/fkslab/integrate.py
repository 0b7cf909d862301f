"""Time evolution by an integrating-factor Heun scheme with exact fractional
diffusion, CFL-adaptive steps, and early-stopping outcomes.

One step in spectral space, with ``E = exp(-|k|^alpha dt)`` (the rescaled
frame always uses the alpha = 1 multiplier) and N the non-diffusive part of
the right-hand side:

    predictor:  rho*_hat = E * (rho_hat + dt * N_hat(rho))
    corrector:  rho+_hat = E * rho_hat + (dt/2) * (E * N_hat(rho) + N_hat(rho*))

The zero mode is multiplied by E(0) = 1 and receives zero nonlinear
contribution (N is in divergence form), so discrete mass is conserved
bit-exactly; states carry their spectrum as the source of truth between
steps so no FFT round-trip ever touches it.

Positivity is not enforced: negative undershoots are recorded (min-value
diagnostic) and a run whose min falls below -1e-6 times its max is flagged
as resolution-degraded, because clipping would destroy conservation and
mask under-resolution near blow-up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from .spectral import Field, coeffs_to_values, values_to_coeffs
from .operators import check_alpha, nonlinear_rhs_hat, _drift_hat
from . import analysis

__all__ = [
    "FRAMES",
    "OUTCOMES",
    "ResolutionLossError",
    "SimState",
    "StepControl",
    "Trajectory",
    "cfl_dt",
    "suggest_safety",
    "step",
    "advance",
]

FRAMES = ("physical", "rescaled")
OUTCOMES = ("completed", "blowup_detected", "resolution_lost", "step_floor", "max_steps")

#: Undershoot fraction of the peak beyond which a run is flagged as degraded.
NEGATIVITY_FLAG = 1e-6


class ResolutionLossError(RuntimeError):
    """The state became non-finite during a step."""


class SimState:
    """Evolving density with its frame, time, and spectral source of truth.

    ``coeffs`` (the transform of the field) is authoritative; ``field`` is the
    materialized point values.  Mass is read off the zero mode.
    """

    __slots__ = ("frame", "time", "field", "alpha", "chi", "coeffs")

    def __init__(self, frame: str, time: float, field: Field, alpha: float, chi: float,
                 coeffs: np.ndarray | None = None):
        if frame not in FRAMES:
            raise ValueError(f"frame must be one of {FRAMES}, got {frame!r}")
        alpha = check_alpha(alpha)
        if frame == "rescaled" and alpha != 1.0:
            raise ValueError("the rescaled frame requires alpha = 1")
        if chi not in (0, 1, 0.0, 1.0):
            raise ValueError(f"chi must be 0 or 1, got {chi}")
        self.frame = frame
        self.time = float(time)
        self.field = field
        self.alpha = alpha
        self.chi = float(chi)
        if coeffs is None:
            coeffs = values_to_coeffs(field.grid, field.values)
        self.coeffs = coeffs

    @property
    def grid(self):
        return self.field.grid

    @property
    def mass(self) -> float:
        return float(self.coeffs[0].real)

    def _replace(self, time: float, coeffs: np.ndarray) -> "SimState":
        vals = coeffs_to_values(self.grid, coeffs)
        if not np.all(np.isfinite(vals)):
            raise ResolutionLossError(f"non-finite values after step at t={time:.6g}")
        return SimState(self.frame, time, Field(self.grid, vals), self.alpha, self.chi,
                        coeffs=coeffs)


@dataclass(frozen=True)
class StepControl:
    """CFL safety factor, step bounds, and the step budget."""

    safety: float = 0.4
    dt_min: float = 1e-9
    dt_max: float = 0.05
    max_steps: int = 10_000_000

    def __post_init__(self):
        if not (0.0 < self.safety <= 1.0):
            raise ValueError(f"safety must lie in (0, 1], got {self.safety}")
        if not (0.0 < self.dt_min <= self.dt_max):
            raise ValueError("need 0 < dt_min <= dt_max")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")


def _max_speed(state: SimState) -> float:
    """Largest advective speed: chi*|drift| in the physical frame, plus the
    |y| confining velocity in the rescaled frame."""
    grid = state.grid
    vel = np.zeros(grid.n)
    if state.chi != 0.0:
        vel = state.chi * coeffs_to_values(grid, _drift_hat(grid, state.coeffs))
    if state.frame == "rescaled":
        vel = vel - grid.x
    return float(np.abs(vel).max())


def cfl_dt(state: SimState, control: StepControl) -> float:
    """Advective CFL step ``safety * dx / max(speed, eps)`` clamped to
    [dt_min, dt_max]."""
    speed = max(_max_speed(state), 1e-12)
    return float(min(max(control.safety * state.grid.dx / speed, control.dt_min),
                     control.dt_max))


def suggest_safety(grid, alpha: float, vmax: float, margin: float = 0.7) -> float:
    """CFL safety factor keeping the explicit Heun transport stage stable.

    Heun amplifies a purely advective mode z = i*dt*k*v by |G|^2 = 1 + z^4/4,
    so the exact diffusion factor must win at the highest mode:
    (dt*kmax*v)^4 / 8 <= dt*kmax^alpha.  Solving for dt and converting to the
    CFL form dt = safety*dx/v gives the bound returned here (times `margin`),
    capped at the default 0.4.  Matters most in the rescaled frame, where the
    confining velocity is as large as the box half-width.
    """
    if vmax <= 0.0:
        return 0.4
    kmax = float(np.abs(grid.wavenumbers).max())
    dt_stab = (8.0 / (kmax ** (4.0 - alpha) * vmax**4)) ** (1.0 / 3.0)
    return float(min(0.4, margin * dt_stab * vmax / grid.dx))


def _diffusion_factor(state: SimState, dt: float) -> np.ndarray:
    grid = state.grid
    mult = np.abs(grid.wavenumbers) ** (state.alpha if state.frame == "physical" else 1.0)
    return np.exp(-mult * dt)


def step(state: SimState, dt: float, dealias: bool = False) -> SimState:
    """One integrating-factor Heun step of size dt (raises ResolutionLossError
    on non-finite values)."""
    if not (dt > 0.0):
        raise ValueError(f"dt must be positive, got {dt}")
    grid = state.grid
    E = _diffusion_factor(state, dt)
    n0 = nonlinear_rhs_hat(grid, state.coeffs, state.frame, state.chi, dealias)
    pred = E * (state.coeffs + dt * n0)
    n1 = nonlinear_rhs_hat(grid, pred, state.frame, state.chi, dealias)
    new = E * state.coeffs + (0.5 * dt) * (E * n0 + n1)
    return state._replace(state.time + dt, new)


@dataclass
class Trajectory:
    """Observed states and diagnostics of one run.

    ``rows`` holds one :class:`fkslab.analysis.DiagnosticsRow` per observation
    (times strictly increasing), ``snapshots`` the observed fields when
    snapshot retention is on, and ``outcome`` one of :data:`OUTCOMES`.
    """

    outcome: str = "completed"
    rows: list = dc_field(default_factory=list)
    snapshots: list | None = None
    n_steps: int = 0
    min_value: float = math.inf
    max_boundary_ratio: float = 0.0
    negativity_flagged: bool = False
    final_state: SimState | None = None

    @property
    def times(self) -> np.ndarray:
        return np.asarray([r.time for r in self.rows])

    def series(self, name: str) -> np.ndarray:
        return np.asarray([getattr(r, name) for r in self.rows])


def advance(
    state: SimState,
    horizon: float,
    control: StepControl,
    observation_interval: float | None = None,
    detector: "analysis.BlowupDetector | None" = None,
    test_function=None,
    lam: float | None = None,
    keep_snapshots: bool = False,
    observers: Sequence[Callable[[SimState], None]] = (),
    dealias: bool = False,
) -> Trajectory:
    """Evolve to ``horizon``, observing at fixed intervals, stopping early when
    the blow-up detector fires, the CFL step falls under ``dt_min``
    (``step_floor``), the state degenerates (``resolution_lost``), or the step
    budget runs out (``max_steps`` — an explicit outcome, never silent
    truncation).

    Observation times are hit exactly (the step is shortened to land on
    them); every observation appends a diagnostics row computed with the
    optional test function and lambda, calls each observer, and feeds the
    detector.
    """
    if horizon < state.time:
        raise ValueError("horizon precedes current state time")
    if observation_interval is None:
        observation_interval = max((horizon - state.time) / 50.0, 1e-12)
    if observation_interval <= 0.0:
        raise ValueError("observation_interval must be positive")

    traj = Trajectory(snapshots=[] if keep_snapshots else None)

    def observe(s: SimState) -> str | None:
        row = analysis.diagnostics_row(s, test_function=test_function, lam=lam)
        traj.rows.append(row)
        if keep_snapshots:
            traj.snapshots.append(s.field)
        v = s.field.values
        traj.min_value = min(traj.min_value, float(v.min()))
        peak = float(np.abs(v).max())
        if peak > 0.0:
            traj.max_boundary_ratio = max(
                traj.max_boundary_ratio, max(abs(v[0]), abs(v[-1])) / peak
            )
            if v.min() < -NEGATIVITY_FLAG * peak:
                traj.negativity_flagged = True
        for obs in observers:
            obs(s)
        if detector is not None:
            return detector.evaluate(traj.rows)
        return None

    fired = observe(state)
    if fired is not None:
        traj.outcome = fired
        traj.final_state = state
        return traj

    next_obs = state.time + observation_interval
    eps = 1e-12 * max(1.0, abs(horizon))
    while state.time < horizon - eps:
        if traj.n_steps >= control.max_steps:
            traj.outcome = "max_steps"
            break
        raw = control.safety * state.grid.dx / max(_max_speed(state), 1e-12)
        if raw < control.dt_min:
            traj.outcome = "step_floor"
            break
        dt = min(raw, control.dt_max, next_obs - state.time, horizon - state.time)
        try:
            state = step(state, dt, dealias=dealias)
        except ResolutionLossError:
            traj.outcome = "resolution_lost"
            break
        traj.n_steps += 1
        if state.time >= next_obs - eps or state.time >= horizon - eps:
            fired = observe(state)
            next_obs = state.time + observation_interval
            if fired is not None:
                traj.outcome = fired
                break
    traj.final_state = state
    return traj
