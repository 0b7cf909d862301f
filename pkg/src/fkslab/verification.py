"""Named check suites (operators, inequalities, oracles) shared by the CLI
``verify`` subcommand and the acceptance tests: each check returns its
measured margin against the stated tolerance."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import cauchy_density
from .inequalities import (
    estimate_gns_constant,
    random_smooth_positive_field,
    verify_ipp,
)
from .integrate import SimState, StepControl, advance
from .operators import (
    drift,
    frac_laplacian_spectral,
    quadrature_calibration_error,
    spectral_derivative,
)
from .spectral import Field, make_grid, synthesize_initial

__all__ = ["CheckResult", "SUITES", "run_suite"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: measured {self.measured:.3e} vs tolerance {self.tolerance:.3e}"


def _check(name, measured, tolerance) -> CheckResult:
    return CheckResult(name, bool(measured <= tolerance), float(measured), float(tolerance))


def operators_suite() -> list[CheckResult]:
    out = []
    g = make_grid(256, 8.0)
    worst = 0.0
    for alpha in (0.5, 1.0, 1.5, 2.0):
        for j in (2, 3, 5, 17, 32, 64, 127):
            k = g.wavenumbers[j]
            f = Field(g, np.cos(k * g.x))
            ref = abs(k) ** alpha * np.cos(k * g.x)
            err = np.abs(frac_laplacian_spectral(f, alpha).values - ref).max()
            worst = max(worst, err / np.abs(ref).max())
    out.append(_check("multiplier exactness on grid modes", worst, 1e-12))

    g = make_grid(2048, 20.0)
    worst = max(
        quadrature_calibration_error(g, alpha) for alpha in (0.3, 0.5, 0.8, 1.0, 1.5)
    )
    out.append(_check("spectral vs singular-integral cross-validation", worst, 1e-3))

    rng = np.random.default_rng(7)
    gsm = make_grid(512, 20.0)
    worst = 0.0
    for _ in range(5):
        f = random_smooth_positive_field(gsm, rng)
        quad = gsm.dx * float((f.values * frac_laplacian_spectral(f, 0.7).values).sum())
        worst = min(worst, quad)
    out.append(_check("positive semi-definiteness", -min(worst, 0.0), 1e-14))

    f = synthesize_initial("gaussian", 1.0, 1.0, 0.0, gsm)
    shifted = Field(gsm, np.roll(f.values, 37))
    a = np.roll(frac_laplacian_spectral(f, 0.8).values, 37)
    b = frac_laplacian_spectral(shifted, 0.8).values
    out.append(
        _check("translation equivariance", np.abs(a - b).max() / np.abs(a).max(), 1e-12)
    )

    rho = synthesize_initial("two_bump", 2.0, 1.0, 0.0, gsm)
    ident = spectral_derivative(drift(rho)).values + (rho.values - rho.values.mean())
    out.append(
        _check("drift derivative identity", np.abs(ident).max() / np.abs(rho.values).max(), 1e-12)
    )
    return out


def inequalities_suite(trials: int = 100) -> list[CheckResult]:
    out = []
    rng = np.random.default_rng(0)
    g = make_grid(512, 20.0)
    worst_rel = 0.0
    p2_worst = 0.0
    violations = 0
    for _ in range(trials):
        f = random_smooth_positive_field(g, rng)
        for p in (2.0, 3.0, 4.0):
            for alpha in (0.5, 1.0, 1.5):
                lhs, _, margin = verify_ipp(f, p, alpha)
                rel = margin / abs(lhs)
                if p == 2.0:
                    p2_worst = max(p2_worst, abs(rel))
                elif rel < -1e-10:
                    violations += 1
                    worst_rel = min(worst_rel, rel)
    out.append(_check(f"integration-by-parts suite ({trials} fields), violations", violations, 0))
    out.append(_check("integration-by-parts p=2 identity", p2_worst, 1e-12))

    e0 = estimate_gns_constant(2.0, 1.0, seed=0, budget=1500)
    e1 = estimate_gns_constant(2.0, 1.0, seed=1, budget=1500)
    out.append(
        _check(
            "interpolation constant seed stability",
            abs(e0.C_hat - e1.C_hat) / e0.C_hat,
            0.02,
        )
    )
    return out


def oracles_suite() -> list[CheckResult]:
    out = []
    # transform round trip and Parseval
    g = make_grid(1024, 25.0)
    rng = np.random.default_rng(3)
    f = random_smooth_positive_field(g, rng)
    from .spectral import inverse_transform, transform

    s = transform(f)
    rt = np.abs(inverse_transform(s).values - f.values).max() / np.abs(f.values).max()
    out.append(_check("transform round trip", rt, 1e-12))
    lhs = g.dx * (f.values**2).sum()
    rhs = (np.abs(s.coeffs) ** 2).sum() / (2.0 * g.half_width)
    out.append(_check("Parseval identity", abs(lhs - rhs) / lhs, 1e-12))

    # heat kernel at alpha = 2
    g2 = make_grid(2048, 30.0)
    rho0 = synthesize_initial("gaussian", 1.0, 1.0, 0.0, g2)
    st = SimState("physical", 0.0, rho0, 2.0, 0.0)
    traj = advance(st, 1.0, StepControl(dt_max=1e-3), observation_interval=0.5)
    ref = synthesize_initial("gaussian", 1.0, math.sqrt(3.0), 0.0, g2)
    err = g2.dx * np.abs(traj.final_state.field.values - ref.values).sum()
    out.append(_check("heat-kernel oracle (alpha=2)", err, 1e-4))

    # Poisson kernel at alpha = 1: the box must hold the fat tails, so it is
    # large; with chi = 0 the integrating factor is exact and one step suffices
    gb = make_grid(2**17, 6553.6)
    c0 = synthesize_initial("cauchy", 1.0, 1.0, 0.0, gb, boundary_tol=1e-2)
    st = SimState("physical", 0.0, c0, 1.0, 0.0)
    traj = advance(st, 1.0, StepControl(dt_max=1.0), observation_interval=1.0)
    ref = cauchy_density(gb, 1.0, 2.0)
    err = gb.dx * np.abs(traj.final_state.field.values - ref.values).sum()
    out.append(_check("Poisson-kernel oracle (alpha=1)", err, 1e-3))

    # exact mass conservation over many steps
    g3 = make_grid(512, 20.0)
    r0 = synthesize_initial("gaussian", 2.0, 1.0, 0.0, g3)
    st = SimState("physical", 0.0, r0, 1.0, 1.0)
    m0 = st.mass
    traj = advance(st, 0.2, StepControl(dt_max=1e-5), observation_interval=0.05)
    drift_rel = abs(traj.final_state.mass - m0) / m0
    out.append(_check(f"mass conservation over {traj.n_steps} steps", drift_rel, 1e-12))
    return out


SUITES = {
    "operators": operators_suite,
    "inequalities": inequalities_suite,
    "oracles": oracles_suite,
}


def run_suite(suite: str) -> list[CheckResult]:
    """Run one named suite or 'all'; returns every check result."""
    if suite == "all":
        results = []
        for fn in SUITES.values():
            results.extend(fn())
        return results
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {sorted(SUITES)} or 'all'")
    return SUITES[suite]()
