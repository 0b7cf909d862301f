"""Quantitative diagnostics: norm series, first and corrected moments, the
sublinear auxiliary test function and its nonlocal image bound, the
global-existence and blow-up criteria, blow-up detection, and self-similar
convergence residuals.

The auxiliary test function phi is even, increasing and sub-additive with
``phi(x) = |x|`` for ``|x| <= 1`` and ``phi(x) = |x|^{1-beta}`` for
``|x| >= 2``.  Blending the two closed forms directly (smoothstep on the
values) overshoots ``2^{1-beta}`` and loses monotonicity for beta beyond
about 0.47, so the blend is built in derivative space instead:

    phi'(x) = ((1-beta) x^{-beta})^{S(t)} * exp(a * B(t)),   t = x - 1,

with S a seventh-order smoothstep, B a quartic-power bump, and ``a < 0``
solved so that the derivative integrates to exactly ``2^{1-beta} - 1``
across the blend region.  This keeps ``0 < phi' <= 1``, hence monotonicity
and the sub-linearity ``phi(x) <= x`` hold by construction.

``omega = -Lambda^alpha phi`` is computed on a dedicated wide grid by
singular-integral quadrature over the real line with analytic power-law
tail contributions beyond the quadrature horizon; the fitted bound constant
is ``C_omega = max omega(x) / (1 + |x|^{1-beta})``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .operators import check_alpha, symmetric_kernel_constant
from .spectral import Field, Grid, GridMismatchError, lp_norm, make_grid, values_to_coeffs

__all__ = [
    "TestFunction",
    "BlowupCriterion",
    "BlowupDetector",
    "DiagnosticsRow",
    "CriterionReport",
    "DIAGNOSTICS_COLUMNS",
    "build_test_function",
    "corrected_moment",
    "choose_lambda",
    "make_blowup_criterion",
    "check_global_smallness",
    "check_blowup_criterion",
    "detect_blowup",
    "diagnostics_row",
    "selfsimilar_residual",
    "rescale_snapshot",
    "cauchy_density",
    "box_cauchy_limit",
    "first_moment",
    "write_diagnostics_csv",
    "read_diagnostics_csv",
]


# ---------------------------------------------------------------------------
# blend building blocks


def _smoothstep(t):
    """Seventh-order smoothstep: 0 -> 1 on [0, 1] with three vanishing
    derivatives at both ends."""
    t = np.clip(t, 0.0, 1.0)
    return t**4 * (35.0 - 84.0 * t + 70.0 * t**2 - 20.0 * t**3)


def _bump(t):
    """Quartic-power bump on [0, 1], peak 1 at t = 1/2, flat to third order
    at both ends."""
    t = np.clip(t, 0.0, 1.0)
    return 256.0 * (t * (1.0 - t)) ** 4


def _phi_prime_positive(z, beta: float, a: float):
    """phi'(z) for z >= 0 (the z = 0 kink is resolved as the x -> 0+ limit)."""
    z = np.asarray(z, dtype=float)
    t = z - 1.0
    zsafe = np.maximum(z, 1.0)
    mid = ((1.0 - beta) * zsafe ** (-beta)) ** _smoothstep(t) * np.exp(a * _bump(t))
    return np.where(z <= 1.0, 1.0, np.where(z >= 2.0, (1.0 - beta) * zsafe ** (-beta), mid))


def _gl_integral(fn, a: float, b: float, panels: int = 8, order: int = 16) -> float:
    xg, wg = leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        total += half * float(np.dot(wg, fn(mid + half * xg)))
    return total


def _solve_bump_coefficient(beta: float) -> float:
    """a such that int_1^2 phi'(z) dz = 2^{1-beta} - 1 (guaranteeing the
    closed-form value at z = 2)."""
    target = 2.0 ** (1.0 - beta) - 1.0

    def gap(a):
        return _gl_integral(lambda z: _phi_prime_positive(z, beta, a), 1.0, 2.0) - target

    a = brentq(gap, -200.0, 10.0, xtol=1e-14, rtol=1e-15)
    if a > 0.0:
        raise RuntimeError(
            f"bump coefficient {a} > 0 would break the phi' <= 1 guarantee (beta={beta})"
        )
    return a


# ---------------------------------------------------------------------------
# test function


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Lemma-style auxiliary function with its derivative, nonlocal image
    omega = -Lambda^alpha phi, and fitted constants.

    ``C_omega`` is the smallest constant with ``omega(x) <= C (1+|x|^{1-beta})``
    on the grid; ``C_R`` bounds ``|phi'(x) - sgn(x)| <= C_R phi(x)`` away from
    the linear core.  Construction is quadrature-heavy; instances are
    immutable and safe to cache and share.
    """

    alpha: float
    beta: float
    grid: Grid
    phi: np.ndarray
    phi_prime: np.ndarray
    omega: np.ndarray
    C_omega: float
    C_R: float
    bump_coefficient: float
    _blend: CubicSpline

    def phi_at(self, z):
        """phi evaluated at arbitrary points (closed forms outside the blend
        region, the precomputed blend interpolant inside)."""
        z = np.abs(np.asarray(z, dtype=float))
        out = np.where(z >= 2.0, np.maximum(z, 1.0) ** (1.0 - self.beta), z)
        blend = (z > 1.0) & (z < 2.0)
        if np.any(blend):
            out = np.where(blend, self._blend(np.clip(z, 1.0, 2.0)), out)
        return out

    def phi_prime_at(self, z):
        z = np.asarray(z, dtype=float)
        return np.sign(z) * _phi_prime_positive(np.abs(z), self.beta, self.bump_coefficient)


def _omega_panel_breaks(h0: float, box: float, horizon: float) -> np.ndarray:
    """Quadrature panels for the omega integral: geometric toward the h -> 0
    singularity, width-capped across the kink band, geometric far field."""
    pts = [h0]
    # region 1: h0 -> 0.5, strongly graded
    while pts[-1] < 0.5:
        pts.append(min(pts[-1] * 1.7, 0.5))
    # region 2: 0.5 -> 6, fixed width (phi kinks sweep through here for small x)
    while pts[-1] < 6.0:
        pts.append(min(pts[-1] + 0.25, 6.0))
    # region 3: 6 -> 3*box + 6, gentle growth (kinks at h = |x| +- 2 land here)
    lim = 3.0 * box + 6.0
    while pts[-1] < lim:
        pts.append(min(pts[-1] * 1.07, lim))
    # region 4: far field up to the analytic-tail horizon
    while pts[-1] < horizon:
        pts.append(min(pts[-1] * 1.5, horizon))
    return np.asarray(pts)


def build_test_function(alpha: float, beta: float, grid: Grid | None = None) -> TestFunction:
    """Construct the auxiliary test function for exponents ``alpha + beta > 1``.

    ``grid`` is a dedicated wide evaluation grid (default ``[-128, 128)`` with
    8192 nodes, spacing 1/32 so the junction points are nodes), independent of
    any simulation grid.
    """
    alpha = check_alpha(alpha)
    beta = float(beta)
    if not (0.0 < beta < 1.0):
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    if alpha + beta <= 1.0:
        raise ValueError(f"need alpha + beta > 1, got alpha={alpha}, beta={beta}")
    if grid is None:
        grid = make_grid(8192, 128.0)

    a = _solve_bump_coefficient(beta)

    # dense blend values on [1, 2] by cumulative quadrature of phi'
    z_fine = np.linspace(1.0, 2.0, 1025)
    xg, wg = leggauss(8)
    vals = np.empty_like(z_fine)
    vals[0] = 1.0
    for i in range(z_fine.size - 1):
        lo, hi = z_fine[i], z_fine[i + 1]
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        vals[i + 1] = vals[i] + half * float(
            np.dot(wg, _phi_prime_positive(mid + half * xg, beta, a))
        )
    blend = CubicSpline(
        z_fine,
        vals,
        bc_type=(
            (1, float(_phi_prime_positive(1.0, beta, a))),
            (1, float(_phi_prime_positive(2.0, beta, a))),
        ),
    )

    def phi_eval(z):
        z = np.abs(np.asarray(z, dtype=float))
        out = np.where(z >= 2.0, np.maximum(z, 1.0) ** (1.0 - beta), z)
        inside = (z > 1.0) & (z < 2.0)
        if np.any(inside):
            out = np.where(inside, blend(np.clip(z, 1.0, 2.0)), out)
        return out

    absx = np.abs(grid.x)
    phi = phi_eval(absx)
    phi_prime = np.sign(grid.x) * _phi_prime_positive(absx, beta, a)

    # omega = -Lambda^alpha phi by real-line singular quadrature + analytic tails
    c_alpha = symmetric_kernel_constant(alpha)
    h0 = 1e-8
    horizon = 200.0 * grid.half_width
    breaks = _omega_panel_breaks(h0, grid.half_width, horizon)
    glx, glw = leggauss(8)
    omega = np.zeros(grid.n)
    chunk = 1024
    for lo_i in range(0, grid.n, chunk):
        X = grid.x[lo_i : lo_i + chunk, None]
        acc = np.zeros(X.shape[0])
        for plo, phi_hi in zip(breaks[:-1], breaks[1:]):
            mid, half = 0.5 * (plo + phi_hi), 0.5 * (phi_hi - plo)
            S = mid + half * glx
            kern = glw * half * S ** (-1.0 - alpha)
            G = phi_eval(X + S) + phi_eval(X - S) - 2.0 * phi_eval(X)
            acc += G @ kern
        omega[lo_i : lo_i + chunk] = acc

    # analytic far tail: phi(x +- h) = (h +- x)^{1-beta} beyond the horizon
    H = horizon
    tail = (
        2.0 * H ** (1.0 - alpha - beta) / (alpha + beta - 1.0)
        - beta * (1.0 - beta) * grid.x**2 * H ** (-1.0 - alpha - beta) / (1.0 + alpha + beta)
        - 2.0 * phi * H ** (-alpha) / alpha
    )
    omega += tail
    # skipped inner region [0, h0): only the kink node x = 0 contributes
    near0 = absx <= h0
    omega[near0] += 2.0 * h0 ** (1.0 - alpha) / (1.0 - alpha) if alpha < 1.0 else 0.0
    omega *= 2.0 * c_alpha

    C_omega = float(np.max(omega / (1.0 + absx ** (1.0 - beta))))
    outer = absx > 1.0
    C_R = float(
        np.max(np.abs(phi_prime[outer] - np.sign(grid.x[outer])) / phi[outer])
    )
    return TestFunction(
        alpha=alpha,
        beta=beta,
        grid=grid,
        phi=phi,
        phi_prime=phi_prime,
        omega=omega,
        C_omega=C_omega,
        C_R=C_R,
        bump_coefficient=a,
        _blend=blend,
    )


# ---------------------------------------------------------------------------
# moments and criteria


def first_moment(rho: Field) -> float:
    """``dx * sum |x| rho``."""
    return float(rho.grid.dx * (np.abs(rho.grid.x) * rho.values).sum())


def corrected_moment(rho: Field, tf: TestFunction, lam: float) -> float:
    """``I_lambda = dx * sum phi(lam x)/lam * rho`` with the sublinear phi.

    Since ``phi(z) <= z``, ``I_lambda <= first_moment(rho)`` for nonnegative
    densities and every ``lam > 0``.
    """
    if not (lam > 0.0):
        raise ValueError(f"lambda must be positive, got {lam}")
    w = tf.phi_at(lam * rho.grid.x) / lam
    return float(rho.grid.dx * (w * rho.values).sum())


def choose_lambda(M: float, alpha: float, C: float) -> tuple[float, float]:
    """Balance the moment inequality: ``lam = (2C/M)^{1/(1-alpha)}``, ``mu = 2C``.

    Rejects ``alpha >= 1`` where the balancing exponent diverges and the
    criterion is void.
    """
    if not (M > 0.0):
        raise ValueError(f"mass must be positive, got {M}")
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"lambda balancing requires 0 < alpha < 1, got {alpha}")
    if not (C > 0.0):
        raise ValueError(f"balancing constant must be positive, got {C}")
    mu = 2.0 * C
    lam = (mu / M) ** (1.0 / (1.0 - alpha))
    return lam, mu


@dataclass(frozen=True)
class BlowupCriterion:
    """Assembled constants of the concentration criterion for a given mass.

    The constant chain (one consistent decomposition of the aggregated
    constants): ``C1 = C_omega (1 + 2^{1-beta})`` bounds the nonlocal term,
    the balancing constant is ``C = 4 C1`` (so ``mu = 2C``), the moment
    coefficient is ``C_I' = max(C1, C_R/2) (1 + 1/(2C))``, and

        K2_effective = (8 C_I')^{alpha-1} / (2 C),

    so that ``first_moment(rho0)^{1-alpha} <= K2_effective * M^{2-alpha}``
    forces the corrected moment to vanish in finite time.
    """

    alpha: float
    beta: float
    lam: float
    mu: float
    C: float
    K2_effective: float
    mass: float
    C_omega: float
    C_R: float
    C_I_prime: float

    def __post_init__(self):
        if not (self.alpha + self.beta > 1.0):
            raise ValueError("criterion requires alpha + beta > 1")
        if not (self.lam > 0.0):
            raise ValueError("lambda must be positive")

    def moment_coefficient(self) -> float:
        """A in dI/dt <= -M^2/8 + A*I along admissible runs."""
        return self.C_I_prime * self.lam * self.mass


def make_blowup_criterion(tf: TestFunction, M: float) -> BlowupCriterion:
    """Assemble the criterion constants from a test function's fitted bounds."""
    if not (0.0 < tf.alpha < 1.0):
        raise ValueError("the blow-up criterion requires 0 < alpha < 1")
    C1 = tf.C_omega * (1.0 + 2.0 ** (1.0 - tf.beta))
    C_bal = 4.0 * C1
    lam, mu = choose_lambda(M, tf.alpha, C_bal)
    C_I_prime = max(C1, tf.C_R / 2.0) * (1.0 + 1.0 / (2.0 * C_bal))
    K2 = (8.0 * C_I_prime) ** (tf.alpha - 1.0) / (2.0 * C_bal)
    return BlowupCriterion(
        alpha=tf.alpha,
        beta=tf.beta,
        lam=lam,
        mu=mu,
        C=C_bal,
        K2_effective=K2,
        mass=M,
        C_omega=tf.C_omega,
        C_R=tf.C_R,
        C_I_prime=C_I_prime,
    )


@dataclass(frozen=True)
class CriterionReport:
    """Evaluated hypothesis of one of the two theorems for a given datum."""

    name: str
    satisfied: bool
    margin: float
    details: dict

    def as_row(self) -> dict:
        row = {"criterion": self.name, "satisfied": int(self.satisfied), "margin": self.margin}
        row.update(self.details)
        return row


def check_global_smallness(rho0: Field, alpha: float, C_hat: float) -> CriterionReport:
    """Smallness test in the critical space: satisfied iff
    ``||rho0||_{1/alpha} < 4 alpha / C_hat``.

    ``C_hat`` is a fitted lower bound on the interpolation constant, so the
    reported threshold over-estimates the provable one; the margin is
    informative in both directions.
    """
    alpha = check_alpha(alpha, upper=1.0)
    if not (C_hat > 0.0):
        raise ValueError("C_hat must be positive")
    threshold = 4.0 * alpha / C_hat
    value = lp_norm(rho0, 1.0 / alpha)
    margin = threshold - value
    return CriterionReport(
        name="global_smallness",
        satisfied=margin > 0.0,
        margin=margin,
        details={
            "alpha": alpha,
            "threshold": threshold,
            "critical_norm": value,
            "C_hat": C_hat,
        },
    )


def check_blowup_criterion(rho0: Field, alpha: float, crit: BlowupCriterion) -> CriterionReport:
    """Concentration test: satisfied iff
    ``first_moment^{1-alpha} <= K2_effective * M^{2-alpha}``.

    Requires an even datum (the sign cancellation in the interaction term is
    what produces the forcing ``-M^2/4``); non-even inputs are rejected.
    The margin is the multiplicative slack ``K2 M^{2-alpha} / FM^{1-alpha} - 1``.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"blow-up criterion requires 0 < alpha < 1, got {alpha}")
    v = rho0.values
    mirrored = np.roll(v[::-1], 1)
    asym = float(np.abs(v - mirrored).max())
    if asym > 1e-10 * max(float(np.abs(v).max()), 1e-300):
        raise ValueError(
            f"blow-up criterion requires an even density about 0; asymmetry "
            f"{asym:.3e} exceeds 1e-10 of the peak"
        )
    M = float(rho0.grid.dx * v.sum())
    fm = first_moment(rho0)
    lhs = fm ** (1.0 - alpha)
    rhs = crit.K2_effective * M ** (2.0 - alpha)
    factor = rhs / lhs if lhs > 0 else math.inf
    return CriterionReport(
        name="blowup_concentration",
        satisfied=lhs <= rhs,
        margin=factor - 1.0,
        details={
            "alpha": alpha,
            "mass": M,
            "first_moment": fm,
            "K2_effective": crit.K2_effective,
            "lambda": crit.lam,
            "mu": crit.mu,
            "margin_factor": factor,
        },
    )


# ---------------------------------------------------------------------------
# diagnostics and detection

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


@dataclass(frozen=True)
class DiagnosticsRow:
    """One observation of the pinned diagnostics schema.

    ``i_lambda`` is NaN when no test function is configured; ``l_inv_alpha``
    is NaN for alpha > 1 (1/alpha < 1 is not a norm).
    """

    time: float
    mass: float
    l2: float
    l_inv_alpha: float
    l_inf: float
    first_moment: float
    i_lambda: float
    min_value: float
    tail_fraction: float


def _tail_fraction(f: Field) -> float:
    """Spectral energy carried by the top eighth of wavenumbers (|k| >= 7/8 kmax),
    relative to all nonzero modes."""
    c = values_to_coeffs(f.grid, f.values)
    k = np.abs(f.grid.wavenumbers)
    kmax = k.max()
    e = np.abs(c) ** 2
    den = e[k > 0.0].sum()
    if den <= 0.0:
        return 0.0
    return float(e[k >= 0.875 * kmax].sum() / den)


def diagnostics_row(state, test_function: TestFunction | None = None,
                    lam: float | None = None) -> DiagnosticsRow:
    """Evaluate the full diagnostics schema on a simulation state."""
    f = state.field
    i_lam = math.nan
    if test_function is not None and lam is not None:
        i_lam = corrected_moment(f, test_function, lam)
    l_inv = lp_norm(f, 1.0 / state.alpha) if state.alpha <= 1.0 else math.nan
    return DiagnosticsRow(
        time=state.time,
        mass=float(f.grid.dx * f.values.sum()),
        l2=lp_norm(f, 2.0),
        l_inv_alpha=l_inv,
        l_inf=lp_norm(f, math.inf),
        first_moment=first_moment(f),
        i_lambda=i_lam,
        min_value=float(f.values.min()),
        tail_fraction=_tail_fraction(f),
    )


@dataclass(frozen=True)
class BlowupDetector:
    """Numerical blow-up diagnosis (never a proof): blow-up is declared when
    the sup norm has grown by ``growth_factor`` *and* the spectral tail holds
    more than ``tail_threshold`` of the energy; a tail event without the
    growth event is resolution loss.

    The defaults are deliberately conservative; note that a fixed grid can
    only exhibit sup-norm growth of about ``scale * sqrt(2 pi) / dx`` before
    saturating, so concentration scenarios configure ``growth_factor``
    explicitly to stay under that bound.
    """

    growth_factor: float = 1e4
    tail_threshold: float = 0.1

    def evaluate(self, rows) -> str | None:
        if not rows:
            return None
        first, last = rows[0], rows[-1]
        tail = last.tail_fraction > self.tail_threshold
        growth = last.l_inf > self.growth_factor * first.l_inf
        if tail and growth:
            return "blowup_detected"
        if tail:
            return "resolution_lost"
        return None


def detect_blowup(rows, detector: BlowupDetector | None = None) -> str:
    """Post-hoc classification of a diagnostics series: 'blowup_detected',
    'resolution_lost', or 'not_detected'."""
    if not rows:
        raise ValueError("no diagnostics rows to classify")
    detector = detector or BlowupDetector()
    verdicts = [detector.evaluate(rows[: i + 1]) for i in range(len(rows))]
    for v in verdicts:
        if v == "blowup_detected":
            return "blowup_detected"
    for v in verdicts:
        if v == "resolution_lost":
            return "resolution_lost"
    return "not_detected"


def selfsimilar_residual(u1: Field, u2: Field) -> float:
    """L1 distance normalized by the mass of the first field."""
    if u1.grid != u2.grid:
        raise GridMismatchError("fields live on different grids")
    m = abs(float(u1.grid.dx * u1.values.sum()))
    if m == 0.0:
        raise ValueError("cannot normalize by zero mass")
    return float(u1.grid.dx * np.abs(u1.values - u2.values).sum() / m)


def cauchy_density(grid: Grid, M: float, scale: float = 1.0) -> Field:
    """The whole-line Cauchy density ``M*scale/(pi(scale^2+y^2))`` sampled on
    the grid (no box correction)."""
    return Field(grid, (M * scale / math.pi) / (scale**2 + grid.x**2))


def box_cauchy_limit(grid: Grid, M: float) -> Field:
    """The box-natural self-similar limit of pure alpha = 1 diffusion: the
    inverse transform of ``M exp(-|k|)``, i.e. the periodized Cauchy density.

    On the whole line the limit is the plain Cauchy density; on a periodic box
    the two differ by the tail mass ``(2/pi) arctan(1/L) ~ 2/(pi L)`` folded
    back in, which bounds from below any L1 comparison against the plain
    density.
    """
    from .spectral import coeffs_to_values

    return Field(grid, coeffs_to_values(grid, M * np.exp(-np.abs(grid.wavenumbers))))


def rescale_snapshot(rho: Field, t: float) -> Field:
    """Map a physical-frame snapshot at time t to self-similar variables,
    ``u(y) = (1+t) rho((1+t) y)``, by evaluating the band-limited interpolant
    of rho at the stretched points.

    Points stretched beyond the physical box (|y| > L/(1+t)) carry no data
    and are set to zero (the physical field is below its boundary tolerance
    there), so the snapshot keeps mass M instead of double-covering the box.
    """
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    grid = rho.grid
    s = 1.0 + t
    stretched = grid.x * s
    inside = np.abs(stretched) <= grid.half_width
    c = values_to_coeffs(grid, rho.values)
    phase = np.exp(1j * np.outer(stretched[inside], grid.wavenumbers))
    vals = np.zeros(grid.n)
    vals[inside] = (phase @ c).real / (2.0 * grid.half_width)
    return Field(grid, s * vals)


# ---------------------------------------------------------------------------
# CSV serialization of diagnostics


def write_diagnostics_csv(rows, path) -> None:
    """Write the pinned diagnostics schema at 17 significant digits."""
    with open(path, "w") as fh:
        fh.write(",".join(DIAGNOSTICS_COLUMNS) + "\n")
        for r in rows:
            fh.write(",".join(f"{getattr(r, c):.17g}" for c in DIAGNOSTICS_COLUMNS) + "\n")


def read_diagnostics_csv(path) -> list[DiagnosticsRow]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != DIAGNOSTICS_COLUMNS:
            raise ValueError(f"{path}: unexpected diagnostics header {header}")
        rows = []
        for line in fh:
            vals = [float(tok) for tok in line.strip().split(",")]
            rows.append(DiagnosticsRow(*vals))
    return rows
