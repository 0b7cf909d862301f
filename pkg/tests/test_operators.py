"""Fractional Laplacian routes, drift, and right-hand sides."""

import math

import numpy as np
import pytest

from fkslab.inequalities import random_smooth_positive_field
from fkslab.operators import (
    QuadratureScheme,
    default_quadrature_scheme,
    drift,
    frac_laplacian_quadrature,
    frac_laplacian_spectral,
    quadrature_calibration_error,
    rhs_physical,
    rhs_rescaled,
    spectral_derivative,
    symmetric_kernel_constant,
)
from fkslab.spectral import Field, make_grid, mass, synthesize_initial
from fkslab.analysis import cauchy_density


def test_kernel_constant_alpha1_closed_form():
    # at alpha = 1 the symmetric-difference normalizer is 1/(2 pi)
    assert np.isclose(symmetric_kernel_constant(1.0), 1.0 / (2 * math.pi), rtol=1e-14)


def test_spectral_annihilates_constants():
    g = make_grid(64, 8.0)
    out = frac_laplacian_spectral(Field(g, np.full(g.n, 4.2)), 0.7)
    assert np.abs(out.values).max() < 1e-13


def test_spectral_eigenmodes():
    g = make_grid(256, 8.0)
    for alpha in (0.5, 1.0, 1.5, 2.0):
        for j in (2, 5, 17, 64, 127):
            k = g.wavenumbers[j]
            f = Field(g, np.cos(k * g.x))
            ref = abs(k) ** alpha * np.cos(k * g.x)
            err = np.abs(frac_laplacian_spectral(f, alpha).values - ref).max()
            assert err <= 1e-12 * np.abs(ref).max()


def test_spectral_rejects_bad_alpha():
    g = make_grid(64, 8.0)
    f = synthesize_initial("gaussian", 1.0, 1.0, 0.0, g)
    for alpha in (0.0, -1.0, 2.5):
        with pytest.raises(ValueError):
            frac_laplacian_spectral(f, alpha)


def test_quadrature_constant_field_zero():
    g = make_grid(256, 8.0)
    out = frac_laplacian_quadrature(Field(g, np.full(g.n, 1.3)), 0.5)
    assert np.abs(out.values).max() < 1e-12


def test_quadrature_rejects_alpha_two():
    g = make_grid(64, 8.0)
    f = synthesize_initial("gaussian", 1.0, 1.0, 0.0, g)
    with pytest.raises(ValueError):
        frac_laplacian_quadrature(f, 2.0)


def test_quadrature_scheme_validation():
    with pytest.raises(ValueError):
        QuadratureScheme(h_min=-1.0, h_max=1.0, c_alpha=0.1)
    with pytest.raises(ValueError):
        QuadratureScheme(h_min=1.0, h_max=0.5, c_alpha=0.1)
    g = make_grid(64, 8.0)
    f = synthesize_initial("gaussian", 1.0, 1.0, 0.0, g)
    over = QuadratureScheme(h_min=g.dx / 8, h_max=100.0, c_alpha=0.1)
    with pytest.raises(ValueError):
        frac_laplacian_quadrature(f, 0.5, over)  # beyond one period double-counts


def test_cross_validation_unit_gaussian():
    # the c_alpha normalization is validated against the multiplier, never assumed
    g = make_grid(2048, 20.0)
    for alpha in (0.3, 0.5, 0.8, 1.0, 1.5):
        assert quadrature_calibration_error(g, alpha) <= 1e-3


def test_quadrature_pointwise_at_origin():
    g = make_grid(2048, 20.0)
    f = synthesize_initial("gaussian", 1.0, 1.0, 0.0, g)
    spec = frac_laplacian_spectral(f, 1.0).values[g.n // 2]
    quad = frac_laplacian_quadrature(f, 1.0).values[g.n // 2]
    assert abs(spec - quad) <= 1e-3 * abs(spec)


def test_operator_positive_semidefinite(rng):
    g = make_grid(256, 10.0)
    for alpha in (0.5, 1.0, 1.7):
        for _ in range(5):
            f = Field(g, rng.standard_normal(g.n))
            quad = g.dx * float((f.values * frac_laplacian_spectral(f, alpha).values).sum())
            assert quad >= -1e-12 * np.abs(f.values).max() ** 2


def test_operator_shift_equivariance():
    g = make_grid(512, 20.0)
    f = synthesize_initial("two_bump", 1.0, 1.0, 0.0, g)
    for alpha in (0.6, 1.4):
        a = np.roll(frac_laplacian_spectral(f, alpha).values, 41)
        b = frac_laplacian_spectral(Field(g, np.roll(f.values, 41)), alpha).values
        assert np.abs(a - b).max() <= 1e-12 * np.abs(a).max()


def test_drift_even_density_gives_odd_drift():
    g = make_grid(512, 20.0)
    rho = synthesize_initial("two_bump", 2.0, 1.0, 0.0, g)
    u = drift(rho).values
    mirrored = -np.roll(u[::-1], 1)
    assert np.abs(u - mirrored).max() <= 1e-10 * max(np.abs(u).max(), 1e-300)
    assert abs(u[g.n // 2]) < 1e-12


def test_drift_derivative_identity(rng):
    # band-limited random field (Nyquist-free): D(drift(rho)) = -(rho - mean)
    g = make_grid(256, 10.0)
    c = np.zeros(g.n, dtype=complex)
    modes = rng.standard_normal(20) + 1j * rng.standard_normal(20)
    c[1:21] = modes
    c[-20:] = np.conj(modes[::-1])
    from fkslab.spectral import coeffs_to_values

    rho = Field(g, 1.0 + coeffs_to_values(g, c))
    ident = spectral_derivative(drift(rho)).values + (rho.values - rho.values.mean())
    assert np.abs(ident).max() <= 1e-12 * np.abs(rho.values).max()


def test_drift_indicator_periodic_closed_form():
    # periodic solve differs from the whole-line sgn convolution by the
    # neutralizing-background tilt x*M/(2L); the exact periodic solution of
    # -c'' = rho - mean(rho) for the indicator is the oracle here.
    g = make_grid(16384, 20.0)
    rho = synthesize_initial("indicator", 2.0, 1.0, 0.0, g)
    u = drift(rho).values
    background = 2.0 / (2 * g.half_width)
    oracle = np.where(
        np.abs(g.x) < 1.0, -(1.0 - background) * g.x, -np.sign(g.x) + background * g.x
    )
    interior = np.abs(np.abs(g.x) - 1.0) > 0.1  # away from the jumps
    # sampled-jump data carries O(dx) aliasing, so the tolerance is far above
    # the smooth-field accuracy (see test_drift_smooth_convolution_oracle)
    assert np.abs(u - oracle)[interior].max() < 5e-4
    assert abs(np.abs(u).max() - (1.0 - background)) < 1e-3


def test_drift_smooth_convolution_oracle():
    # direct quadrature of the periodic Green kernel G'(z) = -sgn(z)/2 + z/(2L);
    # the rectangle rule across the kernel's sign kink limits the oracle to
    # O(dx^2) accuracy
    g = make_grid(2048, 20.0)
    rho = synthesize_initial("two_bump", 1.5, 0.8, 0.0, g)
    z = g.x[:, None] - g.x[None, :]
    zw = (z + g.half_width) % (2 * g.half_width) - g.half_width
    kern = -0.5 * np.sign(zw) + zw / (2 * g.half_width)
    oracle = g.dx * kern @ rho.values
    oracle -= oracle.mean()
    u = drift(rho).values
    assert np.abs(u - oracle).max() < 5e-5


def test_rhs_physical_zero_and_eigenmode():
    g = make_grid(256, 8.0)
    zero = Field(g, np.zeros(g.n))
    assert np.abs(rhs_physical(zero, 1.0, 1.0).values).max() == 0.0
    k = g.wavenumbers[9]
    f = Field(g, np.cos(k * g.x) + 2.0)
    out = rhs_physical(f, 0.7, 0.0)
    ref = -abs(k) ** 0.7 * np.cos(k * g.x)
    assert np.abs(out.values - ref).max() <= 1e-12 * np.abs(ref).max()


def test_rhs_mass_is_zero(rng):
    g = make_grid(256, 10.0)
    f = random_smooth_positive_field(g, rng)
    for chi in (0.0, 1.0):
        out = rhs_physical(f, 0.8, chi)
        assert abs(mass(out)) <= 1e-14 * mass(f)
    u = random_smooth_positive_field(g, rng)
    out = rhs_rescaled(u, 1.0, 1.0)
    assert abs(mass(out)) <= 1e-14 * mass(u)


def test_rhs_rescaled_requires_alpha_one():
    g = make_grid(64, 8.0)
    u = synthesize_initial("gaussian", 1.0, 1.0, 0.0, g)
    with pytest.raises(ValueError):
        rhs_rescaled(u, 0.5, 0.0)


def test_rhs_rescaled_zero():
    g = make_grid(64, 8.0)
    assert np.abs(rhs_rescaled(Field(g, np.zeros(g.n)), 1.0, 0.0).values).max() == 0.0


@pytest.mark.xfail(
    strict=True,
    reason="the confining product y*u of the plain Cauchy jumps by 2L*u(L) ~ 1.6e-2*M "
    "at the periodic seam and its spectral derivative rings at ~1e-1*M in L1; the "
    "stationarity of the profile is covered by test_rescaled_stationary_state instead",
)
def test_rhs_rescaled_residual_at_plain_cauchy_literal():
    g = make_grid(2048, 40.0)
    u = cauchy_density(g, 1.0, 1.0)
    res = rhs_rescaled(u, 1.0, 0.0)
    assert g.dx * np.abs(res.values).sum() <= 1e-3


def test_rescaled_generator_eigenvalue_ladder():
    # the discrete generator -Lambda + D(y .) should reproduce the continuum
    # spectrum {0, -1, -2, ...} when the box comfortably holds the profile
    g = make_grid(512, 40.0)
    A = np.zeros((g.n, g.n))
    for j in range(g.n):
        e = np.zeros(g.n)
        e[j] = 1.0
        A[:, j] = rhs_rescaled(Field(g, e), 1.0, 0.0).values
    ev = np.sort_complex(np.linalg.eigvals(A))[::-1]
    top = sorted(ev.real, reverse=True)[:3]
    assert abs(top[0]) < 1e-8
    assert abs(top[1] + 1.0) < 0.1
    assert abs(top[2] + 2.0) < 0.15


def test_rescaled_stationary_state():
    # after a long pure-diffusion rescaled run the right-hand side residual
    # vanishes: the run has found the discrete stationary profile
    from fkslab.integrate import SimState, StepControl, advance, suggest_safety

    g = make_grid(1024, 40.0)
    u0 = synthesize_initial("gaussian", 1.0, 1.0, 0.0, g)
    safety = suggest_safety(g, 1.0, g.half_width)
    traj = advance(
        SimState("rescaled", 0.0, u0, 1.0, 0.0),
        10.0,
        StepControl(safety=safety, dt_max=5e-3),
        observation_interval=5.0,
    )
    res = rhs_rescaled(traj.final_state.field, 1.0, 0.0)
    assert g.dx * np.abs(res.values).sum() <= 1e-4


def test_dealias_flag_runs():
    g = make_grid(256, 10.0)
    rho = synthesize_initial("gaussian", 1.0, 1.0, 0.0, g)
    a = rhs_physical(rho, 1.0, 1.0, dealias=False).values
    b = rhs_physical(rho, 1.0, 1.0, dealias=True).values
    # smooth well-resolved fields: dealiasing changes next to nothing
    assert np.abs(a - b).max() < 1e-10 * np.abs(a).max() + 1e-13


def test_default_scheme_fields():
    g = make_grid(256, 10.0)
    sch = default_quadrature_scheme(g, 0.5)
    assert sch.h_min == g.dx / 8
    assert sch.h_max == 2 * g.half_width
    assert sch.c_alpha > 0
