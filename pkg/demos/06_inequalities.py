#!/usr/bin/env python3
"""The inequality laboratory: interpolation constants and the fractional
integration-by-parts bound.

The interpolation ratio int rho^{p+1} / (seminorm^2 * critical norm) is
maximized over bump mixtures by simplex search; the corpus maximum is a
lower bound on the optimal constant.  The integration-by-parts inequality

    int rho^{p-1} Lambda^alpha rho >= (4(p-1)/p^2) ||rho^{p/2}||^2

is a strict identity at p = 2 (Parseval) and is property-tested on random
smooth positive densities elsewhere.
"""

import numpy as np

from fkslab import (
    estimate_gns_constant,
    gns_supercritical_check,
    make_grid,
    random_smooth_positive_field,
    synthesize_initial,
    verify_ipp,
)

print("p  alpha   C_hat       extremal mixture")
for p, alpha in ((1.0, 1.0), (2.0, 1.0), (2.0, 0.5)):
    est = estimate_gns_constant(p, alpha)
    kinds = "+".join(est.argmax_params["kinds"])
    print(f"{p:g}  {alpha:g}     {est.C_hat:.6f}    {kinds}")

rng = np.random.default_rng(1)
g = make_grid(512, 20.0)
print("\nintegration by parts on one random smooth positive field:")
print("p  alpha   lhs          rhs          margin/lhs")
f = random_smooth_positive_field(g, rng)
for p in (2.0, 3.0, 4.0):
    for alpha in (0.5, 1.0, 1.5):
        lhs, rhs, margin = verify_ipp(f, p, alpha)
        print(f"{p:g}  {alpha:g}     {lhs:.4e}   {rhs:.4e}   {margin / lhs:+.2e}")

rho = synthesize_initial("gaussian", 1.0, 1.0, 0.0, make_grid(1024, 30.0))
lhs, rhs_shape, ratio = gns_supercritical_check(rho, 2.0, 1.5)
print(f"\nsupercritical-range shape check (p=2, alpha=1.5): "
      f"fitted constant for the Gaussian = {ratio:.4f}")
