#!/usr/bin/env python3
"""
Finding the optimal blending parameter from the stencil symbol
==============================================================

The interior row of the assembled pencil is a Toeplitz stencil. Its symbol
R(L) = A(L) / B(L) approximates L^2, and the leading error term of a blended
rule is affine in the blending parameter tau. Killing that term raises the
eigenvalue error from order 2p to 2p + 2.
"""
import numpy as np

from mixediga.dispersion import blended_stencil, error_expansion, extrapolated_coefficient, find_optimal_tau
from mixediga.quadrature import FAMILIES, optimal_tau

# the symbol error of the p=1 Gauss stencil: L^2 + L^4 / 12 + ...
stencil = blended_stencil(1, "gauss-lobatto", 1)
fit = error_expansion(stencil, 4)
print(f"p=1 Gauss: exponent {fit.exponent:.4f}, coefficient {fit.coefficient:.10f} (1/12 = {1 / 12:.10f})")

# the L^(2p+2) coefficient is a straight line in tau
p = 2
for tau in (-1.0, 0.0, 1 / 3, 1.0):
    c = extrapolated_coefficient(blended_stencil(p, "gauss-lobatto", tau), 2 * p + 2)
    print(f"p={p} gauss-lobatto tau={tau:+.4f}: c = {c:+.3e}")

# root finding recovers the tabulated parameters
print()
print(f"{'family':>14} {'p':>2} {'searched':>22} {'tabulated':>10}")
for family in FAMILIES:
    for p in (1, 2, 3, 4):
        tau = find_optimal_tau(p, family)
        print(f"{family:>14} {p:>2} {tau:>22.15f} {str(optimal_tau(p, family)):>10}")

# with the optimal parameter the error exponent jumps by two
print()
for p in (1, 2, 3):
    for label, tau in (("gauss", 1), ("optimal", float(optimal_tau(p, "gauss-lobatto")))):
        q = error_expansion(blended_stencil(p, "gauss-lobatto", tau), 2 * p + 2).exponent
        print(f"p={p} {label:>7}: R - L^2 ~ L^{q:.2f}")
