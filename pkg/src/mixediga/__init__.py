"""Mixed isogeometric (and C0 finite element) spectra of polynomials in the Laplacian.

Modules
-------
quadrature   Gauss, Gauss-Lobatto, Gauss-Radau and blended rules
basis        maximum-continuity B-splines and Lagrange elements on [0, 1]
assembly     1D stiffness/mass pencils, Toeplitz stencils, Kronecker products
eigen        pencil eigensolver, operator composition, mixed block systems
operators    operator presets and exact spectra
dispersion   symbol ratio, error expansion and optimal blending search
harness      study runner and command-line interface
"""
__version__ = "0.1.0"

from .assembly import Pencil, QuadraturePair, Stencil, assemble_1d, assemble_kron, interior_stencil
from .basis import BasisSpec, uniform_knots
from .dispersion import error_expansion, find_optimal_tau, symbol_ratio
from .eigen import Spectrum, compose_operator_spectrum, generalized_sym_eig, solve_pencil, tensor_spectrum
from .operators import OperatorSpec, exact_eigenvalues, preset
from .quadrature import QuadratureRule, blend_rules, gauss_legendre, gauss_lobatto, gauss_radau, optimal_blend
