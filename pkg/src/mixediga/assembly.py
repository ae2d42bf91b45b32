"""Assembly of the 1D stiffness/mass pencil and its interior Toeplitz stencil."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import DIRICHLET, IGA, BasisSpec, dof_count, element_basis
from .quadrature import QuadratureRule, gauss_legendre

MAX_KRON_DOF = 10_000


@dataclass(frozen=True, eq=False)
class QuadraturePair:
    """Rules used for the stiffness form and for the mass form."""

    stiffness: QuadratureRule
    mass: QuadratureRule

    @classmethod
    def same(cls, rule: QuadratureRule) -> "QuadraturePair":
        return cls(rule, rule)


@dataclass(frozen=True, eq=False)
class Pencil:
    """Stiffness ``K`` (units 1/length) and mass ``M`` (units length) of a 1D basis."""

    K: np.ndarray
    M: np.ndarray
    spec: BasisSpec
    qpair: QuadraturePair

    @property
    def h(self):
        return 1.0 / self.spec.N

    @property
    def dof(self):
        return self.K.shape[0]

    @property
    def dtype(self):
        return self.K.dtype


@dataclass(frozen=True, eq=False)
class Stencil:
    """Interior row of the pencil, scaled to be mesh independent.

    ``A[k] = h * K[j, j+k]`` and ``B[k] = M[j, j+k] / h`` for ``k = 0..p``.
    """

    p: int
    A: np.ndarray
    B: np.ndarray

    def full(self):
        """Symmetric stencils of length ``2p + 1`` (offsets -p..p)."""
        return (np.concatenate([self.A[:0:-1], self.A]), np.concatenate([self.B[:0:-1], self.B]))


def _symmetrize(a):
    upper = np.triu(a)
    return upper + np.triu(a, 1).T


def assemble_1d(spec: BasisSpec, qpair: QuadraturePair, dtype=None) -> Pencil:
    """Assemble ``K_ab = a_h(phi_a, phi_b)`` and ``M_ab = b_h(phi_a, phi_b)``.

    The stiffness and mass forms use ``qpair.stiffness`` and ``qpair.mass``
    respectively on every element. ``dtype`` defaults to the rules' type.
    """
    if dtype is None:
        dtype = np.result_type(qpair.stiffness.dtype, qpair.mass.dtype)
    dtype = np.dtype(dtype).type
    n = dof_count(spec)
    K = np.zeros((n, n), dtype=dtype)
    M = np.zeros((n, n), dtype=dtype)
    half_h = dtype(1) / (2 * spec.N)
    rules = (
        (K, qpair.stiffness, True),
        (M, qpair.mass, False),
    )
    for e in range(spec.N):
        for target, rule, use_derivative in rules:
            if len(rule) == 0:
                continue
            index, vals, ders = element_basis(spec, e, rule.nodes.astype(dtype), dtype)
            f = ders if use_derivative else vals
            w = rule.weights.astype(dtype) * half_h
            local = f.T @ (w[:, None] * f)
            keep = index >= 0
            idx = index[keep]
            np.add.at(target, (idx[:, None], idx[None, :]), local[np.ix_(keep, keep)])
    return Pencil(_symmetrize(K), _symmetrize(M), spec, qpair)


def interior_stencil(spec: BasisSpec, qpair: QuadraturePair, dtype=None) -> Stencil:
    """Scaled interior Toeplitz row of a maximum-continuity B-spline pencil.

    With open knots the Dirichlet rows ``2p-2 .. dof-2p+1`` are Toeplitz, so a
    Dirichlet pencil needs ``N >= 3p - 1`` (and ``N >= 2p + 2`` always); the
    middle row is used.
    """
    if spec.kind != IGA:
        raise ValueError("interior stencils are defined for the B-spline (iga) basis only")
    p = spec.p
    need = 2 * p + 2 if spec.bc != DIRICHLET else max(2 * p + 2, 3 * p - 1)
    if spec.N < need:
        raise ValueError(f"N={spec.N} too small for an interior row; need N >= {need}")
    pencil = assemble_1d(spec, qpair, dtype)
    j = pencil.dof // 2 if spec.bc == DIRICHLET else 0
    cols = (j + np.arange(p + 1)) % pencil.dof
    h = pencil.K.dtype.type(1) / spec.N
    return Stencil(p, pencil.K[j, cols] * h, pencil.M[j, cols] / h)


def stencil_for_rule(p: int, rule: QuadratureRule, dtype=None) -> Stencil:
    """Interior stencil with ``rule`` applied to both forms."""
    return interior_stencil(BasisSpec(IGA, p, 2 * p + 2, "periodic"), QuadraturePair.same(rule), dtype)


def assemble_kron(pencil: Pencil, dim: int):
    """Dense tensor-product pencil ``(K_d, M_d)`` on the unit square or cube."""
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    n = pencil.dof
    if n**dim > MAX_KRON_DOF:
        raise ValueError(f"{n}^{dim} unknowns exceed the Kronecker assembly cap {MAX_KRON_DOF}")
    K, M = pencil.K, pencil.M
    if dim == 2:
        return np.kron(K, M) + np.kron(M, K), np.kron(M, M)
    MM = np.kron(M, M)
    Kd = np.kron(K, MM) + np.kron(M, np.kron(K, M)) + np.kron(MM, K)
    return Kd, np.kron(M, MM)


def reference_pencil(spec: BasisSpec, points: int = 20, dtype=np.float64) -> Pencil:
    """Pencil integrated with a high-order Gauss rule (exact on affine elements)."""
    return assemble_1d(spec, QuadraturePair.same(gauss_legendre(points, dtype)), dtype)
