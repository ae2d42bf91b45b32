"""Pencil eigensolver, operator-spectrum composition and the mixed block system.

The symmetric-definite pencil ``K x = nu M x`` is reduced by Cholesky to a
standard symmetric problem, solved by cyclic Jacobi (small) or Householder
tridiagonalization with implicit QL, and the eigenvalues are finally refined
as Rayleigh quotients. All routines work in the dtype of their inputs, so the
whole path can run in ``np.longdouble``.

Mixed-operator eigenvalues follow from ``lambda = sum_m a_m nu^m``; the block
system of the mixed formulation is built explicitly only to verify this.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assembly import Pencil
from .operators import OperatorSpec

JACOBI_MAX_DOF = 64


class NotPositiveDefinite(np.linalg.LinAlgError):
    """Cholesky factorization met a non-positive pivot."""

    def __init__(self, pivot: int, value):
        super().__init__(f"matrix is not positive definite: pivot {pivot} is {value!r}")
        self.pivot = pivot
        self.value = value


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending generalized eigenvalues, optionally with M-orthonormal eigenvectors (columns)."""

    values: np.ndarray
    vectors: np.ndarray | None = None

    @property
    def dof(self):
        return self.values.size


@dataclass(frozen=True, eq=False)
class MixedBlockSystem:
    """``lhs x = (lambda - shift) rhs x`` with ``x = (U, Psi^1, ..., Psi^{n-1})``."""

    lhs: np.ndarray
    rhs: np.ndarray
    n: int
    op: OperatorSpec
    symmetrized_shift: float = 0.0


@dataclass(frozen=True, eq=False)
class MixedEigenpair:
    lam: float
    U: np.ndarray
    Psi: list = field(default_factory=list)

    def stacked(self):
        return np.concatenate([self.U, *self.Psi])


# -- dense linear algebra ---------------------------------------------------


def cholesky(M):
    """Lower-triangular ``L`` with ``M = L L^T``."""
    M = np.array(M)
    n = M.shape[0]
    L = np.zeros_like(M)
    for j in range(n):
        d = M[j, j] - L[j, :j] @ L[j, :j]
        if not d > 0:
            raise NotPositiveDefinite(j, d)
        L[j, j] = np.sqrt(d)
        L[j + 1 :, j] = (M[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def solve_lower(L, b):
    x = np.array(b, dtype=np.result_type(L, b))
    for i in range(L.shape[0]):
        x[i] = (x[i] - L[i, :i] @ x[:i]) / L[i, i]
    return x


def solve_upper(U, b):
    x = np.array(b, dtype=np.result_type(U, b))
    n = U.shape[0]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - U[i, i + 1 :] @ x[i + 1 :]) / U[i, i]
    return x


def cholesky_solve(L, b):
    return solve_upper(L.T, solve_lower(L, b))


def jacobi_eigh(S, tol=1e-14, max_sweeps=None):
    """Cyclic Jacobi eigensolver for a symmetric matrix; returns ``(w, Q)``."""
    A = np.array(S)
    n = A.shape[0]
    Q = np.eye(n, dtype=A.dtype)
    if max_sweeps is None:
        max_sweeps = 30 * max(n, 1)
    eps = np.finfo(A.dtype).eps
    tol = max(tol, float(eps))
    scale = np.sqrt(np.sum(A * A))
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum((A - np.diag(np.diag(A))) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0 or abs(apq) < eps * eps * scale:
                    continue
                theta = (A[q, q] - A[p, p]) / (2 * apq)
                t = np.copysign(1, theta) / (abs(theta) + np.sqrt(theta * theta + 1))
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                ap, aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap, aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                A[p, q] = A[q, p] = 0
                qp, qq = Q[:, p].copy(), Q[:, q].copy()
                Q[:, p] = c * qp - s * qq
                Q[:, q] = s * qp + c * qq
    else:
        raise ConvergenceError("Jacobi iteration did not converge")
    return np.diag(A).copy(), Q


def householder_tridiagonalize(S):
    """Return ``(d, e, Q)`` with ``Q^T S Q`` tridiagonal (diagonal ``d``, offdiagonal ``e``)."""
    A = np.array(S)
    n = A.shape[0]
    Q = np.eye(n, dtype=A.dtype)
    for k in range(n - 2):
        x = A[k + 1 :, k]
        alpha = np.sqrt(x @ x)
        if alpha == 0:
            continue
        if x[0] > 0:
            alpha = -alpha
        v = x.copy()
        v[0] -= alpha
        vnorm2 = v @ v
        if vnorm2 == 0:
            continue
        v = v / np.sqrt(vnorm2)
        sub = A[k + 1 :, k:]
        sub -= 2 * np.outer(v, v @ sub)
        sub = A[k:, k + 1 :]
        sub -= 2 * np.outer(sub @ v, v)
        Q[:, k + 1 :] -= 2 * np.outer(Q[:, k + 1 :] @ v, v)
    d = np.diag(A).copy()
    e = np.diag(A, -1).copy()
    return d, e, Q


def tql_implicit(d, e, Z, max_iter=30):
    """Implicit-shift QL on a symmetric tridiagonal matrix, accumulating into ``Z``."""
    d = np.array(d)
    n = d.size
    e = np.concatenate([np.array(e), np.zeros(1, dtype=d.dtype)])
    Z = np.array(Z)
    eps = np.finfo(d.dtype).eps
    for l in range(n):
        for it in range(max_iter * n + 1):
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter * n:
                raise ConvergenceError("QL iteration did not converge")
            g = (d[l + 1] - d[l]) / (2 * e[l])
            r = np.hypot(g, d.dtype.type(1))
            g = d[m] - d[l] + e[l] / (g + np.copysign(r, g))
            s = c = d.dtype.type(1)
            p = d.dtype.type(0)
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0:
                    d[i + 1] -= p
                    e[m] = 0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi1 = Z[:, i + 1].copy()
                Z[:, i + 1] = s * Z[:, i] + c * zi1
                Z[:, i] = c * Z[:, i] - s * zi1
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0
    return d, Z


def symmetric_eig(S):
    """Eigenvalues and orthonormal eigenvectors of symmetric ``S``, ascending."""
    S = 0.5 * (S + S.T)
    if S.shape[0] <= JACOBI_MAX_DOF:
        w, Q = jacobi_eigh(S)
    else:
        d, e, Q = householder_tridiagonalize(S)
        w, Q = tql_implicit(d, e, Q)
    order = np.argsort(w, kind="stable")
    return w[order], Q[:, order]


def generalized_sym_eig(K, M, vectors: bool = True, refine: bool = True) -> Spectrum:
    """Solve ``K x = nu M x`` for symmetric ``K`` and SPD ``M``.

    With ``refine`` each eigenvalue is replaced by its Rayleigh quotient
    ``x^T K x / x^T M x``, which is accurate relative to the eigenvalue itself
    rather than to the largest one.
    """
    K = np.asarray(K)
    M = np.asarray(M)
    L = cholesky(M)
    n = K.shape[0]
    S = solve_lower(L, solve_lower(L, K).T)
    w, Q = symmetric_eig(S)
    V = solve_upper(L.T, Q)
    if refine and n:
        w = np.einsum("ij,ij->j", V, K @ V) / np.einsum("ij,ij->j", V, M @ V)
        order = np.argsort(w, kind="stable")
        w, V = w[order], V[:, order]
    if vectors:
        V = V / np.sqrt(np.einsum("ij,ij->j", V, M @ V))
        return Spectrum(w, V)
    return Spectrum(w, None)


def solve_pencil(pencil: Pencil, vectors: bool = True) -> Spectrum:
    return generalized_sym_eig(pencil.K, pencil.M, vectors=vectors)


# -- composition ------------------------------------------------------------


def compose_operator_spectrum(nu, op: OperatorSpec):
    """Operator eigenvalues ``sum_m a_m nu_i^m``, ascending (ties by ascending nu)."""
    nu = np.asarray(getattr(nu, "values", nu))
    lam = op.evaluate(nu)
    order = np.lexsort((nu, lam))
    return lam[order]


def tensor_spectrum(nu_1d, dim: int, count: int | None = None):
    """Smallest ``count`` sums ``nu_j + nu_l (+ nu_q)`` with their 1-based multi-indices."""
    nu = np.asarray(getattr(nu_1d, "values", nu_1d))
    n = nu.size
    if dim not in (1, 2, 3):
        raise ValueError("dim must be 1, 2 or 3")
    total = n**dim
    if count is None:
        count = total
    if count > total:
        raise ValueError(f"count={count} exceeds the {total} available eigenvalues")
    m = min(n, count)
    grids = np.meshgrid(*([np.arange(m)] * dim), indexing="ij")
    idx = np.stack([g.ravel() for g in grids], axis=1)
    sums = nu[idx].sum(axis=1)
    order = np.lexsort(tuple(idx[:, k] for k in range(dim - 1, -1, -1)) + (sums,))[:count]
    return [(tuple(int(i) + 1 for i in idx[o]), sums[o]) for o in order]


# -- mixed block system -----------------------------------------------------


def build_mixed_block(op: OperatorSpec, pencil: Pencil, symmetrize: bool = False) -> MixedBlockSystem:
    """Block matrices of the mixed eigenproblem for ``op``.

    Unsymmetrized: rows ``K Psi^{m-1} - M Psi^m = 0`` followed by
    ``sum_{m<n-1} a_m M Psi^m + (a_{n-1} M + a_n K) Psi^{n-1} = lambda M U``.
    Symmetrized (``n = 2``): ``lhs = [[K, -M], [-M, a_2 K + a_1 M]]`` with
    block eigenvalue ``lambda - shift`` and ``shift = a_0 + 1``.
    """
    n = op.n
    K, M = pencil.K, pencil.M
    d = K.shape[0]
    a = op.coefficients
    zero = np.zeros_like(K)
    if symmetrize:
        if n != 2:
            raise ValueError("symmetrized block systems exist for n = 2 only")
        # -M U replaces a_0 M U in the last row; (a_0 + 1) M U moves to the right
        lhs = np.block([[K, -M], [-M, a[1] * M + a[2] * K]])
        rhs = np.block([[zero, zero], [M, zero]])
        return MixedBlockSystem(lhs, rhs, n, op, float(a[0]) + 1.0)
    rows = []
    for m in range(1, n):
        row = [zero] * n
        row[m - 1] = K
        row[m] = -M
        rows.append(row)
    last = [a[m] * M for m in range(n)]
    last[n - 1] = a[n - 1] * M + a[n] * K
    rows.append(last)
    lhs = np.block(rows) if n > 1 else last[0]
    rhs = np.zeros((n * d, n * d), dtype=K.dtype)
    rhs[(n - 1) * d :, :d] = M
    return MixedBlockSystem(lhs, rhs, n, op, 0.0)


def reconstruct_mixed_vector(U, pencil: Pencil, n: int):
    """Auxiliary fields ``Psi^m`` solving ``M Psi^m = K Psi^{m-1}``, ``Psi^0 = U``."""
    L = cholesky(pencil.M)
    psi = [np.asarray(U)]
    for _ in range(1, n):
        psi.append(cholesky_solve(L, pencil.K @ psi[-1]))
    return psi[1:]


def mixed_eigenpair(nu: float, v, pencil: Pencil, op: OperatorSpec) -> MixedEigenpair:
    return MixedEigenpair(float(op.evaluate(nu)), np.asarray(v), reconstruct_mixed_vector(v, pencil, op.n))


def block_residual(system: MixedBlockSystem, pair: MixedEigenpair, lam=None) -> float:
    """``||lhs x - (lambda - shift) rhs x|| / ||x||`` for the stacked vector ``x``."""
    x = pair.stacked()
    if x.shape[0] != system.lhs.shape[0]:
        raise ValueError(f"vector of length {x.shape[0]} does not match system of size {system.lhs.shape[0]}")
    norm = np.sqrt(x @ x)
    if norm == 0:
        raise ValueError("zero vector has no eigen-residual")
    lam = pair.lam if lam is None else lam
    r = system.lhs @ x - (lam - system.symmetrized_shift) * (system.rhs @ x)
    return float(np.sqrt(r @ r) / norm)
