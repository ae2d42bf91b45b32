"""Discrete spaces on [0, 1]: maximum-continuity B-splines and C0 Lagrange elements.

Both live on uniform meshes of ``N`` elements. Two boundary treatments are
supported: homogeneous Dirichlet (first and last function removed) and
periodic (functions identified modulo the number of degrees of freedom).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

IGA = "iga"
FEM = "fem"
DIRICHLET = "dirichlet"
PERIODIC = "periodic"
KINDS = (IGA, FEM)
BOUNDARIES = (DIRICHLET, PERIODIC)


@dataclass(frozen=True)
class BasisSpec:
    """Basis family ``kind`` of order ``p`` on ``N`` uniform elements with boundary ``bc``."""

    kind: str
    p: int
    N: int
    bc: str = DIRICHLET

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.bc not in BOUNDARIES:
            raise ValueError(f"bc must be one of {BOUNDARIES}, got {self.bc!r}")
        if int(self.p) != self.p or self.p < 1:
            raise ValueError(f"p must be a positive integer, got {self.p!r}")
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N!r}")
        if self.kind == FEM and self.p > 4:
            raise ValueError("Lagrange elements are provided for p <= 4")

    @property
    def h(self):
        return 1.0 / self.N


@dataclass(frozen=True, eq=False)
class KnotVector:
    values: np.ndarray
    degree: int
    periodic: bool = False

    @property
    def n_elements(self):
        return self.values.size - 2 * self.degree - 1


@dataclass(frozen=True, eq=False)
class BasisEvaluation:
    """Values and first derivatives of the ``p + 1`` functions nonzero at a point.

    ``first_index`` is the index of the first of them among all spline
    functions of the knot vector (before any boundary condition is applied).
    """

    first_index: int
    values: np.ndarray
    derivatives: np.ndarray


def dof_count(spec: BasisSpec) -> int:
    if spec.kind == IGA:
        return spec.N + spec.p - 2 if spec.bc == DIRICHLET else spec.N
    return spec.N * spec.p - 1 if spec.bc == DIRICHLET else spec.N * spec.p


def uniform_knots(p: int, N: int, bc: str = DIRICHLET, dtype=np.float64) -> KnotVector:
    """Open (Dirichlet) or ghost-extended (periodic) uniform knot vector.

    The periodic vector has ``p`` ghost knots on each side with spacing
    ``1/N``; its ``N + p`` functions are identified modulo ``N``.
    """
    if int(p) != p or p < 1 or int(N) != N or N < 2:
        raise ValueError(f"need integer p >= 1 and N >= 2, got p={p!r}, N={N!r}")
    if bc not in BOUNDARIES:
        raise ValueError(f"bc must be one of {BOUNDARIES}, got {bc!r}")
    dtype = np.dtype(dtype).type
    inner = np.arange(N + 1, dtype=dtype) / N
    inner[-1] = 1
    if bc == DIRICHLET:
        values = np.concatenate([np.zeros(p, dtype), inner, np.ones(p, dtype)])
    else:
        values = np.arange(-p, N + p + 1, dtype=dtype) / N
    return KnotVector(values, p, bc == PERIODIC)


def find_element(knots: KnotVector, x) -> int:
    """Index of the element containing ``x``; ``x = 1`` belongs to the last one."""
    if not 0 <= x <= 1:
        raise ValueError(f"x must lie in [0, 1], got {x!r}")
    p = knots.degree
    n_el = knots.n_elements
    span = int(np.searchsorted(knots.values[p : p + n_el + 1], x, side="right")) - 1
    return min(max(span, 0), n_el - 1)


def eval_bspline_element(knots: KnotVector, element: int, x):
    """Cox-de Boor evaluation on one element, vectorized over points ``x``.

    Returns ``(values, derivatives)`` of shape ``(len(x), p + 1)``; column ``k``
    is the function with index ``element + k``. Points at the element ends
    take the one-sided limit from inside ``element``.
    """
    t = knots.values
    p = knots.degree
    span = element + p
    x = np.atleast_1d(np.asarray(x, dtype=t.dtype))
    left = np.empty((x.size, p + 1), dtype=t.dtype)
    right = np.empty_like(left)
    vals = np.zeros((x.size, p + 1), dtype=t.dtype)
    vals[:, 0] = 1
    for j in range(1, p + 1):
        left[:, j] = x - t[span + 1 - j]
        right[:, j] = t[span + j] - x
        saved = np.zeros(x.size, dtype=t.dtype)
        if j == p:
            lower = vals[:, :p].copy()
        for r in range(j):
            denom = right[:, r + 1] + left[:, j - r]
            temp = np.divide(vals[:, r], denom, out=np.zeros_like(saved), where=denom != 0)
            vals[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        vals[:, j] = saved
    ders = np.zeros_like(vals)
    # derivative of degree-p functions from the degree p-1 ones
    for k in range(p + 1):
        if k > 0:
            d = t[span + k] - t[span + k - p]
            if d != 0:
                ders[:, k] += p * lower[:, k - 1] / d
        if k < p:
            d = t[span + k + 1] - t[span + k + 1 - p]
            if d != 0:
                ders[:, k] -= p * lower[:, k] / d
    return vals, ders


def eval_bspline(knots: KnotVector, x) -> BasisEvaluation:
    """Evaluate the ``p + 1`` B-splines that may be nonzero at ``x``."""
    e = find_element(knots, x)
    vals, ders = eval_bspline_element(knots, e, [x])
    first = e % knots.n_elements if knots.periodic else e
    return BasisEvaluation(first, vals[0], ders[0])


def eval_lagrange(p: int, xi):
    """Equispaced nodal Lagrange polynomials on [0, 1] and their d/dxi.

    Returns ``(values, derivatives)`` of shape ``(len(xi), p + 1)``.
    """
    if not 1 <= p <= 4:
        raise ValueError("Lagrange elements are provided for 1 <= p <= 4")
    xi = np.atleast_1d(np.asarray(xi))
    dtype = xi.dtype if xi.dtype.kind == "f" else np.float64
    xi = xi.astype(dtype)
    nodes = np.arange(p + 1, dtype=dtype) / p
    vals = np.ones((xi.size, p + 1), dtype=dtype)
    ders = np.zeros((xi.size, p + 1), dtype=dtype)
    for a in range(p + 1):
        others = [b for b in range(p + 1) if b != a]
        denom = np.prod([nodes[a] - nodes[b] for b in others])
        factors = [xi - nodes[b] for b in others]
        vals[:, a] = np.prod(factors, axis=0) / denom
        for skip in range(p):
            rest = [f for i, f in enumerate(factors) if i != skip]
            ders[:, a] += (np.prod(rest, axis=0) if rest else 1) / denom
    return vals, ders


def element_basis(spec: BasisSpec, element: int, xi, dtype=np.float64):
    """Global dof indices and basis values/x-derivatives at reference points ``xi`` in [-1, 1].

    Returns ``(index, values, derivatives)``: ``index`` has length ``p + 1``
    with -1 marking functions removed by the Dirichlet condition.
    """
    dtype = np.dtype(dtype).type
    p, N = spec.p, spec.N
    xi = np.asarray(xi, dtype=dtype)
    h = dtype(1) / N
    lo = dtype(element) / N
    local = np.arange(p + 1)
    if spec.kind == IGA:
        knots = uniform_knots(p, N, spec.bc, dtype)
        x = lo + (xi + 1) * h / 2
        vals, ders = eval_bspline_element(knots, element, x)
        full = element + local
        if spec.bc == DIRICHLET:
            index = np.where((full == 0) | (full == N + p - 1), -1, full - 1)
        else:
            index = full % N
    else:
        vals, ders = eval_lagrange(p, (xi + 1) / 2)
        ders = ders / h
        full = element * p + local
        if spec.bc == DIRICHLET:
            index = np.where((full == 0) | (full == N * p), -1, full - 1)
        else:
            index = full % (N * p)
    return index, vals, ders


def evaluate_function(spec: BasisSpec, coefficients, x, dtype=np.float64):
    """Evaluate the discrete function with dof vector ``coefficients`` at points ``x``."""
    dtype = np.dtype(dtype).type
    coefficients = np.asarray(coefficients, dtype=dtype)
    x = np.atleast_1d(np.asarray(x, dtype=dtype))
    out = np.zeros(x.size, dtype=dtype)
    elements = np.minimum((x * spec.N).astype(int), spec.N - 1)
    for e in np.unique(elements):
        mask = elements == e
        xi = 2 * (x[mask] * spec.N - e) - 1
        index, vals, _ = element_basis(spec, int(e), xi, dtype)
        c = np.where(index >= 0, coefficients[np.maximum(index, 0)], 0)
        out[mask] = vals @ c
    return out
