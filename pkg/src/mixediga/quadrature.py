"""Quadrature rules on the reference interval [-1, 1].

Gauss-Legendre, Gauss-Lobatto and Gauss-Radau rules are computed by Newton
iteration on Legendre polynomials, in whatever floating point type is
requested (``np.float64`` or ``np.longdouble``). Blended rules are affine
combinations of two rules and may carry negative weights.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

MAX_POINTS = 32

GAUSS_GAUSS = "gauss-gauss"
GAUSS_LOBATTO = "gauss-lobatto"
FAMILIES = (GAUSS_GAUSS, GAUSS_LOBATTO)

# Optimal blending parameters for maximum-continuity B-splines, p = 1..4.
OPTIMAL_TAU = {
    GAUSS_GAUSS: {1: Fraction(2), 2: Fraction(2), 3: Fraction(13, 3), 4: Fraction(22)},
    GAUSS_LOBATTO: {
        1: Fraction(1, 2),
        2: Fraction(1, 3),
        3: Fraction(-3, 2),
        4: Fraction(-79, 5),
    },
}

_MERGE_TOL = 1e-12


class NoTabulatedParameter(KeyError):
    """Raised when no optimal blending parameter is tabulated for ``p``."""


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and weights on [-1, 1].

    ``exactness_degree`` is the highest polynomial degree integrated exactly,
    or -1 when unknown.
    """

    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int
    name: str = ""

    def __post_init__(self):
        nodes = np.array(self.nodes)
        weights = np.array(self.weights, dtype=nodes.dtype)
        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size == 0:
            raise ValueError("nodes and weights must be nonempty 1D arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("quadrature nodes must be strictly increasing")
        if abs(float(weights.sum()) - 2.0) > 1e-14 * max(1.0, float(np.abs(weights).sum())):
            raise ValueError("quadrature weights must sum to 2")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.size

    @property
    def dtype(self):
        return self.nodes.dtype

    def astype(self, dtype) -> "QuadratureRule":
        return QuadratureRule(
            self.nodes.astype(dtype), self.weights.astype(dtype), self.exactness_degree, self.name
        )

    def __repr__(self):
        return f"QuadratureRule({self.name or 'custom'}, {len(self)} points, exact to {self.exactness_degree})"


def _check_points(l, lo):
    if not isinstance(l, (int, np.integer)) or not lo <= l <= MAX_POINTS:
        raise ValueError(f"number of points must be an integer in [{lo}, {MAX_POINTS}], got {l!r}")


def _legendre(n, x, deriv=True):
    """Return (P_n(x), P_n'(x)) by the three-term recurrence."""
    x = np.asarray(x)
    p0 = np.ones_like(x)
    if n == 0:
        return p0, np.zeros_like(x)
    p1 = x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    if not deriv:
        return p1, None
    # derivative from P_n and P_{n-1}; callers keep |x| < 1
    dp = n * (x * p1 - p0) / (x * x - 1)
    return p1, dp


def _scalar(dtype):
    return np.dtype(dtype).type


def _newton(f, x, dtype, tol):
    """Newton iteration x <- x - f/f' until |f| < tol or the step stalls."""
    eps = np.finfo(dtype).eps
    for _ in range(100):
        val, der = f(x)
        step = val / der
        x = x - step
        if np.all(np.abs(val) < tol) or np.all(np.abs(step) <= 4 * eps):
            break
    return x


def _tol(dtype):
    return min(1e-15, 16 * float(np.finfo(dtype).eps))


def _symmetrize(x, w):
    """Enforce exact mirror symmetry of a rule symmetric about 0."""
    n = x.size
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    if n % 2:
        x[n // 2] = 0
    return x, w


def gauss_legendre(l: int, dtype=np.float64) -> QuadratureRule:
    """The ``l``-point Gauss-Legendre rule, exact to degree ``2l-1``."""
    dtype = _scalar(dtype)
    _check_points(l, 1)
    k = np.arange(1, l + 1, dtype=dtype)
    pi = np.arctan(np.ones((), dtype=dtype)) * 4
    x = -np.cos(pi * (k - dtype(0.25)) / (l + dtype(0.5)))
    x = _newton(lambda t: _legendre(l, t), x, dtype, _tol(dtype))
    _, dp = _legendre(l, x)
    w = 2 / ((1 - x * x) * dp * dp)
    x, w = _symmetrize(x, w)
    return QuadratureRule(x, w, 2 * l - 1, f"G{l}")


def gauss_lobatto(l: int, dtype=np.float64) -> QuadratureRule:
    """The ``l``-point Gauss-Lobatto rule (endpoints included), exact to degree ``2l-3``."""
    dtype = _scalar(dtype)
    _check_points(l, 2)
    n = l - 1
    pi = np.arctan(np.ones((), dtype=dtype)) * 4
    x = np.empty(l, dtype=dtype)
    x[0], x[-1] = -1, 1
    if l > 2:
        # interior nodes are the roots of P_n'; P_n'' from the Legendre ODE
        def f(t):
            p, dp = _legendre(n, t)
            return dp, (2 * t * dp - n * (n + 1) * p) / (1 - t * t)

        guess = -np.cos(pi * np.arange(1, n, dtype=dtype) / n)
        x[1:-1] = _newton(f, guess, dtype, _tol(dtype))
    p, _ = _legendre(n, x, deriv=False)
    w = 2 / (n * (n + 1) * p * p)
    x, w = _symmetrize(x, w)
    return QuadratureRule(x, w, 2 * l - 3, f"L{l}")


def gauss_radau(l: int, dtype=np.float64) -> QuadratureRule:
    """The ``l``-point left Gauss-Radau rule (node at -1), exact to degree ``2l-2``."""
    dtype = _scalar(dtype)
    _check_points(l, 1)
    pi = np.arctan(np.ones((), dtype=dtype)) * 4
    x = np.empty(l, dtype=dtype)
    x[0] = -1
    if l > 1:
        # free nodes are the roots of (P_{l-1} + P_l) / (1 + x)
        def f(t):
            pa, da = _legendre(l - 1, t)
            pb, db = _legendre(l, t)
            q, dq = pa + pb, da + db
            return q / (1 + t), (dq * (1 + t) - q) / (1 + t) ** 2

        guess = -np.cos(2 * pi * np.arange(1, l, dtype=dtype) / (2 * l - 1))
        x[1:] = _newton(f, guess, dtype, _tol(dtype))
    w = np.empty(l, dtype=dtype)
    w[0] = dtype(2) / (l * l)
    if l > 1:
        p, _ = _legendre(l - 1, x[1:], deriv=False)
        w[1:] = (1 - x[1:]) / (l * l * p * p)
    return QuadratureRule(x, w, 2 * l - 2, f"R{l}")


def blend_rules(a: QuadratureRule, b: QuadratureRule, tau) -> QuadratureRule:
    """Return the signed rule ``tau * a + (1 - tau) * b``.

    Nodes shared by both rules (to within 1e-12) are merged and their weights
    summed; nodes whose blended weight is exactly zero are dropped, so that
    ``tau = 1`` returns ``a`` itself.
    """
    dtype = _scalar(np.result_type(a.dtype, b.dtype))
    tau_f = _as_dtype(tau, dtype)
    nodes = np.concatenate([a.nodes.astype(dtype), b.nodes.astype(dtype)])
    weights = np.concatenate([tau_f * a.weights.astype(dtype), (1 - tau_f) * b.weights.astype(dtype)])
    order = np.argsort(nodes, kind="stable")
    nodes, weights = nodes[order], weights[order]
    merged_x, merged_w = [nodes[0]], [weights[0]]
    for x, w in zip(nodes[1:], weights[1:]):
        if abs(x - merged_x[-1]) <= _MERGE_TOL:
            merged_w[-1] += w
        else:
            merged_x.append(x)
            merged_w.append(w)
    merged_x = np.array(merged_x, dtype=dtype)
    merged_w = np.array(merged_w, dtype=dtype)
    keep = merged_w != 0
    if tau == 1:
        degree = a.exactness_degree
    elif tau == 0:
        degree = b.exactness_degree
    else:
        degree = min(a.exactness_degree, b.exactness_degree)
    name = f"{tau}*{a.name}+(1-{tau})*{b.name}"
    return QuadratureRule(merged_x[keep], merged_w[keep], degree, name)


def _as_dtype(value, dtype):
    if isinstance(value, Fraction):
        return dtype(value.numerator) / dtype(value.denominator)
    return dtype(value)


def blend_family(p: int, family: str, tau, dtype=np.float64) -> QuadratureRule:
    """Blend of ``G_{p+1}`` with ``G_p`` (gauss-gauss) or ``L_{p+1}`` (gauss-lobatto)."""
    if family == GAUSS_GAUSS:
        other = gauss_legendre(p, dtype)
    elif family == GAUSS_LOBATTO:
        other = gauss_lobatto(p + 1, dtype)
    else:
        raise ValueError(f"unknown blending family {family!r}; expected one of {FAMILIES}")
    return blend_rules(gauss_legendre(p + 1, dtype), other, tau)


def optimal_tau(p: int, family: str) -> Fraction:
    if family not in OPTIMAL_TAU:
        raise ValueError(f"unknown blending family {family!r}; expected one of {FAMILIES}")
    try:
        return OPTIMAL_TAU[family][p]
    except KeyError:
        raise NoTabulatedParameter(
            f"no tabulated optimal {family} parameter for p={p}; "
            "use dispersion.find_optimal_tau"
        ) from None


def optimal_blend(p: int, family: str = GAUSS_LOBATTO, dtype=np.float64) -> QuadratureRule:
    """The dispersion-optimal blended rule for order ``p`` B-splines (p <= 4)."""
    tau = optimal_tau(p, family)
    rule = blend_family(p, family, tau, dtype)
    return QuadratureRule(rule.nodes, rule.weights, rule.exactness_degree, f"O{p}[{family},{tau}]")


def integrate(rule: QuadratureRule, f: Callable, interval=(0.0, 1.0)) -> float:
    """Integrate ``f`` over ``interval`` with ``rule`` mapped affinely from [-1, 1]."""
    lo, hi = interval
    if not lo < hi:
        raise ValueError("interval must satisfy x_lo < x_hi")
    h = hi - lo
    x = lo + (rule.nodes + 1) * h / 2
    return np.sum(rule.weights * (h / 2) * np.asarray(f(x)) * np.ones_like(x))
