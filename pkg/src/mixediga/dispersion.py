"""Dispersion analysis of interior stencils and the search for optimal blending.

For a Bloch wave ``U^j = exp(i j Lambda)`` with ``Lambda = omega h`` the
interior rows of the pencil reduce to the symbol ratio

    R(Lambda) = (A_0 + 2 sum_k A_k cos k Lambda) / (B_0 + 2 sum_k B_k cos k Lambda)

which approximates ``Lambda^2``. The order and leading coefficient of
``R - Lambda^2`` are extracted numerically from a geometric ladder of
``Lambda`` values.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import mpmath
import numpy as np

from .assembly import Stencil, stencil_for_rule
from .operators import OperatorSpec
from .quadrature import GAUSS_LOBATTO, blend_family

LADDER = (0.8, 0.4, 0.2, 0.1, 0.05)
CANCELLATION_FACTOR = 1e3
# dense ladder for the blend search, kept clear of the cancellation region
SEARCH_LADDER = tuple(float(v) for v in np.linspace(0.8, 0.2, 16))
SEARCH_DPS = 40


class SingularSymbol(ZeroDivisionError):
    pass


class BlendSearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExpansionFit:
    """Fitted ``R(Lambda) - Lambda^2 ~ coefficient * Lambda^exponent``.

    ``coefficient`` is the Richardson limit for the hinted exponent and
    ``exponent`` the least-squares log-log slope (with a ``Lambda^2``
    correction column when three or more points are usable);
    ``fit_residual`` is the RMS misfit of that fit.
    """

    exponent: float
    coefficient: float
    fit_residual: float
    ladder: tuple

    @property
    def valid(self):
        return self.fit_residual < 0.05 and len(self.ladder) >= 2


def _numerator(stencil: Stencil, lam):
    # A_0 = -2 sum_k A_k, so the numerator is summed as differences from 1
    k = np.arange(1, stencil.p + 1)
    s = np.sin(np.multiply.outer(lam, k) / 2)
    return -4 * (s * s) @ stencil.A[1:]


def _denominator(stencil: Stencil, lam):
    k = np.arange(1, stencil.p + 1)
    return stencil.B[0] + 2 * np.cos(np.multiply.outer(lam, k)) @ stencil.B[1:]


def symbol_ratio(stencil: Stencil, lam):
    """``R(Lambda)``, vectorized over ``Lambda`` and computed in the stencil's dtype."""
    lam = np.asarray(lam, dtype=stencil.A.dtype)
    den = _denominator(stencil, lam)
    if np.any(np.abs(den) < 1e-14):
        raise SingularSymbol("symbol denominator vanishes")
    return _numerator(stencil, lam) / den


def _richardson(values, ladder):
    """Extrapolate ``values(Lambda)`` to ``Lambda -> 0`` as a polynomial in ``Lambda^2``."""
    x = np.asarray(ladder, dtype=values.dtype) ** 2
    table = list(values)
    n = len(table)
    for level in range(1, n):
        table = [
            (x[i + level] * table[i] - x[i] * table[i + 1]) / (x[i + level] - x[i])
            for i in range(n - level)
        ]
    return table[0]


def _usable_ladder(stencil, ladder):
    lam = np.asarray(ladder, dtype=stencil.A.dtype)
    R = symbol_ratio(stencil, lam)
    diff = R - lam * lam
    eps = np.finfo(lam.dtype).eps
    ok = np.abs(diff) >= CANCELLATION_FACTOR * eps * np.abs(R)
    if not np.all(ok):
        # the floor is hit from below; keep the leading run of usable points
        stop = int(np.argmin(ok))
        warnings.warn(
            f"cancellation floor reached; ladder shortened to {tuple(ladder[:stop])}",
            RuntimeWarning,
            stacklevel=3,
        )
        return lam[:stop], diff[:stop]
    return lam, diff


def leading_coefficient(stencil: Stencil, exponent: int, ladder=LADDER):
    """Richardson estimate of the ``Lambda^exponent`` coefficient of ``R - Lambda^2``.

    Unlike the fit in :func:`error_expansion` this uses every ladder point,
    also where the coefficient being estimated is close to zero.
    """
    lam = np.asarray(ladder, dtype=stencil.A.dtype)
    g = (symbol_ratio(stencil, lam) - lam * lam) / lam**exponent
    return _richardson(g, lam)


def error_expansion(stencil: Stencil, expected_order: int | None = None, ladder=LADDER) -> ExpansionFit:
    """Fit the order and leading coefficient of ``R(Lambda) - Lambda^2``."""
    if expected_order is None:
        expected_order = 2 * stencil.p + 2
    lam, diff = _usable_ladder(stencil, ladder)
    if lam.size < 2:
        raise BlendSearchError("fewer than two ladder points above the cancellation floor")
    coeff = _richardson(diff / lam**expected_order, lam)
    x = np.log(lam.astype(float))
    y = np.log(np.abs(diff.astype(float)))
    # log|R - L^2| = q log L + log|C| + beta L^2 + ...; the L^2 column absorbs the next term
    columns = [x, np.ones_like(x)]
    if x.size >= 3:
        columns.append(lam.astype(float) ** 2)
    design = np.column_stack(columns)
    sol, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.sqrt(np.mean((y - design @ sol) ** 2)))
    return ExpansionFit(float(sol[0]), float(coeff), resid, tuple(float(v) for v in lam))


def blended_stencil(p: int, family: str, tau, dtype=np.longdouble) -> Stencil:
    return stencil_for_rule(p, blend_family(p, family, tau, dtype), dtype)


def _to_mpf(x):
    # two-term split keeps every bit of an extended-precision value
    hi = float(x)
    return mpmath.mpf(hi) + mpmath.mpf(float(np.longdouble(x) - np.longdouble(hi)))


def extrapolated_coefficient(stencil: Stencil, exponent: int, ladder=SEARCH_LADDER, dps: int = SEARCH_DPS):
    """``Lambda^exponent`` coefficient of ``R - Lambda^2`` by polynomial extrapolation.

    The symbol is evaluated with ``dps`` digits and interpolated by an even
    polynomial starting at ``Lambda^2``. Keeping the lower powers absorbs the
    spurious low-order terms left by rounding in the stencil entries, which
    the plain Richardson limit of ``(R - Lambda^2) / Lambda^exponent``
    amplifies by ``Lambda^(2 - exponent)``.
    """
    if exponent % 2 or exponent < 2:
        raise ValueError("exponent must be even and >= 2")
    n = len(ladder)
    if n < exponent // 2:
        raise ValueError("ladder too short for the requested coefficient")
    with mpmath.workdps(dps):
        A = [_to_mpf(a) for a in stencil.A]
        B = [_to_mpf(b) for b in stencil.B]
        rows, rhs = [], []
        for value in ladder:
            lam = mpmath.mpf(value)
            num = -4 * mpmath.fsum(A[k] * mpmath.sin(k * lam / 2) ** 2 for k in range(1, stencil.p + 1))
            den = B[0] + 2 * mpmath.fsum(B[k] * mpmath.cos(k * lam) for k in range(1, stencil.p + 1))
            rhs.append(num / den - lam * lam)
            rows.append([lam ** (2 * m) for m in range(1, n + 1)])
        sol = mpmath.lu_solve(mpmath.matrix(rows), mpmath.matrix(rhs))
        return float(sol[exponent // 2 - 1])


def find_optimal_tau(p: int, family: str = GAUSS_LOBATTO, tol: float = 1e-10, max_iter: int = 50,
                     dtype=np.longdouble) -> float:
    """Blending parameter annihilating the ``Lambda^(2p+2)`` term of ``R - Lambda^2``.

    Secant iteration from ``tau = 0, 1`` on :func:`extrapolated_coefficient`;
    ``tol`` is relative to ``max(1, |tau|)``. The coefficient must change
    sign across the returned root.
    """
    order = 2 * p + 2

    def c(tau):
        return extrapolated_coefficient(blended_stencil(p, family, tau, dtype), order)

    t0, t1 = 0.0, 1.0
    c0, c1 = c(t0), c(t1)
    for _ in range(max_iter):
        if c1 == 0:
            break
        if c1 == c0:
            raise BlendSearchError(f"secant stalled at tau={t1}")
        t2 = t1 - c1 * (t1 - t0) / (c1 - c0)
        t0, c0 = t1, c1
        t1, c1 = t2, c(t2)
        if abs(t1 - t0) < tol * max(1.0, abs(t1)):
            break
    else:
        raise BlendSearchError(f"no convergence after {max_iter} secant steps")
    step = 1e-6 * max(1.0, abs(t1))
    if np.sign(c(t1 - step)) == np.sign(c(t1 + step)):
        raise BlendSearchError(f"coefficient does not change sign at tau={t1}")
    return t1


def eigenvalue_error_prediction(op: OperatorSpec, fit: ExpansionFit, omega: float, h: float) -> float:
    """Leading term of ``lambda_h - lambda`` for a mode of frequency ``omega``.

    ``fit`` describes ``R - Lambda^2 ~ C Lambda^q``; the operator error is
    ``C (sum_{k>=1} a_k omega^{2k}) (omega h)^(q - 2)``.
    """
    lam = omega * h
    if not lam < 1:
        raise ValueError("prediction needs omega * h < 1")
    a = op.coefficients
    weight = sum(a[k] * omega ** (2 * k) for k in range(1, op.n + 1))
    return fit.coefficient * weight * lam ** (fit.exponent - 2)
