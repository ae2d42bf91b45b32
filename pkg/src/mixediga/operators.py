"""Operators ``L = sum_m a_m (-Laplace)^m`` on the unit cube and their exact spectra."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

SINE = "sine"
FOURIER = "fourier"
CONVENTIONS = (SINE, FOURIER)


@dataclass(frozen=True)
class OperatorSpec:
    """Coefficients ``(a_0, ..., a_n)`` of a polynomial in ``-Laplace``."""

    coefficients: tuple
    name: str = ""

    def __post_init__(self):
        coeffs = tuple(self.coefficients)
        if len(coeffs) < 2:
            raise ValueError("an operator needs at least (a_0, a_1)")
        if coeffs[-1] == 0:
            raise ValueError("leading coefficient a_n must be nonzero")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def n(self) -> int:
        return len(self.coefficients) - 1

    def evaluate(self, nu):
        """``sum_m a_m nu^m`` by Horner's rule (in the dtype of ``nu``)."""
        nu = np.asarray(nu)
        out = np.zeros_like(nu) + self.coefficients[-1]
        for a in self.coefficients[-2::-1]:
            out = out * nu + a
        return out

    def derivative(self, nu):
        nu = np.asarray(nu)
        out = np.zeros_like(nu)
        for m in range(self.n, 0, -1):
            out = out * nu + m * self.coefficients[m]
        return out

    def label(self):
        return self.name or "op(" + ",".join(f"{a:g}" for a in self.coefficients) + ")"


PRESETS = {
    "laplace": (0, 1),
    "biharmonic": (0, 0, 1),
    "cahn_hilliard4": (0, 1, 1),
    "swift_hohenberg": (1, -2, 1),
    "cahn_hilliard6": (0, 0, 1, 1),
    "phase_field_crystal": (0, 1, -2, 1),
}


def preset(name: str) -> OperatorSpec:
    try:
        return OperatorSpec(PRESETS[name], name)
    except KeyError:
        raise ValueError(f"unknown operator {name!r}; presets are {sorted(PRESETS)}") from None


@dataclass(frozen=True, eq=False)
class ExactSpectrum:
    """Ascending exact eigenvalues with the mode multi-index of each one.

    Fourier indices are nonnegative; every nonzero index appears twice (the
    cosine and the sine mode), cosine first.
    """

    indices: list
    values: np.ndarray
    convention: str
    dim: int

    @property
    def entries(self):
        return list(zip(self.indices, self.values))


def _pi(dtype):
    return np.arctan(np.ones((), dtype=dtype)) * 4


def _min_beyond(op: OperatorSpec, x0: float) -> float:
    """Lower bound of the operator polynomial on ``[x0, inf)``."""
    crit = [r.real for r in np.roots(np.polyder(np.array(op.coefficients[::-1], float))) if abs(r.imag) < 1e-12]
    pts = [x0] + [c for c in crit if c > x0]
    return min(float(op.evaluate(np.float64(c))) for c in pts)


def exact_eigenvalues(op: OperatorSpec, dim: int = 1, convention: str = SINE, count: int = 10, dtype=np.float64) -> ExactSpectrum:
    """Smallest ``count`` eigenvalues of ``op`` on ``[0, 1]^dim``.

    Sine modes have frequencies ``j pi`` (``j >= 1``) per direction, Fourier
    modes ``2 pi j`` (``j >= 0``). The enumeration box is enlarged until no
    mode outside it can undercut the ``count``-th value.
    """
    if dim not in (1, 2, 3):
        raise ValueError("dim must be 1, 2 or 3")
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    if count < 1:
        raise ValueError("count must be >= 1")
    dtype = np.dtype(dtype).type
    pi = _pi(dtype)
    bound = math.ceil(count ** (1 / dim)) + 3
    while True:
        if convention == SINE:
            axis = [(j, j) for j in range(1, bound + 1)]
            freq = pi
        else:
            axis = [(0, 0)] + [(j, j) for j in range(1, bound + 1) for _ in range(2)]
            freq = 2 * pi
        modes = list(product(axis, repeat=dim))
        omega2 = np.array([sum(dtype(j) ** 2 for j, _ in m) for m in modes], dtype=dtype) * freq**2
        lam = op.evaluate(omega2)
        idx = [tuple(j for j, _ in m) for m in modes]
        order = sorted(range(len(modes)), key=lambda i: (lam[i], omega2[i], idx[i]))[:count]
        # smallest frequency^2 of any mode outside the box
        outside = float(((bound + 1) * freq) ** 2)
        if len(order) == count and _min_beyond(op, outside) > float(lam[order[-1]]):
            break
        bound *= 2
    return ExactSpectrum([idx[i] for i in order], lam[order], convention, dim)


def exact_eigenfunction(indices, convention: str, point, parity=None) -> float:
    """Unit-L2 eigenfunction value at ``point`` in ``[0, 1]^d``.

    Sine modes: ``prod sqrt(2) sin(j pi x)``. Fourier modes: per direction
    ``sqrt(2) cos(2 pi j x)`` or ``sqrt(2) sin(2 pi j x)`` chosen by
    ``parity`` (``"cos"``/``"sin"``, default cos), and 1 for ``j = 0``.
    """
    indices = tuple(np.atleast_1d(indices))
    point = np.atleast_1d(np.asarray(point, dtype=float))
    if point.shape[0] != len(indices):
        raise ValueError("point and indices must have the same dimension")
    if np.any(point < 0) or np.any(point > 1):
        raise ValueError("point must lie in the unit cube")
    if parity is None:
        parity = ("cos",) * len(indices)
    value = 1.0
    for j, x, kind in zip(indices, point, parity):
        if convention == SINE:
            value *= math.sqrt(2) * math.sin(j * math.pi * x)
        elif j == 0:
            value *= 1.0
        elif kind == "sin":
            value *= math.sqrt(2) * math.sin(2 * j * math.pi * x)
        else:
            value *= math.sqrt(2) * math.cos(2 * j * math.pi * x)
    return value


def sine_mode(j: int, x):
    """Vectorized 1D sine mode ``sqrt(2) sin(j pi x)``."""
    x = np.asarray(x)
    pi = _pi(x.dtype if x.dtype.kind == "f" else np.float64)
    return np.sqrt(x.dtype.type(2) if x.dtype.kind == "f" else 2.0) * np.sin(j * pi * x)


def relative_error(approx, exact, j: int):
    """``|approx_j - exact_j| / exact_j`` at 1-based sorted position ``j``.

    Exact zero eigenvalues (and as many leading approximate ones) are skipped.
    """
    values = np.asarray(getattr(exact, "values", exact))
    approx = np.asarray(approx)
    zeros = int(np.sum(values == 0))
    values, approx = values[zeros:], approx[zeros:]
    if not 1 <= j <= min(values.size, approx.size):
        raise IndexError(f"eigenvalue index {j} out of range")
    lam = values[j - 1]
    if lam == 0:
        raise ZeroDivisionError("relative error undefined for a zero eigenvalue")
    return abs(approx[j - 1] - lam) / abs(lam)
