"""Study runners: spectra, convergence tables, eigenfunction errors, dispersion and blend search."""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..assembly import QuadraturePair, assemble_1d, stencil_for_rule
from ..basis import BasisSpec, evaluate_function
from ..dispersion import error_expansion, find_optimal_tau
from ..eigen import Spectrum, solve_pencil
from ..operators import SINE, exact_eigenvalues, sine_mode
from ..quadrature import (
    FAMILIES,
    blend_family,
    gauss_legendre,
    gauss_lobatto,
    optimal_blend,
    optimal_tau,
)
from .config import PRECISIONS, ConfigError, StudyConfig, parse_rule

HEADER = ("p", "N", "rule", "dim", "operator", "j", "lambda_h", "lambda_exact", "rel_error", "rate")
DISPERSION_HEADER = ("p", "rule", "expected_exponent", "exponent", "coefficient", "fit_residual", "ladder_points")
BLEND_HEADER = ("p", "family", "tau", "tau_tabulated", "abs_error")
DEGENERACY_RTOL = 1e-8

# tables of relative eigenvalue errors: 2D sine-mode problems, G and optimal rules
TABLE_OPERATORS = {2: "biharmonic", 3: "cahn_hilliard4", 4: "swift_hohenberg", 5: "phase_field_crystal"}


def table_config(number: int, **changes) -> StudyConfig:
    """Preset configuration reproducing error table ``number`` (2 to 5)."""
    if number not in TABLE_OPERATORS:
        raise ConfigError("table", f"error tables are numbered {sorted(TABLE_OPERATORS)}")
    base = StudyConfig(operator=TABLE_OPERATORS[number], dim=2, p_list=(1, 2, 3), N_list=(4, 8, 16, 32),
                       rules=("gauss", "optimal"), eigen_indices=(1, 2, 4, 8))
    return base.replace(**changes) if changes else base


# -- reports ----------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorRow:
    p: int
    N: int | None
    rule: str
    dim: int
    operator: str
    j: int
    lambda_h: float | None
    lambda_exact: float | None
    rel_error: float | None
    rate: float | None = None

    @property
    def is_rate(self):
        return self.N is None

    def astuple(self):
        return tuple(getattr(self, k) for k in HEADER)


@dataclass(frozen=True, eq=False)
class SpectrumCurve:
    """Relative errors over the whole discrete spectrum against ``j / count``."""

    p: int
    N: int
    rule: str
    x: np.ndarray
    errors: np.ndarray

    def branch_indicator(self, lo: float = 0.3, hi: float = 0.7) -> float:
        """``max / median`` of the errors with ``lo <= j/count <= hi``; large values flag a branch jump."""
        window = self.errors[(self.x >= lo) & (self.x <= hi)]
        if window.size == 0:
            raise ValueError("no modes in the requested window")
        return float(np.max(window) / np.median(window))

    def branch_jump(self, lo: float = 0.3, hi: float = 0.7) -> float:
        """Largest ratio of neighbouring errors with ``lo <= j/count <= hi`` (zero errors skipped)."""
        e = self.errors[(self.x >= lo) & (self.x <= hi)]
        e = e[e > 0]
        if e.size < 2:
            raise ValueError("need two nonzero errors in the requested window")
        return float(np.max(e[1:] / e[:-1]))


@dataclass(eq=False)
class ErrorReport:
    config: StudyConfig
    rows: list
    kind: str = "convergence"
    curves: list = field(default_factory=list)
    header: tuple = HEADER

    def records(self):
        return [r.astuple() for r in self.rows]

    def error(self, p, N, rule, j) -> float:
        for r in self.rows:
            if (r.p, r.N, r.rule, r.j) == (p, N, rule, j):
                return r.rel_error
        raise KeyError((p, N, rule, j))

    def rate(self, p, rule, j) -> float:
        for r in self.rows:
            if r.is_rate and (r.p, r.rule, r.j) == (p, rule, j):
                return r.rate
        raise KeyError((p, rule, j))

    def data_rows(self):
        return [r for r in self.rows if not r.is_rate]


@dataclass(eq=False)
class TableReport:
    """Plain table of records for the dispersion and blend-search studies."""

    config: StudyConfig
    header: tuple
    rows: list
    kind: str = "table"

    def records(self):
        return [tuple(r) for r in self.rows]


# -- discretization -----------------------------------------------------------------


def make_rule(name: str, p: int, family: str, dtype=np.float64):
    kind, blend_fam, tau = parse_rule(name)
    if kind == "gauss":
        return gauss_legendre(p + 1, dtype)
    if kind == "reduced_gauss":
        return gauss_legendre(p, dtype)
    if kind == "lobatto":
        return gauss_lobatto(p + 1, dtype)
    if kind == "optimal":
        return optimal_blend(p, family, dtype)
    return blend_family(p, blend_fam, tau, dtype)


@functools.lru_cache(maxsize=512)
def _cached_spectrum(kind, p, N, bc, rule, stiffness_rule, family, precision):
    dtype = PRECISIONS[precision]
    spec = BasisSpec(kind, p, N, bc)
    mass = make_rule(rule, p, family, dtype)
    stiff = make_rule(stiffness_rule, p, family, dtype) if stiffness_rule else mass
    pencil = assemble_1d(spec, QuadraturePair(stiff, mass), dtype)
    spectrum = solve_pencil(pencil)
    for a in (pencil.K, pencil.M, spectrum.values, spectrum.vectors):
        a.setflags(write=False)
    return pencil, spectrum


def pencil_spectrum(cfg: StudyConfig, p: int, N: int, rule: str):
    """Cached ``(pencil, spectrum)`` of the 1D pencil for one sweep cell."""
    return _cached_spectrum(cfg.basis_kind, p, N, cfg.bc, rule, cfg.stiffness_rule, cfg.family, cfg.precision)


def operator_spectrum(cfg: StudyConfig, nu: Spectrum):
    """All ``dof^dim`` operator eigenvalues, ascending (ties by ascending tensor ``nu``)."""
    v = nu.values
    total = v
    for _ in range(cfg.dim - 1):
        total = np.add.outer(total, v)
    total = total.ravel()
    lam = cfg.op.evaluate(total)
    return lam[np.lexsort((total, lam))]


def _exact(cfg: StudyConfig, count: int):
    return exact_eigenvalues(cfg.op, cfg.dim, cfg.convention, count, cfg.dtype)


def _paired(lam_h, exact, positions):
    """``(lambda_h, lambda_exact)`` at 1-based positions after skipping exact zeros."""
    values = exact.values
    zeros = int(np.sum(values == 0))
    out = []
    for j in positions:
        k = zeros + j - 1
        if k >= min(lam_h.size, values.size):
            raise ConfigError("eigen_indices", f"index {j} exceeds the {lam_h.size - zeros} available eigenvalues")
        out.append((lam_h[k], values[k]))
    return out


def multiplicity_audit(lam_h, exact, rtol: float = 1e-10):
    """Positions where a cluster of equal exact eigenvalues meets unequal discrete ones.

    Returns a list of ``(first, last)`` 1-based position ranges that fail.
    """
    values = np.asarray(exact.values)
    bad = []
    start = 0
    n = min(values.size, np.asarray(lam_h).size)
    for k in range(1, n + 1):
        if k == n or abs(values[k] - values[start]) > rtol * abs(values[start]):
            group = np.asarray(lam_h[start:k], dtype=float)
            if group.size > 1 and np.ptp(group) > rtol * np.max(np.abs(group)):
                bad.append((start + 1, k))
            start = k
    return bad


def _rel(approx, exact):
    return abs(approx - exact) / abs(exact)


def _lsq_rate(Ns, errors):
    """Least-squares slope of ``-log2 e`` against ``log2 N``; equals the pairwise rate for two points."""
    e = np.asarray(errors, dtype=float)
    if e.size < 2 or np.any(e <= 0):
        return None
    x = np.log2(np.asarray(Ns, dtype=float))
    slope = np.polyfit(x, np.log2(e), 1)[0]
    return float(-slope)


# -- runners --------------------------------------------------------------------------


def run_convergence(cfg: StudyConfig) -> ErrorReport:
    """Errors of the requested eigenvalues over ``N_list`` plus a rate row per ``(p, rule, j)``.

    Data rows carry the pairwise rate ``log2(e(N/2) / e(N))`` when ``N/2`` is
    also in the sweep; rate rows (empty ``N``) hold the least-squares slope
    over the whole series.
    """
    if len(cfg.N_list) < 2:
        raise ConfigError("N_list", "a convergence study needs at least two N values")
    label = cfg.op.label()
    exact = _exact(cfg, max(cfg.eigen_indices) + 1)
    rows = []
    for p in cfg.p_list:
        for rule in cfg.rules:
            series = {j: [] for j in cfg.eigen_indices}
            for N in cfg.N_list:
                lam_h = operator_spectrum(cfg, pencil_spectrum(cfg, p, N, rule)[1])
                for j, (approx, ex) in zip(cfg.eigen_indices, _paired(lam_h, exact, cfg.eigen_indices)):
                    series[j].append((N, approx, ex, _rel(approx, ex)))
            for j, points in series.items():
                errors = {N: float(e) for N, _, _, e in points}
                for N, approx, ex, e in points:
                    prev = errors.get(N // 2) if N % 2 == 0 else None
                    rate = math.log2(prev / float(e)) if prev and e > 0 else None
                    rows.append(ErrorRow(p, N, rule, cfg.dim, label, j, float(approx), float(ex), float(e), rate))
                rows.append(ErrorRow(p, None, rule, cfg.dim, label, j, None, None, None,
                                     _lsq_rate(list(errors), list(errors.values()))))
    order = {r: i for i, r in enumerate(cfg.rules)}
    rows.sort(key=lambda r: (r.p, math.inf if r.N is None else r.N, order[r.rule], r.j))
    return ErrorReport(cfg, rows, "convergence")


def run_spectrum(cfg: StudyConfig) -> ErrorReport:
    """Errors of every discrete eigenvalue for a single ``(p, N)``, one curve per rule."""
    if len(cfg.p_list) != 1 or len(cfg.N_list) != 1:
        raise ConfigError("p_list", "a spectrum study takes exactly one p and one N")
    p, N = cfg.p_list[0], cfg.N_list[0]
    label = cfg.op.label()
    rows, curves = [], []
    for rule in cfg.rules:
        lam_h = operator_spectrum(cfg, pencil_spectrum(cfg, p, N, rule)[1])
        exact = _exact(cfg, lam_h.size)
        zeros = int(np.sum(exact.values == 0))
        count = lam_h.size - zeros
        errors = np.empty(count)
        for j in range(1, count + 1):
            approx, ex = lam_h[zeros + j - 1], exact.values[zeros + j - 1]
            errors[j - 1] = float(_rel(approx, ex))
            rows.append(ErrorRow(p, N, rule, cfg.dim, label, j, float(approx), float(ex), errors[j - 1]))
        curves.append(SpectrumCurve(p, N, rule, np.arange(1, count + 1) / count, errors))
    return ErrorReport(cfg, rows, "spectrum", curves)


def mode_l2_error(spec: BasisSpec, coefficients, mode, points: int = 20, dtype=np.float64) -> float:
    """``||u_h - u|| / ||u||`` in L2 after normalizing ``u_h`` and aligning its sign with ``mode``.

    ``mode`` is a vectorized callable on [0, 1]; integrals use a ``points``-point
    Gauss rule per element.
    """
    rule = gauss_legendre(points, dtype)
    h = dtype(1) / spec.N
    x = np.concatenate([(e + (rule.nodes + 1) / 2) * h for e in range(spec.N)])
    w = np.tile(rule.weights * h / 2, spec.N)
    uh = evaluate_function(spec, coefficients, x, dtype)
    u = mode(x)
    norm_h = np.sqrt(np.sum(w * uh * uh))
    if norm_h == 0:
        raise ValueError("discrete function vanishes")
    uh = uh / norm_h
    if np.sum(w * uh * u) < 0:
        uh = -uh
    return float(np.sqrt(np.sum(w * (uh - u) ** 2) / np.sum(w * u * u)))


def eigenfunction_error(cfg: StudyConfig, j: int, rule: str | None = None) -> float:
    """Relative L2 error of the discrete eigenfunction at sorted position ``j`` (1D only).

    Positions count every mode, so for Fourier modes ``j = 1`` is the constant.
    """
    if cfg.dim != 1:
        raise ConfigError("dim", "eigenfunction errors are defined for dim = 1 only")
    p, N = cfg.p_list[0], cfg.N_list[0]
    rule = rule or cfg.rules[0]
    pencil, nu = pencil_spectrum(cfg, p, N, rule)
    lam = cfg.op.evaluate(nu.values)
    order = np.lexsort((nu.values, lam))
    exact = _exact(cfg, j + 1)
    k = j - 1
    if not 0 <= k < order.size:
        raise ConfigError("eigen_indices", f"mode {j} exceeds the {order.size} discrete modes")
    target = lam[order[k]]
    scale = max(abs(float(target)), 1.0)
    neighbours = [lam[order[i]] for i in (k - 1, k + 1) if 0 <= i < order.size]
    if any(abs(float(v - target)) <= DEGENERACY_RTOL * scale for v in neighbours):
        raise ValueError(f"mode {j} is degenerate; its eigenfunction is not unique")
    ex = exact.values
    if any(abs(float(ex[i] - ex[k])) <= DEGENERACY_RTOL * max(abs(float(ex[k])), 1.0)
           for i in (k - 1, k + 1) if 0 <= i < ex.size):
        raise ValueError(f"exact mode {j} is degenerate; its eigenfunction is not unique")
    index = exact.indices[k][0]
    if cfg.convention == SINE:
        def mode(x):
            return sine_mode(index, x)
    elif index == 0:
        def mode(x):
            return np.ones_like(x)
    else:
        raise ValueError("nonzero Fourier modes are degenerate")
    return mode_l2_error(pencil.spec, nu.vectors[:, order[k]], mode, dtype=cfg.dtype)


def run_dispersion(cfg: StudyConfig) -> TableReport:
    """Fitted symbol exponent and leading coefficient for each ``(p, rule)``."""
    rows = []
    for p in cfg.p_list:
        for rule in cfg.rules:
            kind = parse_rule(rule)[0]
            expected = 2 * p + 4 if kind == "optimal" else 2 * p + 2
            stencil = stencil_for_rule(p, make_rule(rule, p, cfg.family, np.longdouble), np.longdouble)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                fit = error_expansion(stencil, expected)
            rows.append((p, rule, expected, fit.exponent, fit.coefficient, fit.fit_residual, len(fit.ladder)))
    return TableReport(cfg, DISPERSION_HEADER, rows, "dispersion")


def run_blend_search(cfg: StudyConfig, families=FAMILIES) -> TableReport:
    """Optimal blending parameters found numerically, next to the tabulated ones where known."""
    rows = []
    for family in families:
        for p in cfg.p_list:
            tau = find_optimal_tau(p, family)
            try:
                tab = float(optimal_tau(p, family))
            except KeyError:
                tab = None
            rows.append((p, family, tau, tab, None if tab is None else abs(tau - tab)))
    return TableReport(cfg, BLEND_HEADER, rows, "blend-search")
