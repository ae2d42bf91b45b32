import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mixediga.assembly import QuadraturePair, assemble_1d, stencil_for_rule
from mixediga.basis import DIRICHLET, IGA, BasisSpec
from mixediga.dispersion import (
    SingularSymbol,
    Stencil,
    blended_stencil,
    error_expansion,
    eigenvalue_error_prediction,
    extrapolated_coefficient,
    find_optimal_tau,
    symbol_ratio,
)
from mixediga.eigen import solve_pencil
from mixediga.operators import preset
from mixediga.quadrature import FAMILIES, GAUSS_GAUSS, GAUSS_LOBATTO, gauss_legendre, optimal_blend, optimal_tau


def gauss_stencil(p, dtype=np.float64):
    return stencil_for_rule(p, gauss_legendre(p + 1, dtype))


def optimal_stencil(p, family=GAUSS_LOBATTO, dtype=np.float64):
    return stencil_for_rule(p, optimal_blend(p, family, dtype))


def test_linear_symbol_closed_forms():
    c = math.cos(math.pi / 4)
    g = symbol_ratio(gauss_stencil(1), math.pi / 4)
    o = symbol_ratio(optimal_stencil(1), math.pi / 4)
    assert g == pytest.approx(6 * (1 - c) / (2 + c), abs=1e-14)
    assert o == pytest.approx(12 * (1 - c) / (5 + c), abs=1e-14)
    assert g == pytest.approx(0.649128, abs=1e-4)
    assert o == pytest.approx(0.615846, abs=1e-5)


@given(st.integers(1, 4), st.sampled_from(["gauss", GAUSS_GAUSS, GAUSS_LOBATTO]), st.floats(1e-3, math.pi - 1e-3))
def test_symbol_even_positive(p, rule, lam):
    stencil = gauss_stencil(p) if rule == "gauss" else optimal_stencil(p, rule)
    r = symbol_ratio(stencil, lam)
    assert r == pytest.approx(symbol_ratio(stencil, -lam), rel=1e-14)
    assert r > 0


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_symbol_consistency(p):
    for stencil in (gauss_stencil(p), optimal_stencil(p)):
        assert symbol_ratio(stencil, 1e-3) / 1e-6 == pytest.approx(1, abs=1e-5)


def test_singular_symbol():
    bad = Stencil(1, np.array([2.0, -1.0]), np.array([0.5, 0.5]))  # denominator vanishes at 2 pi / 3
    with pytest.raises(SingularSymbol):
        symbol_ratio(bad, 2 * math.pi / 3)


@pytest.mark.parametrize("N", [4, 8, 16, 25])
def test_symbol_matches_linear_pencil(N):
    pencil = assemble_1d(BasisSpec(IGA, 1, N, DIRICHLET), QuadraturePair.same(gauss_legendre(2)))
    nu = solve_pencil(pencil, vectors=False).values
    stencil = gauss_stencil(1)
    h = 1.0 / N
    for k, v in enumerate(nu, start=1):
        assert symbol_ratio(stencil, k * math.pi * h) == pytest.approx(v * h * h, rel=1e-10)


def test_expansion_examples():
    g1 = error_expansion(gauss_stencil(1), 4)
    assert abs(g1.exponent - 4) < 0.05
    assert abs(g1.coefficient - 1 / 12) < 1e-9
    assert g1.valid
    o1 = error_expansion(optimal_stencil(1), 6)
    assert abs(o1.exponent - 6) < 0.05
    assert abs(o1.coefficient + 1 / 240) < 1e-8
    g2 = error_expansion(gauss_stencil(2), 6)
    assert abs(g2.exponent - 6) < 0.1


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_expansion_orders(p):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        g = error_expansion(gauss_stencil(p, np.longdouble), 2 * p + 2)
        o = error_expansion(optimal_stencil(p, GAUSS_GAUSS, np.longdouble), 2 * p + 4)
    assert abs(g.exponent - (2 * p + 2)) < 0.1
    assert abs(o.exponent - (2 * p + 4)) < 0.1
    assert g.coefficient > 0


def test_cancellation_floor_warns():
    with pytest.warns(RuntimeWarning, match="cancellation"):
        fit = error_expansion(gauss_stencil(4), 10)
    assert len(fit.ladder) < 5


@pytest.mark.parametrize("p,family", [(1, GAUSS_GAUSS), (2, GAUSS_LOBATTO), (4, GAUSS_GAUSS)])
def test_find_optimal_tau_examples(p, family):
    assert find_optimal_tau(p, family) == pytest.approx(float(optimal_tau(p, family)), abs=1e-6)


@pytest.mark.parametrize("p", [1, 2, 3, 4])
@pytest.mark.parametrize("family", FAMILIES)
def test_coefficient_changes_sign_and_is_affine(p, family):
    tau = float(optimal_tau(p, family))
    delta = 1e-3 * max(1, abs(tau))
    c = [extrapolated_coefficient(blended_stencil(p, family, t), 2 * p + 2) for t in (tau - delta, tau, tau + delta)]
    assert c[0] * c[2] < 0
    assert abs(c[1]) < 1e-6 * (abs(c[0]) + abs(c[2]))
    assert c[1] == pytest.approx((c[0] + c[2]) / 2, abs=1e-6 * abs(c[0]))


def test_prediction_reductions():
    fit = error_expansion(gauss_stencil(1), 4)
    h = 1 / 16
    om = math.pi
    assert eigenvalue_error_prediction(preset("laplace"), fit, om, h) == pytest.approx(
        fit.coefficient * om**2 * (om * h) ** (fit.exponent - 2))
    assert eigenvalue_error_prediction(preset("biharmonic"), fit, om, h) > 0
    with pytest.raises(ValueError):
        eigenvalue_error_prediction(preset("laplace"), fit, om, 0.5)


def test_prediction_halving_for_optimal_blend():
    op = preset("biharmonic")
    fit = error_expansion(optimal_stencil(1), 6)
    lam = math.pi**4
    ratios = [eigenvalue_error_prediction(op, fit, math.pi, 1 / N) / lam for N in (8, 16, 32)]
    for a, b in zip(ratios, ratios[1:]):
        assert a / b == pytest.approx(2.0 ** (2 * 1 + 2), rel=1e-2)


@pytest.mark.parametrize("name", ["laplace", "biharmonic", "phase_field_crystal"])
@pytest.mark.parametrize("rule", ["gauss", "optimal"])
def test_prediction_against_measured_error(name, rule):
    op = preset(name)
    q = gauss_legendre(2, np.longdouble) if rule == "gauss" else optimal_blend(1, GAUSS_LOBATTO, np.longdouble)
    fit = error_expansion(stencil_for_rule(1, q), 4 if rule == "gauss" else 6)
    x = math.pi**2
    a = op.coefficients
    factor = sum(k * a[k] * x**k for k in range(1, op.n + 1)) / sum(a[k] * x**k for k in range(1, op.n + 1))
    N = 64
    pencil = assemble_1d(BasisSpec(IGA, 1, N, DIRICHLET), QuadraturePair.same(q), np.longdouble)
    nu = solve_pencil(pencil, vectors=False).values[0]
    measured = float(op.evaluate(nu) - op.evaluate(np.longdouble(x)))
    predicted = eigenvalue_error_prediction(op, fit, math.pi, 1 / N)
    assert np.sign(measured) == np.sign(predicted)
    assert measured / predicted == pytest.approx(factor, rel=2e-3)
