import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from finslerkit import jets
from finslerkit.jets import Jet, JetShapeError, seed_point


def _fd_grad(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    g = []
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g.append((f(x + e) - f(x - e)) / (2 * h))
    return np.array(g)


def _fd_hess(f, x, h=1e-4):
    n = len(x)
    H = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            ei = np.zeros(n); ei[i] = h
            ej = np.zeros(n); ej[j] = h
            H[i, j] = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej)
                       + f(x - ei - ej)) / (4 * h * h)
    return H


def test_basis_size():
    assert jets.basis_size(3, 0) == 1
    assert jets.basis_size(3, 2) == 10
    assert jets.basis_size(6, 4) == math.comb(10, 4)


def test_seed_and_value():
    x, y = seed_point([0.5, -1.0], 3)
    assert x.value == 0.5 and y.value == -1.0
    assert np.allclose(x.gradient(), [1, 0])


def test_shape_mismatch_raises():
    a = jets.seed_variable(0, 1.0, 2, 2)
    b = jets.seed_variable(0, 1.0, 3, 2)
    with pytest.raises(JetShapeError):
        a + b
    with pytest.raises(JetShapeError):
        Jet(2, 2, [1.0, 2.0])


def test_domain_errors():
    with pytest.raises(jets.JetDomainError):
        jets.sqrt(-1.0)
    with pytest.raises(jets.JetDomainError):
        jets.recip(0.0)
    with pytest.raises(ValueError):
        jets.seed_variable(0, 0.0, 1, jets.MAX_ORDER + 1)


def test_deriv_lowers_order():
    x, y = seed_point([0.3, 0.2], 4)
    f = x * x * y
    d = f.deriv(0)
    assert d.order == 3
    assert d.value == pytest.approx(2 * 0.3 * 0.2)
    with pytest.raises(ValueError):
        jets.constant(1.0, 2, 0).deriv(0)


def test_polynomial_partials_exact():
    # f = x^3 y^2 + 2 x y - 5; every partial up to order 5 is exact
    X, Y = sp.symbols("x y")
    fs = X**3 * Y**2 + 2 * X * Y - 5
    x, y = seed_point([0.7, -1.3], 5)
    f = x ** 3 * y ** 2 + 2.0 * x * y - 5.0
    for i in range(6):
        for j in range(6 - i):
            want = float(sp.diff(fs, X, i, Y, j).subs({X: 0.7, Y: -1.3}))
            assert f.partial((i, j)) == pytest.approx(want, abs=1e-10, rel=1e-10)


@pytest.mark.parametrize("name,fj,fs", [
    ("sin", jets.sin, sp.sin),
    ("cos", jets.cos, sp.cos),
    ("exp", jets.exp, sp.exp),
    ("log", jets.log, sp.log),
    ("sqrt", jets.sqrt, sp.sqrt),
    ("recip", jets.recip, lambda t: 1 / t),
])
def test_univariate_against_sympy(name, fj, fs):
    t = sp.Symbol("t")
    a = jets.seed_variable(0, 0.8, 1, 5)
    out = fj(a)
    expr = fs(t)
    for k in range(6):
        want = float(sp.diff(expr, t, k).subs(t, 0.8))
        assert out.partial((k,)) == pytest.approx(want, rel=1e-10, abs=1e-12)


def test_rational_power():
    a = jets.seed_variable(0, 2.0, 1, 3)
    out = a ** 1.5
    assert out.partial((1,)) == pytest.approx(1.5 * 2.0 ** 0.5)
    assert out.partial((2,)) == pytest.approx(0.75 * 2.0 ** -0.5)


def test_numpy_scalars_defer():
    a = jets.seed_variable(0, 2.0, 1, 2)
    out = np.float64(3.0) * a
    assert isinstance(out, Jet)
    assert out.partial((1,)) == 3.0


def test_against_finite_differences():
    def f_float(v):
        return math.exp(v[0]) * math.sin(v[1] * v[2]) / (1 + v[0] ** 2)
    p = np.array([0.2, -0.4, 0.9])
    X = seed_point(p, 2)
    f = jets.exp(X[0]) * jets.sin(X[1] * X[2]) / (1.0 + X[0] * X[0])
    assert np.allclose(f.gradient(), _fd_grad(f_float, p), rtol=1e-6)
    H = np.array([[f.partial(tuple(int(k == i) + int(k == j) for k in range(3)))
                   for j in range(3)] for i in range(3)])
    assert np.allclose(H, _fd_hess(f_float, p), rtol=1e-5, atol=1e-7)


finite = st.floats(-2.0, 2.0, allow_nan=False)


@given(finite, finite, finite, finite)
def test_product_rule(a, b, c, d):
    x, y = seed_point([a, b], 3)
    f = x * y + c
    g = x - d * y
    lhs = (f * g).deriv(0)
    rhs = f.deriv(0) * g.truncate(2) + f.truncate(2) * g.deriv(0)
    assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-12)


@given(st.floats(0.1, 3.0), st.floats(-1.0, 1.0))
def test_sqrt_squares_back(a, b):
    x, y = seed_point([a, b], 4)
    u = x * x + y * y + 0.5
    r = jets.sqrt(u)
    assert np.allclose((r * r).coeffs, u.coeffs, atol=1e-10)


@given(st.floats(0.2, 3.0))
def test_recip_inverse(a):
    x = jets.seed_variable(0, a, 1, 5)
    u = 1.0 + x * x
    assert np.allclose((u * jets.recip(u)).coeffs, [1, 0, 0, 0, 0, 0], atol=1e-10)


@given(finite, finite)
def test_mixed_partials_commute(a, b):
    x, y = seed_point([a, b], 3)
    f = jets.sin(x * y) + x ** 3 * y
    assert f.deriv(0).deriv(1).value == pytest.approx(f.deriv(1).deriv(0).value)
