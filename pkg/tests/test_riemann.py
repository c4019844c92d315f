import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from finslerkit.fields import catalog
from finslerkit.fields.catalog import CatalogPair
from finslerkit.riemann import (alpha_curvature, alpha_function, alpha_spray,
                                beta_invariants, christoffel, horizontal_derivatives,
                                killing_classifier, riemann_tensor, tensor_data)

H = 1e-5


def _fd(f, x, h=H):
    """Central differences of an array-valued f; last axis is the direction."""
    x = np.asarray(x, dtype=float)
    cols = []
    for k in range(len(x)):
        e = np.zeros_like(x)
        e[k] = h
        cols.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2 * h))
    return np.stack(cols, axis=-1)


def _christoffel_fd(metric, x):
    a = metric.values(x)
    da = _fd(metric.values, x)               # da[i, j, k] = d_k a_ij
    # t[l, j, k] = d_k a_lj + d_j a_lk - d_l a_jk
    t = da + da.transpose(0, 2, 1) - np.einsum("jkl->ljk", da)
    return 0.5 * np.einsum("il,ljk->ijk", np.linalg.inv(a), t)


METRICS = {
    "euclidean": catalog("euclidean", n=3).metric,
    "sphere": catalog("space_form", n=3, mu=1.0).metric,
    "hyperbolic": catalog("space_form", n=3, mu=-1.0).metric,
    "perturbed": catalog("perturbed_metric", n=3, seed=1, eps=0.1).metric,
}
X0 = np.array([0.12, -0.2, 0.07])


def test_euclidean_christoffel_vanish():
    assert np.all(christoffel(METRICS["euclidean"], X0) == 0)


@pytest.mark.parametrize("name", sorted(METRICS))
def test_christoffel_vs_finite_differences(name):
    m = METRICS[name]
    assert np.allclose(christoffel(m, X0), _christoffel_fd(m, X0), atol=1e-8)


@pytest.mark.parametrize("mu", [-1.0, 0.5, 1.0])
def test_space_form_curvature(mu):
    m = catalog("space_form", n=3, mu=mu).metric
    y = np.array([0.3, -0.5, 0.8])
    td = tensor_data(m, catalog("constant_oneform", n=3, c=(0, 0, 0)).oneform, X0)
    a = td.a
    # constant curvature: R^i_k = mu (alpha^2 delta^i_k - y^i y_k)
    want = mu * ((y @ a @ y) * np.eye(3) - np.outer(y, a @ y))
    assert np.allclose(alpha_curvature(td, y), want, atol=1e-12)


def test_riemann_antisymmetry():
    R = riemann_tensor(METRICS["perturbed"], X0)
    assert np.allclose(R, -R.transpose(0, 1, 3, 2))
    # first Bianchi identity
    assert np.allclose(R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2), 0,
                       atol=1e-12)


def test_alpha_spray_geodesic_form():
    m = METRICS["sphere"]
    y = np.array([1.0, 0.0, 0.5])
    G = alpha_spray(m, X0, y)
    assert np.allclose(G, 0.5 * np.einsum("ijk,j,k->i", christoffel(m, X0), y, y))
    assert alpha_function(m).value(X0, y) == pytest.approx(np.sqrt(y @ m.values(X0) @ y))


PAIRS = {
    "constant": catalog("constant_oneform", n=3, c=(0.2, 0.1, 0.0)),
    "perturbed": CatalogPair(METRICS["perturbed"],
                             catalog("perturbed_oneform", n=3, seed=2, eps=0.1,
                                     base=(0.2, 0.1, 0.0)).oneform),
    "hopf": catalog("hopf_oneform", c=0.3),
}


@pytest.mark.parametrize("name", sorted(PAIRS))
def test_bij_vs_finite_differences(name):
    pair = PAIRS[name]
    td = tensor_data(pair.metric, pair.oneform, X0)
    db = _fd(pair.oneform.values, X0)            # d_j b_i
    want = db - np.einsum("kij,k->ij", td.gamma, td.b)
    assert np.allclose(td.bij, want, atol=1e-8)
    assert np.allclose(td.r + td.s, td.bij)
    assert np.allclose(td.s, -td.s.T)


@pytest.mark.parametrize("name", sorted(PAIRS))
def test_covariant_r_vs_finite_differences(name):
    pair = PAIRS[name]
    td = tensor_data(pair.metric, pair.oneform, X0)
    dr = _fd(lambda x: tensor_data(pair.metric, pair.oneform, x).r, X0)
    want = (dr - np.einsum("mik,mj->ijk", td.gamma, td.r)
            - np.einsum("mjk,im->ijk", td.gamma, td.r))
    assert np.allclose(td.r_cov, want, atol=1e-7)
    dB = _fd(lambda x: tensor_data(pair.metric, pair.oneform, x).B, X0)
    assert np.allclose(td.dB, dB, atol=1e-8)


def test_beta_invariants_basic():
    pair = PAIRS["perturbed"]
    y = np.array([0.2, 0.9, -0.3])
    bi = beta_invariants(pair.metric, pair.oneform, X0, y)
    a = pair.metric.values(X0)
    assert float(bi.alpha) == pytest.approx(np.sqrt(y @ a @ y))
    assert float(bi.s) == pytest.approx(float(bi.beta) / float(bi.alpha))
    assert float(bi.r00) == pytest.approx(y @ bi.td.r @ y)
    with pytest.raises(ValueError):
        beta_invariants(pair.metric, pair.oneform, X0, [0, 0, 0])


def test_horizontal_derivative_contractions():
    pair = PAIRS["perturbed"]
    y = np.array([0.2, 0.9, -0.3])
    td = tensor_data(pair.metric, pair.oneform, X0)
    hd = horizontal_derivatives(pair.metric, pair.oneform, X0, y)
    assert float(hd.r00_0) == pytest.approx(np.einsum("ijk,i,j,k->", td.r_cov, y, y, y))
    assert float(hd.r00_b) == pytest.approx(
        np.einsum("ijk,i,j,k->", td.r_cov, y, y, td.bsharp))


@pytest.mark.parametrize("pair,flags", [
    (catalog("constant_oneform", n=3, c=(0.2, 0, 0)),
     dict(is_killing=True, is_closed=True, is_parallel=True, has_constant_length=True)),
    (catalog("linear_oneform", n=3, M=[[0, 1, 0], [-1, 0, 0], [0, 0, 0]]),
     dict(is_killing=True, is_closed=False, is_parallel=False,
          is_constant_killing=False)),
    (catalog("linear_oneform", n=3, M=[[1, 0, 0], [0, 0, 0], [0, 0, 0]]),
     dict(is_killing=False, is_closed=True, is_parallel=False)),
    (catalog("hopf_oneform", c=0.3),
     dict(is_killing=True, is_closed=False, is_constant_killing=True,
          has_constant_length=True, is_parallel=False)),
])
def test_killing_classifier(pair, flags):
    xs = [X0, -X0, np.array([0.25, 0.1, -0.2])]
    got = killing_classifier(pair.metric, pair.oneform, xs)
    for k, v in flags.items():
        assert got[k] is v, k


def test_killing_classifier_needs_points():
    pair = PAIRS["constant"]
    with pytest.raises(ValueError):
        killing_classifier(pair.metric, pair.oneform, [])


coord = st.floats(-0.3, 0.3)


@given(coord, coord, coord)
def test_hopf_length_constant(x1, x2, x3):
    pair = PAIRS["hopf"]
    td = tensor_data(pair.metric, pair.oneform, [x1, x2, x3])
    assert td.B == pytest.approx(0.09, abs=1e-12)
    assert np.abs(td.r).max() < 1e-12
