from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from finslerkit import contraction as C
from finslerkit import polyalg
from finslerkit.abmetric import ConeError
from finslerkit.fields import catalog, sample_points
from finslerkit.fields.catalog import CatalogPair
from finslerkit.finsler import DegenerateDimensionError

FLAT = catalog("perturbed_oneform", n=3, seed=2, eps=0.1, base=(0.2, 0.1, 0.0))
CURVED = CatalogPair(catalog("perturbed_metric", n=3, seed=1, eps=0.1).metric,
                     FLAT.oneform)
HOPF = catalog("hopf_oneform", c=0.3)
X0 = np.array([0.1, -0.2, 0.15])
Y0 = np.array([0.3, 0.7, -0.5])


@pytest.fixture(scope="module")
def curved_points():
    return sample_points(CURVED.metric, CURVED.oneform, 8, seed=11)


def test_point_data_preconditions():
    big = catalog("constant_oneform", n=3, c=(0.6, 0.0, 0.0))
    with pytest.raises(C.PreconditionError):
        C.point_data(big.metric, big.oneform, X0, Y0)
    near = catalog("constant_oneform", n=3, c=(0.49, 0.0, 0.0))
    with pytest.raises(ConeError):
        C.point_data(near.metric, near.oneform, X0, [1.0, 0.0, 0.0], margin=0.6)
    with pytest.raises(ValueError):
        C.point_data(FLAT.metric, FLAT.oneform, X0, [0, 0, 0])


def test_assemblies_match_direct_oracle(curved_points):
    res = C.oracle_comparison(CURVED.metric, CURVED.oneform, curved_points)
    err = res["max_rel_error"]
    assert res["samples"] == len(curved_points)
    for key in ("rbar_contract_b", "rbar_trace", "div_rbar_b",
                "vertical_trace_corrected", "vertical_trace_jet", "te7"):
        assert err[key] < 1e-9, key
    # the published closed form of the vertical trace is off by O(1)
    assert err["vertical_trace_printed"] > 1e-2


def test_every_erratum_is_needed(curved_points):
    res = C.oracle_comparison(CURVED.metric, CURVED.oneform, curved_points)
    abl = res["errata_reverted_max_rel_error"]
    assert set(abl) == {e["id"] for e in C.VERTICAL_TRACE_ERRATA}
    assert all(v > 1e-3 for v in abl.values())


def test_errata_account_for_printed_form():
    pd = C.point_data(CURVED.metric, CURVED.oneform, X0, Y0)
    printed = C.vertical_trace_terms(pd)
    fixed = C.vertical_trace_terms(pd, corrected=True)
    delta = sum(C.vertical_trace_diff(pd).values())
    assert printed - fixed == pytest.approx(delta, rel=1e-12, abs=1e-14)


def test_te7_modes_agree():
    pd = C.point_data(CURVED.metric, CURVED.oneform, X0, Y0)
    d = C.direct_bar_quantities(CURVED.metric, CURVED.oneform, X0, Y0)
    assert C.te7_residual(pd) == pytest.approx(d.te7, abs=1e-14)
    assert C.te7_residual(pd, "corrected") == pytest.approx(d.te7, abs=1e-13)
    assert abs(C.te7_residual(pd, "printed") - d.te7) > 1e-6
    with pytest.raises(ValueError):
        C.te7_residual(pd, "bogus")


def test_te7_needs_three_dimensions():
    pair = catalog("constant_oneform", n=2, c=(0.2, 0.0))
    pd = C.point_data(pair.metric, pair.oneform, [0, 0], [1.0, 0.3])
    with pytest.raises(DegenerateDimensionError):
        C.te7_residual(pd)


def test_te7_equals_bWb():
    d = C.direct_bar_quantities(CURVED.metric, CURVED.oneform, X0, Y0)
    from finslerkit.riemann import tensor_data
    td = tensor_data(CURVED.metric, CURVED.oneform, X0)
    assert d.te7 == pytest.approx(td.b @ d.W @ td.bsharp)


def _exact(poly, s, B):
    return float(poly(Fraction(s), Fraction(B)))


@given(st.floats(-0.4, 0.4), st.floats(0.01, 0.24))
def test_trace_coefficients_match_exact_polynomials(s, B):
    # B c2 = f2 / A2^4 and (B - s^2) c2_s - 2 s c2 = f4 / A2^5
    f = polyalg.f_polynomials()
    tc = C.trace_coeffs(s, B)
    A2 = 1 + 2 * B - 3 * s
    assert B * tc.c2 == pytest.approx(_exact(f["f2"]["poly"], s, B) / A2 ** 4,
                                      rel=1e-9, abs=1e-12)
    lhs = (B - s * s) * tc.c2s - 2 * s * tc.c2
    assert lhs == pytest.approx(_exact(f["f4"]["poly"], s, B) / A2 ** 5,
                                rel=1e-9, abs=1e-12)


def test_trace_coeffs_access():
    tc = C.trace_coeffs(0.1, 0.1)
    assert set(C.TRACE_NAMES) <= set(tc.to_dict())
    assert tc.c24 == pytest.approx(2 / 0.8)
    with pytest.raises(AttributeError):
        tc.c99


def test_big_c_coeffs_to_dict():
    pd = C.point_data(FLAT.metric, FLAT.oneform, X0, Y0)
    d = C.big_c_coeffs(pd).to_dict()
    assert len(d) == 17 and all(np.isfinite(v) for v in d.values())


@pytest.fixture(scope="module")
def hopf_points():
    return sample_points(HOPF.metric, HOPF.oneform, 6, seed=5)


def test_killing_specialization_matches_general(hopf_points):
    for x, y in hopf_points:
        pd = C.point_data(HOPF.metric, HOPF.oneform, x, y)
        kr = C.killing_specialization(pd)
        assert np.allclose(kr.rbar_b, C.rbar_contract_b(pd).astype(float), atol=1e-12)
        assert kr.trace == pytest.approx(C.rbar_trace(pd), abs=1e-12)
        assert kr.te7 == pytest.approx(C.te7_residual(pd), abs=1e-12)
        assert kr.leading == pytest.approx(C.killing_graded_leading(pd), abs=1e-12)
        assert kr.leading + kr.complement == pytest.approx(kr.te7)


def test_killing_leading_expansion_is_wrong(hopf_points):
    diffs = []
    for x, y in hopf_points:
        kr = C.killing_specialization(C.point_data(HOPF.metric, HOPF.oneform, x, y))
        diffs.append(abs(kr.leading_expanded - kr.leading))
    assert max(diffs) > 1e-6


def test_killing_specialization_precondition():
    pd = C.point_data(FLAT.metric, FLAT.oneform, X0, Y0)
    with pytest.raises(C.PreconditionError):
        C.killing_specialization(pd)


def test_conformal_test():
    conf = catalog("linear_oneform", n=3, M=[[0.5, 0, 0], [0, 0.5, 0], [0, 0, 0.5]])
    out = C.conformal_test(conf.metric, conf.oneform, [X0, -X0])
    assert out["residual"] < 1e-14
    assert out["sigma"] == pytest.approx([0.5, 0.5])
    assert C.conformal_test(FLAT.metric, FLAT.oneform, [X0])["residual"] > 1e-3
    with pytest.raises(ValueError):
        C.conformal_test(FLAT.metric, FLAT.oneform, [])


def test_rel_err_floor():
    assert C.rel_err([1e-20], [0.0]) == pytest.approx(1e-8)
    assert C.rel_err([1.0, 2.0], [1.0, 2.0]) == 0.0
