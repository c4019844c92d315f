import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from finslerkit import jets
from finslerkit.fields import (ENTRIES, BinOp, Call, CatalogError, Coord,
                               CoordinateRangeError, ExprSyntaxError,
                               FieldError, MetricField, Num,
                               NotPositiveDefiniteError, OneFormField, Pow,
                               Scenario, ScenarioError, UnknownIdentifierError,
                               beta_norm_squared, catalog, eval_field, evaluate,
                               parse_expr, sample_points, to_text)


# -- expressions -----------------------------------------------------------------

@pytest.mark.parametrize("text,point,want", [
    ("1 + x1*x2", [2.0, 3.0], 7.0),
    ("x1^2 - 3*x2", [2.0, 1.0], 1.0),
    ("-x1^2", [3.0], -9.0),
    ("1/(1 + x1^2)^2", [1.0], 0.25),
    ("sqrt(x1)*exp(0)", [4.0], 2.0),
    ("sin(x1)^2 + cos(x1)^2", [0.7], 1.0),
    ("x1^-2", [2.0], 0.25),
    ("3/4", [], 0.75),
])
def test_evaluate(text, point, want):
    n = max(len(point), 1)
    assert evaluate(parse_expr(text, n), point) == pytest.approx(want)


def test_exact_literals():
    e = parse_expr("0.1", 1)
    assert e == Num(Fraction(1, 10))
    assert parse_expr("1/3", 1) == Num(Fraction(1, 3))


@pytest.mark.parametrize("text,exc", [
    ("x1 +", ExprSyntaxError),
    ("(x1", ExprSyntaxError),
    ("x1^x2", ExprSyntaxError),
    ("foo(x1)", UnknownIdentifierError),
    ("y1", UnknownIdentifierError),
    ("x4", CoordinateRangeError),
    ("x0", CoordinateRangeError),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_expr(text, 3)


def test_aliases():
    e = parse_expr("1 - 2*s", 0, aliases={"s": 0})
    assert evaluate(e, [0.25]) == 0.5


def test_eval_field_jet():
    e = parse_expr("x1^2*x2", 2)
    j = eval_field(e, [1.5, 2.0], 2)
    assert j.value == pytest.approx(4.5)
    assert np.allclose(j.gradient(), [6.0, 2.25])


def _exprs():
    leaf = st.one_of(
        st.builds(Num, st.fractions(min_value=-5, max_value=5, max_denominator=8)),
        st.builds(Coord, st.integers(0, 2)))

    def extend(children):
        return st.one_of(
            st.builds(BinOp, st.sampled_from("+-*/"), children, children),
            st.builds(Pow, children, st.integers(-2, 3)),
            st.builds(Call, st.sampled_from(["sin", "cos", "exp", "neg"]), children))
    return st.recursive(leaf, extend, max_leaves=8)


@given(_exprs())
def test_print_parse_round_trip(e):
    # the parser folds constant quotients, so compare on parser output
    first = parse_expr(to_text(e), 3)
    text = to_text(first)
    again = parse_expr(text, 3)
    assert again == first
    assert to_text(again) == text
    p = [0.3, -0.2, 0.5]
    try:
        a, b = evaluate(e, p), evaluate(again, p)
    except (jets.JetDomainError, ZeroDivisionError, OverflowError):
        return
    if math.isfinite(a):
        assert b == pytest.approx(a, rel=1e-9, abs=1e-9)


# -- metric and 1-form fields ---------------------------------------------------------

def test_metric_symmetry_enforced():
    with pytest.raises(FieldError):
        MetricField.from_strings([["1", "x1"], ["0", "1"]])
    with pytest.raises(FieldError):
        MetricField.from_strings([["1", "0"]])


def test_positive_definite_check():
    m = MetricField.from_strings([["1", "0"], ["0", "x1"]])
    with pytest.raises(NotPositiveDefiniteError):
        m.check_positive_definite([-1.0, 0.0])


def test_beta_norm_squared():
    m = MetricField.from_strings([["4", "0"], ["0", "1"]])
    b = OneFormField.from_strings(["1", "1"])
    assert beta_norm_squared(m, b, [0, 0]) == pytest.approx(1.25)


# -- catalog --------------------------------------------------------------------------

def test_catalog_has_entries():
    assert len(ENTRIES) >= 6
    assert "μ" in ENTRIES["space_form"].formula


@pytest.mark.parametrize("n", [2, 3, 4])
def test_euclidean_identity(n):
    m = catalog("euclidean", n=n).metric
    assert np.array_equal(m.values(np.full(n, 0.2)), np.eye(n))


def test_space_form_conformal_factor():
    m = catalog("space_form", n=3, mu=1.0).metric
    x = np.array([0.1, 0.2, -0.1])
    f = 1 / (1 + 0.25 * x @ x) ** 2
    assert np.allclose(m.values(x), f * np.eye(3))
    assert catalog("space_form", n=3, mu=0.0).metric.values(x).tolist() == np.eye(3).tolist()


def test_constant_oneform_is_valid_matsumoto_data():
    pair = catalog("constant_oneform", n=3, c=(0.2, 0, 0))
    assert beta_norm_squared(pair.metric, pair.oneform, [0.1, 0, 0]) == pytest.approx(0.04)


@pytest.mark.parametrize("name,params", [
    ("space_form", {"mu": 9.0}),
    ("perturbed_metric", {"eps": 0.5}),
    ("perturbed_oneform", {"eps": 0.5}),
    ("hopf_oneform", {"c": 0.7}),
    ("constant_oneform", {"n": 3, "c": (1, 2)}),
    ("nope", {}),
])
def test_catalog_errors(name, params):
    with pytest.raises(CatalogError):
        catalog(name, **params)


def test_perturbed_is_deterministic():
    a = catalog("perturbed_metric", n=3, seed=5, eps=0.1).metric.texts()
    b = catalog("perturbed_metric", n=3, seed=5, eps=0.1).metric.texts()
    c = catalog("perturbed_metric", n=3, seed=6, eps=0.1).metric.texts()
    assert a == b and a != c


# -- scenarios ------------------------------------------------------------------------

def test_scenario_round_trip(tmp_path):
    pair = catalog("perturbed_oneform", n=3, seed=2, eps=0.1, base=(0.2, 0.1, 0))
    sc = Scenario.from_pair(pair, samples=7)
    path = tmp_path / "s.json"
    sc.save(path)
    again = Scenario.load(path)
    assert again == sc
    assert again.dumps() == sc.dumps()
    m, b = again.fields()
    assert np.allclose(b.values([0.1, 0.2, 0.3]), pair.oneform.values([0.1, 0.2, 0.3]))


@pytest.mark.parametrize("doc", [
    "not json",
    json.dumps({"metric": [["1"]]}),
    json.dumps({"dimension": 1, "metric": [["1"]], "phi": "finsler"}),
    json.dumps({"dimension": 1, "metric": [[1]]}),
])
def test_scenario_errors(doc):
    with pytest.raises(ScenarioError):
        Scenario.loads(doc)


def test_sample_points_respect_box_and_cone():
    pair = catalog("constant_oneform", n=3, c=(0.4, 0, 0))
    pts = sample_points(pair.metric, pair.oneform, 40, seed=3, box=0.3, margin=0.05)
    assert len(pts) == 40
    for x, y in pts:
        assert np.all(np.abs(x) <= 0.3)
        assert np.linalg.norm(y) == pytest.approx(1.0)
        assert 1.0 - 0.4 * y[0] > 0.05
    # every fifth sample has beta(y) = 0
    assert abs(pts[4][1][0]) < 1e-12


def test_sample_points_deterministic():
    pair = catalog("hopf_oneform", c=0.3)
    a = sample_points(pair.metric, pair.oneform, 5, seed=9)
    b = sample_points(pair.metric, pair.oneform, 5, seed=9)
    assert all(np.array_equal(p[0], q[0]) and np.array_equal(p[1], q[1])
               for p, q in zip(a, b))
