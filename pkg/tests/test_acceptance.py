"""One test per acceptance criterion; each prints a single PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (lines appear in the summary) or
``python tests/test_acceptance.py``.
"""

import math
import sys

import numpy as np
import pytest
import sympy as sp

from finslerkit import suites
from finslerkit.fields import ENTRIES, catalog, eval_field, parse_expr
from finslerkit.suites import Settings

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script from elsewhere
    ACCEPTANCE_LINES = {}


def report(num, title, ok, detail, erratum=False):
    status = ("PASS (with errata)" if erratum else "PASS") if ok else "FAIL"
    line = f"criterion {num:2d} {status:18s} {title}: {detail}"
    ACCEPTANCE_LINES[num] = line
    print(line)
    return ok


def _checks(rep, prefix=""):
    return {c["name"]: c for c in rep.checks if c["name"].startswith(prefix)}


def test_01_spray_equivalence():
    rep = suites.suite_spray(Settings(samples=100))
    checks = _checks(rep, "closed_vs_direct")
    worst = max(c["max_error"] for c in checks.values())
    ok = (len(checks) == 6 and all(c["samples"] == 100 for c in checks.values())
          and worst <= 1e-8)
    report(1, "spray closed form vs definition", ok,
           f"3 pairs x (Matsumoto, Randers) x 100 samples, max rel {worst:.1e} <= 1e-8")
    assert ok


def test_02_curvature_identities():
    st = Settings(samples=50)
    worst_y = worst_h = 0.0
    for name, pair in suites.spray_pairs().items():
        ry, hom, _ = suites.curvature_identities(pair, suites.matsumoto(), st)
        worst_y, worst_h = max(worst_y, ry), max(worst_h, hom)
    ok = worst_y <= 1e-8 and worst_h <= 1e-8
    report(2, "R y = 0 and R 2-homogeneous", ok,
           f"max |Ry| rel {worst_y:.1e}, homogeneity rel {worst_h:.1e} <= 1e-8")
    assert ok


def test_03_weyl_characterization():
    st = Settings()
    flat = max(suites.riemannian_weyl(catalog("space_form", n=3, mu=mu).metric, st, 30)
               for mu in (-1.0, 0.0, 1.0))
    curved = min(suites.riemannian_weyl(
        catalog("perturbed_metric", n=3, seed=seed, eps=0.1).metric, st, 30)
        for seed in (0, 1, 2))
    ok = flat <= 1e-7 and curved >= 1e-3
    report(3, "Weyl vanishes exactly on space forms", ok,
           f"space forms max |W| {flat:.1e} <= 1e-7, perturbed max |W| >= {curved:.2e}")
    assert ok


def test_04_projective_invariance():
    errs = suites.projective_invariance(suites.curved_perturbed(), Settings(), 50)
    worst = max(errs.values())
    ok = worst <= 1e-7
    report(4, "W invariant under G -> G + P y", ok,
           f"P in {{alpha, beta, alpha+2beta}}, 50 samples, max rel {worst:.1e} <= 1e-7")
    assert ok


@pytest.fixture(scope="module")
def theorem_report():
    return suites.suite_theorem(Settings(samples=50))


def test_05_forward_scenario(theorem_report):
    c = _checks(theorem_report)
    fwd, mink = c["forward_scalar_flag_and_weyl"], c["forward_locally_minkowskian"]
    d = fwd["details"]
    ok = (d["max_W"] <= 1e-9 and d["max_abs_K"] <= 1e-9
          and d["max_scalar_residual"] <= 1e-9 and mink["max_error"] <= 1e-9)
    report(5, "flat alpha + constant beta", ok,
           f"|W| {d['max_W']:.1e}, |K| {d['max_abs_K']:.1e}, residual "
           f"{d['max_scalar_residual']:.1e}, max |R| {mink['max_error']:.1e} "
           "(locally Minkowskian)")
    assert ok


def test_06_contrapositive_scenario(theorem_report):
    c = _checks(theorem_report)
    w1 = c["contrapositive_weyl_nonzero[non_killing]"]["max_error"]
    w2 = c["contrapositive_weyl_nonzero[killing_non_parallel]"]["max_error"]
    ok = w1 >= 1e-4 and w2 >= 1e-4
    report(6, "non-parallel beta on flat alpha", ok,
           f"max |W| non-Killing {w1:.2e}, Killing non-parallel {w2:.2e} >= 1e-4")
    assert ok


def test_07_contraction_oracle():
    con = suites.suite_contraction(Settings(samples=50))
    kil = suites.suite_killing(Settings(samples=50))
    c = _checks(con)
    assembled = [v for k, v in c.items() if not k.startswith("vertical_trace[")]
    vert = [v for k, v in c.items() if k.startswith("vertical_trace[")]
    worst = max(v["max_error"] for v in assembled + vert)
    printed = max(v["details"]["printed_max_rel_error"] for v in vert)
    needed = min(min(v["details"]["reverted_max_rel_error"].values()) for v in vert)
    k = _checks(kil, "specialization_")
    kworst = max(v["max_error"] for v in k.values())
    ok = (all(v["status"] != "fail" for v in con.checks + kil.checks)
          and all(v["samples"] == 50 for v in assembled) and worst <= 1e-6
          and kworst <= 1e-8)
    errata = any(v["status"] == "erratum" for v in con.checks + kil.checks)
    report(7, "contraction formulas vs direct curvature", ok,
           f"max rel {worst:.1e} <= 1e-6 over 2 pairs x 50 samples; printed vertical "
           f"trace off by {printed:.1f}, explained by 6 errata, each needed (>= "
           f"{needed:.1e}); Killing reduction max {kworst:.1e} <= 1e-8", erratum=errata)
    # per-term report for the mismatching closed form
    for v in vert:
        assert len(v["details"]["errata"]) == 6
    assert ok


def test_08_exact_symbolic():
    rep = suites.suite_symbolic(Settings())
    c = _checks(rep)
    lem = c["coprimality_lemma"]["details"]
    f_ok = all(c[f"f{i}_expansion"]["status"] == "pass" for i in (1, 2, 3, 4))
    red = c["quadratic_reduction"]
    ok = (rep.status != "fail" and lem["random_all_coprime"] and f_ok
          and c["killing_V_identity"]["status"] == "pass"
          and red["status"] == "erratum"
          and red["details"]["diffs"][0]["computed"] == "16(1+2B)^5(5+4B)/9"
          and c["parity_split"]["status"] == "pass")
    deg = lem["degenerate"]
    report(8, "exact polynomial identities", ok,
           f"degenerate B: pair1 {deg[1]}, pair2 {deg[2]}, pair3 {deg[3]}; 20 random B "
           "coprime; f1-f4 exact; V identity exact; reduction constant "
           "16(1+2B)^5(5+4B)/9 (printed (1+2B)^1); parity split exact",
           erratum=True)
    assert ok


def test_09_te7_coherence(theorem_report):
    c = _checks(theorem_report)
    flat, track = c["te7_vanishes_with_W"], c["te7_matches_bWb"]
    ok = flat["samples"] > 0 and flat["max_error"] <= 1e-6 and track["max_error"] <= 1e-6
    report(9, "contracted Weyl equation coherent", ok,
           f"{flat['samples']} samples with |W| <= 1e-8: residual {flat['max_error']:.1e}; "
           f"vs b W b everywhere {track['max_error']:.1e} <= 1e-6")
    assert ok


def _fd_grad(fn, x, h=1e-6):
    g = []
    for k in range(len(x)):
        e = np.zeros(len(x))
        e[k] = h
        g.append((fn(x + e) - fn(x - e)) / (2 * h))
    return np.array(g)


def _catalog_fields():
    for name, entry in ENTRIES.items():
        params = {"euclidean": {"n": 3}, "space_form": {"n": 3, "mu": -1.5},
                  "constant_oneform": {}, "linear_oneform":
                  {"n": 3, "M": [[0, 1, 0], [-1, 0, 0.5], [0.2, 0, 0]]},
                  "perturbed_metric": {"n": 3, "seed": 3, "eps": 0.2},
                  "perturbed_oneform": {"n": 3, "seed": 3, "eps": 0.15},
                  "hopf_oneform": {"c": 0.3}}[name]
        pair = entry.build(**params)
        for row in pair.metric.components:
            yield from row
        if pair.oneform is not None:
            yield from pair.oneform.components


def test_10_jet_engine():
    from finslerkit.fields import evaluate
    rng = np.random.default_rng(0)
    worst_fd = 0.0
    for e in _catalog_fields():
        for _ in range(3):
            x = rng.uniform(-0.3, 0.3, 3)
            j = eval_field(e, x, 1)
            fd = _fd_grad(lambda p: float(evaluate(e, list(p))), x)
            worst_fd = max(worst_fd, float(np.max(np.abs(j.gradient() - fd))
                                           / max(1.0, np.max(np.abs(fd)))))
    X = sp.symbols("x1:4")
    text = "3*x1^4*x2 - 2*x2^3*x3^2 + x1*x2*x3 - 7/3*x3^5 + 2"
    poly = sp.sympify(text.replace("^", "**"), locals=dict(zip(("x1", "x2", "x3"), X)))
    p = [0.3, -0.7, 1.1]
    j = eval_field(parse_expr(text, 3), p, 5)
    worst_poly = 0.0
    for a in range(6):
        for b in range(6 - a):
            for c in range(6 - a - b):
                want = float(sp.diff(poly, X[0], a, X[1], b, X[2], c)
                             .subs(dict(zip(X, p))))
                worst_poly = max(worst_poly, abs(j.partial((a, b, c)) - want)
                                 / max(1.0, abs(want)))
    ok = worst_fd <= 1e-5 and worst_poly <= 1e-10
    report(10, "jet derivatives", ok,
           f"catalog fields vs central differences {worst_fd:.1e} <= 1e-5; "
           f"polynomial partials to order 5 vs exact {worst_poly:.1e} <= 1e-10")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
