"""Matsumoto metrics on flat alpha: a constant one-form gives vanishing Weyl
curvature and zero flag curvature, non-parallel one-forms do not."""

from finslerkit import suites
from finslerkit.suites import Settings

if __name__ == "__main__":
    st = Settings(samples=20)
    for name, pair in suites.theorem_scenarios().items():
        scan = suites.curvature_scan(pair, st, 20)
        print(f"{name:28s} max|W| {max(scan['W']):.2e}  max|R| {max(scan['R']):.2e}")
    print()
    rep = suites.suite_theorem(st)
    for c in rep.checks:
        print(f"{c['status']:7s} {c['name']}")
