"""Compare the closed-form (alpha, beta) spray with the spray computed straight
from F, on flat, curved and Killing data."""

from finslerkit import suites
from finslerkit.suites import Settings

if __name__ == "__main__":
    rep = suites.suite_spray(Settings(samples=25, seed=7))
    for c in rep.checks:
        print(f"{c['status']:7s} {c['name']:40s} max rel {c['max_error']:.2e}")
    print("suite status:", rep.status)

    # curvature identities on the same data
    for name, pair in suites.spray_pairs().items():
        ry, hom, _ = suites.curvature_identities(pair, suites.matsumoto(), Settings())
        print(f"{name:16s} |R y| {ry:.1e}  2-homogeneity {hom:.1e}")
