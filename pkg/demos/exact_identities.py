"""Exact rational checks of the polynomial identities behind the Matsumoto
classification, including the places where the printed forms are off."""

from finslerkit import polyalg

if __name__ == "__main__":
    for which in (1, 2, 3, 4):
        print(f"coprimality pair {which}: degenerate at B in "
              f"{[str(b) for b in polyalg.degenerate_values(which)]}")
    print()
    for rec in polyalg.symbolic_report():
        print(f"{rec['status']:8s} {rec['identity']}")
        for d in rec.get("diffs", []):
            print(f"         printed  {d.get('printed')}")
            print(f"         computed {d.get('computed')}")
