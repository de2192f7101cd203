#!/usr/bin/env python3
"""Print distortion budgets A(2t) / (4 sinh(eps3/2)) over a small grid of
triangulation numbers and Margulis parameters, then a candidate-target
report for a modest domination budget."""

from fractions import Fraction

from glueprint.seifert_arithmetic import (
    DominationBudget,
    distortion_budget,
    enumerate_targets,
)


def main():
    print("distortion budgets (interval midpoints):")
    print(f"{'t':>3} {'eps3':>6} {'A(2t) pi coeff':>16} {'budget':>16}")
    for t in (1, 2, 3):
        for eps3 in (Fraction(1, 10), Fraction(1, 4), Fraction(1, 2)):
            bound = distortion_budget(DominationBudget(t=t, h=1, eps3=eps3))
            mid = (bound.value_lo + bound.value_hi) / 2
            print(f"{t:>3} {str(eps3):>6} {str(bound.area_coefficient):>16} {float(mid):>16.4g}")

    print("\ncandidate targets for d = 2, torsion inputs (2, 2), sv = 2:")
    budget = DominationBudget(
        t=1, h=2, d=2, h1_mod_d_order=2, tor_order=2, sv_m=Fraction(2), lens_cap=10
    )
    report = enumerate_targets(budget)
    print(f"  torsion cap {report.torsion_cap}")
    print(f"  lens orders ({report.lens_flag}): {list(report.lens_orders)}")
    print(f"  platonic: {len(report.platonic)}")
    print(f"  prism ({report.prism_flag}): {len(report.prism)}")
    print(f"  chi = 0: {len(report.chi_zero)}")
    print(f"  chi < 0 ({report.chi_negative_flag}): {len(report.chi_negative)}")
    for s in report.chi_zero[:5]:
        print(f"    ({s.g}; {s.b0}" + "".join(f", {b}/{a}" for a, b in s.pairs) + ")")


if __name__ == "__main__":
    main()
