"""Print exact holonomy jets of the z-axis for three polynomial fields."""

from holodyn import dicritical_check, holonomy_jet, structural_form, xy_invariance_check

FIELDS = {
    "xy-preserving": ("x*(1 + x*y*z^2)", "y*(1 - x*y*z^2)", (1, 1)),
    "x^2 y form": ("x*(1 + x^2*y*z^3)", "y*(1 - x^2*y*z^3)", (2, 1)),
    "radial": ("x*(1 + x*y*z^2)", "y*(1 + x*y*z^2)", None),
}

for name, (A, B, pq) in FIELDS.items():
    F = holonomy_jet(A, B, 8)
    print(f"== {name}")
    print("  x ->", F.fx)
    print("  y ->", F.fy)
    print("  xy preserved:", xy_invariance_check(F)["preserved"])
    if pq:
        form = structural_form(F, *pq)
        print("  form matches:", form["matches"], " f =", [str(c) for c in form["f"]])
    else:
        print("  dicritical:", dicritical_check(F))
