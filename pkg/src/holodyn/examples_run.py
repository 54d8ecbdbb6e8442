"""End-to-end reruns of the worked examples, as JSON-ready dictionaries.

Exact quantities are reported as strings; floating checks are reduced to
booleans and counts so that reports compare byte for byte.
"""

import math

import numpy as np

from .holonomy import dicritical_check, holonomy_jet, structural_form, xy_invariance_check
from .jet import Jet2
from .lie import Diffeo2, VField2, exp_field
from .scalar import TAU

__all__ = ["run_examples", "EXAMPLES", "saddle_node_jet", "EXAMPLE_FIELDS"]

N = 8

# (A, B) with C = -z; the z-axis is the separatrix whose holonomy is computed
EXAMPLE_FIELDS = {
    "xy_form": ("x*(1 + x*y*z^2)", "y*(1 - x*y*z^2)"),
    "x2y_form": ("x*(1 + x^2*y*z^3)", "y*(1 - x^2*y*z^3)"),
    "radial": ("x*(1 + x*y*z^2)", "y*(1 + x*y*z^2)"),
}


def saddle_node_jet(trunc=N):
    """Jet of ``(x + x^2 y, y (1 + xy)^-2)``."""
    x, y = Jet2.x(trunc), Jet2.y(trunc)
    w = (Jet2.one(trunc) + x * y).inverse()
    return Diffeo2(x + x * x * y, y * w * w)


def _first_difference(F, G):
    for name, a, b in (("x", F.fx, G.fx), ("y", F.fy, G.fy)):
        gap = (a - b).terms()
        if gap:
            i, j, _, c = gap[0]
            return {"component": name, "i": i, "j": j, "value": str(c)}
    return None


def circles():
    from .orbits import FamilyF, FamilyH, classify_ball, classify_points, invariant_circle_scan
    circles = invariant_circle_scan((1.0,))
    seeds = []
    for rec in circles:
        x = np.sqrt(rec["C"]) * 0.999
        seeds.append((x, rec["C"] / x))
    labels = classify_points(FamilyF((1.0,)), seeds, 3.0, 10_000).labels
    h = classify_ball(FamilyH((2j * math.pi,)), 0.3, 16, 100_000)
    return {
        "circles_f1": len(circles),
        "circle_residual_ok": all(r["residual"] <= 1e-12 for r in circles),
        "circle_drift_ok": all(r["drift"] <= 1e-9 for r in circles),
        "circle_seeds_not_finite": bool(all(lab in ("P", "I") for lab in labels)),
        "family_h_tau_counts": h.counts(),
    }


def saddle_node():
    from .orbits import SaddleNode, classify_ball, saddle_orbit_law
    phi = saddle_node_jet()
    Y = VField2.parse("x", "-y*(1 + x*y)", N)
    xyY = Y.scale(Jet2.monomial(1, 1, N))
    W = VField2.parse("x^2*y", "-2*x*y^2", N)
    rng = np.random.default_rng(3)
    seeds = []
    while len(seeds) < 100:
        v = rng.normal(size=4)
        v *= 0.5 * rng.random() ** 0.25 / np.linalg.norm(v)
        seeds.append((complex(v[0], v[1]), complex(v[2], v[3])))
    counts = classify_ball(SaddleNode(), 0.5, 64, 100_000).counts()
    return {
        "time_one_of_x2y_field_matches": exp_field(W) == phi,
        "time_one_of_xyY_matches": exp_field(xyY) == phi,
        "time_one_of_xyY_first_difference": _first_difference(exp_field(xyY), phi),
        "orbit_law_ok": saddle_orbit_law(seeds) <= 1e-9,
        "classification_counts": counts,
    }


def _holonomy(key):
    A, B = EXAMPLE_FIELDS[key]
    return holonomy_jet(A, B, N)


def _low_degrees_vanish(F, top):
    D = F.displacement()
    return all(i + j > top for i, j in list(D.jx.coeffs) + list(D.jy.coeffs))


def _form_report(F, p, q):
    form = structural_form(F, p, q)
    f0 = form["f0"]
    return {
        "matches": form["matches"],
        "f": [str(c) for c in form["f"]],
        "f0": str(f0),
        "abs_f0_is_2pi": abs(abs(f0.evaluate()) - 2 * math.pi) <= 1e-10,
    }


def xy_form():
    F = _holonomy("xy_form")
    return {
        "xy_preserved": xy_invariance_check(F)["preserved"],
        "structural_form_xy": _form_report(F, 1, 1),
        "f0_is_minus_tau": structural_form(F, 1, 1)["f0"] == -TAU,
    }


def x2y_form():
    F = _holonomy("x2y_form")
    return {
        "a31": str(F.fx[(3, 1)]),
        "b22": str(F.fy[(2, 2)]),
        "degrees_2_3_vanish": _low_degrees_vanish(F, 3),
        "xy_preserved": xy_invariance_check(F)["preserved"],
        "structural_form_x2y": _form_report(F, 2, 1),
    }


def radial():
    F = _holonomy("radial")
    return {
        "a21": str(F.fx[(2, 1)]),
        "b12": str(F.fy[(1, 2)]),
        "dicritical": dicritical_check(F),
        "xy_invariance": xy_invariance_check(F),
    }


EXAMPLES = {name: globals()[name] for name in
            ("circles", "saddle_node", "xy_form", "x2y_form", "radial")}


def run_examples(which=None):
    keys = which or list(EXAMPLES)
    unknown = [k for k in keys if k not in EXAMPLES]
    if unknown:
        raise ValueError(f"unknown examples: {', '.join(unknown)}")
    return {k: EXAMPLES[k]() for k in keys}
