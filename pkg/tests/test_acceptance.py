"""Acceptance suite.  Each test prints one PASS/FAIL line, also under capture.

Run on its own with ``python3 tests/test_acceptance.py``.
"""

import json
import math
import time
from importlib import resources

import numpy as np
import pytest

from holodyn import (Jet2, NormalFormGenerator, Scalar, TAU, bracket, commutator_diffeo,
                     commuting_criterion, contact_order, derived_series_jet,
                     dicritical_check, exp_field, holonomy_jet, log_diffeo, model_pair,
                     normal_form_bracket, parallel_commutator_check, structural_form,
                     xy_invariance_check)
from holodyn.lie import from_json, operator_commutator
from holodyn.orbits import (FamilyH, GeneralPoly, SaddleNode, cascade_estimate_check,
                            classify_ball, commutator_estimate_check, invariant_circle_scan,
                            random_tangent_pair, saddle_orbit_law)
from holodyn.randoms import make_rng, random_field, random_tangent_diffeo

N = 8


@pytest.fixture
def report(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {k:2d}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def test_exp_log_bijection(report):
    rng = make_rng(101)
    start = time.perf_counter()
    bad = 0
    for k in range(50):
        F = random_tangent_diffeo(rng, N, 2 + k % 3)
        X = random_field(rng, N, 2)
        bad += exp_field(log_diffeo(F)) != F
        bad += log_diffeo(exp_field(X)) != X
    elapsed = time.perf_counter() - start
    report(1, bad == 0 and elapsed < 60, f"50 maps + 50 fields, {bad} failures, {elapsed:.1f}s")


def _commuting_pair(rng, X, Y, k):
    if k % 2:
        a, b, c, d = (Scalar(rng.randint(-3, 3)) for _ in range(4))
        return X.scale(Jet2.const(a, N)) + Y.scale(Jet2.const(b, N)), \
            X.scale(Jet2.const(c, N)) + Y.scale(Jet2.const(d, N))
    # multiples of X by first integrals of X
    return X.scale(_y_series(rng)), X.scale(_y_series(rng))


def _y_series(rng):
    coeffs = {(0, j): rng.randint(-3, 3) for j in range(4)}
    return Jet2(N, {k: Scalar(v) for k, v in coeffs.items() if v})


def test_commuting_criterion(report):
    rng = make_rng(202)
    X, Y = model_pair(N)
    mismatches, commuting = 0, 0
    cases = [_commuting_pair(rng, X, Y, k) for k in range(20)]
    cases += [(random_field(rng, N, 2), random_field(rng, N, 2)) for _ in range(20)]
    for A, B in cases:
        identity = commutator_diffeo(exp_field(A), exp_field(B)).is_identity()
        zero = not bracket(A, B)
        mismatches += identity != zero
        commuting += zero
    report(2, mismatches == 0 and commuting >= 20,
           f"40 pairs ({commuting} commuting), {mismatches} mismatches")


def test_order_bound_and_leading_term(report):
    rng = make_rng(303)
    bound_fail, lead_fail = 0, 0
    for k in range(50):
        r, s = 2 + k % 4, 2 + (k // 4) % 4
        F, G = random_tangent_diffeo(rng, N, r), random_tangent_diffeo(rng, N, s)
        bound_fail += contact_order(commutator_diffeo(F, G)) < r + s - 1
        B = bracket(log_diffeo(F), log_diffeo(G))
        if B:
            lead_fail += not (log_diffeo(operator_commutator(F, G)) - B).order() > B.order()
    report(3, bound_fail == 0 and lead_fail == 0,
           f"50 pairs, {bound_fail} order-bound failures, {lead_fail} leading-term failures")


def test_x2y_form_holonomy(report):
    F = holonomy_jet("x*(1 + x^2*y*z^3)", "y*(1 - x^2*y*z^3)", N)
    D = F.displacement()
    low = all(i + j > 3 for i, j in list(D.jx.coeffs) + list(D.jy.coeffs))
    form = structural_form(F, 2, 1)
    ok = (low and F.fx[(3, 1)] == -TAU and F.fy[(2, 2)] == TAU and form["matches"]
          and xy_invariance_check(F)["preserved"])
    report(4, ok, f"a31 = {F.fx[(3, 1)]}, b22 = {F.fy[(2, 2)]}, f(0) = {form['f0']}")


def test_radial_holonomy(report):
    F = holonomy_jet("x*(1 + x*y*z^2)", "y*(1 + x*y*z^2)", N)
    ok = F.fx[(2, 1)] == -TAU and F.fy[(1, 2)] == -TAU and dicritical_check(F)
    report(5, ok, f"a21 = {F.fx[(2, 1)]}, b12 = {F.fy[(1, 2)]}, dicritical = {dicritical_check(F)}")


def test_xy_form_holonomy(report):
    F = holonomy_jet("x*(1 + x*y*z^2)", "y*(1 - x*y*z^2)", N)
    form = structural_form(F, 1, 1)
    f0 = form["f0"].evaluate()
    ok = (form["matches"] and xy_invariance_check(F)["preserved"]
          and abs(abs(f0) - 2 * math.pi) <= 1e-10)
    report(6, ok, f"f(0) = {form['f0']} ~ {f0:.12g}")


def _ball_seeds(n, radius, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        v = rng.normal(size=4)
        v *= radius * rng.random() ** 0.25 / np.linalg.norm(v)
        out.append((complex(v[0], v[1]), complex(v[2], v[3])))
    return out


def test_saddle_node_orbits(report):
    err = saddle_orbit_law(_ball_seeds(100, 0.5, 7))
    counts = classify_ball(SaddleNode(), 0.5, 64, 100_000).counts()
    ok = err <= 1e-9 and counts["P"] == 0 and counts["I"] == 0
    report(7, ok, f"orbit law max rel error {err:.2e}, counts {counts}")


def test_invariant_circles(report):
    circles = invariant_circle_scan((1.0,), iterations=10_000)
    circ_ok = bool(circles) and all(
        abs(abs(1 + c["C"]) - 1) <= 1e-12 and c["drift"] <= 1e-9 for c in circles)
    counts = classify_ball(FamilyH((2j * math.pi,)), 0.3, 32, 100_000).counts()
    drift = max((c["drift"] for c in circles), default=math.nan)
    report(8, circ_ok and counts["I"] == 0,
           f"{len(circles)} circles, max drift {drift:.1e}; FamilyH counts {counts}")


def _packaged_generators():
    with resources.files("holodyn.data").joinpath("sj_generators.json").open() as fh:
        payloads = json.load(fh)["generators"]
    return [GeneralPoly.from_diffeo(from_json(json.dumps(p))) for p in payloads]


def test_displacement_estimates(report):
    pairs_ok = True
    worst = 0.0
    for seed in range(10):
        F1, F2 = random_tangent_pair(seed)
        rep = commutator_estimate_check(F1, F2, 1.0, 0.05, 0.1, 1000, seed=seed)
        pairs_ok &= rep["precondition_ok"] and rep["inequality_ok"]
        worst = max(worst, rep["worst_ratio"])
    cascade = cascade_estimate_check(_packaged_generators(), levels=5, delta=1 / 24)
    levels = len(cascade["levels"])
    report(9, pairs_ok and cascade["ok"] and levels == 5,
           f"10 pairs worst lhs/rhs {worst:.3f}; cascade {levels} levels ok={cascade['ok']}")


def J(text):
    return Jet2.parse(text, N)


PARALLEL_FIXTURES = [
    ("0", "1", "y", "3"),
    ("0", "y", "y", "y^2"),
    ("y", "1", "y", "1"),
    ("0", "1 + y", "y^2", "2 + 2*y"),
    ("0", "1", "0", "1 + y"),
    ("y", "1", "0", "y"),
]


def test_solvable_fixtures(report):
    X, Y = model_pair(N)
    series = derived_series_jet([exp_field(Y), exp_field(X.scale(J("y")))], 2)
    d1 = series["levels"][1]
    meta_ok = not d1["trivial"] and d1["abelian"]
    decomps = [NormalFormGenerator(J(a), Scalar(al)) for a, al in
               [("0", 1), ("y", 0), ("1", 0), ("1 + y", 2)]]
    nf_ok = all(normal_form_bracket(di, dj, X, Y, Jet2.one(N))[1]
                for di in decomps for dj in decomps)
    crit = commuting_criterion(decomps, X, Y, Jet2.one(N))
    crit_ok = len(crit["pairs"]) == 12 and crit["all_agree"]
    par = [parallel_commutator_check(J(a1), J(b1), J(a2), J(b2), X, Y)
           for a1, b1, a2, b2 in PARALLEL_FIXTURES]
    par_ok = all(p["preconditions_ok"] and p["equivalence_holds"] for p in par)
    report(10, meta_ok and nf_ok and crit_ok and par_ok,
           f"metabelian {meta_ok}, normal form {nf_ok}, 12 pairs {crit_ok}, 6 parallel {par_ok}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
