import csv
import io
import json
import math

import numpy as np
import pytest

from holodyn.orbits import (FamilyF, FamilyH, GeneralPoly, SaddleNode, boundary_iteration_scan,
                            cascade_estimate_check, classify_ball, classify_points,
                            commutator_estimate_check, invariant_circle_scan, iterate_orbit,
                            map_from_text, polar_grid, random_tangent_pair, saddle_orbit_law)

TAU = 2j * math.pi
IDENTITY = GeneralPoly.from_dicts({(1, 0): 1}, {(0, 1): 1})


def seeds(n, radius, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        v = rng.normal(size=4)
        v *= radius * rng.random() ** 0.25 / np.linalg.norm(v)
        out.append((complex(v[0], v[1]), complex(v[2], v[3])))
    return out


def test_axis_point_is_fixed():
    rec = iterate_orbit(SaddleNode(), (0, 0.3), 0.5, 50)
    assert rec.status == "period-detected(1)" and rec.label == "P"
    assert all(p == (0, 0.3) for p in rec.forward)


def test_saddle_escape_step_matches_closed_form():
    x0 = y0 = 0.1
    n = 0
    while True:
        x = x0 + (n + 1) * x0 * x0 * y0
        y = x0 * x0 * y0 / (x * x)
        if abs(x) ** 2 + abs(y) ** 2 > 0.25:
            break
        n += 1
    rec = iterate_orbit(SaddleNode(), (x0, y0), 0.5, 10_000)
    assert rec.mu_forward == n == 399
    assert rec.forward_exit and rec.backward_exit and rec.status == "escaped-both"


def test_saddle_orbit_law():
    assert saddle_orbit_law(seeds(30, 0.5, 1)) <= 1e-9


def test_stored_points_stay_in_ball():
    rec = iterate_orbit(SaddleNode(), (0.2, 0.1), 0.5, 10_000)
    assert all(abs(x) ** 2 + abs(y) ** 2 <= 0.25 for x, y in rec.forward + rec.backward)


@pytest.mark.parametrize("m", [FamilyF((1.0, 0.5j)), FamilyH((TAU,))])
def test_families_preserve_xy(m):
    x0, y0 = 0.2 + 0.1j, 0.15 - 0.05j
    rec = iterate_orbit(m, (x0, y0), 10.0, 10_000)
    u0 = x0 * y0
    assert all(abs(x * y - u0) <= 1e-9 * abs(u0) for x, y in rec.forward + rec.backward)


@pytest.mark.parametrize("m", [SaddleNode(), FamilyF((1.0, 2.0)), FamilyH((TAU, 1.0)),
                               GeneralPoly.from_dicts({(1, 0): 1, (1, 1): 0.3, (0, 2): 1j},
                                                      {(0, 1): 1, (2, 0): -0.5})])
def test_backward_inverts_forward(m):
    pts = np.array(seeds(20, 0.3, 2))
    x, y = m.forward(pts[:, 0], pts[:, 1])
    bx, by = m.backward(x, y)
    assert np.allclose(bx, pts[:, 0], atol=1e-11) and np.allclose(by, pts[:, 1], atol=1e-11)


def test_family_h_generic_seed_escapes():
    rec = iterate_orbit(FamilyH((TAU,)), (0.1 + 0.05j, 0.12 - 0.03j), 0.3, 100_000)
    assert rec.status == "escaped-both"


def test_nonzero_f0_required():
    with pytest.raises(ValueError):
        FamilyF((0.0, 1.0))
    with pytest.raises(ValueError):
        FamilyH(())


def test_seed_validation():
    with pytest.raises(ValueError):
        iterate_orbit(SaddleNode(), (1.0, 0), 0.5, 10)
    with pytest.raises(ValueError):
        iterate_orbit(SaddleNode(), (0.1, 0), 0.5, 0)


def test_pole_flag():
    # backward step divides by 1 - xy
    rec = iterate_orbit(SaddleNode(), (1.0, 1.0), 2.0, 10)
    assert rec.pole


def test_polar_grid_avoids_axes():
    pts = polar_grid(0.5, 8)
    r = np.sqrt(np.abs(pts[:, 0]) ** 2 + np.abs(pts[:, 1]) ** 2)
    assert pts.shape == (64, 2) and r.max() <= 0.5 + 1e-15 and r.min() >= 0.125 - 1e-15
    assert np.all(np.abs(pts[:, 0]) > 0) and np.all(np.abs(pts[:, 1]) > 0)


@pytest.mark.parametrize("grid", [2, 5])
def test_classification_partitions(grid):
    res = classify_ball(SaddleNode(), 0.5, grid, 200)
    counts = res.counts()
    assert sum(counts.values()) == grid * grid == len(res.labels)


def test_classification_monotone_in_budget():
    m = FamilyH((TAU,))
    small = classify_ball(m, 0.3, 8, 500)
    large = classify_ball(m, 0.3, 8, 5000)
    assert np.all(large.labels[small.labels == "F"] == "F")
    assert large.counts()["F"] >= small.counts()["F"]


def test_saddle_classification_all_finite():
    assert classify_ball(SaddleNode(), 0.5, 16, 100_000).counts() == {"P": 0, "F": 256, "I": 0}


def test_invariant_curve_seeds_do_not_escape():
    circles = invariant_circle_scan((1.0,), rays=6)
    pts = [(np.sqrt(c["C"]), c["C"] / np.sqrt(c["C"])) for c in circles]
    res = classify_points(FamilyF((1.0,)), pts, 3.0, 5000)
    assert set(res.labels) <= {"P", "I"}


def test_circle_scan_f1():
    found = invariant_circle_scan((1.0,))
    assert found
    for rec in found:
        c = rec["C"]
        assert abs(c) > 1e-12
        assert abs(abs(1 + c) - 1) <= 1e-12 and rec["residual"] <= 1e-12
        assert rec["drift"] <= 1e-9


def test_circle_scan_tau():
    found = invariant_circle_scan((TAU,), r_max=0.5)
    assert found
    for rec in found:
        c = rec["C"]
        assert abs(abs(1 + c * TAU) - 1) <= 1e-12 and rec["drift"] <= 1e-9


def test_circle_scan_empty_range():
    assert invariant_circle_scan((1.0,), 1e-6, 1e-3, rays=4) == []


def test_estimate_identity():
    rep = commutator_estimate_check(IDENTITY, IDENTITY, 1.0, 0.1, 0.2, 100)
    assert rep["lhs_max"] == 0 and rep["rhs"] == 0 and rep["inequality_ok"]


def test_estimate_small_quadratic_pair():
    eps = 1e-3
    F1 = GeneralPoly.from_dicts({(1, 0): 1, (2, 0): eps}, {(0, 1): 1})
    F2 = GeneralPoly.from_dicts({(1, 0): 1}, {(0, 1): 1, (0, 2): eps})
    rep = commutator_estimate_check(F1, F2, 1.0, 4 * eps, 8 * eps, 1000)
    assert rep["inequality_ok"]
    # the inverses move boundary points by eps + O(eps^2), just past delta/4
    assert set(rep["violations"]) <= {"F1^-1", "F2^-1"}


@pytest.mark.parametrize("seed", range(3))
def test_estimate_random_pairs(seed):
    F1, F2 = random_tangent_pair(seed)
    rep = commutator_estimate_check(F1, F2, 1.0, 0.05, 0.1, 500, seed=seed)
    assert rep["precondition_ok"] and rep["inequality_ok"]
    assert json.loads(json.dumps(rep))["worst_ratio"] <= 1


def test_estimate_parameter_checks():
    with pytest.raises(ValueError):
        commutator_estimate_check(IDENTITY, IDENTITY, 1.0, 0.1, 0.3, 10)
    with pytest.raises(ValueError):
        commutator_estimate_check(IDENTITY, IDENTITY, 0.5, 0.1, 0.2, 10)


def test_cascade_levels():
    g1 = GeneralPoly.from_dicts({(1, 0): 1, (1, 1): 1, (0, 2): 0.5j}, {(0, 1): 1, (2, 0): -1})
    g2 = GeneralPoly.from_dicts({(1, 0): 1, (0, 3): 1}, {(0, 1): 1, (1, 2): 2})
    rep = cascade_estimate_check([g1, g2], levels=4, samples=64, per_level=8)
    assert rep["ok"] and len(rep["levels"]) == 4
    assert rep["levels"][0]["candidates"] == 8 and not rep["levels"][0]["sampled"]
    assert rep["generator_sup"] <= rep["delta"] / 4


def test_boundary_scan_identity():
    rep = boundary_iteration_scan(IDENTITY, 0.5, 8, 50)
    assert all(r["capped_fraction"] == 1.0 for r in rep["refinements"])


def test_boundary_scan_saddle_grows_with_budget():
    a = boundary_iteration_scan(SaddleNode(), 0.5, 8, 100, refinements=1)
    b = boundary_iteration_scan(SaddleNode(), 0.5, 8, 1000, refinements=1)
    assert b["growth"][0] > a["growth"][0]


def test_boundary_scan_circles_reach_budget():
    rep = boundary_iteration_scan(FamilyF((1.0,)), 0.5, 8, 500)
    assert rep["growth"][-1] == 500


def test_boundary_scan_grid_check():
    with pytest.raises(ValueError):
        boundary_iteration_scan(SaddleNode(), 0.5, 4, 10)


def test_csv_and_json_outputs():
    res = classify_ball(SaddleNode(), 0.5, 3, 100)
    rows = list(csv.DictReader(io.StringIO(res.to_csv())))
    assert len(rows) == 9
    assert set(rows[0]) == {"x_re", "x_im", "y_re", "y_im", "status", "mu_forward",
                            "mu_backward", "period"}
    summary = json.loads(res.to_json())
    assert summary["budget"] == 100 and sum(summary["counts"].values()) == 9


def test_map_from_text():
    assert isinstance(map_from_text("saddle"), SaddleNode)
    assert map_from_text("F:1,2").f == (1, 2)
    assert map_from_text("H:tau").f == (TAU,)
    with pytest.raises(ValueError):
        map_from_text("Q:1")
