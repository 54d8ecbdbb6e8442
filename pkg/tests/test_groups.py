import pytest

from holodyn import (Jet2, NormalFormGenerator, Scalar, VField2, bracket, commuting_criterion,
                     centralizer_form_check, compose_diffeo, contact_order, derived_series_jet,
                     exp_field, model_pair, normal_form_bracket, parallel_commutator_check,
                     sj_sequence)
from holodyn.errors import DomainError
from holodyn.groups import hyperbolic_pair, is_first_integral, is_parallel, proportionality_constant
from holodyn.randoms import make_rng, random_field, random_tangent_diffeo

N = 6


def J(text, n=N):
    return Jet2.parse(text, n)


def V(ex, ey, n=N):
    return VField2.parse(ex, ey, n)


@pytest.fixture
def pair():
    return model_pair(N)


def test_first_integral_examples():
    assert is_first_integral(J("x*y"), V("x^2*y", "-x*y^2"))
    assert not is_first_integral(J("x"), V("x^2", "0"))
    assert is_first_integral(J("x^2*y"), V("x*(x*y)", "-2*y*(x*y)"))


def test_parallel_examples():
    X = V("x^2 + x*y", "y^3 - x^2")
    assert is_parallel(X.scale(J("3 + x*y")), X)
    assert not is_parallel(V("0", "y^2"), V("x^2", "0"))
    X = random_field(make_rng(5), N)
    assert is_parallel(X.scale(J("x + y")), X)


def test_model_pair_commutes(pair):
    X, Y = pair
    assert not bracket(X, Y) and not is_parallel(X, Y)
    assert is_first_integral(J("y + y^3"), X)


def test_hyperbolic_pair_does_not_commute():
    X, Y = hyperbolic_pair(N)
    assert bracket(X, Y) == X.scale(J("-2*x*y"))
    assert is_first_integral(J("x*y"), X)


def test_proportionality_constant():
    assert proportionality_constant(J("3 + 3*y"), J("1 + y")) == 3
    assert proportionality_constant(J("y"), J("y^2")) is None
    assert proportionality_constant(Jet2.zero(N), J("y")) is None


@pytest.mark.parametrize("a, b, member", [
    ("1", "0", True),
    ("y", "y^2 + 3", True),
    ("x", "0", False),
    ("0", "1 + x", False),
])
def test_centralizer_with_pair(pair, a, b, member):
    X, Y = pair
    F = exp_field(X.scale(J(a)) + Y.scale(J(b)))
    report = centralizer_form_check(F, X, Y)
    assert report["member"] is member
    assert report["commutes_with_exp_x"] is member
    if a == "1":
        assert report["a"] == "1" and report["b"] == "0"


def test_centralizer_without_second_field(pair):
    X, Y = pair
    assert not centralizer_form_check(exp_field(Y), X)["member"]
    report = centralizer_form_check(exp_field(X.scale(J("1 + y^2"))), X)
    assert report["parallel"] and report["member"]
    report = centralizer_form_check(exp_field(X.scale(J("1 + x"))), X)
    assert report["parallel"] and not report["ratio_first_integral"]


def test_centralizer_errors(pair):
    X, _ = pair
    with pytest.raises(DomainError) as err:
        centralizer_form_check(exp_field(X), X, X.scale(J("1 + y")))
    assert err.value.code == "group_lab.parallel_pair"
    with pytest.raises(DomainError):
        centralizer_form_check(exp_field(X).__class__.parse("2*x", "y", N), X)


PARALLEL_FIXTURES = [
    # (a1, b1, a2, b2, ratio constant)
    ("0", "1", "y", "3", True),
    ("0", "y", "y", "y^2", False),
    ("y", "1", "y", "1", True),
    ("0", "1 + y", "y^2", "2 + 2*y", True),
    ("0", "1", "0", "1 + y", False),
    ("y", "1", "0", "y", False),
]


@pytest.mark.parametrize("a1, b1, a2, b2, constant", PARALLEL_FIXTURES)
def test_parallel_commutator_fixtures(pair, a1, b1, a2, b2, constant):
    X, Y = pair
    report = parallel_commutator_check(J(a1), J(b1), J(a2), J(b2), X, Y)
    assert report["preconditions_ok"], report["problems"]
    assert report["ratio_constant"] is constant
    assert report["parallel"] is constant
    assert report["equivalence_holds"]


def test_parallel_commutator_identity_case(pair):
    X, Y = pair
    report = parallel_commutator_check(J("y"), J("1"), J("y"), J("1"), X, Y)
    assert report["commutator_identity"] and report["ratio"] == "1"


def test_parallel_commutator_reports_problems(pair):
    X, Y = pair
    report = parallel_commutator_check(J("x"), J("1"), J("0"), J("0"), X, Y)
    assert not report["preconditions_ok"]
    assert "a1 is not a first integral of X" in report["problems"]
    assert "b1*b2 vanishes" in report["problems"]


def test_sj_commuting_generators(pair):
    X, _ = pair
    cascade = sj_sequence([exp_field(X), exp_field(X.scale(J("2")))], 3)
    assert len(cascade.levels) == 2
    assert cascade.levels[1].exact and cascade.levels[1].degenerate


def test_sj_first_integral_multiple(pair):
    X, _ = pair
    cascade = sj_sequence([exp_field(X), exp_field(X.scale(J("y")))], 3)
    assert cascade.levels[1].exact


def test_sj_random_pair_orders():
    rng = make_rng(7)
    gens = [random_tangent_diffeo(rng, 8, 2), random_tangent_diffeo(rng, 8, 3)]
    cascade = sj_sequence(gens, 6)
    orders = cascade.min_orders
    assert orders == sorted(orders) and len(set(orders)) == len(orders)
    for j in range(1, len(cascade.levels) - 1):
        here = cascade.levels[j].min_contact
        partner = min(here, cascade.levels[j - 1].min_contact)
        assert cascade.levels[j + 1].min_contact >= here + partner - 1
    payload = cascade.to_payload()
    assert payload["levels"][-1]["min_contact_order"] is None


def test_sj_per_pair_bound():
    rng = make_rng(3)
    gens = [random_tangent_diffeo(rng, 7, 2), random_tangent_diffeo(rng, 7, 2)]
    cascade = sj_sequence(gens, 2)
    level1 = cascade.levels[1]
    assert all(contact_order(F) >= 3 for F in level1.elements)


def test_sj_validation():
    with pytest.raises(ValueError):
        sj_sequence([exp_field(V("x^2", "0"))], 0)
    with pytest.raises(DomainError):
        sj_sequence([exp_field(V("x^2", "0")).__class__.parse("2*x", "y", N)], 2)


def test_sj_cap_sets_overflow():
    rng = make_rng(9)
    gens = [random_tangent_diffeo(rng, 6, 2) for _ in range(3)]
    cascade = sj_sequence(gens, 1, cap=4)
    assert cascade.levels[1].overflow and len(cascade.levels[1].elements) == 4


def test_first_integral_multiples_close_under_composition(pair):
    X, _ = pair
    a, b = J("y + 2*y^3"), J("1 - y^2")
    F = compose_diffeo(exp_field(X.scale(a)), exp_field(X.scale(b)))
    assert F == exp_field(X.scale(a + b))


def test_metabelian_fixture(pair):
    X, Y = pair
    series = derived_series_jet([exp_field(Y), exp_field(X.scale(J("y")))], 2)
    d1, d2 = series["levels"][1], series["levels"][2]
    assert not d1["trivial"] and d1["abelian"]
    assert d2["trivial"]


def test_single_generator_derived_series(pair):
    X, _ = pair
    series = derived_series_jet([exp_field(X)], 1)
    assert series["levels"][1]["trivial"]


NORMAL_FORM = [("0", 1), ("y", 0), ("1", 0), ("1 + y", 2)]


def _decomps():
    return [NormalFormGenerator(J(a), Scalar(alpha)) for a, alpha in NORMAL_FORM]


def test_normal_form_bracket(pair):
    X, Y = pair
    fbar = Jet2.one(N)
    ds = _decomps()
    for di in ds:
        for dj in ds:
            formula, matches = normal_form_bracket(di, dj, X, Y, fbar)
            assert matches


def test_normal_form_bracket_value(pair):
    X, Y = pair
    formula, _ = normal_form_bracket(*_decomps()[:2], X, Y, Jet2.one(N))
    # alpha_1 a_2 - alpha_2 a_1 = y, and Y(y) = y^2
    assert formula == X.scale(J("y^2"))


def test_commuting_criterion(pair):
    X, Y = pair
    out = commuting_criterion(_decomps(), X, Y, Jet2.one(N))
    assert len(out["pairs"]) == 12 and out["all_agree"]
    by_pair = {(p["i"], p["j"]): p for p in out["pairs"]}
    assert by_pair[(0, 2)]["constant"] and by_pair[(0, 2)]["commute"]
    assert not by_pair[(0, 1)]["constant"] and not by_pair[(0, 1)]["commute"]


def test_malformed_decomposition(pair):
    X, Y = pair
    bad = NormalFormGenerator(J("x"), Scalar(1))
    with pytest.raises(ValueError):
        normal_form_bracket(bad, _decomps()[0], X, Y, Jet2.one(N))
