"""Jet-level diagnostics for groups of tangent-to-identity maps.

Every predicate here is a statement modulo degree ``N + 1``.  Several checks
multiply a truncated series by exactly known polynomial fields; in that case
the result is reliable beyond ``N`` and the functions say how far.
"""

import json
from dataclasses import dataclass, field

from .errors import DomainError
from .jet import INFINITE_ORDER, Jet2
from .lie import (VField2, bracket, commutator_diffeo, compose_diffeo, contact_order,
                  derive, exp_field, invert_diffeo, log_diffeo, wedge)
from .scalar import Scalar

__all__ = [
    "is_first_integral", "is_parallel", "proportionality_constant",
    "centralizer_form_check", "parallel_commutator_check", "CommutatorCascade",
    "sj_sequence", "derived_series_jet", "NormalFormGenerator", "normal_form_bracket",
    "commuting_criterion", "model_pair", "hyperbolic_pair",
]


def _finite(order):
    return None if order == INFINITE_ORDER else int(order)


def model_pair(trunc):
    """Commuting, non-parallel pair ``X = x^2 d/dx``, ``Y = y^2 d/dy``.

    First integrals of ``X`` are the series in ``y`` alone.
    """
    return VField2.parse("x^2", "0", trunc), VField2.parse("0", "y^2", trunc)


def hyperbolic_pair(trunc):
    """``X = u(x d/dx - y d/dy)`` and ``Y = u(x d/dx + y d/dy)`` with ``u = xy``.

    ``xy`` is a first integral of ``X`` but the pair does not commute:
    ``[X, Y] = -2 u X``.
    """
    return VField2.parse("x^2*y", "-x*y^2", trunc), VField2.parse("x^2*y", "x*y^2", trunc)


# -- predicates ------------------------------------------------------------------

def is_first_integral(h, X):
    """``dh . X == 0`` modulo degree ``N + 1``."""
    return not derive(X, h)


def is_parallel(Z, X, x_exact=False):
    """Whether ``Z ^ X`` vanishes.

    With ``x_exact`` the components of ``X`` are taken as exact polynomials,
    which makes the wedge reliable through degree ``N + ord(X)``.
    """
    if x_exact and X:
        top = Z.trunc + int(X.order())
        Z, X = Z.lift(top), X.lift(top)
    return not wedge(Z, X)


def proportionality_constant(b1, b2):
    """Scalar ``c`` with ``b1 == c * b2``, or None.  Both must be nonzero."""
    if not b1 or not b2:
        return None
    i, j, _, lead = b2.terms()[0]
    c = b1[(i, j)] / lead
    return c if b1 == b2.scale(c) else None


def centralizer_form_check(F, X, Y=None):
    """Test whether ``log F`` has the shape ``aX + bY`` with ``X(a) = X(b) = 0``.

    ``X`` and ``Y`` are treated as exact polynomial fields.  With ``Y`` the
    coefficients come from Cramer's rule: ``w = X^Y``, ``a = (Z^Y)/w``,
    ``b = (X^Z)/w`` and the first-integral tests are the cleared quotient
    rules ``w X(w1) - w1 X(w) = 0``.  Without ``Y`` only parallelism and the
    first-integral property of the ratio are checked.
    """
    if not F.tangent_to_identity:
        raise DomainError("centralizer check needs a tangent-to-identity map",
                          code="group_lab.not_tangent_to_identity")
    n = F.trunc
    Z = log_diffeo(F)
    ox = int(X.order()) if X else 0
    report = {"trunc": n, "generator_order": _finite(Z.order()),
              "commutes_with_exp_x": commutator_diffeo(F, exp_field(X)).is_identity()}
    if Y is None:
        top = n + ox
        Zl, Xl = Z.lift(top), X.lift(top)
        parallel = not wedge(Zl, Xl)
        # ratio h = Z_x / X_x (or the y analogue); X(h) = 0 after clearing
        num, den = (Zl.jx, Xl.jx) if Xl.jx else (Zl.jy, Xl.jy)
        top2 = top + int(den.order()) + ox - 1
        num, den, Xr = num.lift(top2), den.lift(top2), X.lift(top2)
        ratio_ok = not (den * derive(Xr, num) - num * derive(Xr, den)).truncate(top2)
        report.update({
            "parallel": parallel,
            "ratio_first_integral": parallel and ratio_ok,
            "member": parallel and ratio_ok,
            "reliable_degree": min(top, top2),
        })
        return report
    oy = int(Y.order())
    w0 = wedge(X, Y)
    if not w0:
        raise DomainError("X and Y are parallel modulo the truncation degree",
                          code="group_lab.parallel_pair")
    ow = int(w0.order())
    top = n + min(ox, oy) + ow + ox - 1
    Zl, Xl, Yl = Z.lift(top), X.lift(top), Y.lift(top)
    w = wedge(Xl, Yl)
    w1 = wedge(Zl, Yl)
    w2 = wedge(Xl, Zl)
    dw = derive(Xl, w)
    a_ok = not (w * derive(Xl, w1) - w1 * dw)
    b_ok = not (w * derive(Xl, w2) - w2 * dw)
    a = _exact_quotient(w1, w, n + oy)
    b = _exact_quotient(w2, w, n + ox)
    report.update({
        "a_first_integral": a_ok,
        "b_first_integral": b_ok,
        "member": a_ok and b_ok,
        "a": str(a) if a is not None else None,
        "b": str(b) if b is not None else None,
        "reliable_degree": top,
    })
    return report


def _exact_quotient(num, den, reliable):
    """``num / den`` when ``den`` is a single monomial dividing ``num``.

    The quotient is reported only through the degree where ``num`` is
    reliable, shifted down by the monomial degree.
    """
    if len(den.coeffs) != 1:
        return None
    (p, q), c = next(iter(den.coeffs.items()))
    out = {}
    for (i, j), v in num.coeffs.items():
        if i + j > reliable:
            continue
        if i < p or j < q:
            return None
        out[(i - p, j - q)] = v / c
    return Jet2(max(reliable - p - q, 0), out)


def parallel_commutator_check(a1, b1, a2, b2, X, Y):
    """Compare parallelism of ``log [F1, F2]`` with ``X`` against ``b1/b2`` constant.

    ``F_i = Exp(a_i X + b_i Y)``.  ``X`` is treated as an exact polynomial
    field, so the parallelism test reaches degree ``N + ord(X)``.
    """
    n = X.trunc
    problems = []
    if bracket(X, Y):
        problems.append("X and Y do not commute")
    if not wedge(X, Y):
        problems.append("X and Y are parallel")
    for name, h in (("a1", a1), ("b1", b1), ("a2", a2), ("b2", b2)):
        if not is_first_integral(h, X):
            problems.append(f"{name} is not a first integral of X")
    if not (b1 * b2):
        problems.append("b1*b2 vanishes")
    Z1 = X.scale(a1) + Y.scale(b1)
    Z2 = X.scale(a2) + Y.scale(b2)
    C = commutator_diffeo(exp_field(Z1), exp_field(Z2))
    W = log_diffeo(C)
    parallel = is_parallel(W, X, x_exact=True)
    ratio = proportionality_constant(b1, b2)
    return {
        "trunc": n,
        "preconditions_ok": not problems,
        "problems": problems,
        "commutator_identity": C.is_identity(),
        "commutator_generator_order": _finite(W.order()),
        "parallel": parallel,
        "ratio_constant": ratio is not None,
        "ratio": str(ratio) if ratio is not None else None,
        "equivalence_holds": parallel == (ratio is not None),
        "reliable_degree": n + int(X.order()),
    }


# -- commutator cascade ------------------------------------------------------------------

@dataclass
class CascadeLevel:
    elements: list
    min_contact: object
    degenerate: bool
    exact: bool
    overflow: bool = False
    skipped: int = 0

    def to_payload(self):
        return {
            "count": len(self.elements),
            "min_contact_order": _finite(self.min_contact),
            "degenerate": self.degenerate,
            "exact": self.exact,
            "overflow": self.overflow,
        }


@dataclass
class CommutatorCascade:
    """Levels ``S(0), S(1), ...`` with identity elements removed.

    ``degenerate`` means every commutator at that level is the identity
    modulo degree ``report_trunc + 1``; ``exact`` means it is the identity at
    every stored degree of the working truncation.
    """

    trunc: int
    report_trunc: int
    levels: list = field(default_factory=list)
    cap: int = 256

    @property
    def min_orders(self):
        return [lvl.min_contact for lvl in self.levels]

    def to_payload(self):
        return {
            "trunc": self.trunc,
            "report_trunc": self.report_trunc,
            "cap": self.cap,
            "levels": [dict(level=k, **lvl.to_payload()) for k, lvl in enumerate(self.levels)],
        }

    def to_json(self):
        return json.dumps(self.to_payload(), indent=2)


def _dedupe(maps):
    seen = {}
    for F in maps:
        seen.setdefault(F.key(), F)
    return list(seen.values())


def sj_sequence(generators, max_levels, report_trunc=None, cap=256):
    """Build ``S(j+1) = {[F1^±1, F2^±1] : F1 in S(j), F2 in S(j) or S(j-1)}``.

    Work happens at the generators' truncation ``M``; pass a smaller
    ``report_trunc`` to keep guard degrees.  Pairs whose contact orders add
    up past ``M + 1`` give the identity jet outright and are not composed.
    Generation of a level stops once ``cap`` distinct elements exist.
    """
    if max_levels is None or max_levels <= 0:
        raise ValueError("max_levels must be positive")
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator")
    m = gens[0].trunc
    if any(F.trunc != m for F in gens):
        raise ValueError("generators must share one truncation degree")
    if any(not F.tangent_to_identity for F in gens):
        raise DomainError("cascade generators must be tangent to the identity",
                          code="group_lab.not_tangent_to_identity")
    n = m if report_trunc is None else report_trunc
    if not 1 <= n <= m:
        raise ValueError("report_trunc must lie in [1, trunc]")

    def reduced(maps):
        return [F for F in _dedupe(maps) if not F.is_identity()]

    cascade = CommutatorCascade(trunc=m, report_trunc=n, cap=cap)
    level0 = reduced(gens)
    cascade.levels.append(_level(level0, n))
    prev, cur = [], level0
    inverse_cache = {}

    def inv(F):
        key = F.key()
        if key not in inverse_cache:
            inverse_cache[key] = invert_diffeo(F)
        return inverse_cache[key]

    for _ in range(max_levels):
        if not cur:
            break
        partners = _dedupe(cur + prev)
        found = {}
        skipped = 0
        overflow = False
        for F1 in cur:
            r = contact_order(F1)
            for F2 in partners:
                s = contact_order(F2)
                if r + s - 1 > m:
                    skipped += 4
                    continue
                for A in (F1, inv(F1)):
                    for B in (F2, inv(F2)):
                        C = _commutator_with(A, B, inv(A), inv(B))
                        if C.is_identity():
                            continue
                        found.setdefault(C.key(), C)
                if len(found) >= cap:
                    overflow = True
                    break
            if overflow:
                break
        nxt = list(found.values())[:cap]
        lvl = _level(nxt, n)
        lvl.overflow = overflow
        lvl.skipped = skipped
        cascade.levels.append(lvl)
        if lvl.degenerate:
            break
        prev, cur = cur, nxt
    return cascade


def _commutator_with(A, B, Ai, Bi):
    return compose_diffeo(compose_diffeo(A, B), compose_diffeo(Ai, Bi))


def _level(elements, report_trunc):
    orders = [contact_order(F) for F in elements]
    low = min(orders) if orders else INFINITE_ORDER
    return CascadeLevel(
        elements=elements,
        min_contact=low,
        degenerate=low > report_trunc,
        exact=not elements,
    )


# -- derived series and normal forms -------------------------------------------------------

def _commutes(F, G):
    return commutator_diffeo(F, G).is_identity()


def derived_series_jet(generators, depth):
    """Commutator closure by levels, with abelian/trivial flags per level.

    Level ``k + 1`` holds the commutators of level-``k`` elements (all sign
    choices) together with their conjugates by level-``k`` elements, which
    approximates the derived subgroup by a finite generating set.
    """
    if depth <= 0:
        raise ValueError("depth must be positive")
    cur = [F for F in _dedupe(generators) if not F.is_identity()]
    levels = []
    for k in range(depth + 1):
        abelian = all(_commutes(F, G) for i, F in enumerate(cur) for G in cur[i + 1:])
        levels.append({
            "level": k,
            "count": len(cur),
            "trivial": not cur,
            "abelian": abelian,
            "min_contact_order": _finite(min((contact_order(F) for F in cur),
                                             default=INFINITE_ORDER)),
        })
        if k == depth or not cur:
            break
        inverses = {F.key(): invert_diffeo(F) for F in cur}
        comms = []
        for i, F in enumerate(cur):
            for G in cur[i + 1:]:
                for A in (F, inverses[F.key()]):
                    for B in (G, inverses[G.key()]):
                        comms.append(commutator_diffeo(A, B))
        comms = [C for C in _dedupe(comms) if not C.is_identity()]
        conj = []
        for C in comms:
            for F in cur:
                            conj.append(compose_diffeo(compose_diffeo(F, C), inverses[F.key()]))
        cur = [C for C in _dedupe(comms + conj) if not C.is_identity()]
    return {"depth": depth, "levels": levels}


@dataclass(frozen=True)
class NormalFormGenerator:
    """Generator ``a X + alpha fbar Y`` with ``a`` a first integral of ``X``."""

    a: Jet2
    alpha: Scalar

    def field(self, X, Y, fbar):
        return X.scale(self.a) + Y.scale(fbar.scale(self.alpha))


def _check_decomposition(d, X):
    if not isinstance(d, NormalFormGenerator):
        raise ValueError("expected a NormalFormGenerator")
    if d.a.trunc != X.trunc:
        raise ValueError("decomposition truncation does not match the fields")
    if not is_first_integral(d.a, X):
        raise ValueError("coefficient a is not a first integral of X")


def normal_form_bracket(di, dj, X, Y, fbar):
    """``fbar * Y(alpha_i a_j - alpha_j a_i) * X`` and its cross-check.

    Returns ``(field, matches)`` where ``matches`` compares against the
    bracket of the assembled fields.
    """
    _check_decomposition(di, X)
    _check_decomposition(dj, X)
    c = dj.a.scale(di.alpha) - di.a.scale(dj.alpha)
    formula = X.scale(fbar * derive(Y, c))
    direct = bracket(di.field(X, Y, fbar), dj.field(X, Y, fbar))
    return formula, formula == direct


def commuting_criterion(decomps, X, Y, fbar):
    """For every ordered pair, test ``alpha_i a_j - alpha_j a_i`` constant.

    Each entry also records whether the exponentials commute modulo degree
    ``N + 1`` and whether the two answers agree.
    """
    maps = [exp_field(d.field(X, Y, fbar)) for d in decomps]
    for d in decomps:
        _check_decomposition(d, X)
    pairs = []
    for i, di in enumerate(decomps):
        for j, dj in enumerate(decomps):
            if i == j:
                continue
            c = dj.a.scale(di.alpha) - di.a.scale(dj.alpha)
            constant = not (c - Jet2.const(c.constant_term(), c.trunc))
            commute = _commutes(maps[i], maps[j])
            pairs.append({"i": i, "j": j, "constant": constant,
                          "commute": commute, "agree": constant == commute})
    return {"pairs": pairs, "all_agree": all(p["agree"] for p in pairs)}
