"""Holonomy of the z-axis for fields ``A d/dx + B d/dy + C d/dz``.

Along the loop ``z = exp(tau t)``, ``t`` in ``[0, 1]``, the leaf equations
become ``dx/dt = s A(x, y, z)``, ``dy/dt = s B(x, y, z)`` with a constant
``s`` fixed by the choice of ``C``:

=============  ==========  ===========================================
convention     ``C``       ``s``
=============  ==========  ===========================================
``minus_z``    ``-z``      ``-tau``
``z``          ``z``       ``tau``
``tau_z``      ``tau z``   ``1`` (time-one map of ``A, B`` when z-free)
=============  ==========  ===========================================

Writing ``x(t) = sum a_ij(t) x0^i y0^j`` (same for ``y`` with ``b_ij``), each
coefficient solves a linear ODE whose forcing only involves coefficients of
lower total degree, so the whole table is filled exactly by
:func:`~holodyn.quasipoly.qp_solve_linear`.
"""

from dataclasses import dataclass

from .errors import DomainError
from .jet import Jet2
from .lie import Diffeo2
from .quasipoly import QuasiPoly, qp_solve_linear
from .scalar import ONE, Scalar, TAU, ZERO

__all__ = ["PolyXYZ", "HolonomyResult", "holonomy_table", "holonomy_jet",
           "residual_check", "xy_invariance_check", "dicritical_check", "structural_form",
           "CONVENTIONS"]

CONVENTIONS = {"minus_z": -TAU, "z": TAU, "tau_z": ONE}


class PolyXYZ:
    """Polynomial in ``x, y, z`` stored as ``{(p, q, k): Scalar}``."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {key: Scalar(c) for key, c in (terms or {}).items() if c}

    @classmethod
    def var(cls, name):
        return cls({{"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}[name]: 1})

    @classmethod
    def parse(cls, text):
        from .parsing import evaluate_expression
        names = {v: cls.var(v) for v in "xyz"}
        value = evaluate_expression(text, names)
        return value if isinstance(value, PolyXYZ) else cls({(0, 0, 0): value})

    def _coerce(self, other):
        if isinstance(other, PolyXYZ):
            return other
        return PolyXYZ({(0, 0, 0): other})

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = out.get(key, ZERO) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        res = PolyXYZ()
        res.terms = out
        return res

    __radd__ = __add__

    def __neg__(self):
        return PolyXYZ({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        out = PolyXYZ()
        for (p1, q1, k1), c1 in self.terms.items():
            for (p2, q2, k2), c2 in other.terms.items():
                out = out + PolyXYZ({(p1 + p2, q1 + q2, k1 + k2): c1 * c2})
        return out

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers of polynomials are not allowed")
        out = PolyXYZ({(0, 0, 0): 1})
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, PolyXYZ) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (p, q, k), c in sorted(self.terms.items()):
            mono = "*".join(f"{v}^{e}" if e > 1 else v
                            for v, e in (("x", p), ("y", q), ("z", k)) if e)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


@dataclass
class HolonomyResult:
    holonomy: Diffeo2
    a: dict
    b: dict
    convention: str
    scale: Scalar

    def verify(self, A, B):
        """Exact ODE residual check of every solved coefficient."""
        return _residuals(self, A, B) == []


def _split_linear(P, var):
    """Return ``(lambda, nonlinear terms)`` with ``P = lambda * var + ...``."""
    lam = ZERO
    rest = {}
    for (p, q, k), c in P.terms.items():
        d = p + q
        if d == 0:
            raise DomainError("A and B must vanish along the z-axis",
                              code="holonomy.nonzero_constant")
        if d == 1:
            if (p, q) != var or k:
                raise DomainError("linear part must be diagonal and independent of z",
                                  code="holonomy.unsupported_linear_part")
            lam = c
        else:
            rest[(p, q, k)] = c
    return lam, rest


def _evaluate_nonlinear(terms, xs, ys, d):
    """Degree-``d`` coefficients of ``sum c x^p y^q z^k`` on quasi-polynomial jets."""
    out = {}
    xpow, ypow = {0: Jet2.const(QuasiPoly.const(1), d)}, {0: Jet2.const(QuasiPoly.const(1), d)}
    for (p, q, k), c in terms.items():
        if p + q > d:
            continue
        for e, cache, base in ((p, xpow, xs), (q, ypow, ys)):
            top = max(cache)
            while top < e:
                cache[top + 1] = cache[top] * base
                top += 1
        prod = xpow[p] * ypow[q]
        factor = QuasiPoly.exp(k, c)
        for (i, j), v in prod.coeffs.items():
            if i + j == d:
                s = out.get((i, j))
                term = v * factor
                out[(i, j)] = term if s is None else s + term
    return out


def holonomy_table(A, B, trunc, convention="minus_z"):
    """Solve for all ``a_ij``, ``b_ij`` with ``i + j <= trunc``."""
    if isinstance(A, str):
        A = PolyXYZ.parse(A)
    if isinstance(B, str):
        B = PolyXYZ.parse(B)
    if trunc < 1:
        raise DomainError("truncation degree must be at least 1", code="holonomy.truncation")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    s = CONVENTIONS[convention]
    lam_x, rest_a = _split_linear(A, (1, 0))
    lam_y, rest_b = _split_linear(B, (0, 1))
    mu_x, mu_y = s * lam_x, s * lam_y
    a = {(1, 0): qp_solve_linear(1, QuasiPoly(), ONE, mu_x)}
    b = {(0, 1): qp_solve_linear(1, QuasiPoly(), ONE, mu_y)}
    for d in range(2, trunc + 1):
        xs = Jet2._raw(d, {k: v for k, v in a.items() if v})
        ys = Jet2._raw(d, {k: v for k, v in b.items() if v})
        fa = _evaluate_nonlinear(rest_a, xs, ys, d)
        fb = _evaluate_nonlinear(rest_b, xs, ys, d)
        for i in range(d, -1, -1):
            key = (i, d - i)
            a[key] = qp_solve_linear(1, fa.get(key, QuasiPoly()) * s, ZERO, mu_x)
            b[key] = qp_solve_linear(1, fb.get(key, QuasiPoly()) * s, ZERO, mu_y)
    fx = Jet2(trunc, {k: v.at_one() for k, v in a.items()})
    fy = Jet2(trunc, {k: v.at_one() for k, v in b.items()})
    return HolonomyResult(Diffeo2(fx, fy), a, b, convention, s)


def holonomy_jet(A, B, trunc, convention="minus_z"):
    """Jet of the holonomy map as a :class:`~holodyn.lie.Diffeo2`."""
    return holonomy_table(A, B, trunc, convention).holonomy


def _residuals(result, A, B):
    """Coefficients whose ODE or initial condition fails, as a list of keys."""
    s = result.scale
    trunc = result.holonomy.trunc
    xs = Jet2(trunc, result.a)
    ys = Jet2(trunc, result.b)
    bad = []
    for P, table, tag in ((A, result.a, "a"), (B, result.b, "b")):
        rhs = Jet2.zero(trunc)
        for (p, q, k), c in P.terms.items():
            rhs = rhs + (xs ** p) * (ys ** q) * QuasiPoly.exp(k, c)
        for key, coef in table.items():
            want = 1 if key == ((1, 0) if tag == "a" else (0, 1)) else 0
            lhs = coef.derivative()
            if lhs != rhs.get(key, QuasiPoly()) * s or coef.at_zero() != want:
                bad.append((tag, key))
    return bad


def residual_check(result, A, B):
    if isinstance(A, str):
        A = PolyXYZ.parse(A)
    if isinstance(B, str):
        B = PolyXYZ.parse(B)
    return _residuals(result, A, B)


# -- structural checks on the resulting map -------------------------------------------

def xy_invariance_check(F):
    """Whether ``fx * fy == xy`` modulo degree ``N + 1``."""
    n = F.trunc
    gap = F.fx * F.fy - Jet2.monomial(1, 1, n)
    terms = gap.terms()
    first = None
    if terms:
        i, j, _, c = terms[0]
        first = {"i": i, "j": j, "value": str(c)}
    return {"preserved": not terms, "first_failure": first}


def dicritical_check(F):
    """Lowest homogeneous part of ``F - id`` is ``g * (x, y)`` for some jet ``g``.

    The identity map is reported as not dicritical.
    """
    D = F.displacement()
    d = D.order()
    if d == float("inf"):
        return False
    top = max(F.trunc, int(d) + 1)
    P, Q = D.jx.homogeneous(d).lift(top), D.jy.homogeneous(d).lift(top)
    return P * Jet2.y(top) == Q * Jet2.x(top)


def _power_index(i, j, p, q):
    """``m >= 1`` with ``(i, j) = (1 + m p, m q)``, or None."""
    if p:
        m, r = divmod(i - 1, p)
        if r:
            return None
    elif i == 1 and q:
        m, r = divmod(j, q)
        if r:
            return None
    else:
        return None
    return m if m >= 1 and j == m * q else None


def structural_form(F, p, q):
    """Match ``F = (x (1 + u f(u)), y (1 + u f(u))^-1)`` with ``u = x^p y^q``.

    ``f`` is read off the first component; the second component is then
    recomputed from it and compared.  Only the coefficients of ``f`` that fit
    under the truncation are returned.
    """
    n = F.trunc
    disp = F.fx - Jet2.x(n)
    f = []
    step = p + q
    shape_ok = all(_power_index(i, j, p, q) is not None for i, j in disp.coeffs)
    kmax = (n - 1) // step
    for m in range(1, kmax + 1):
        f.append(disp[(1 + m * p, m * q)])
    u = Jet2.monomial(p, q, n)
    g = Jet2.one(n)
    upow = Jet2.one(n)
    for c in f:
        upow = upow * u
        g = g + upow.scale(c)
    second_ok = shape_ok and F.fy == Jet2.y(n) * g.inverse()
    return {
        "p": p,
        "q": q,
        "first_component_ok": shape_ok,
        "second_component_ok": second_ok,
        "matches": shape_ok and second_ok,
        "f": f,
        "f0": f[0] if f else None,
    }
