"""Bivariate power series truncated at total degree N.

Coefficients are exact :class:`~holodyn.scalar.Scalar` values by default.
Any commutative ring element supporting ``+``, ``-``, ``*`` and truthiness
can be stored instead (complex doubles for numeric runs, quasi-polynomials
inside :mod:`holodyn.holonomy`).
"""

import json
import math
from fractions import Fraction
from numbers import Integral, Rational

from .errors import DomainError, TruncationError
from gmpy2 import mpq as _q

from .scalar import ONE, Scalar, ZERO

_ONE_POLY = ONE.num

__all__ = ["Jet2", "INFINITE_ORDER", "jet_compose"]

#: order of the zero jet; compares greater than every truncation degree
INFINITE_ORDER = math.inf


def _exact(c):
    if isinstance(c, Scalar):
        return c
    if isinstance(c, (Integral, Rational, Fraction)) or type(c).__name__ == "mpq":
        return Scalar(c)
    return c


class Jet2:
    """Sparse table ``{(i, j): coefficient}`` with ``i + j <= trunc``.

    Instances are immutable; absent entries are zero.
    """

    __slots__ = ("trunc", "coeffs", "_sorted", "_gauss")

    def __init__(self, trunc, coeffs=None):
        if not isinstance(trunc, Integral) or trunc < 0:
            raise ValueError(f"truncation degree must be a non-negative integer, got {trunc!r}")
        table = {}
        if coeffs:
            for (i, j), c in coeffs.items():
                if i < 0 or j < 0:
                    raise ValueError(f"negative exponent {(i, j)}")
                if i + j > trunc:
                    continue
                c = _exact(c)
                if c:
                    table[(i, j)] = c
        self.trunc = int(trunc)
        self.coeffs = table
        self._sorted = None
        self._gauss = None

    @classmethod
    def _raw(cls, trunc, table):
        self = object.__new__(cls)
        self.trunc = trunc
        self.coeffs = table
        self._sorted = None
        self._gauss = None
        return self

    # -- constructors ----------------------------------------------------------

    @classmethod
    def zero(cls, trunc):
        return cls._raw(trunc, {})

    @classmethod
    def const(cls, value, trunc):
        return cls(trunc, {(0, 0): value})

    @classmethod
    def one(cls, trunc):
        return cls._raw(trunc, {(0, 0): ONE})

    @classmethod
    def monomial(cls, i, j, trunc, coeff=1):
        return cls(trunc, {(i, j): coeff})

    @classmethod
    def x(cls, trunc):
        return cls.monomial(1, 0, trunc)

    @classmethod
    def y(cls, trunc):
        return cls.monomial(0, 1, trunc)

    @classmethod
    def parse(cls, text, trunc):
        """Parse an expression in ``x``, ``y`` (see :mod:`holodyn.parsing`)."""
        from .parsing import evaluate_expression
        value = evaluate_expression(text, {"x": cls.x(trunc), "y": cls.y(trunc)})
        if not isinstance(value, Jet2):
            value = cls.const(value, trunc)
        return value

    # -- inspection -------------------------------------------------------------

    def __bool__(self):
        return bool(self.coeffs)

    def __getitem__(self, ij):
        return self.coeffs.get(ij, ZERO)

    def get(self, ij, default=ZERO):
        return self.coeffs.get(ij, default)

    def terms(self):
        """List of ``(i, j, degree, coeff)`` sorted by degree."""
        if self._sorted is None:
            self._sorted = sorted(((i, j, i + j, c) for (i, j), c in self.coeffs.items()),
                                  key=lambda t: (t[2], t[0]))
        return self._sorted

    def _gauss_terms(self):
        """Sorted ``(i, j, d, re, im)`` when every coefficient is in Q(i), else False."""
        if self._gauss is None:
            out = []
            for i, j, d, c in self.terms():
                if not (isinstance(c, Scalar) and c.is_constant):
                    self._gauss = False
                    break
                re, im = c.num[0]
                out.append((i, j, d, re, im))
            else:
                self._gauss = out
        return self._gauss

    def order(self):
        """Degree of the lowest nonzero homogeneous component."""
        if not self.coeffs:
            return INFINITE_ORDER
        return min(i + j for i, j in self.coeffs)

    def degree(self):
        if not self.coeffs:
            return -1
        return max(i + j for i, j in self.coeffs)

    def homogeneous(self, d):
        return Jet2._raw(self.trunc, {k: c for k, c in self.coeffs.items() if k[0] + k[1] == d})

    def constant_term(self):
        return self.coeffs.get((0, 0), ZERO)

    def truncate(self, trunc):
        if trunc > self.trunc:
            raise TruncationError(f"cannot truncate a degree-{self.trunc} jet to {trunc}")
        return Jet2._raw(trunc, {k: c for k, c in self.coeffs.items() if k[0] + k[1] <= trunc})

    def lift(self, trunc):
        """Reinterpret the stored polynomial at a higher truncation degree.

        Only meaningful when the jet is known to be an exact polynomial.
        """
        if trunc < self.trunc:
            raise TruncationError(f"cannot lift a degree-{self.trunc} jet to {trunc}")
        return Jet2._raw(trunc, dict(self.coeffs))

    def with_trunc(self, trunc):
        return self.lift(trunc) if trunc >= self.trunc else self.truncate(trunc)

    # -- ring operations ----------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, Jet2):
            return False
        if other.trunc != self.trunc:
            raise TruncationError(
                f"truncation mismatch: {self.trunc} vs {other.trunc}")
        return True

    def __add__(self, other):
        if not self._check(other):
            if isinstance(other, Jet2):
                return NotImplemented
            other = Jet2.const(other, self.trunc)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            s = out.get(k)
            s = c if s is None else s + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return Jet2._raw(self.trunc, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet2._raw(self.trunc, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, Jet2):
            other = Jet2.const(other, self.trunc)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = _exact(c)
        if not c:
            return Jet2.zero(self.trunc)
        out = {}
        for k, v in self.coeffs.items():
            p = v * c
            if p:
                out[k] = p
        return Jet2._raw(self.trunc, out)

    def __mul__(self, other):
        if not self._check(other):
            return self.scale(other)
        n = self.trunc
        left_g = self._gauss_terms()
        right_g = other._gauss_terms() if left_g is not False else False
        if right_g is not False:
            return _gauss_product(n, left_g, right_g)
        acc = {}
        right = other.terms()
        for i1, j1, d1, c1 in self.terms():
            room = n - d1
            for i2, j2, d2, c2 in right:
                if d2 > room:
                    break
                key = (i1 + i2, j1 + j2)
                p = c1 * c2
                s = acc.get(key)
                acc[key] = p if s is None else s + p
        return Jet2._raw(n, {k: c for k, c in acc.items() if c})

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.inverse()
        return self.scale(_exact(1) / _exact(other) if not isinstance(other, complex)
                          else 1 / other)

    def __pow__(self, n):
        if not isinstance(n, Integral) or n < 0:
            raise ValueError("jet powers need a non-negative integer exponent")
        result = Jet2.one(self.trunc) if not self._numeric() else Jet2.const(1.0 + 0j, self.trunc)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def _numeric(self):
        return any(isinstance(c, complex) for c in self.coeffs.values())

    def inverse(self):
        """Multiplicative inverse of a jet with nonzero constant term."""
        c0 = self.constant_term()
        if not c0:
            raise DomainError("jet with zero constant term is not invertible",
                              code="coeff_jet.not_invertible")
        inv0 = 1 / c0
        rest = (self - Jet2.const(c0, self.trunc)).scale(inv0)
        # 1/(1+r) = sum (-r)^k, finite because order(r) >= 1
        term = Jet2.const(inv0, self.trunc)
        total = term
        neg = -rest
        for _ in range(self.trunc):
            term = term * neg
            if not term:
                break
            total = total + term
        return total

    # -- calculus -------------------------------------------------------------------

    def diff_x(self):
        return Jet2._raw(self.trunc, {(i - 1, j): c * i for (i, j), c in self.coeffs.items() if i})

    def diff_y(self):
        return Jet2._raw(self.trunc, {(i, j - 1): c * j for (i, j), c in self.coeffs.items() if j})

    def compose(self, u, v):
        """Substitute ``x -> u``, ``y -> v`` (see :func:`jet_compose`)."""
        return jet_compose(self, u, v)

    # -- numeric helpers ----------------------------------------------------------------

    def map_coeffs(self, fn):
        return Jet2(self.trunc, {k: fn(c) for k, c in self.coeffs.items()})

    def numeric(self):
        """Copy with complex-double coefficients (tau -> 2*pi*i)."""
        return Jet2._raw(self.trunc, {k: (c.evaluate() if isinstance(c, Scalar) else complex(c))
                                      for k, c in self.coeffs.items()})

    def evaluate(self, x, y):
        """Evaluate the stored polynomial numerically; works on numpy arrays."""
        total = 0
        for (i, j), c in self.coeffs.items():
            cv = c.evaluate() if isinstance(c, Scalar) else c
            total = total + cv * x ** i * y ** j
        return total

    # -- comparison ---------------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Jet2):
            return self.trunc == other.trunc and self.coeffs == other.coeffs
        if isinstance(other, (Integral, Scalar)):
            return self == Jet2.const(other, self.trunc)
        return NotImplemented

    def __hash__(self):
        return hash((self.trunc, frozenset(self.coeffs.items())))

    def key(self):
        """Canonical hashable key (used for deduplication)."""
        return (self.trunc, tuple((i, j, c) for i, j, _, c in self.terms()))

    # -- text / JSON --------------------------------------------------------------------

    def __str__(self):
        if not self.coeffs:
            return "0"
        out = ""
        for i, j, _, c in self.terms():
            mono = "*".join(s for s in (_power("x", i), _power("y", j)) if s)
            coef = str(c)
            if " " in coef:
                coef = f"({coef})"
            if not mono:
                term = coef
            elif coef in ("1", "-1"):
                term = mono if coef == "1" else "-" + mono
            else:
                term = f"{coef}*{mono}"
            if not out:
                out = term
            elif term.startswith("-"):
                out += " - " + term[1:]
            else:
                out += " + " + term
        return out

    def __repr__(self):
        return f"Jet2(trunc={self.trunc}, '{self}')"

    def to_payload(self):
        terms = []
        for i, j, _, c in self.terms():
            if not isinstance(c, Scalar):
                raise TypeError("only exact jets have a JSON form")
            terms.append({"i": i, "j": j, "num": c.num_str(), "den": c.den_str()})
        return {"trunc": self.trunc, "terms": terms}

    def to_json(self):
        return json.dumps(self.to_payload())

    @classmethod
    def from_payload(cls, payload):
        from .parsing import parse_scalar
        try:
            trunc = payload["trunc"]
            table = {}
            for t in payload["terms"]:
                table[(int(t["i"]), int(t["j"]))] = parse_scalar(t["num"]) / parse_scalar(t["den"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed jet payload: {exc}") from None
        return cls(trunc, table)

    @classmethod
    def from_json(cls, text):
        return cls.from_payload(json.loads(text))


# -- raw Gaussian-rational kernels ---------------------------------------------
# Terms are sorted lists of (i, j, degree, re, im) with gmpy2 rationals.

def _raw_mul(n, left, right):
    acc = {}
    for i1, j1, d1, r1, m1 in left:
        room = n - d1
        for i2, j2, d2, r2, m2 in right:
            if d2 > room:
                break
            key = (i1 + i2, j1 + j2)
            if m1 or m2:
                re = r1 * r2 - m1 * m2
                im = r1 * m2 + m1 * r2
            else:
                re = r1 * r2
                im = 0
            s = acc.get(key)
            if s is None:
                acc[key] = [re, im]
            else:
                s[0] += re
                s[1] += im
    return acc


def _raw_sorted(acc):
    out = [(i, j, i + j, v[0], v[1]) for (i, j), v in acc.items() if v[0] or v[1]]
    out.sort(key=lambda t: (t[2], t[0]))
    return out


def _raw_to_jet(n, terms):
    table = {}
    for i, j, _, re, im in terms:
        table[(i, j)] = Scalar._make(((_q(re), _q(im)),), _ONE_POLY)
    return Jet2._raw(n, table)


def _gauss_product(n, left, right):
    return _raw_to_jet(n, _raw_sorted(_raw_mul(n, left, right)))


def _gauss_compose(n, f, u, v):
    vpow = [[(0, 0, 0, _q(1), _q(0))]]
    jmax = max(t[1] for t in f)
    for _ in range(jmax):
        vpow.append(_raw_sorted(_raw_mul(n, vpow[-1], v)))
    rows = {}
    for i, j, _, re, im in f:
        rows.setdefault(i, []).append((j, re, im))
    # row i is later multiplied by u^i, so only degrees <= n - i matter
    result = []
    for i in range(max(rows), -1, -1):
        room = n - i
        acc = _raw_mul(room, result, u) if result else {}
        for j, re, im in rows.get(i, ()):
            for a, b, d, wr, wi in vpow[j]:
                if d > room:
                    break
                key = (a, b)
                if im or wi:
                    pr = re * wr - im * wi
                    pi = re * wi + im * wr
                else:
                    pr = re * wr
                    pi = 0
                s = acc.get(key)
                if s is None:
                    acc[key] = [pr, pi]
                else:
                    s[0] += pr
                    s[1] += pi
        result = _raw_sorted(acc)
    return _raw_to_jet(n, result)


def _power(name, k):
    if k == 0:
        return ""
    return name if k == 1 else f"{name}^{k}"


def jet_compose(f, u, v):
    """Return ``f(u, v)`` truncated at the shared degree.

    ``u`` and ``v`` must vanish at the origin, otherwise the substitution
    would need infinitely many terms of ``f``.
    """
    f._check(u)
    f._check(v)
    if u.constant_term() or v.constant_term():
        raise DomainError("composition needs substitutions without constant term",
                          code="coeff_jet.nonzero_constant")
    n = f.trunc
    if not f.coeffs:
        return Jet2.zero(n)
    gf = f._gauss_terms()
    if gf is not False:
        gu, gv = u._gauss_terms(), v._gauss_terms()
        if gu is not False and gv is not False:
            return _gauss_compose(n, gf, gu, gv)
    top = max(i for i, _ in f.coeffs)
    vpow = [Jet2.one(n)]
    jmax = max(j for _, j in f.coeffs)
    for _ in range(jmax):
        vpow.append(vpow[-1] * v)
    rows = {}
    for (i, j), c in f.coeffs.items():
        rows.setdefault(i, []).append((j, c))
    # Horner in u over the rows g_i(v) = sum_j c_ij v^j; row i is later
    # multiplied by u^i, so only degrees <= n - i matter
    result = None
    for i in range(top, -1, -1):
        room = n - i
        if result:
            result = result.lift(room) * u.truncate(room)
        else:
            result = Jet2.zero(room)
        row = rows.get(i)
        if row:
            acc = {}
            for j, c in row:
                for k, w in vpow[j].coeffs.items():
                    if k[0] + k[1] > room:
                        continue
                    p = c * w
                    s = acc.get(k)
                    acc[k] = p if s is None else s + p
            result = result + Jet2._raw(room, {k: w for k, w in acc.items() if w})
    return result
