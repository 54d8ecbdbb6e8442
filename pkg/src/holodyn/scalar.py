"""Exact scalars in Q(i)(tau).

``tau`` is a transcendental symbol standing for 2*pi*i.  A :class:`Scalar` is a
reduced fraction num/den of polynomials in ``tau`` whose coefficients are
Gaussian rationals.  Polynomials are tuples of ``(re, im)`` pairs of
``gmpy2.mpq`` ordered by increasing power of ``tau``; the denominator is kept
monic so that equal values have equal representations.
"""

import cmath
from fractions import Fraction
from numbers import Integral, Rational

from gmpy2 import mpq

__all__ = ["Scalar", "TAU", "I", "ZERO", "ONE", "TAU_VALUE", "as_scalar"]

TAU_VALUE = 2j * cmath.pi

_Q0 = mpq(0)
_Q1 = mpq(1)
_G0 = (_Q0, _Q0)
_G1 = (_Q1, _Q0)
_P1 = (_G1,)


# -- Gaussian rationals -----------------------------------------------------

def _gmul(a, b):
    ar, ai = a
    br, bi = b
    if not ai and not bi:
        return (ar * br, _Q0)
    return (ar * br - ai * bi, ar * bi + ai * br)


def _ginv(a):
    ar, ai = a
    if not ai:
        return (1 / ar, _Q0)
    n = ar * ar + ai * ai
    return (ar / n, -ai / n)


def _gneg(a):
    return (-a[0], -a[1])


# -- polynomials in tau over Q(i) ---------------------------------------------

def _trim(p):
    n = len(p)
    while n and not (p[n - 1][0] or p[n - 1][1]):
        n -= 1
    return tuple(p[:n])


def _padd(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for k, b in enumerate(q):
        a = out[k]
        out[k] = (a[0] + b[0], a[1] + b[1])
    return _trim(out)


def _pneg(p):
    return tuple((-a[0], -a[1]) for a in p)


def _psub(p, q):
    return _padd(p, _pneg(q))


def _pmul(p, q):
    if not p or not q:
        return ()
    if len(p) == 1 and len(q) == 1:
        return (_gmul(p[0], q[0]),)
    out = [[_Q0, _Q0] for _ in range(len(p) + len(q) - 1)]
    for i, a in enumerate(p):
        if not (a[0] or a[1]):
            continue
        for j, b in enumerate(q):
            c = _gmul(a, b)
            slot = out[i + j]
            slot[0] += c[0]
            slot[1] += c[1]
    return _trim([tuple(s) for s in out])


def _pscale(p, g):
    if not (g[0] or g[1]):
        return ()
    return tuple(_gmul(a, g) for a in p)


def _pdivmod(p, q):
    """Euclidean division over Q(i); ``q`` must be nonzero."""
    inv = _ginv(q[-1])
    rem = list(p)
    dq = len(q) - 1
    if len(rem) - 1 < dq:
        return (), _trim(rem)
    quot = [_G0] * (len(rem) - dq)
    for k in range(len(rem) - 1, dq - 1, -1):
        c = rem[k]
        if not (c[0] or c[1]):
            continue
        f = _gmul(c, inv)
        quot[k - dq] = f
        for m, b in enumerate(q):
            t = _gmul(f, b)
            r = rem[k - dq + m]
            rem[k - dq + m] = (r[0] - t[0], r[1] - t[1])
    return _trim(quot), _trim(rem[:dq])


def _pmonic(p):
    lead = p[-1]
    if lead == _G1:
        return p
    return _pscale(p, _ginv(lead))


def _valuation(p):
    for k, a in enumerate(p):
        if a[0] or a[1]:
            return k
    return len(p)


def _is_monomial(p):
    return all(not (a[0] or a[1]) for a in p[:-1])


def _pgcd(p, q):
    if _is_monomial(q):
        k = min(len(q) - 1, _valuation(p))
        return (_G0,) * k + (_G1,)
    while q:
        p, q = q, _pdivmod(p, q)[1]
    return _pmonic(p)


def _geval(a):
    return complex(float(a[0]), float(a[1]))


def _peval(p, z):
    acc = 0j
    for a in reversed(p):
        acc = acc * z + _geval(a)
    return acc


# -- formatting -----------------------------------------------------------------

def _fmt_q(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_gauss(a):
    re, im = a
    if not im:
        return _fmt_q(re)
    mag = "i" if abs(im) == 1 else f"{_fmt_q(abs(im))}*i"
    if not re:
        return "-" + mag if im < 0 else mag
    sign = "-" if im < 0 else "+"
    return f"{_fmt_q(re)}{sign}{mag}"


def _fmt_poly(p):
    if not p:
        return "0"
    out = ""
    for k, a in enumerate(p):
        if not (a[0] or a[1]):
            continue
        g = _fmt_gauss(a)
        if a[0] and a[1]:
            g = f"({g})"
        if k:
            power = "tau" if k == 1 else f"tau^{k}"
            g = power if g == "1" else "-" + power if g == "-1" else f"{g}*{power}"
        if not out:
            out = g
        elif g.startswith("-"):
            out += " - " + g[1:]
        else:
            out += " + " + g
    return out


class Scalar:
    """Element of Q(i)(tau), immutable and hashable."""

    __slots__ = ("num", "den")

    def __new__(cls, value=0):
        if isinstance(value, Scalar):
            return value
        if isinstance(value, str):
            from .parsing import parse_scalar
            return parse_scalar(value)
        num = _coerce_poly(value)
        if num is None:
            raise TypeError(f"cannot build an exact Scalar from {value!r}")
        return cls._make(num, _P1)

    @classmethod
    def _make(cls, num, den):
        self = object.__new__(cls)
        self.num = num
        self.den = den
        return self

    @classmethod
    def from_polys(cls, num, den=_P1):
        """Build from raw coefficient tuples, reducing num/den."""
        num = _trim(tuple((mpq(a[0]), mpq(a[1])) for a in num))
        den = _trim(tuple((mpq(a[0]), mpq(a[1])) for a in den))
        if not den:
            raise ZeroDivisionError("zero denominator")
        return _reduce(num, den)

    @classmethod
    def gauss(cls, re, im=0):
        return cls._make(_trim(((mpq(re), mpq(im)),)), _P1)

    # -- predicates ------------------------------------------------------

    def __bool__(self):
        return bool(self.num)

    @property
    def is_polynomial(self):
        return self.den == _P1

    @property
    def is_constant(self):
        """True when free of tau (an element of Q(i))."""
        return self.den == _P1 and len(self.num) <= 1

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Scalar):
            other = _coerce(other)
            if other is None:
                return NotImplemented
        if self.den == _P1 and other.den == _P1:
            return Scalar._make(_padd(self.num, other.num), _P1)
        if self.den == other.den:
            return _reduce(_padd(self.num, other.num), self.den)
        return _reduce(_padd(_pmul(self.num, other.den), _pmul(other.num, self.den)),
                       _pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return Scalar._make(_pneg(self.num), self.den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            other = _coerce(other)
            if other is None:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            other = _coerce(other)
            if other is None:
                return NotImplemented
        if not self.num or not other.num:
            return ZERO
        if self.den == _P1 and other.den == _P1:
            return Scalar._make(_pmul(self.num, other.num), _P1)
        return _reduce(_pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("Scalar division by zero")
        return _reduce(self.den, self.num)

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            other = _coerce(other)
            if other is None:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, Integral):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison / hashing ---------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            other = _coerce(other)
            if other is None:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self.den == _P1 and len(self.num) <= 1 and (not self.num or not self.num[0][1]):
            return hash(self.num[0][0]) if self.num else 0
        return hash((self.num, self.den))

    # -- numeric -------------------------------------------------------------

    def evaluate(self, tau=TAU_VALUE):
        """Complex value after substituting ``tau`` (default 2*pi*i)."""
        return _peval(self.num, tau) / _peval(self.den, tau)

    def __complex__(self):
        return self.evaluate()

    def coefficient(self, k):
        """Gaussian-rational coefficient of tau**k of a polynomial Scalar."""
        if self.den != _P1:
            raise ValueError("coefficient() needs a polynomial Scalar")
        if k >= len(self.num):
            return ZERO
        return Scalar._make(_trim((self.num[k],)), _P1)

    # -- text ------------------------------------------------------------------

    def num_str(self):
        return _fmt_poly(self.num)

    def den_str(self):
        return _fmt_poly(self.den)

    def __str__(self):
        if self.den == _P1:
            return _fmt_poly(self.num)
        num = _fmt_poly(self.num)
        if len(self.num) > 1 or " " in num:
            num = f"({num})"
        return f"{num}/({_fmt_poly(self.den)})"

    def __repr__(self):
        return f"Scalar('{self}')"


def _coerce_poly(value):
    if isinstance(value, Integral):
        return _trim(((mpq(int(value)), _Q0),))
    if isinstance(value, (Rational, Fraction)) or type(value).__name__ == "mpq":
        return _trim(((mpq(value.numerator, value.denominator), _Q0),))
    return None


def _coerce(value):
    num = _coerce_poly(value)
    if num is None:
        return None
    return Scalar._make(num, _P1)


def _reduce(num, den):
    if not num:
        return ZERO
    if den == _P1:
        return Scalar._make(num, _P1)
    if len(den) > 1:
        g = _pgcd(num, den)
        if len(g) > 1:
            num = _pdivmod(num, g)[0]
            den = _pdivmod(den, g)[0]
    lead = den[-1]
    if lead != _G1:
        inv = _ginv(lead)
        num = _pscale(num, inv)
        den = _pscale(den, inv)
    return Scalar._make(num, den)


def as_scalar(value):
    """Coerce ints, rationals, strings and Scalars to :class:`Scalar`."""
    return Scalar(value)


ZERO = Scalar._make((), _P1)
ONE = Scalar._make(_P1, _P1)
I = Scalar._make(((_Q0, _Q1),), _P1)
TAU = Scalar._make((_G0, _G1), _P1)
