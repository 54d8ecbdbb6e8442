"""Quasi-polynomials ``sum_k p_k(t) exp(k tau t)`` with exact coefficients.

``tau`` stands for 2*pi*i, so every exponential equals 1 at ``t = 1``.
"""

import cmath
from numbers import Integral

from .errors import DomainError
from .scalar import Scalar, TAU, TAU_VALUE, ZERO

__all__ = ["QuasiPoly", "qp_solve_linear"]


def _ptrim(p):
    n = len(p)
    while n and not p[n - 1]:
        n -= 1
    return tuple(p[:n])


def _padd(p, q):
    if len(p) < len(q):
        p, q = q, p
    return _ptrim([a + q[k] if k < len(q) else a for k, a in enumerate(p)])


def _pmul(p, q):
    if not p or not q:
        return ()
    out = [ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            if b:
                out[i + j] = out[i + j] + a * b
    return _ptrim(out)


def _pdiff(p):
    return _ptrim([p[k] * k for k in range(1, len(p))])


def _pscale(p, c):
    return _ptrim([a * c for a in p])


class QuasiPoly:
    """Immutable map ``frequency -> polynomial in t`` (tuple of Scalars)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        table = {}
        for k, p in (terms or {}).items():
            p = _ptrim(tuple(Scalar(c) for c in p))
            if p:
                table[int(k)] = p
        self.terms = table

    @classmethod
    def _raw(cls, table):
        self = object.__new__(cls)
        self.terms = table
        return self

    @classmethod
    def const(cls, c):
        return cls({0: (c,)})

    @classmethod
    def exp(cls, k, coeff=1):
        """``coeff * exp(k tau t)``."""
        return cls({k: (coeff,)})

    @classmethod
    def t(cls):
        return cls({0: (ZERO, Scalar(1))})

    def __bool__(self):
        return bool(self.terms)

    def _coerce(self, other):
        if isinstance(other, QuasiPoly):
            return other
        if isinstance(other, (Scalar, Integral)):
            return QuasiPoly.const(other) if other else QuasiPoly._raw({})
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for k, p in other.terms.items():
            q = _padd(out[k], p) if k in out else p
            if q:
                out[k] = q
            else:
                out.pop(k, None)
        return QuasiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return QuasiPoly._raw({k: tuple(-c for c in p) for k, p in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (Scalar, Integral)):
            if not other:
                return QuasiPoly._raw({})
            return QuasiPoly._raw({k: _pscale(p, other) for k, p in self.terms.items()})
        if not isinstance(other, QuasiPoly):
            return NotImplemented
        out = {}
        for k1, p1 in self.terms.items():
            for k2, p2 in other.terms.items():
                k = k1 + k2
                q = _pmul(p1, p2)
                q = _padd(out[k], q) if k in out else q
                if q:
                    out[k] = q
                else:
                    out.pop(k, None)
        return QuasiPoly._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (Scalar(1) / c)

    def __pow__(self, n):
        result = QuasiPoly.const(1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def derivative(self):
        """``d/dt``; ``exp(k tau t)`` contributes the factor ``k tau``."""
        out = {}
        for k, p in self.terms.items():
            q = _pdiff(p)
            if k:
                q = _padd(q, _pscale(p, TAU * k))
            if q:
                out[k] = q
        return QuasiPoly._raw(out)

    def at_zero(self):
        return sum((p[0] for p in self.terms.values()), ZERO)

    def at_one(self):
        """Value at ``t = 1`` using ``exp(k tau) = 1``."""
        return sum((c for p in self.terms.values() for c in p), ZERO)

    def evaluate(self, t):
        """Numeric value at real or complex ``t``."""
        total = 0j
        for k, p in self.terms.items():
            poly = 0j
            for c in reversed(p):
                poly = poly * t + c.evaluate()
            total += poly * cmath.exp(k * TAU_VALUE * t)
        return total

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms):
            poly = " + ".join(
                f"({c})" + ("" if m == 0 else "*t" if m == 1 else f"*t^{m}")
                for m, c in enumerate(self.terms[k]) if c)
            parts.append(f"[{poly}]" + ("" if k == 0 else f"*exp({k}*tau*t)"))
        return " + ".join(parts)

    def __repr__(self):
        return f"QuasiPoly({self})"


def qp_solve_linear(mu_freq, forcing, initial, mu_scale=TAU):
    """Solve ``a' = mu a + forcing`` with ``a(0) = initial``, ``mu = mu_freq * mu_scale``.

    ``mu`` must be an integer multiple of ``tau`` so that the homogeneous
    solution is itself a quasi-polynomial.  A forcing term at the resonant
    frequency is integrated directly, which raises its degree in ``t``.
    """
    mu = Scalar(mu_scale) * mu_freq
    m = mu / TAU
    if not m.is_constant or m.num and (m.num[0][1] or m.num[0][0].denominator != 1):
        raise DomainError(f"rate {mu} is not an integer multiple of tau",
                          code="holonomy.non_integer_rate")
    m = int(m.num[0][0]) if m else 0
    out = {}
    for k, p in forcing.terms.items():
        if k == m:
            q = _ptrim((ZERO,) + tuple(c / (j + 1) for j, c in enumerate(p)))
        else:
            lam = TAU * (k - m)
            q = [ZERO] * len(p)
            deriv = p
            sign = 1
            power = lam
            while deriv:
                for j, c in enumerate(deriv):
                    q[j] = q[j] + c * sign / power
                deriv = _pdiff(deriv)
                sign = -sign
                power = power * lam
            q = _ptrim(q)
        if q:
            out[k] = q
    particular = QuasiPoly._raw(out)
    homogeneous = Scalar(initial) - particular.at_zero()
    return particular + QuasiPoly.exp(m, homogeneous) if homogeneous else particular
