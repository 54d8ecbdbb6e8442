"""Formal vector fields and diffeomorphisms of (C^2, 0) at finite jet order.

Everything here is exact at the stored truncation degree ``N``:

* ``derive`` and ``bracket`` of fields vanishing at the origin only need
  coefficients of degree ``< N`` to produce degree ``N``.
* ``exp_field`` and ``log_diffeo`` work degree by degree, so a jet of a
  tangent-to-identity map determines its generator's jet and conversely.
"""

import json

from .errors import DomainError, TruncationError
from .jet import Jet2, jet_compose
from .scalar import ONE, Scalar, ZERO

__all__ = [
    "VField2", "Diffeo2", "derive", "bracket", "exp_field", "log_diffeo",
    "compose_diffeo", "invert_diffeo", "commutator_diffeo", "operator_commutator",
    "contact_order",
    "pullback", "pushforward", "adjoint_series", "jacobian", "wedge",
    "from_payload", "from_json",
]


def _same_trunc(*jets):
    n = jets[0].trunc
    for j in jets[1:]:
        if j.trunc != n:
            raise TruncationError(f"truncation mismatch: {n} vs {j.trunc}")
    return n


class VField2:
    """Formal vector field ``jx * d/dx + jy * d/dy``."""

    __slots__ = ("jx", "jy", "_order")

    def __init__(self, jx, jy):
        _same_trunc(jx, jy)
        self.jx = jx
        self.jy = jy
        self._order = None

    @classmethod
    def zero(cls, trunc):
        return cls(Jet2.zero(trunc), Jet2.zero(trunc))

    @classmethod
    def parse(cls, ex, ey, trunc):
        return cls(Jet2.parse(ex, trunc), Jet2.parse(ey, trunc))

    @property
    def trunc(self):
        return self.jx.trunc

    def order(self):
        if self._order is None:
            self._order = min(self.jx.order(), self.jy.order())
        return self._order

    def __bool__(self):
        return bool(self.jx) or bool(self.jy)

    def __iter__(self):
        return iter((self.jx, self.jy))

    def __add__(self, other):
        return VField2(self.jx + other.jx, self.jy + other.jy)

    def __sub__(self, other):
        return VField2(self.jx - other.jx, self.jy - other.jy)

    def __neg__(self):
        return VField2(-self.jx, -self.jy)

    def scale(self, c):
        """Multiply by a constant or, when ``c`` is a jet, by a function."""
        if isinstance(c, Jet2):
            return VField2(c * self.jx, c * self.jy)
        return VField2(self.jx.scale(c), self.jy.scale(c))

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def truncate(self, trunc):
        return VField2(self.jx.truncate(trunc), self.jy.truncate(trunc))

    def lift(self, trunc):
        return VField2(self.jx.lift(trunc), self.jy.lift(trunc))

    def homogeneous(self, d):
        return VField2(self.jx.homogeneous(d), self.jy.homogeneous(d))

    def __eq__(self, other):
        if not isinstance(other, VField2):
            return NotImplemented
        return self.jx == other.jx and self.jy == other.jy

    def __hash__(self):
        return hash((self.jx, self.jy))

    def __repr__(self):
        return f"VField2(({self.jx}) d/dx + ({self.jy}) d/dy, N={self.trunc})"

    def to_payload(self):
        return {"kind": "vfield", "x": self.jx.to_payload(), "y": self.jy.to_payload()}

    def to_json(self):
        return json.dumps(self.to_payload())


class Diffeo2:
    """Formal map ``(x, y) -> (fx, fy)`` fixing the origin."""

    __slots__ = ("fx", "fy")

    def __init__(self, fx, fy):
        _same_trunc(fx, fy)
        if fx.constant_term() or fy.constant_term():
            raise DomainError("a diffeomorphism germ must fix the origin",
                              code="lie_calc.nonzero_constant")
        self.fx = fx
        self.fy = fy

    @classmethod
    def identity(cls, trunc):
        return cls(Jet2.x(trunc), Jet2.y(trunc))

    @classmethod
    def parse(cls, ex, ey, trunc):
        return cls(Jet2.parse(ex, trunc), Jet2.parse(ey, trunc))

    @property
    def trunc(self):
        return self.fx.trunc

    def linear_part(self):
        """Matrix ``[[dfx/dx, dfx/dy], [dfy/dx, dfy/dy]]`` at the origin."""
        return ((self.fx[(1, 0)], self.fx[(0, 1)]),
                (self.fy[(1, 0)], self.fy[(0, 1)]))

    @property
    def tangent_to_identity(self):
        return self.linear_part() == ((ONE, ZERO), (ZERO, ONE))

    def displacement(self):
        """``F - id`` as a pair of jets (wrapped in a VField2 for convenience)."""
        n = self.trunc
        return VField2(self.fx - Jet2.x(n), self.fy - Jet2.y(n))

    def is_identity(self):
        return not self.displacement()

    def __iter__(self):
        return iter((self.fx, self.fy))

    def __call__(self, u, v):
        """Substitute jets ``u``, ``v`` into the map."""
        return jet_compose(self.fx, u, v), jet_compose(self.fy, u, v)

    def truncate(self, trunc):
        return Diffeo2(self.fx.truncate(trunc), self.fy.truncate(trunc))

    def lift(self, trunc):
        return Diffeo2(self.fx.lift(trunc), self.fy.lift(trunc))

    def key(self):
        return (self.fx.key(), self.fy.key())

    def __eq__(self, other):
        if not isinstance(other, Diffeo2):
            return NotImplemented
        return self.fx == other.fx and self.fy == other.fy

    def __hash__(self):
        return hash((self.fx, self.fy))

    def __repr__(self):
        return f"Diffeo2(({self.fx}), ({self.fy}), N={self.trunc})"

    def numeric(self):
        return self.fx.numeric(), self.fy.numeric()

    def to_payload(self):
        return {"kind": "diffeo", "x": self.fx.to_payload(), "y": self.fy.to_payload()}

    def to_json(self):
        return json.dumps(self.to_payload())


def from_payload(payload):
    """Rebuild a VField2 or Diffeo2 from its tagged payload."""
    kind = payload.get("kind") if isinstance(payload, dict) else None
    if kind not in ("vfield", "diffeo"):
        raise ValueError(f"unknown payload kind {kind!r}")
    jx = Jet2.from_payload(payload["x"])
    jy = Jet2.from_payload(payload["y"])
    return VField2(jx, jy) if kind == "vfield" else Diffeo2(jx, jy)


def from_json(text):
    return from_payload(json.loads(text))


# -- derivations and brackets ---------------------------------------------------

def derive(X, h):
    """Directional derivative ``dh . X``."""
    _same_trunc(X.jx, h)
    out = Jet2.zero(h.trunc)
    if X.jx:
        out = out + h.diff_x() * X.jx
    if X.jy:
        out = out + h.diff_y() * X.jy
    return out


def bracket(X, Y):
    """Lie bracket ``[X, Y] = XY - YX`` as derivations."""
    _same_trunc(X.jx, Y.jx)
    return VField2(derive(X, Y.jx) - derive(Y, X.jx),
                   derive(X, Y.jy) - derive(Y, X.jy))


def wedge(X, Y):
    """Determinant ``X_x Y_y - X_y Y_x``."""
    return X.jx * Y.jy - X.jy * Y.jx


# -- exponential and logarithm ----------------------------------------------------

def _flow_series(X, h, t):
    """``sum_j t^j/j! X^j h``; terminates since X raises order."""
    total = h
    term = h
    j = 0
    while True:
        j += 1
        term = derive(X, term)
        if not term:
            return total
        term = term.scale(t / j)
        total = total + term


def exp_field(X, t=ONE):
    """Time-``t`` map of ``X``, computed from the Lie series."""
    if not isinstance(t, Scalar) and not isinstance(t, complex):
        t = Scalar(t)
    if not X or not t:
        return Diffeo2.identity(X.trunc)
    if X.order() < 2:
        raise DomainError("exp_field needs a field of order at least 2",
                          code="lie_calc.order_too_low")
    n = X.trunc
    return Diffeo2(_flow_series(X, Jet2.x(n), t), _flow_series(X, Jet2.y(n), t))


def log_diffeo(F):
    """Infinitesimal generator of a tangent-to-identity map.

    Built one degree at a time: if ``Z`` matches ``log F`` below degree
    ``m + 1`` then ``F - Exp(Z)`` starts in degree ``m + 1`` and its
    leading part is exactly the missing component of the generator.
    """
    if not F.tangent_to_identity:
        raise DomainError("log_diffeo needs a map tangent to the identity",
                          code="lie_calc.not_tangent_to_identity")
    n = F.trunc
    zx, zy = {}, {}
    for d in range(2, n + 1):
        Z = VField2(Jet2._raw(d, dict(zx)), Jet2._raw(d, dict(zy)))
        E = exp_field(Z)
        gap_x = F.fx.truncate(d) - E.fx
        gap_y = F.fy.truncate(d) - E.fy
        for (i, j), c in gap_x.coeffs.items():
            if i + j == d:
                zx[(i, j)] = c
        for (i, j), c in gap_y.coeffs.items():
            if i + j == d:
                zy[(i, j)] = c
    return VField2(Jet2._raw(n, zx), Jet2._raw(n, zy))


# -- group operations ---------------------------------------------------------------

def compose_diffeo(F, G):
    """``F o G``."""
    _same_trunc(F.fx, G.fx)
    return Diffeo2(*F(G.fx, G.fy))


def _inverse_matrix(m):
    (a, b), (c, d) = m
    det = a * d - b * c
    if not det:
        raise DomainError("linear part is not invertible", code="lie_calc.singular_linear_part")
    inv = 1 / det
    return ((d * inv, -b * inv), (-c * inv, a * inv))


def _apply_matrix(m, u, v):
    (a, b), (c, d) = m
    return u.scale(a) + v.scale(b), u.scale(c) + v.scale(d)


def invert_diffeo(F):
    """Compositional inverse, by fixed-point iteration on degrees.

    Writing ``F = L + P`` with ``L`` linear, the inverse solves
    ``G = L^-1 (id - P o G)``; each pass fixes one more degree.
    """
    n = F.trunc
    lin = F.linear_part()
    linv = _inverse_matrix(lin)
    x, y = Jet2.x(n), Jet2.y(n)
    lx, ly = _apply_matrix(lin, x, y)
    px, py = F.fx - lx, F.fy - ly
    gx, gy = _apply_matrix(linv, x, y)
    if not px and not py:
        return Diffeo2(gx, gy)
    for _ in range(n):
        rx = x - jet_compose(px, gx, gy)
        ry = y - jet_compose(py, gx, gy)
        nx, ny = _apply_matrix(linv, rx, ry)
        if nx == gx and ny == gy:
            break
        gx, gy = nx, ny
    return Diffeo2(gx, gy)


def commutator_diffeo(F, G):
    """``F o G o F^-1 o G^-1``."""
    inner = compose_diffeo(invert_diffeo(F), invert_diffeo(G))
    return compose_diffeo(compose_diffeo(F, G), inner)


def operator_commutator(F, G):
    """``G^-1 o F^-1 o G o F``, the commutator taken in pullback-operator order.

    Pullback reverses composition (``(F o G)^* = G^* F^*``), so this is the
    map whose pullback is ``F^* G^* (F^*)^-1 (G^*)^-1``.  Its generator
    starts with ``+[log F, log G]``, while that of :func:`commutator_diffeo`
    starts with ``-[log F, log G]``.
    """
    return compose_diffeo(compose_diffeo(invert_diffeo(G), invert_diffeo(F)), compose_diffeo(G, F))


def contact_order(F):
    """Order of ``F - id``; infinite for the identity jet."""
    return F.displacement().order()


# -- transport of fields ---------------------------------------------------------------

def jacobian(F):
    return ((F.fx.diff_x(), F.fx.diff_y()), (F.fy.diff_x(), F.fy.diff_y()))


def pullback(F, Z):
    """``F^* Z = DF^-1 (Z o F)``, the field ``G`` with ``F_* G = Z``.

    Exact at the stored degree when ``Z`` vanishes at the origin, since the
    unreliable top-degree part of ``DF`` is multiplied by ``Z o F``.
    """
    _same_trunc(F.fx, Z.jx)
    zx = jet_compose(Z.jx, F.fx, F.fy)
    zy = jet_compose(Z.jy, F.fx, F.fy)
    (a, b), (c, d) = jacobian(F)
    det = a * d - b * c
    if not det.constant_term():
        raise DomainError("map is not invertible at the origin",
                          code="lie_calc.singular_linear_part")
    inv = det.inverse()
    return VField2((d * zx - b * zy) * inv, (a * zy - c * zx) * inv)


def pushforward(F, Z):
    """``F_* Z = (DF . Z) o F^-1``."""
    return pullback(invert_diffeo(F), Z)


def adjoint_series(W, Z, sign=1):
    """``sum_k (sign ad_W)^k Z / k!`` with ``ad_W Z = [W, Z]``."""
    if W.order() < 2 and W:
        raise DomainError("adjoint series needs a field of order at least 2",
                          code="lie_calc.order_too_low")
    total = Z
    term = Z
    k = 0
    while True:
        k += 1
        term = bracket(W, term)
        if not term:
            return total
        term = term.scale(Scalar(sign) / k)
        total = total + term

