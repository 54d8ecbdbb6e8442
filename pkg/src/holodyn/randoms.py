"""Seeded random jets, fields and maps for tests and demos."""

import random

from .jet import Jet2
from .lie import Diffeo2, VField2, exp_field
from .scalar import Scalar, TAU

__all__ = ["random_scalar", "random_jet", "random_field", "random_tangent_diffeo",
           "random_exp_diffeo", "make_rng"]


def random_scalar(rng, bound=3, tau_prob=0.0):
    """Small Gaussian integer, occasionally times a power of tau."""
    c = Scalar.gauss(rng.randint(-bound, bound), rng.randint(-bound, bound))
    if tau_prob and rng.random() < tau_prob:
        c = c * TAU ** rng.randint(-1, 1)
    return c


def random_jet(rng, trunc, min_order=0, density=0.5, bound=3, tau_prob=0.0, max_degree=None):
    top = trunc if max_degree is None else min(trunc, max_degree)
    table = {}
    for d in range(min_order, top + 1):
        for i in range(d + 1):
            if rng.random() < density:
                table[(i, d - i)] = random_scalar(rng, bound, tau_prob)
    return Jet2(trunc, table)


def random_field(rng, trunc, min_order=2, **kw):
    """Field whose components have order at least ``min_order``.

    The leading degree is forced to be nonzero so the field has exactly
    that order.
    """
    while True:
        X = VField2(random_jet(rng, trunc, min_order, **kw), random_jet(rng, trunc, min_order, **kw))
        if min_order > trunc or X.order() == min_order:
            return X


def random_tangent_diffeo(rng, trunc, contact=2, **kw):
    """Tangent-to-identity map with contact order exactly ``contact``."""
    while True:
        dx = random_jet(rng, trunc, contact, **kw)
        dy = random_jet(rng, trunc, contact, **kw)
        if min(dx.order(), dy.order()) == contact or contact > trunc:
            return Diffeo2(Jet2.x(trunc) + dx, Jet2.y(trunc) + dy)


def random_exp_diffeo(rng, trunc, order=2, **kw):
    return exp_field(random_field(rng, trunc, order, **kw))


def make_rng(seed):
    return random.Random(seed)
