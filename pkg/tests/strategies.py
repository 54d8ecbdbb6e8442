from fractions import Fraction

from hypothesis import strategies as st

from holodyn import TAU, Scalar, Jet2
from holodyn.lie import Diffeo2, VField2

small = st.integers(-4, 4)
gauss = st.builds(lambda a, b, d: Scalar.gauss(Fraction(a, d), Fraction(b, d)),
                  small, small, st.integers(1, 3))


@st.composite
def tau_polys(draw, max_deg=2):
    coeffs = draw(st.lists(gauss, min_size=1, max_size=max_deg + 1))
    total = Scalar(0)
    for k, c in enumerate(coeffs):
        total = total + c * TAU ** k
    return total


@st.composite
def scalars(draw):
    num = draw(tau_polys())
    den = draw(tau_polys(1).filter(bool))
    return num / den


@st.composite
def jets(draw, n=6, min_order=0, coeff=gauss):
    keys = [(i, d - i) for d in range(min_order, n + 1) for i in range(d + 1)]
    picked = draw(st.lists(st.sampled_from(keys), max_size=6, unique=True))
    return Jet2(n, {k: draw(coeff) for k in picked})


@st.composite
def fields(draw, n=6, min_order=2):
    return VField2(draw(jets(n, min_order)), draw(jets(n, min_order)))


@st.composite
def tangent_maps(draw, n=6, contact=2):
    dx = draw(jets(n, contact))
    dy = draw(jets(n, contact))
    return Diffeo2(Jet2.x(n) + dx, Jet2.y(n) + dy)
