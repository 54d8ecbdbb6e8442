"""Floating-point iteration of explicit maps of (C^2, 0).

Orbits are followed inside the Euclidean ball of radius ``rho``.  A seed is
labelled ``F`` when its forward and backward orbits both leave the ball,
``P`` when the forward orbit returns to the seed, and ``I`` (a budget-relative
candidate, never a certificate) otherwise.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "SaddleNode", "FamilyF", "FamilyH", "GeneralPoly", "OrbitRecord",
    "BallClassification", "iterate_orbit", "classify_points", "classify_ball",
    "polar_grid", "invariant_circle_scan", "commutator_estimate_check",
    "cascade_estimate_check", "boundary_iteration_scan", "random_tangent_pair",
    "map_from_text", "saddle_orbit_law",
]

POLE_TOL = 1e-12
PERIOD_TOL = 1e-10
NEWTON_TOL = 1e-12


def _norm(x, y):
    return np.sqrt(np.abs(x) ** 2 + np.abs(y) ** 2)


def _polyval(coeffs, u):
    """``sum coeffs[k] u^k`` by Horner; works elementwise on arrays."""
    acc = np.zeros_like(u) if isinstance(u, np.ndarray) else 0j
    for c in reversed(coeffs):
        acc = acc * u + c
    return acc


# -- maps -------------------------------------------------------------------------

@dataclass(frozen=True)
class SaddleNode:
    """``(x, y) -> (x + x^2 y, y (1 + xy)^-2)``; ``x^2 y`` is invariant."""

    name = "saddle_node"

    def forward(self, x, y):
        w = 1 + x * y
        return x + x * x * y, y / (w * w)

    def backward(self, x, y):
        w = 1 - x * y
        return x * w, y / (w * w)

    def pole(self, x, y, direction):
        w = 1 + x * y if direction > 0 else 1 - x * y
        return np.abs(w) < POLE_TOL

    def describe(self):
        return {"kind": "saddle_node"}


@dataclass(frozen=True)
class FamilyF:
    """``(x g, y / g)`` with ``g = 1 + u f(u)``, ``u = xy``."""

    f: tuple = (1.0,)
    name = "family_f"

    def __post_init__(self):
        if not self.f or self.f[0] == 0:
            raise ValueError("f(0) must be nonzero")

    def _g(self, x, y):
        u = x * y
        return 1 + u * _polyval(self.f, u)

    def forward(self, x, y):
        g = self._g(x, y)
        return x * g, y / g

    def backward(self, x, y):
        g = self._g(x, y)
        return x / g, y * g

    def pole(self, x, y, direction):
        return np.abs(self._g(x, y)) < POLE_TOL

    def multiplier(self, c):
        return 1 + c * _polyval(self.f, c)

    def describe(self):
        return {"kind": "family_f", "f": [[complex(c).real, complex(c).imag] for c in self.f]}


@dataclass(frozen=True)
class FamilyH:
    """``(x g, y / g)`` with ``g = 1 + v f(v)``, ``v = x^2 y``.

    ``xy`` is invariant, which reduces the inverse to a scalar Newton solve
    in ``x`` along the level curve.
    """

    f: tuple = (1.0,)
    name = "family_h"

    def __post_init__(self):
        if not self.f or self.f[0] == 0:
            raise ValueError("f(0) must be nonzero")

    def _g(self, x, u):
        v = x * u
        return 1 + v * _polyval(self.f, v)

    def forward(self, x, y):
        g = self._g(x, x * y)
        return x * g, y / g

    def backward(self, x, y):
        u = x * y
        df = [k * c for k, c in enumerate(self.f)][1:]
        z = np.array(x, dtype=complex, copy=True)
        for _ in range(60):
            v = z * u
            fv = _polyval(self.f, v)
            # d/dz [z (1 + v f(v))] with v = z u
            dfv = _polyval(df, v) if df else 0
            resid = z * (1 + v * fv) - x
            deriv = 1 + 2 * v * fv + v * v * dfv
            step = resid / deriv
            z = z - step
            if np.all(np.abs(step) <= NEWTON_TOL * (1 + np.abs(z))):
                break
        return z, y * self._g(z, u)

    def pole(self, x, y, direction):
        return np.abs(self._g(x, x * y)) < POLE_TOL

    def describe(self):
        return {"kind": "family_h", "f": [[complex(c).real, complex(c).imag] for c in self.f]}


@dataclass(frozen=True)
class GeneralPoly:
    """Polynomial map with complex coefficients ``{(i, j): c}`` per component."""

    px: tuple
    py: tuple
    name = "general_poly"

    @classmethod
    def from_dicts(cls, px, py):
        return cls(tuple(sorted(px.items())), tuple(sorted(py.items())))

    @classmethod
    def from_diffeo(cls, F):
        """Numeric copy of an exact :class:`~holodyn.lie.Diffeo2` jet."""
        fx, fy = F.numeric()
        return cls.from_dicts(fx.coeffs, fy.coeffs)

    def scaled(self, lam):
        """Conjugate by the homothety ``z -> lam z``: ``F(lam z) / lam``."""
        def sc(terms):
            return tuple(((i, j), c * lam ** (i + j - 1)) for (i, j), c in terms)
        return GeneralPoly(sc(self.px), sc(self.py))

    @staticmethod
    def _eval(terms, x, y):
        out = np.zeros(np.broadcast(x, y).shape, dtype=complex)
        for (i, j), c in terms:
            out = out + c * x ** i * y ** j
        return out

    @staticmethod
    def _diff(terms, var):
        out = []
        for (i, j), c in terms:
            if var == 0 and i:
                out.append(((i - 1, j), c * i))
            if var == 1 and j:
                out.append(((i, j - 1), c * j))
        return tuple(out)

    def forward(self, x, y):
        return self._eval(self.px, x, y), self._eval(self.py, x, y)

    def backward(self, x, y, max_steps=50):
        """Newton inversion started at the target point."""
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        ax, ay = self._diff(self.px, 0), self._diff(self.px, 1)
        bx, by = self._diff(self.py, 0), self._diff(self.py, 1)
        u, v = x.copy(), y.copy()
        for _ in range(max_steps):
            fx, fy = self.forward(u, v)
            rx, ry = fx - x, fy - y
            if np.all(np.sqrt(np.abs(rx) ** 2 + np.abs(ry) ** 2) <= NEWTON_TOL):
                break
            a, b = self._eval(ax, u, v), self._eval(ay, u, v)
            c, d = self._eval(bx, u, v), self._eval(by, u, v)
            det = a * d - b * c
            u = u - (d * rx - b * ry) / det
            v = v - (a * ry - c * rx) / det
        fx, fy = self.forward(u, v)
        bad = np.sqrt(np.abs(fx - x) ** 2 + np.abs(fy - y) ** 2) > 1e3 * NEWTON_TOL * (1 + _norm(x, y))
        u = np.where(bad, np.nan, u)
        v = np.where(bad, np.nan, v)
        return u, v

    def displacement_scaled(self, s):
        """Multiply every nonlinear coefficient by ``s``."""
        def sc(terms):
            return tuple(((i, j), c * s if i + j > 1 else c) for (i, j), c in terms)
        return GeneralPoly(sc(self.px), sc(self.py))

    def pole(self, x, y, direction):
        return np.zeros(np.shape(x), dtype=bool)

    def describe(self):
        def enc(terms):
            return [[i, j, c.real, c.imag] for (i, j), c in terms]
        return {"kind": "general_poly", "x": enc(self.px), "y": enc(self.py)}


def map_from_text(text):
    """``saddle``, ``F:c0,c1,...`` or ``H:c0,c1,...`` (complex literals allowed)."""
    text = text.strip()
    if text.lower() in ("saddle", "saddle_node"):
        return SaddleNode()
    head, _, tail = text.partition(":")
    coeffs = tuple(complex(t.replace("tau", str(2j * math.pi)).replace(" ", ""))
                   for t in tail.split(",")) if tail else (1.0,)
    if head.upper() == "F":
        return FamilyF(coeffs)
    if head.upper() == "H":
        return FamilyH(coeffs)
    raise ValueError(f"unknown map specification {text!r}")


# -- orbit records ------------------------------------------------------------------

@dataclass
class OrbitRecord:
    seed: tuple
    forward: list = field(default_factory=list)
    backward: list = field(default_factory=list)
    mu_forward: int = 0
    mu_backward: int = 0
    forward_exit: bool = False
    backward_exit: bool = False
    period: int = 0
    pole: bool = False
    budget: int = 0

    @property
    def status(self):
        if self.period:
            return f"period-detected({self.period})"
        if self.forward_exit and self.backward_exit:
            return "escaped-both"
        if self.forward_exit:
            return "escaped-forward"
        if self.backward_exit:
            return "escaped-backward"
        return "budget-exhausted"

    @property
    def label(self):
        if self.period:
            return "P"
        return "F" if self.forward_exit and self.backward_exit else "I"


def _follow(m, x0, y0, rho, max_iter, direction, store):
    step = m.forward if direction > 0 else m.backward
    x, y = complex(x0), complex(y0)
    pts = []
    pole = False
    for n in range(1, max_iter + 1):
        if m.pole(np.array(x), np.array(y), direction):
            return n - 1, True, 0, pts, True
        x, y = step(x, y)
        x, y = complex(x), complex(y)
        if not (_norm(x, y) <= rho):
            return n - 1, True, 0, pts, pole
        if store:
            pts.append((x, y))
        if direction > 0 and n <= max_iter // 2 and _norm(x - x0, y - y0) <= PERIOD_TOL:
            return n, False, n, pts, pole
    return max_iter, False, 0, pts, pole


def iterate_orbit(m, p0, rho=0.5, max_iter=10_000, store=True):
    """Follow one seed forwards and backwards inside the ball of radius ``rho``."""
    x0, y0 = complex(p0[0]), complex(p0[1])
    if _norm(x0, y0) > rho:
        raise ValueError("seed lies outside the ball")
    if max_iter < 1:
        raise ValueError("max_iter must be positive")
    mu_f, exit_f, period, fwd, pole_f = _follow(m, x0, y0, rho, max_iter, 1, store)
    rec = OrbitRecord(seed=(x0, y0), forward=fwd, mu_forward=mu_f, forward_exit=exit_f,
                      period=period, pole=pole_f, budget=max_iter)
    if not period:
        mu_b, exit_b, _, bwd, pole_b = _follow(m, x0, y0, rho, max_iter, -1, store)
        rec.backward, rec.mu_backward, rec.backward_exit = bwd, mu_b, exit_b
        rec.pole = rec.pole or pole_b
    return rec


def saddle_orbit_law(seeds, rho=0.5, max_iter=10_000):
    """Largest relative gap between ``x_n`` and ``x0 + n x0^2 y0`` over stored iterates."""
    worst = 0.0
    m = SaddleNode()
    for x0, y0 in seeds:
        rec = iterate_orbit(m, (x0, y0), rho, max_iter)
        for n, (x, _) in enumerate(rec.forward, start=1):
            want = x0 + n * x0 * x0 * y0
            worst = max(worst, abs(x - want) / max(abs(want), 1e-300))
    return worst


# -- vectorised classification ---------------------------------------------------------

def _escape(m, x0, y0, rho, max_iter, direction, detect_period):
    n = x0.size
    mu = np.full(n, max_iter, dtype=np.int64)
    exited = np.zeros(n, dtype=bool)
    period = np.zeros(n, dtype=np.int64)
    idx = np.arange(n)
    x, y = x0.copy(), y0.copy()
    sx, sy = x0.copy(), y0.copy()
    step = m.forward if direction > 0 else m.backward
    for k in range(1, max_iter + 1):
        if not idx.size:
            break
        pole = m.pole(x, y, direction)
        with np.errstate(all="ignore"):
            x, y = step(x, y)
            inside = _norm(x, y) <= rho
        out = ~inside | pole
        if out.any():
            hit = idx[out]
            mu[hit] = k - 1
            exited[hit] = True
        keep = ~out
        if detect_period and k <= max_iter // 2:
            back = keep & (_norm(x - sx, y - sy) <= PERIOD_TOL)
            if back.any():
                hit = idx[back]
                period[hit] = k
                mu[hit] = k
                keep &= ~back
        idx, x, y, sx, sy = idx[keep], x[keep], y[keep], sx[keep], sy[keep]
    return mu, exited, period


@dataclass
class BallClassification:
    rho: float
    max_iter: int
    seeds: np.ndarray
    labels: np.ndarray
    mu_forward: np.ndarray
    mu_backward: np.ndarray
    period: np.ndarray
    grid: dict = field(default_factory=dict)

    def counts(self):
        return {c: int(np.sum(self.labels == c)) for c in ("P", "F", "I")}

    def points(self, label):
        return self.seeds[self.labels == label]

    def summary(self):
        return {
            "rho": self.rho,
            "budget": self.max_iter,
            "grid": self.grid,
            "samples": int(self.labels.size),
            "counts": self.counts(),
            "max_mu_forward": int(self.mu_forward.max()) if self.labels.size else 0,
            "max_mu_backward": int(self.mu_backward.max()) if self.labels.size else 0,
        }

    def to_json(self):
        return json.dumps(self.summary(), indent=2, sort_keys=True)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x_re", "x_im", "y_re", "y_im", "status", "mu_forward", "mu_backward", "period"])
        for (x, y), lab, mf, mb, p in zip(self.seeds, self.labels, self.mu_forward,
                                          self.mu_backward, self.period):
            status = {"P": f"period-detected({p})", "F": "escaped-both"}.get(lab)
            if status is None:
                status = "escaped-forward" if mf < self.max_iter else (
                    "escaped-backward" if mb < self.max_iter else "budget-exhausted")
            w.writerow([repr(float(x.real)), repr(float(x.imag)), repr(float(y.real)), repr(float(y.imag)),
                        status, int(mf), int(mb), int(p)])
        return buf.getvalue()


def classify_points(m, seeds, rho, max_iter):
    """Label each seed P, F or I (see module docstring)."""
    seeds = np.asarray(seeds, dtype=complex).reshape(-1, 2)
    x0, y0 = seeds[:, 0], seeds[:, 1]
    mu_f, ex_f, period = _escape(m, x0, y0, rho, max_iter, 1, True)
    mu_b, ex_b, _ = _escape(m, x0, y0, rho, max_iter, -1, False)
    labels = np.where(period > 0, "P", np.where(ex_f & ex_b, "F", "I"))
    mu_b = np.where(period > 0, 0, mu_b)
    return BallClassification(rho=rho, max_iter=max_iter, seeds=seeds, labels=labels,
                              mu_forward=mu_f, mu_backward=mu_b, period=period)


def polar_grid(rho, grid, inner=0.25, angle_margin=math.pi / 16):
    """Deterministic polar-product sample of the ball, away from both axes.

    ``|x| = r cos(phi)``, ``|y| = r sin(phi)`` with ``r`` in
    ``[inner rho, rho]`` and ``phi`` in ``[margin, pi/2 - margin]``; the
    complex phases follow a golden-ratio sequence.
    """
    if grid < 2:
        raise ValueError("grid must be at least 2")
    radii = np.linspace(inner * rho, rho, grid)
    angles = np.linspace(angle_margin, math.pi / 2 - angle_margin, grid)
    r, phi = np.meshgrid(radii, angles, indexing="ij")
    k = np.arange(r.size).reshape(r.shape)
    golden = (math.sqrt(5) - 1) / 2
    ax = 2 * math.pi * ((k * golden) % 1.0)
    ay = 2 * math.pi * ((k * golden * golden) % 1.0)
    x = r * np.cos(phi) * np.exp(1j * ax)
    y = r * np.sin(phi) * np.exp(1j * ay)
    return np.stack([x.ravel(), y.ravel()], axis=1)


def classify_ball(m, rho=0.5, grid=64, max_iter=100_000, inner=0.25, angle_margin=math.pi / 16):
    """Classify a ``grid x grid`` polar sample of the ball of radius ``rho``."""
    seeds = polar_grid(rho, grid, inner, angle_margin)
    out = classify_points(m, seeds, rho, max_iter)
    out.grid = {"size": grid, "inner": inner, "angle_margin": angle_margin}
    return out


# -- invariant circles --------------------------------------------------------------------

def invariant_circle_scan(f, r_min=1e-6, r_max=2.0, rays=16, samples=400, iterations=10_000):
    """Roots of ``|1 + C f(C)| = 1`` along rays, with a drift check on each.

    For each root ``C`` the map :class:`FamilyF` is iterated from a point of
    the curve ``xy = C``; the drift is the largest change of the multiplier
    modulus ``|1 + u f(u)|`` (``u = x_n y_n``) along the orbit.
    """
    f = tuple(complex(c) for c in f)
    if not f or f[0] == 0:
        raise ValueError("f(0) must be nonzero")
    fmap = FamilyF(f)

    def gap(r, theta):
        c = r * np.exp(1j * theta)
        return abs(fmap.multiplier(c)) - 1.0

    found = []
    for k in range(rays):
        theta = 2 * math.pi * (k + 0.5) / rays
        rs = np.linspace(r_min, r_max, samples)
        vals = [gap(r, theta) for r in rs]
        for a, b, va, vb in zip(rs[:-1], rs[1:], vals[:-1], vals[1:]):
            if va == 0 or va * vb < 0:
                r = a if va == 0 else brentq(gap, a, b, args=(theta,), xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
                c = r * np.exp(1j * theta)
                if abs(c) < 1e-12:
                    continue
                found.append(_circle_record(fmap, c, iterations))
    return found


def _circle_record(fmap, c, iterations):
    x = np.sqrt(complex(c))
    y = c / x
    m0 = abs(fmap.multiplier(c))
    drift = 0.0
    for _ in range(iterations):
        x, y = fmap.forward(x, y)
        drift = max(drift, abs(abs(fmap.multiplier(x * y)) - m0))
    return {"C": complex(c), "residual": float(abs(m0 - 1.0)), "drift": float(drift)}


# -- commutator estimates ----------------------------------------------------------------------

def _ball_samples(rng, n, radius, sphere_fraction=0.5):
    """Points of the ball in C^2; a share lies on the boundary sphere."""
    v = rng.normal(size=(n, 4))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    k = int(n * sphere_fraction)
    scale = np.ones(n)
    scale[k:] = rng.random(n - k) ** 0.25
    v *= radius * scale[:, None]
    return v[:, 0] + 1j * v[:, 1], v[:, 2] + 1j * v[:, 3]


def _sup_displacement(step, x, y):
    u, v = step(x, y)
    d = _norm(u - x, v - y)
    return float(np.nanmax(d)) if not np.all(np.isnan(d)) else math.inf


def _commutator_apply(F1, F2, x, y):
    """``F1 o F2 o F1^-1 o F2^-1`` and the largest intermediate norm."""
    top = _norm(x, y)
    x, y = F2.backward(x, y)
    top = np.fmax(top, _norm(x, y))
    x, y = F1.backward(x, y)
    top = np.fmax(top, _norm(x, y))
    x, y = F2.forward(x, y)
    top = np.fmax(top, _norm(x, y))
    x, y = F1.forward(x, y)
    return x, y, top


def commutator_estimate_check(F1, F2, r, delta, tau, samples=1000, seed=0, slack=1e-12):
    """Sampled check of the commutator displacement bound.

    Precondition: every ``F_i^{+-1}`` moves points of ``B_r`` by at most
    ``delta / 4``.  Claim: on ``B_{r - 4 delta - tau}`` the commutator moves
    points by at most ``(2 / tau) sup|F1 - id| sup|F2 - id|`` (sups over
    ``B_r``).  Half of the samples sit on the boundary spheres, where
    displacements of holomorphic maps peak.
    """
    if not 0 < tau <= 2 * delta:
        raise ValueError("need 0 < tau <= 2 delta")
    inner = r - 4 * delta - tau
    if inner <= 0:
        raise ValueError("inner radius r - 4 delta - tau must be positive")
    rng = np.random.default_rng(seed)
    bx, by = _ball_samples(rng, samples, r)
    sups = {
        "F1": _sup_displacement(F1.forward, bx, by),
        "F1^-1": _sup_displacement(F1.backward, bx, by),
        "F2": _sup_displacement(F2.forward, bx, by),
        "F2^-1": _sup_displacement(F2.backward, bx, by),
    }
    violations = [k for k, v in sups.items() if not v <= delta / 4]
    rhs = 2.0 / tau * sups["F1"] * sups["F2"]
    sx, sy = _ball_samples(rng, samples, inner)
    cx, cy, top = _commutator_apply(F1, F2, sx, sy)
    lhs = _norm(cx - sx, cy - sy)
    worst = float(np.nanmax(lhs)) if samples else 0.0
    finite = bool(np.all(np.isfinite(lhs)))
    ok = finite and bool(np.all(lhs <= rhs + slack))
    ratio = (worst / rhs) if rhs > 0 else (0.0 if worst <= slack else math.inf)
    return {
        "r": r, "delta": delta, "tau": tau, "inner_radius": inner, "samples": samples,
        "precondition": sups,
        "precondition_ok": not violations,
        "violations": violations,
        "lhs_max": worst,
        "rhs": rhs,
        "worst_ratio": ratio,
        "max_intermediate_norm": float(np.nanmax(top)) if samples else 0.0,
        "inequality_ok": ok,
    }


def random_tangent_pair(seed, r=1.0, delta=0.05, degree=3, terms=3, margin=0.9):
    """Two seeded tangent-to-identity polynomial maps meeting the precondition.

    Nonlinear coefficients are complex normals, then shrunk until every map
    and inverse moves sampled points of ``B_r`` by at most ``margin delta / 4``.
    """
    rng = np.random.default_rng(seed)
    monos = [(i, d - i) for d in range(2, degree + 1) for i in range(d + 1)]
    bx, by = _ball_samples(rng, 2048, r)
    pair = []
    for _ in range(2):
        comps = []
        for lin in ((1, 0), (0, 1)):
            pick = rng.choice(len(monos), size=terms, replace=False)
            coeffs = {monos[k]: complex(*rng.normal(size=2)) for k in sorted(pick)}
            coeffs[lin] = 1.0
            comps.append(coeffs)
        F = GeneralPoly.from_dicts(*comps)
        s = 1.0
        for _ in range(200):
            G = F.displacement_scaled(s)
            worst = max(_sup_displacement(G.forward, bx, by), _sup_displacement(G.backward, bx, by))
            if worst <= margin * delta / 4:
                break
            s *= 0.8
        pair.append(G)
    return tuple(pair)


# cascade elements are trees: ("g", k) for a generator, ("c", A, B) for [A, B],
# with ("i", A) marking an inverse

def _inverse(node):
    if node[0] == "i":
        return node[1]
    if node[0] == "c":
        return ("c", node[2], node[1])
    return ("i", node)


def _apply(node, gens, x, y, track):
    kind = node[0]
    if kind == "g":
        out = gens[node[1]].forward(x, y)
    elif kind == "i" and node[1][0] == "g":
        out = gens[node[1][1]].backward(x, y)
    elif kind == "i":
        return _apply(_inverse(node[1]), gens, x, y, track)
    else:
        a, b = node[1], node[2]
        x, y = _apply(_inverse(b), gens, x, y, track)
        x, y = _apply(_inverse(a), gens, x, y, track)
        x, y = _apply(b, gens, x, y, track)
        out = _apply(a, gens, x, y, track)
    track[0] = np.fmax(track[0], _norm(*out))
    return out


def _homothety_for(gens, bound, rng, samples):
    """Largest ``lam`` in a halving search with every ``F_lam^{+-1}`` within ``bound`` on ``B_1``."""
    bx, by = _ball_samples(rng, samples, 1.0)
    lam = 1.0
    for _ in range(200):
        scaled = [g.scaled(lam) for g in gens]
        worst = max(max(_sup_displacement(g.forward, bx, by), _sup_displacement(g.backward, bx, by))
                    for g in scaled)
        if worst <= bound:
            return lam, scaled, worst
        lam *= 0.5 if worst > 4 * bound else 0.9
    raise RuntimeError("no homothety found")


def cascade_estimate_check(generators, levels=5, delta=1 / 24, samples=256, per_level=24,
                           seed=0, slack=1e-12):
    """Displacement of ``S(i)`` elements on ``B_{1/2}`` against ``delta / 2^(i+3)``.

    Generators are first conjugated by a homothety so that they and their
    inverses move points of ``B_1`` by at most ``delta / 4``.  Levels 1 and
    2 are enumerated in full; deeper levels are sampled with a seeded
    generator because their size grows like a tower of products.
    """
    rng = np.random.default_rng(seed)
    lam, gens, worst0 = _homothety_for(list(generators), delta / 4, rng, 2048)
    px, py = _ball_samples(rng, samples, 0.5, sphere_fraction=0.75)
    base = [("g", k) for k in range(len(gens))]
    levels_out = []
    prev, cur = [], base + [_inverse(g) for g in base]
    level_sets = [cur]
    for i in range(1, levels + 1):
        partners = cur + prev
        pairs = [(a, b) for a in cur for b in partners if b != a and b != _inverse(a)]
        unique = []
        seen = set()
        for a, b in pairs:
            key = ("c", a, b)
            if key not in seen:
                seen.add(key)
                unique.append(key)
        if i <= 2 or len(unique) <= per_level:
            chosen, sampled = unique, False
        else:
            pick = rng.choice(len(unique), size=per_level, replace=False)
            chosen, sampled = [unique[k] for k in sorted(pick)], True
        bound = delta / 2 ** (i + 3)
        sup = 0.0
        top = 0.0
        finite = True
        for node in chosen:
            track = [np.zeros(px.shape)]
            ux, uy = _apply(node, gens, px, py, track)
            d = _norm(ux - px, uy - py)
            finite &= bool(np.all(np.isfinite(d)))
            sup = max(sup, float(np.nanmax(d)))
            top = max(top, float(np.nanmax(track[0])))
        levels_out.append({
            "level": i,
            "candidates": len(unique),
            "evaluated": len(chosen),
            "sampled": sampled,
            "sup_displacement": sup,
            "bound": bound,
            "max_intermediate_norm": top,
            "ok": finite and sup <= bound + slack and top <= 1.0,
        })
        prev, cur = cur, chosen if sampled else unique
        level_sets.append(cur)
    return {
        "delta": delta,
        "homothety": lam,
        "generator_sup": worst0,
        "radius": 0.5,
        "samples": samples,
        "levels": levels_out,
        "ok": all(lv["ok"] for lv in levels_out),
    }


# -- boundary scan ---------------------------------------------------------------------------

def _sphere_grid(radius, grid):
    phi = np.repeat(np.linspace(0.0, math.pi / 2, grid), grid)
    k = np.arange(grid * grid)
    golden = (math.sqrt(5) - 1) / 2
    x = radius * np.cos(phi) * np.exp(2j * math.pi * ((k * golden) % 1.0))
    y = radius * np.sin(phi) * np.exp(2j * math.pi * ((k * golden * golden) % 1.0))
    return x, y


def boundary_iteration_scan(m, radius=0.5, grid=16, max_iter=10_000, refinements=2):
    """Forward in-``K`` iteration counts on the sphere ``|z| = radius``.

    Reports, for ``grid``, ``2 grid``, ... samples per axis, the boundary point
    with the largest count; counts equal to ``max_iter`` are capped.
    """
    if grid < 8:
        raise ValueError("grid must be at least 8")
    rows = []
    for level in range(refinements):
        g = grid * 2 ** level
        x, y = _sphere_grid(radius, g)
        mu, exited, _ = _escape(m, x, y, radius * (1 + 1e-12), max_iter, 1, False)
        k = int(np.argmax(mu))
        rows.append({
            "grid": g,
            "max_count": int(mu[k]),
            "capped": bool(mu[k] >= max_iter),
            "point": [[float(x[k].real), float(x[k].imag)], [float(y[k].real), float(y[k].imag)]],
            "capped_fraction": float(np.mean(mu >= max_iter)),
        })
    return {"radius": radius, "budget": max_iter, "refinements": rows,
            "growth": [r["max_count"] for r in rows]}
