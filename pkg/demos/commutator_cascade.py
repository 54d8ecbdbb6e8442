"""Iterated commutators of two random tangent-to-identity maps gain contact order."""

from holodyn import sj_sequence
from holodyn.randoms import make_rng, random_tangent_diffeo

rng = make_rng(7)
gens = [random_tangent_diffeo(rng, 8, 2), random_tangent_diffeo(rng, 8, 3)]
for k, level in enumerate(sj_sequence(gens, 5).levels):
    print(f"level {k}: {len(level.elements)} maps, min contact {level.min_contact}")
