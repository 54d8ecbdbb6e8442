"""Exact jet calculus for local holomorphic dynamics at (C^2, 0)."""

from .errors import DomainError, HolodynError, ParseError, TruncationError
from .groups import (CommutatorCascade, NormalFormGenerator, centralizer_form_check,
                     commuting_criterion, derived_series_jet, model_pair, normal_form_bracket,
                     parallel_commutator_check, sj_sequence)
from .holonomy import (dicritical_check, holonomy_jet, holonomy_table, structural_form,
                       xy_invariance_check)
from .jet import Jet2, jet_compose
from .lie import (Diffeo2, VField2, bracket, commutator_diffeo, compose_diffeo, contact_order,
                  derive, exp_field, invert_diffeo, log_diffeo, pullback, pushforward)
from .scalar import I, ONE, TAU, ZERO, Scalar

__all__ = [
    "Scalar", "TAU", "I", "ZERO", "ONE", "Jet2", "jet_compose", "VField2", "Diffeo2",
    "derive", "bracket", "exp_field", "log_diffeo", "compose_diffeo", "invert_diffeo",
    "commutator_diffeo", "contact_order", "pullback", "pushforward",
    "centralizer_form_check", "parallel_commutator_check", "sj_sequence", "CommutatorCascade",
    "derived_series_jet", "NormalFormGenerator", "normal_form_bracket", "commuting_criterion",
    "model_pair", "holonomy_table", "holonomy_jet", "xy_invariance_check", "dicritical_check",
    "structural_form", "HolodynError", "DomainError", "TruncationError", "ParseError",
]
