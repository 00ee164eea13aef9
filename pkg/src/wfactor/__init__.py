"""Exact toric cobordisms, torific ideals and factorization traces.

The package works entirely over the integers: lattices, cones and fans in
``wfactor.cones``, one-parameter subgroup actions in ``wfactor.action``,
torific ideals in ``wfactor.torific`` and the collapse of cobordisms in
``wfactor.cobordism``.
"""

from .action import OneParamAction, boundary, project_fan, quotient_semigroup
from .cobordism import (
    CobordismFan,
    FactorizationTrace,
    bubbles,
    collapse,
    is_collapsible,
    precedes,
    quasielementary_decomposition,
    standard_cobordism,
    validate_cobordism,
)
from .cones import Cone, Fan, common_refinement, resolve_fan, star_subdivision
from .torific import MonomialIdeal, alpha_torific_generators, torify

__version__ = "0.1.0"

__all__ = [
    "CobordismFan",
    "Cone",
    "FactorizationTrace",
    "Fan",
    "MonomialIdeal",
    "OneParamAction",
    "alpha_torific_generators",
    "boundary",
    "bubbles",
    "collapse",
    "common_refinement",
    "is_collapsible",
    "precedes",
    "project_fan",
    "quasielementary_decomposition",
    "quotient_semigroup",
    "resolve_fan",
    "standard_cobordism",
    "star_subdivision",
    "torify",
    "validate_cobordism",
]
