"""Computable homeomorphisms of countable compact ordinal spaces.

The package represents successor ordinals ``[0, gamma]`` with the order
topology, piecewise-defined self-homeomorphisms given by finite rule
systems, and the combinatorics built on top of them: canonical maps between
matching intervals, shift generators over block systems, factorisation of
block-respecting maps over the generators, and distortion / metric
experiments with machine-checkable certificates.
"""

from ordspace.ordinal import (
    ZERO,
    ONE,
    OMEGA,
    Ordinal,
    OrdinalSyntaxError,
    add,
    left_subtract,
    omega_power,
    omega_term,
    parse_ordinal,
)

__all__ = [
    "ZERO",
    "ONE",
    "OMEGA",
    "Ordinal",
    "OrdinalSyntaxError",
    "add",
    "left_subtract",
    "omega_power",
    "omega_term",
    "parse_ordinal",
]
