"""Workbench for monotone algebraic circuits with projection, summation and production gates."""

from .circuit import (
    Circuit,
    CircuitBuilder,
    QuantifiedCircuit,
    Quantifier,
    VariableUniverse,
    circuit_from_json,
    circuit_size,
    circuit_to_json,
    count_productions,
    quantified_size,
    validate,
)
from .poly import Polynomial, degree, hom_component, is_monotone, permanent_oracle
from .semantics import ExpansionGuards, evaluate, expand, expand_quantified

__all__ = [
    "Circuit",
    "CircuitBuilder",
    "ExpansionGuards",
    "Polynomial",
    "QuantifiedCircuit",
    "Quantifier",
    "VariableUniverse",
    "circuit_from_json",
    "circuit_size",
    "circuit_to_json",
    "count_productions",
    "degree",
    "evaluate",
    "expand",
    "expand_quantified",
    "hom_component",
    "is_monotone",
    "permanent_oracle",
    "quantified_size",
    "validate",
]

__version__ = "0.1.0"
