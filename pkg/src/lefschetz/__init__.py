"""Lefschetz fibrations as positive Dehn twist factorizations: algebra, sections, geometry."""

from .fibration import (
    Fibration,
    enumerate_sections,
    format_fibration,
    parse_fibration,
    validate,
)
from .mapping_class import CurveSpec, MappingClass, standard_twist

__all__ = [
    "CurveSpec",
    "Fibration",
    "MappingClass",
    "enumerate_sections",
    "format_fibration",
    "parse_fibration",
    "standard_twist",
    "validate",
]
