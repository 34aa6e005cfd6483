from __future__ import annotations

from enum import Enum

__all__ = (
    "SchemeVariant",
    "OrbitMode",
    "OutputFormat",
    "EventKind",
)


class SchemeVariant(Enum):
    polarized = "polarized"
    literal = "literal"


class OrbitMode(Enum):
    float = "float"
    exact = "exact"


class OutputFormat(Enum):
    csv = "csv"
    json = "json"
    poly_text = "poly-text"


class EventKind(Enum):
    pole = "pole"
    exceptional_locus = "exceptional_locus"
    resource = "resource"
