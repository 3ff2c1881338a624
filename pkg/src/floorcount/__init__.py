"""Counting curves in projective spaces through marked floor diagrams."""

from .diagram import (
    DiagramError,
    DiagramPoint,
    EdgeSlot,
    FloorDiagram,
    FloorPoint,
    automorphisms,
    canonical_form,
    canonicalize,
    divergence,
    first_betti,
    format_diagram,
    parse_diagram,
    precedes,
    to_dot,
    validate,
)
from .enumeration import enumerate_floor_diagrams
from .invariants import (
    CacheIntegrityError,
    Engine,
    InvariantCache,
    InvariantKey,
    UnsupportedDimension,
    cache_load,
    cache_store,
    gromov_witten,
    welschinger,
)
from .marking import (
    ConstraintSpec,
    DimensionMismatch,
    MarkedDiagram,
    UnsupportedGenus,
    build_constraints,
    check_marking,
    count_marked_by_type,
    enumerate_markings,
    format_marked_diagram,
    parse_marked_diagram,
)
from .multiplicity import (
    DEGENERATE,
    MultiplicityResult,
    complex_multiplicity,
    floor_constraint_dims,
    height,
    multiplicities,
    real_multiplicity,
)
from .oracles import (
    codim_two_formula,
    discriminant_degree,
    kontsevich_rational,
    proposition_checks,
)

__all__ = [
    "CacheIntegrityError",
    "ConstraintSpec",
    "DEGENERATE",
    "DiagramError",
    "DiagramPoint",
    "DimensionMismatch",
    "EdgeSlot",
    "Engine",
    "FloorDiagram",
    "FloorPoint",
    "InvariantCache",
    "InvariantKey",
    "MarkedDiagram",
    "MultiplicityResult",
    "UnsupportedDimension",
    "UnsupportedGenus",
    "automorphisms",
    "build_constraints",
    "cache_load",
    "cache_store",
    "canonical_form",
    "canonicalize",
    "check_marking",
    "codim_two_formula",
    "complex_multiplicity",
    "count_marked_by_type",
    "discriminant_degree",
    "divergence",
    "enumerate_floor_diagrams",
    "enumerate_markings",
    "first_betti",
    "floor_constraint_dims",
    "format_diagram",
    "format_marked_diagram",
    "gromov_witten",
    "height",
    "kontsevich_rational",
    "multiplicities",
    "parse_diagram",
    "parse_marked_diagram",
    "precedes",
    "proposition_checks",
    "real_multiplicity",
    "to_dot",
    "validate",
    "welschinger",
]

__version__ = "0.1.0"
