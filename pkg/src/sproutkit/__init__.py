"""sproutkit: combinatorics of self-similar dendrites with finite boundary.

A sprout is a labeled bipartite tree recording how the first-level
copies of a self-similar set touch each other.  The package validates
sprouts, enumerates symbolic addresses of boundary and contact points,
computes branch self-maps of the boundary, derives the inner-tree
structure (orders of points, ramification report), refines sprouts,
decides isomorphism, and bridges to concrete planar iterated function
systems.
"""

from .model import (
    Edge,
    ParseError,
    Sprout,
    SproutError,
    ValidationReport,
    Violation,
    load_sprout,
    parse_sprout,
    require_structural,
    sprout_boundary,
    validate,
)
from .addressing import (
    COUNTABLY_INFINITE,
    FINITE,
    UNCOUNTABLE,
    Address,
    AddressEntry,
    AddressSet,
    AdmissibilityResult,
    AdmissibilityWitness,
    CycleRelations,
    IndexDiagram,
    render_symbol_split,
)
from .phi import (
    BoundaryMap,
    boundary_map,
    complement_components,
    compose_boundary_maps,
    is_full,
    stable_image_size,
    steiner_subtree,
)
from .maintree import (
    AddressResolver,
    GraphWalk,
    InfiniteAddressSet,
    Location,
    PointReport,
    TransformationGraph,
    attractor_order,
    main_tree_order,
    point_addresses,
    ramification_report,
    report_rows,
    transformation_graph,
)
from .refine import canonical_form, isomorphic, iterate_square, square
from .geometry import (
    AffineMap,
    ExtractionError,
    ExtractionResult,
    IntersectionReport,
    PairContacts,
    PlanarIFS,
    attractor_points,
    detect_intersections,
    extract_sprout,
    load_ifs,
    parse_ifs,
    render_svg,
)

__version__ = "0.1.0"

__all__ = [
    "Address",
    "AddressEntry",
    "AddressResolver",
    "AddressSet",
    "AdmissibilityResult",
    "AdmissibilityWitness",
    "AffineMap",
    "BoundaryMap",
    "COUNTABLY_INFINITE",
    "CycleRelations",
    "Edge",
    "ExtractionError",
    "ExtractionResult",
    "FINITE",
    "GraphWalk",
    "IndexDiagram",
    "render_symbol_split",
    "InfiniteAddressSet",
    "IntersectionReport",
    "Location",
    "PairContacts",
    "ParseError",
    "PlanarIFS",
    "PointReport",
    "Sprout",
    "SproutError",
    "TransformationGraph",
    "UNCOUNTABLE",
    "ValidationReport",
    "Violation",
    "attractor_order",
    "attractor_points",
    "boundary_map",
    "canonical_form",
    "complement_components",
    "compose_boundary_maps",
    "detect_intersections",
    "extract_sprout",
    "is_full",
    "isomorphic",
    "iterate_square",
    "load_ifs",
    "load_sprout",
    "main_tree_order",
    "parse_ifs",
    "parse_sprout",
    "point_addresses",
    "ramification_report",
    "render_svg",
    "report_rows",
    "require_structural",
    "sprout_boundary",
    "square",
    "stable_image_size",
    "steiner_subtree",
    "transformation_graph",
    "validate",
]
