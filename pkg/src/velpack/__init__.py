"""Circle packings of triangulations with boundary, vertex extremal length,
and mated-CRT random maps."""

from velpack.planar import (
    PlanarMap,
    RootedTriangulation,
    ValidationReport,
    validate_triangulation,
    block_containing,
    fill_enclosed,
    collapse_parallel,
    serialize_map,
    parse_map,
)

__all__ = [
    "PlanarMap",
    "RootedTriangulation",
    "ValidationReport",
    "validate_triangulation",
    "block_containing",
    "fill_enclosed",
    "collapse_parallel",
    "serialize_map",
    "parse_map",
]

__version__ = "0.1.0"
