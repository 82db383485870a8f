"""matchlab: Gibbs distributions over matchings, exactly and by simulation.

The package implements, at a scale where everything can be cross-checked
against brute force: exact Gibbs distributions and matching polynomials,
Glauber samplers over edges and over matched-vertex sets, perfect-matching
counting oracles, exact Wasserstein sensitivity audits, and an
entropy-regularized degree sparsifier.
"""

from matchlab.graphs import (
    DEFAULT_ENUMERATION_CAP,
    EnumerationCapError,
    Graph,
    GraphFormatError,
    Pinning,
    enumerate_matchings,
    matchings_by_size,
    matched_vertices,
    maximum_matching,
    parse_graph,
    serialize_graph,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_ENUMERATION_CAP",
    "EnumerationCapError",
    "Graph",
    "GraphFormatError",
    "Pinning",
    "enumerate_matchings",
    "matchings_by_size",
    "matched_vertices",
    "maximum_matching",
    "parse_graph",
    "serialize_graph",
    "__version__",
]
