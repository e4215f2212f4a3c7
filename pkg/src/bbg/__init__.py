"""Random bipartite biregular graphs: exact oracles, switchings, couplings and spectra."""

__version__ = "0.1.0"

from .errors import BBGError
from .graph_core import (
    BiregularGraph,
    DegreeParams,
    build_graph,
    deserialize,
    from_matrix,
    serialize,
)
from .oracle import EdgeConstraint, check_margins, enumerate_family

__all__ = [
    "__version__",
    "BBGError",
    "BiregularGraph",
    "DegreeParams",
    "EdgeConstraint",
    "build_graph",
    "check_margins",
    "deserialize",
    "enumerate_family",
    "from_matrix",
    "serialize",
]
