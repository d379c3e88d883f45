"""ixpgraph: the IXP-AS bipartite graph of the inter-domain Internet.

Build the graph from IXP-membership datasets, project it onto either
vertex class, compute topological metrics, and solve IXP-selection
problems as coverage optimizations.
"""

from .errors import (
    Disconnected,
    EmptyGraph,
    FormatError,
    InsufficientData,
    IxpGraphError,
    NoLocationData,
    NotColocated,
    TooLarge,
    Uncoverable,
    UnknownEndpoint,
    UnknownNode,
    UnknownTarget,
    WrongNodeClass,
)
from .model import (
    AsNode,
    AsType,
    BipartiteGraph,
    IxpNode,
    IxpStatus,
    Location,
    MembershipEdge,
    Multigraph,
    NodeClass,
    PeeringRelation,
    PolicyLayer,
    Source,
    add_membership,
    build_graph,
    degree,
    giant_component,
)
from .projection import apply_policy, multiplicity, project

__version__ = "0.1.0"

__all__ = [
    "AsNode",
    "AsType",
    "BipartiteGraph",
    "Disconnected",
    "EmptyGraph",
    "FormatError",
    "InsufficientData",
    "IxpGraphError",
    "IxpNode",
    "IxpStatus",
    "Location",
    "MembershipEdge",
    "Multigraph",
    "NoLocationData",
    "NodeClass",
    "NotColocated",
    "PeeringRelation",
    "PolicyLayer",
    "Source",
    "TooLarge",
    "Uncoverable",
    "UnknownEndpoint",
    "UnknownNode",
    "UnknownTarget",
    "WrongNodeClass",
    "add_membership",
    "apply_policy",
    "build_graph",
    "degree",
    "giant_component",
    "multiplicity",
    "project",
    "__version__",
]
