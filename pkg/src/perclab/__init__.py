"""perclab: finite-volume laboratory for percolation, random-cluster measures,
rigidity, entanglement and random labyrinths."""

__version__ = "0.1.0"

from .seeding import derive_seed, make_rng  # noqa: E402
from .graphs import (  # noqa: E402
    BinaryTree,
    FiniteGraph,
    Hypercubic,
    TreeCrossLine,
    Triangular,
    build_graph,
    from_edges,
)
from .percolation import (  # noqa: E402
    cluster_decomposition,
    connects,
    crossing_probability,
    estimate_pc,
    has_crossing,
    sample_bernoulli,
)

__all__ = [
    "__version__",
    "derive_seed",
    "make_rng",
    "Hypercubic",
    "Triangular",
    "BinaryTree",
    "TreeCrossLine",
    "FiniteGraph",
    "build_graph",
    "from_edges",
    "sample_bernoulli",
    "cluster_decomposition",
    "connects",
    "has_crossing",
    "crossing_probability",
    "estimate_pc",
]
