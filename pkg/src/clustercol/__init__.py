"""Clustered colouring of graphs with bounded-treewidth bands."""

from .colouring import (
    ClusterCertificate,
    Colouring,
    three_colour_appendix,
    three_colour_main,
    three_colour_pipeline,
    two_colour_bounded,
    verify_clustering,
)
from .graph import Graph, GraphError
from .layering import Layering, bfs_layering, bfs_layering_multi
from .treewidth import (
    TreeDecomposition,
    TreePartition,
    exact_treewidth,
    heuristic_tree_decomposition,
    tree_partition_bounded,
)

__version__ = "0.1.0"
