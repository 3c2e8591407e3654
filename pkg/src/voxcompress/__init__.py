"""Cluster-based compression of signals on masked 2D/3D image lattices."""

from .agglomeration import (RecursiveNNResult, contract_topology, label_means,
                            recursive_nn_cluster)
from .compression import (CompressionModel, batch_isometry_ratios,
                          isometry_ratio)
from .errors import (DegeneratePair, DisconnectedTopology, InfeasibleK,
                     InvalidK, VolumeFormatError, VoxCompressError)
from .estimators import (GraphAgglomeration, RandomTreeAgglomeration,
                         RecursiveNNAgglomeration, SparseSignProjection)
from .graphs import (DisjointSet, NnGraph, WeightedGraph, capped_components,
                     connected_components, minimum_spanning_tree,
                     nearest_neighbor_graph, weight_edges)
from .lattice import (GridShape, ImageStack, Mask, Topology,
                      build_lattice_topology, connected_component_count)
from .linkage import LINKAGE_KINDS, agglomerative, rand_single_linkage
from .projection import SparseProjection, make_projection, project
from .synthetic import (SignalNoiseStack, SmoothFieldSpec,
                        SubjectConditionStack, smooth_random_field,
                        subject_condition_stack, variance_ratio)
from .volumefile import read_volume, write_volume

__version__ = "0.1.0"

__all__ = [
    "CompressionModel", "DegeneratePair", "DisconnectedTopology", "DisjointSet",
    "GraphAgglomeration", "GridShape", "ImageStack", "InfeasibleK", "InvalidK",
    "LINKAGE_KINDS", "Mask", "NnGraph", "RandomTreeAgglomeration",
    "RecursiveNNAgglomeration", "RecursiveNNResult", "SignalNoiseStack",
    "SmoothFieldSpec", "SparseProjection", "SparseSignProjection",
    "SubjectConditionStack", "Topology", "VolumeFormatError", "VoxCompressError",
    "WeightedGraph", "agglomerative", "batch_isometry_ratios",
    "build_lattice_topology", "capped_components", "connected_component_count",
    "connected_components", "contract_topology", "isometry_ratio", "label_means",
    "make_projection", "minimum_spanning_tree", "nearest_neighbor_graph",
    "project", "rand_single_linkage", "read_volume", "recursive_nn_cluster",
    "smooth_random_field", "subject_condition_stack", "variance_ratio",
    "weight_edges", "write_volume",
]
