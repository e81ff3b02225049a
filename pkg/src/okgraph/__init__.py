"""Invariants of the C*-algebras of weighted graphs E x_{n,m} T."""

from .graph import Edge, InfiniteEdgeFamily, Path, WeightedGraph, build_graph, one_vertex_graph
from .intlin import AbelianGroup, GroupElement, IntMatrix, smith_normal_form
from .ktheory import k_invariants

__all__ = ["AbelianGroup", "Edge", "GroupElement", "InfiniteEdgeFamily", "IntMatrix", "Path",
           "WeightedGraph", "build_graph", "k_invariants", "one_vertex_graph", "smith_normal_form"]
