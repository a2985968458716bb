"""Phylogenetic invariants of group-based models via toric geometry."""

__version__ = "0.1.0"
TOOL_NAME = "phylotoric"
