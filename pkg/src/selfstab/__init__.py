"""Self-stabilizing K-packing and K-domination on trees as graph relabeling systems."""

__version__ = "0.1.0"
