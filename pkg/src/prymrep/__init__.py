"""Higher Prym representations of mapping class groups on homology of
finite characteristic covers of surfaces."""

__version__ = "0.1.0"
