"""Material groupoids, binary composites and their double groupoids on discretised bodies."""

__version__ = "0.1.0"
