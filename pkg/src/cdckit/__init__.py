"""cdckit: constant-dimension subspace code constructions and exact bounds."""

__version__ = "0.1.0"
