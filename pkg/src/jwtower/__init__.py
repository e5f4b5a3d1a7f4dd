"""Jones-Watatani basic-construction towers with their Fourier calculus and entropy invariants."""

from .mmalg import AlgebraError, DimensionCapError, MultiMatrixAlgebra
from .tower import InclusionSpec, Tower, build

__all__ = ["AlgebraError", "DimensionCapError", "InclusionSpec", "MultiMatrixAlgebra", "Tower", "build"]
