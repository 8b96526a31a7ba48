"""Exact comparison-oracle minimization of conic functions over lattice points in a ball."""

from .conecut import ConeCutParams
from .geometry import ConeAtApex, Ellipsoid, VPolytope
from .lattice import FlatnessCertificate, LatticeBasis
from .minimizer import MinimizeResult, ProblemInstance, minimize
from .oracles import ComparisonOracle, ValueOracle, from_value_oracle

__all__ = [
    "ComparisonOracle",
    "ConeAtApex",
    "ConeCutParams",
    "Ellipsoid",
    "FlatnessCertificate",
    "LatticeBasis",
    "MinimizeResult",
    "ProblemInstance",
    "ValueOracle",
    "VPolytope",
    "from_value_oracle",
    "minimize",
]
