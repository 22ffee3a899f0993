"""Fair maximal covering location: OWA / alpha-fairness objectives, exact solvers,
portable model export and fairness/efficiency metrics."""

from fairmclp.instance import Instance
from fairmclp.geometry import Norm, EUCLIDEAN, L1, LINF, distance, covers, one_center
from fairmclp.fairness import FairnessSpec, OwaWeights, owa_family, orness, fair_owa, alpha_fair
from fairmclp.solver import (
    CoverageSolution,
    SolveOptions,
    Status,
    allocate,
    brute_force,
    solve_continuous_fds,
    solve_discrete,
    solve_row_generation,
)

__version__ = "0.1.0"

__all__ = [
    "Instance",
    "Norm",
    "EUCLIDEAN",
    "L1",
    "LINF",
    "distance",
    "covers",
    "one_center",
    "FairnessSpec",
    "OwaWeights",
    "owa_family",
    "orness",
    "fair_owa",
    "alpha_fair",
    "CoverageSolution",
    "SolveOptions",
    "Status",
    "allocate",
    "brute_force",
    "solve_continuous_fds",
    "solve_discrete",
    "solve_row_generation",
]
