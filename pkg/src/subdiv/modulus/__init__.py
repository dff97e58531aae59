"""Combinatorial modulus of marked rings and quadrilaterals."""

from .types import (  # noqa: F401
    Mode,
    ModulusResult,
    PathConstraint,
    WeightFunction,
    area,
    result_from_document,
)
from .graphs import carrier_graph, shortest_connecting  # noqa: F401
from .cutting import EssentialLoopFinder  # noqa: F401
from .solver import (  # noqa: F401
    circumference,
    fat_skinny_gap,
    height,
    modulus_inf,
    modulus_sup,
)
from .oracle import (  # noqa: F401
    brute_force_modulus,
    minimal_connecting_sets,
    minimal_essential_loop_sets,
)
