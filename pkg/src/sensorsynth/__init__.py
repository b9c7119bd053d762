"""Joint synthesis of plans and sensors over p-graphs."""

from .belief import BeliefTree, BeliefVertex, build_tree
from .cover import (
    EPSILON,
    Cover,
    compatible,
    from_sensor_map,
    intersect,
    intersect_lists,
    intersect_upper,
    project,
    to_sensor_map,
    upper_covers,
)
from .errors import (
    CoverError,
    InputError,
    MappingError,
    NotASolutionError,
    ResourceError,
    SensorSynthError,
    SpecificationError,
    StipulationError,
    ValidationError,
)
from .pgraph import ACTION, OBSERVATION, Edge, PGraph, Plan, PlanningProblem, apply_preimage, validate
from .properties import ConstraintSpec, NeighborRelation, check, discretize_partition
from .synth import SolutionSet, covering_combinations, extract_plan, synthesize
from .verify import enumerate_covers, oracle, solvable, solves

__version__ = "0.1.0"

__all__ = [
    "ACTION",
    "OBSERVATION",
    "EPSILON",
    "BeliefTree",
    "BeliefVertex",
    "ConstraintSpec",
    "Cover",
    "CoverError",
    "Edge",
    "InputError",
    "MappingError",
    "NeighborRelation",
    "NotASolutionError",
    "PGraph",
    "Plan",
    "PlanningProblem",
    "ResourceError",
    "SensorSynthError",
    "SolutionSet",
    "SpecificationError",
    "StipulationError",
    "ValidationError",
    "apply_preimage",
    "build_tree",
    "check",
    "compatible",
    "covering_combinations",
    "discretize_partition",
    "enumerate_covers",
    "extract_plan",
    "from_sensor_map",
    "intersect",
    "intersect_lists",
    "intersect_upper",
    "oracle",
    "project",
    "solvable",
    "solves",
    "synthesize",
    "to_sensor_map",
    "upper_covers",
    "validate",
]
