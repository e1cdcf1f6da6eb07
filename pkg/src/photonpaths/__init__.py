"""Path-sum simulator for single-photon and entangled-pair interferometers."""

__version__ = "0.1.0"

from .circuit import (
    BeamSplitter,
    Branch,
    Circuit,
    Detector,
    Mirror,
    PairSource,
    PhaseShifter,
    Rule,
    Segment,
    SinglePhoton,
    Violation,
    propagation_phase,
    validate,
)
from .dsl import DSLError, ParseError, evaluate_phase, parse, serialize
from .entanglement import (
    JointOutcome,
    ProbabilityTable,
    joint_amplitude,
    joint_distribution,
    joint_probability_table,
    marginal_probability,
)
from .interference import detection_probability, detector_probabilities, first_order_amplitude, fringe_sweep
from .montecarlo import EventRecord, coincidence_counts, sample_events, singles_counts
from .paths import Hop, Kernel, Path, compose, enumerate_paths, path_kernel

__all__ = [
    "BeamSplitter", "Branch", "Circuit", "Detector", "Mirror", "PairSource", "PhaseShifter", "Rule",
    "Segment", "SinglePhoton", "Violation", "propagation_phase", "validate",
    "DSLError", "ParseError", "evaluate_phase", "parse", "serialize",
    "JointOutcome", "ProbabilityTable", "joint_amplitude", "joint_distribution",
    "joint_probability_table", "marginal_probability",
    "detection_probability", "detector_probabilities", "first_order_amplitude", "fringe_sweep",
    "EventRecord", "coincidence_counts", "sample_events", "singles_counts",
    "Hop", "Kernel", "Path", "compose", "enumerate_paths", "path_kernel",
    "__version__",
]
