"""Planar surface-code decoding experiments under correlated Z noise."""

from __future__ import annotations

from .errors import (
    ConfigError,
    CorrsurfError,
    InfeasibleDecodeError,
    InvariantViolation,
)
from .lattice import PlanarCode, build_planar_code, syndrome, residual_class
from .noise import (
    ErrorMechanism,
    NoiseModel,
    build_iid_z,
    build_type1,
    build_type2,
    decompose_by_components,
    virtual_qubit_map,
)
from .matching import (
    BatchDecoder,
    ComponentDecoder,
    DetectorGraph,
    MatchingResult,
    blossom_mwpm,
    build_matching_graph,
    decode,
)
from .symmetry import (
    SymmetryReport,
    compute_s_sys,
    success_probability_exact,
    verify_square_symmetry_elements,
)
from .harness import (
    RunRecord,
    ThresholdEstimate,
    estimate_threshold,
    run_code_capacity,
    run_circuit_level,
    wilson_ci,
)

__all__ = [
    "BatchDecoder",
    "ComponentDecoder",
    "ConfigError",
    "CorrsurfError",
    "DetectorGraph",
    "ErrorMechanism",
    "InfeasibleDecodeError",
    "InvariantViolation",
    "MatchingResult",
    "NoiseModel",
    "PlanarCode",
    "RunRecord",
    "SymmetryReport",
    "ThresholdEstimate",
    "blossom_mwpm",
    "build_iid_z",
    "build_matching_graph",
    "build_planar_code",
    "build_type1",
    "build_type2",
    "compute_s_sys",
    "decode",
    "decompose_by_components",
    "estimate_threshold",
    "residual_class",
    "run_code_capacity",
    "run_circuit_level",
    "success_probability_exact",
    "syndrome",
    "verify_square_symmetry_elements",
    "virtual_qubit_map",
    "wilson_ci",
]

__version__ = "0.1.0"
