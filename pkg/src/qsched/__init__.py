"""Syndrome-aware teleportation scheduling simulator for a quantum network node."""

__version__ = "0.1.0"

from .syndromes import (
    CondErrorProbs,
    NoiseParams,
    Outcome,
    SyndromeHistory,
    cond_error_given_minus,
    cond_error_given_plus,
    phase_flip_prob,
    plus_outcome_prob,
    sample_syndrome_round,
    success_prob,
    teleport_fidelity,
)
from .policies import PolicyKind, QubitRecord, admit, select_for_pushout, select_for_service
from .engine import Departure, RunMetrics, SimConfig, load, run
from .batchopt import (
    BatchInstance,
    fqf_assignment,
    interchange_gap,
    sweep_interchange,
    total_success,
    verify_fqf_optimality,
)

__all__ = [
    "__version__",
    "CondErrorProbs",
    "NoiseParams",
    "Outcome",
    "SyndromeHistory",
    "cond_error_given_minus",
    "cond_error_given_plus",
    "phase_flip_prob",
    "plus_outcome_prob",
    "sample_syndrome_round",
    "success_prob",
    "teleport_fidelity",
    "PolicyKind",
    "QubitRecord",
    "admit",
    "select_for_pushout",
    "select_for_service",
    "Departure",
    "RunMetrics",
    "SimConfig",
    "load",
    "run",
    "BatchInstance",
    "fqf_assignment",
    "interchange_gap",
    "sweep_interchange",
    "total_success",
    "verify_fqf_optimality",
]
