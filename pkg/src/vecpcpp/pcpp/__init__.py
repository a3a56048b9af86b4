"""Probabilistic verifiers for vector-valued CSPs."""
from .combined import (CombinedVerifier, Parameters, build_honest_combined_proof, build_honest_proof,
                       verifier_for)
from .core import (Descriptor, enumerate_randomness, estimate_acceptance, run_descriptor,
                   sample_descriptor)
from .linear import LinearVerifier, build_honest_linear_proof
from .parallel import ParallelVerifier, build_honest_parallel_proof

__all__ = [
    "CombinedVerifier", "Descriptor", "LinearVerifier", "ParallelVerifier", "Parameters",
    "build_honest_combined_proof", "build_honest_linear_proof", "build_honest_parallel_proof",
    "build_honest_proof", "enumerate_randomness", "estimate_acceptance", "run_descriptor",
    "sample_descriptor", "verifier_for",
]
