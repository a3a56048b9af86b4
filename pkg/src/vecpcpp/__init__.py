"""Reductions from 3SAT to vector-valued CSPs, their probabilistic verifiers, and gap CSPs."""

__version__ = "0.1.0"
