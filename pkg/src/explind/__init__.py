"""Explicit induction in the Boyer-Moore style over many-sorted constructor theories."""

from .session import Session, load_theory
from .theory import Theory
from .waterfall import Options, ProofResult, prove

__version__ = "0.1.0"

__all__ = ["Session", "Theory", "Options", "ProofResult", "load_theory", "prove"]
