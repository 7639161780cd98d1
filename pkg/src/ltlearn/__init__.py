"""Learning U-free LTL formulas from positive and negative finite traces."""

from .combine import Pool, ScoredFormula, cover_combine, greedy_combine, score
from .directed import Block, DirectedFormula, Enumerator, parameter_schedule, witness_ends
from .formula import (
    And, Atom, Bottom, Finally, Formula, Globally, Last, NegAtom, Next, Not, Or, Top,
    formula_size, parse_formula, print_formula, to_nnf,
)
from .learner import LearnerConfig, LearnResult, learn
from .normalize import normalize_to_directed_bc
from .oracle import enumerate_formulas, minimal_separating_size
from .samplegen import count_words, generate_sample, progress
from .semantics import evaluate, is_separating, sat_mask
from .traces import Alphabet, PartialSymbol, Sample, Trace, load_sample, parse_sample, serialize_sample

__version__ = "0.1.0"

__all__ = [
    "Pool", "ScoredFormula", "cover_combine", "greedy_combine", "score",
    "Block", "DirectedFormula", "Enumerator", "parameter_schedule", "witness_ends",
    "And", "Atom", "Bottom", "Finally", "Formula", "Globally", "Last", "NegAtom", "Next", "Not", "Or", "Top",
    "formula_size", "parse_formula", "print_formula", "to_nnf",
    "LearnerConfig", "LearnResult", "learn",
    "normalize_to_directed_bc",
    "enumerate_formulas", "minimal_separating_size",
    "count_words", "generate_sample", "progress",
    "evaluate", "is_separating", "sat_mask",
    "Alphabet", "PartialSymbol", "Sample", "Trace", "load_sample", "parse_sample", "serialize_sample",
]
