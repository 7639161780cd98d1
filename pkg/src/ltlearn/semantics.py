"""Finite-trace semantics.

Two evaluators are kept on purpose: :func:`evaluate_table` works on
per-position bit vectors and is what the learner and the tools use;
:func:`evaluate_at` is a direct transcription of the inductive definition
and serves as the reference for cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formula import (
    And, Atom, Bottom, Finally, Formula, Globally, Implies, Last, NegAtom, Next, Not, Or, Top,
)
from .traces import Alphabet, Sample, Trace

__all__ = [
    "evaluate",
    "evaluate_at",
    "evaluate_table",
    "SatMask",
    "sat_mask",
    "is_separating",
    "error_rates",
]


def evaluate_at(f: Formula, t: Trace, i: int = 1) -> bool:
    """``t, i |= f`` by structural recursion (positions 1-based)."""
    n = len(t)
    if isinstance(f, Atom):
        return bool(t[i] >> t.alphabet.index(f.name) & 1)
    if isinstance(f, NegAtom):
        return not t[i] >> t.alphabet.index(f.name) & 1
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Last):
        return i == n
    if isinstance(f, And):
        return evaluate_at(f.left, t, i) and evaluate_at(f.right, t, i)
    if isinstance(f, Or):
        return evaluate_at(f.left, t, i) or evaluate_at(f.right, t, i)
    if isinstance(f, Next):
        return i < n and evaluate_at(f.arg, t, i + 1)
    if isinstance(f, Finally):
        return any(evaluate_at(f.arg, t, j) for j in range(i, n + 1))
    if isinstance(f, Globally):
        return all(evaluate_at(f.arg, t, j) for j in range(i, n + 1))
    if isinstance(f, Not):
        return not evaluate_at(f.arg, t, i)
    if isinstance(f, Implies):
        return not evaluate_at(f.left, t, i) or evaluate_at(f.right, t, i)
    raise TypeError(f"not a formula: {f!r}")


def evaluate(f: Formula, t: Trace) -> bool:
    return bool(evaluate_table(f, t) & 1)


def _prop_masks(t: Trace) -> list[int]:
    masks = [0] * len(t.alphabet)
    for pos, sym in enumerate(t.symbols):
        k = 0
        while sym:
            if sym & 1:
                masks[k] |= 1 << pos
            sym >>= 1
            k += 1
    return masks


def _table(f: Formula, props: list[int], alphabet: Alphabet, n: int) -> int:
    full = (1 << n) - 1
    if isinstance(f, Atom):
        return props[alphabet.index(f.name)]
    if isinstance(f, NegAtom):
        return full & ~props[alphabet.index(f.name)]
    if isinstance(f, Top):
        return full
    if isinstance(f, Bottom):
        return 0
    if isinstance(f, Last):
        return 1 << (n - 1)
    if isinstance(f, And):
        return _table(f.left, props, alphabet, n) & _table(f.right, props, alphabet, n)
    if isinstance(f, Or):
        return _table(f.left, props, alphabet, n) | _table(f.right, props, alphabet, n)
    if isinstance(f, Next):
        return _table(f.arg, props, alphabet, n) >> 1
    if isinstance(f, Finally):
        # suffix-or: every position up to the last satisfying one
        m = _table(f.arg, props, alphabet, n)
        return (1 << m.bit_length()) - 1
    if isinstance(f, Globally):
        # suffix-and: every position after the last violating one
        miss = full & ~_table(f.arg, props, alphabet, n)
        return full & ~((1 << miss.bit_length()) - 1)
    if isinstance(f, Not):
        return full & ~_table(f.arg, props, alphabet, n)
    if isinstance(f, Implies):
        return (full & ~_table(f.left, props, alphabet, n)) | _table(f.right, props, alphabet, n)
    raise TypeError(f"not a formula: {f!r}")


def evaluate_table(f: Formula, t: Trace) -> int:
    """Bit ``i-1`` of the result is ``t, i |= f``."""
    return _table(f, _prop_masks(t), t.alphabet, len(t))


@dataclass(frozen=True)
class SatMask:
    """Which positives / negatives satisfy a formula; bit ``k`` is trace ``k``."""

    pos_bits: int
    neg_bits: int
    n_pos: int
    n_neg: int

    @property
    def pos_count(self) -> int:
        return self.pos_bits.bit_count()

    @property
    def neg_count(self) -> int:
        return self.neg_bits.bit_count()

    def __and__(self, other: "SatMask") -> "SatMask":
        return SatMask(self.pos_bits & other.pos_bits, self.neg_bits & other.neg_bits,
                       self.n_pos, self.n_neg)

    def __or__(self, other: "SatMask") -> "SatMask":
        return SatMask(self.pos_bits | other.pos_bits, self.neg_bits | other.neg_bits,
                       self.n_pos, self.n_neg)

    def __invert__(self) -> "SatMask":
        return SatMask(((1 << self.n_pos) - 1) & ~self.pos_bits,
                       ((1 << self.n_neg) - 1) & ~self.neg_bits, self.n_pos, self.n_neg)


def sat_mask(f: Formula, sample: Sample) -> SatMask:
    pos = sum(1 << k for k, t in enumerate(sample.positives) if evaluate(f, t))
    neg = sum(1 << k for k, t in enumerate(sample.negatives) if evaluate(f, t))
    return SatMask(pos, neg, len(sample.positives), len(sample.negatives))


def error_rates(mask: SatMask) -> tuple[float, float]:
    """(missed-positive rate, accepted-negative rate)."""
    missed = (mask.n_pos - mask.pos_count) / mask.n_pos if mask.n_pos else 0.0
    accepted = mask.neg_count / mask.n_neg if mask.n_neg else 0.0
    return missed, accepted


def is_separating(mask: SatMask, epsilon: float = 0.0) -> bool:
    if not 0 <= epsilon < 1:
        raise ValueError("epsilon must lie in [0, 1)")
    # integer comparison avoids float drift at exact thresholds like 1/10 <= 0.1
    missed = mask.n_pos - mask.pos_count
    accepted = mask.neg_count
    return missed <= _allowed(epsilon, mask.n_pos) and accepted <= _allowed(epsilon, mask.n_neg)


def _allowed(epsilon: float, n: int) -> int:
    """Largest error count ``e`` with ``e / n <= epsilon``."""
    if n == 0:
        return 0
    e = int(epsilon * n)
    while (e + 1) / n <= epsilon:
        e += 1
    while e > 0 and e / n > epsilon:
        e -= 1
    return e
