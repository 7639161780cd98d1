"""Sample generation by formula progression and exact word counting.

A formula is read as a deterministic automaton whose states are canonical
residual formulas.  Counting accepted completions per (state, remaining
length) lets us draw accepted or rejected words uniformly by unranking.

Two residuals need care under the strict-next semantics: ``prog(X f)`` is
``f & F true`` (``F true`` demands at least one more symbol) and
``prog(last)`` is ``G false`` (no further symbol allowed).
"""

from __future__ import annotations

import random

from .formula import (
    FALSE, TRUE, And, Atom, Bottom, Finally, Formula, Globally, Last, NegAtom, Next, Or, Top,
    UnsupportedOperatorError, atoms, conj, disj, print_formula, to_nnf,
)
from .traces import Alphabet, Sample, Trace

__all__ = [
    "InfeasibleSampleError",
    "StateLimitError",
    "progress",
    "residual_accepting",
    "canonical",
    "accepts",
    "count_words",
    "generate_sample",
    "WordCounter",
    "gen_trailer",
]


class InfeasibleSampleError(ValueError):
    def __init__(self, polarity: str, requested: int, available: int, length: int):
        self.polarity = polarity
        self.requested = requested
        self.available = available
        self.length = length
        super().__init__(
            f"infeasible {polarity} demand: requested {requested} distinct traces of length "
            f"{length}, only {available} exist"
        )


class StateLimitError(RuntimeError):
    pass


# -- canonical residual terms --------------------------------------------------
#
# ('T',) ('B',) ('a', k, pol) ('L',) ('X', t) ('F', t) ('G', t) ('&', ts) ('|', ts)
# with ts a sorted tuple of distinct non-constant children.

_T = ("T",)
_B = ("B",)


def _mk_nary(tag: str, parts) -> tuple:
    unit, zero = (_T, _B) if tag == "&" else (_B, _T)
    flat = set()
    for p in parts:
        if p == zero:
            return zero
        if p == unit:
            continue
        if p[0] == tag:
            flat.update(p[1])
        else:
            flat.add(p)
    for p in flat:
        if p[0] == "a" and ("a", p[1], not p[2]) in flat:
            return zero
    if not flat:
        return unit
    if len(flat) == 1:
        return next(iter(flat))
    return (tag, tuple(sorted(flat)))


def _mk_and(*parts) -> tuple:
    return _mk_nary("&", parts)


def _mk_or(*parts) -> tuple:
    return _mk_nary("|", parts)


def _mk_unary(tag: str, t: tuple) -> tuple:
    if t == _B:
        return _B if tag in ("X", "F") else ("G", _B)
    if t == _T and tag == "G":
        return _T
    return (tag, t)


def _to_term(f: Formula, alphabet: Alphabet) -> tuple:
    if isinstance(f, Top):
        return _T
    if isinstance(f, Bottom):
        return _B
    if isinstance(f, Atom):
        return ("a", alphabet.index(f.name), True)
    if isinstance(f, NegAtom):
        return ("a", alphabet.index(f.name), False)
    if isinstance(f, Last):
        return ("L",)
    if isinstance(f, And):
        return _mk_and(_to_term(f.left, alphabet), _to_term(f.right, alphabet))
    if isinstance(f, Or):
        return _mk_or(_to_term(f.left, alphabet), _to_term(f.right, alphabet))
    for cls, tag in ((Next, "X"), (Finally, "F"), (Globally, "G")):
        if isinstance(f, cls):
            return _mk_unary(tag, _to_term(f.arg, alphabet))
    raise UnsupportedOperatorError(f"{type(f).__name__} is not supported by progression")


def _to_formula(t: tuple, alphabet: Alphabet) -> Formula:
    tag = t[0]
    if tag == "T":
        return TRUE
    if tag == "B":
        return FALSE
    if tag == "a":
        name = alphabet.propositions[t[1]]
        return Atom(name) if t[2] else NegAtom(name)
    if tag == "L":
        return Last()
    if tag in ("&", "|"):
        parts = [_to_formula(c, alphabet) for c in t[1]]
        return conj(parts) if tag == "&" else disj(parts)
    arg = _to_formula(t[1], alphabet)
    return {"X": Next, "F": Finally, "G": Globally}[tag](arg)


_MORE = ("F", _T)


def _prog(t: tuple, sym: int) -> tuple:
    tag = t[0]
    if tag in ("T", "B"):
        return t
    if tag == "a":
        return _T if (sym >> t[1] & 1) == t[2] else _B
    if tag == "L":
        return ("G", _B)
    if tag == "X":
        return _mk_and(t[1], _MORE)
    if tag == "F":
        return _mk_or(_prog(t[1], sym), t)
    if tag == "G":
        return _mk_and(_prog(t[1], sym), t)
    if tag == "&":
        return _mk_and(*(_prog(c, sym) for c in t[1]))
    return _mk_or(*(_prog(c, sym) for c in t[1]))


def _accepting(t: tuple) -> bool:
    tag = t[0]
    if tag in ("T", "G"):
        return True
    if tag == "&":
        return all(_accepting(c) for c in t[1])
    if tag == "|":
        return any(_accepting(c) for c in t[1])
    # literals, X, F, last and false all need a position that is not there
    return False


# -- public formula-level API --------------------------------------------------

def _alphabet_for(f: Formula, alphabet: Alphabet | None) -> Alphabet:
    return alphabet if alphabet is not None else Alphabet(tuple(sorted(atoms(f))) or ("p",))


def canonical(f: Formula, alphabet: Alphabet | None = None) -> Formula:
    """Flattened, sorted, constant-folded NNF of ``f``."""
    alphabet = _alphabet_for(f, alphabet)
    return _to_formula(_to_term(to_nnf(f), alphabet), alphabet)


def progress(f: Formula, symbol, alphabet: Alphabet | None = None) -> Formula:
    """Residual obligation on the suffix after reading ``symbol``.

    ``symbol`` is a bitmask or an iterable of proposition names.
    """
    alphabet = _alphabet_for(f, alphabet)
    if not isinstance(symbol, int):
        symbol = alphabet.symbol(symbol)
    return _to_formula(_prog(_to_term(to_nnf(f), alphabet), symbol), alphabet)


def residual_accepting(f: Formula, alphabet: Alphabet | None = None) -> bool:
    """Does the residual accept the empty suffix?"""
    alphabet = _alphabet_for(f, alphabet)
    return _accepting(_to_term(to_nnf(f), alphabet))


def accepts(f: Formula, trace: Trace) -> bool:
    """Membership by folding progression over ``trace``."""
    t = _to_term(to_nnf(f), trace.alphabet)
    for sym in trace.symbols:
        t = _prog(t, sym)
    return _accepting(t)


# -- counting and sampling -----------------------------------------------------

class WordCounter:
    """Lazy automaton of ``f`` with memoized completion counts."""

    def __init__(self, f: Formula, alphabet: Alphabet | None = None, state_cap: int = 1_000_000):
        self.alphabet = _alphabet_for(f, alphabet)
        self.formula = f
        self.initial = _to_term(to_nnf(f), self.alphabet)
        self.state_cap = state_cap
        self._succ: dict[tuple, tuple[tuple, ...]] = {}
        self._counts: dict[tuple[tuple, int], int] = {}
        self.symbols = tuple(self.alphabet.all_symbols())

    @property
    def n_states(self) -> int:
        return len(self._succ)

    def successors(self, q: tuple) -> tuple[tuple, ...]:
        succ = self._succ.get(q)
        if succ is None:
            if len(self._succ) >= self.state_cap:
                raise StateLimitError(f"automaton exceeds {self.state_cap} residual states")
            succ = self._succ[q] = tuple(_prog(q, a) for a in self.symbols)
        return succ

    def count(self, q: tuple, m: int) -> int:
        """Accepted completions of length ``m`` from state ``q``."""
        key = (q, m)
        c = self._counts.get(key)
        if c is None:
            if m == 0:
                c = int(_accepting(q))
            elif q == _B:
                c = 0
            elif q == _T:
                c = len(self.symbols) ** m
            else:
                c = sum(self.count(s, m - 1) for s in self.successors(q))
            self._counts[key] = c
        return c

    def total(self, length: int, accepted: bool = True) -> int:
        c = self.count(self.initial, length)
        return c if accepted else len(self.symbols) ** length - c

    def unrank(self, rank: int, length: int, accepted: bool = True) -> tuple[int, ...]:
        """The ``rank``-th word (in symbol order) of the requested slice."""
        if not 0 <= rank < self.total(length, accepted):
            raise IndexError("rank outside the language slice")
        q, word, k = self.initial, [], len(self.symbols)
        for m in range(length, 0, -1):
            for a, s in zip(self.symbols, self.successors(q)):
                c = self.count(s, m - 1)
                if not accepted:
                    c = k ** (m - 1) - c
                if rank < c:
                    word.append(a)
                    q = s
                    break
                rank -= c
        return tuple(word)

    def draw(self, n: int, length: int, accepted: bool, rng: random.Random) -> list[tuple[int, ...]]:
        """``n`` distinct words, uniform without replacement."""
        available = self.total(length, accepted)
        if n > available:
            raise InfeasibleSampleError("positive" if accepted else "negative", n, available, length)
        if available >= 4 * n:
            seen: set[int] = set()
            ranks = []
            while len(ranks) < n:
                r = rng.randrange(available)
                if r not in seen:
                    seen.add(r)
                    ranks.append(r)
        else:
            ranks = rng.sample(range(available), n)
        return [self.unrank(r, length, accepted) for r in ranks]


def count_words(f: Formula, length: int, alphabet: Alphabet | None = None) -> int:
    if length < 1:
        raise ValueError("length must be at least 1")
    return WordCounter(f, alphabet).total(length)


def generate_sample(f: Formula, length: int, n_pos: int, n_neg: int, seed: int = 0,
                    alphabet: Alphabet | None = None, state_cap: int = 1_000_000) -> Sample:
    """``n_pos`` satisfying and ``n_neg`` violating traces of one length."""
    if length < 1:
        raise ValueError("length must be at least 1")
    if n_pos < 0 or n_neg < 0:
        raise ValueError("trace counts must be non-negative")
    wc = WordCounter(f, alphabet, state_cap)
    rng = random.Random(seed)
    pos = wc.draw(n_pos, length, True, rng)
    neg = wc.draw(n_neg, length, False, rng)
    a = wc.alphabet
    return Sample(a, tuple(Trace(w, a) for w in pos), tuple(Trace(w, a) for w in neg))


def gen_trailer(f: Formula, length, seed: int) -> str:
    return f"@gen formula={print_formula(f)} length={length} seed={seed}"
