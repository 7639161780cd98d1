"""Traces, samples, partial symbols and the occurrence index.

A symbol is stored as an integer bitmask over the alphabet: bit ``k`` is set
when proposition ``k`` holds.  Positions are 1-based in every public API.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "AlphabetMismatchError",
    "SampleParseError",
    "Alphabet",
    "Trace",
    "Sample",
    "PartialSymbol",
    "IndexTable",
    "symbol_satisfies",
    "enumerate_partial_symbols",
    "build_index",
    "parse_sample",
    "serialize_sample",
    "load_sample",
]


class AlphabetMismatchError(ValueError):
    """A formula or partial symbol names a proposition the alphabet lacks."""


class SampleParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Alphabet:
    """Ordered proposition names; the order fixes the bit of each proposition."""

    propositions: tuple[str, ...]

    def __post_init__(self):
        props = tuple(self.propositions)
        object.__setattr__(self, "propositions", props)
        if not props:
            raise ValueError("alphabet needs at least one proposition")
        if len(set(props)) != len(props):
            raise ValueError(f"duplicate proposition names in {props}")

    @classmethod
    def default(cls, size: int) -> "Alphabet":
        return cls(tuple(f"p{i}" for i in range(size)))

    def __len__(self) -> int:
        return len(self.propositions)

    def index(self, name: str) -> int:
        try:
            return self.propositions.index(name)
        except ValueError:
            raise AlphabetMismatchError(
                f"proposition {name!r} not in alphabet {self.propositions}"
            ) from None

    def symbol(self, names: Iterable[str]) -> int:
        """Bitmask of the symbol in which exactly ``names`` hold."""
        bits = 0
        for name in names:
            bits |= 1 << self.index(name)
        return bits

    def names_of(self, sym: int) -> frozenset[str]:
        return frozenset(p for k, p in enumerate(self.propositions) if sym >> k & 1)

    def all_symbols(self) -> range:
        return range(1 << len(self.propositions))


@dataclass(frozen=True)
class Trace:
    """Finite non-empty sequence of symbols (bitmasks)."""

    symbols: tuple[int, ...]
    alphabet: Alphabet = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not self.symbols:
            raise ValueError("traces must be non-empty")
        limit = 1 << len(self.alphabet)
        for s in self.symbols:
            if not 0 <= s < limit:
                raise AlphabetMismatchError(f"symbol {s} outside alphabet of size {len(self.alphabet)}")

    @classmethod
    def from_sets(cls, sets: Iterable[Iterable[str]], alphabet: Alphabet) -> "Trace":
        return cls(tuple(alphabet.symbol(s) for s in sets), alphabet)

    @classmethod
    def from_word(cls, word: Iterable[str], alphabet: Alphabet) -> "Trace":
        """One proposition per position, e.g. ``"hhoc"`` over ``(h, o, c, w)``."""
        return cls(tuple(alphabet.symbol([a]) for a in word), alphabet)

    def __len__(self) -> int:
        return len(self.symbols)

    def __getitem__(self, pos: int) -> int:
        """Symbol at 1-based position ``pos``."""
        if not 1 <= pos <= len(self.symbols):
            raise IndexError(f"position {pos} outside [1, {len(self.symbols)}]")
        return self.symbols[pos - 1]

    def infix(self, i: int, j: int) -> "Trace":
        """``t[i, j]``, both ends included."""
        if not 1 <= i <= j <= len(self.symbols):
            raise IndexError(f"bad infix [{i}, {j}] of a length-{len(self)} trace")
        return Trace(self.symbols[i - 1 : j], self.alphabet)

    def holds(self, pos: int, prop: str) -> bool:
        return bool(self[pos] >> self.alphabet.index(prop) & 1)

    def __repr__(self) -> str:
        parts = []
        for s in self.symbols:
            parts.append("{" + ",".join(sorted(self.alphabet.names_of(s))) + "}")
        return "Trace(" + ".".join(parts) + ")"


@dataclass(frozen=True)
class Sample:
    alphabet: Alphabet
    positives: tuple[Trace, ...]
    negatives: tuple[Trace, ...]

    def __post_init__(self):
        object.__setattr__(self, "positives", tuple(self.positives))
        object.__setattr__(self, "negatives", tuple(self.negatives))
        for t in self.positives + self.negatives:
            if t.alphabet != self.alphabet:
                raise AlphabetMismatchError("trace alphabet differs from the sample alphabet")
        overlap = {t.symbols for t in self.positives} & {t.symbols for t in self.negatives}
        if overlap:
            raise ValueError(f"{len(overlap)} trace(s) labelled both positive and negative")

    @property
    def traces(self) -> tuple[Trace, ...]:
        """Positives first, then negatives."""
        return self.positives + self.negatives

    @property
    def size(self) -> int:
        return len(self.positives) + len(self.negatives)

    @property
    def length(self) -> int:
        return max((len(t) for t in self.traces), default=0)

    def swapped(self) -> "Sample":
        return Sample(self.alphabet, self.negatives, self.positives)

    @classmethod
    def from_words(cls, positives: Sequence[str], negatives: Sequence[str],
                   propositions: Sequence[str]) -> "Sample":
        alphabet = Alphabet(tuple(propositions))
        return cls(
            alphabet,
            tuple(Trace.from_word(w, alphabet) for w in positives),
            tuple(Trace.from_word(w, alphabet) for w in negatives),
        )


@dataclass(frozen=True, order=True)
class PartialSymbol:
    """Conjunction of literals: ``pos`` bits must be set, ``neg`` bits clear."""

    pos: int
    neg: int

    def __post_init__(self):
        if self.pos & self.neg:
            raise ValueError("a partial symbol cannot require and forbid the same proposition")
        if not (self.pos | self.neg):
            raise ValueError("a partial symbol needs at least one literal")

    @classmethod
    def of(cls, alphabet: Alphabet, literals: Iterable[str]) -> "PartialSymbol":
        """Build from names such as ``["p0", "!p1"]``."""
        pos = neg = 0
        for lit in literals:
            if lit.startswith(("!", "~", "¬")):
                neg |= 1 << alphabet.index(lit[1:])
            else:
                pos |= 1 << alphabet.index(lit)
        return cls(pos, neg)

    @property
    def width(self) -> int:
        return (self.pos | self.neg).bit_count()

    def literals(self) -> list[tuple[int, bool]]:
        """``(proposition index, polarity)`` pairs, by index then positive first."""
        out = []
        for k in range((self.pos | self.neg).bit_length()):
            if self.pos >> k & 1:
                out.append((k, True))
            if self.neg >> k & 1:
                out.append((k, False))
        return out

    def conjoin(self, other: "PartialSymbol") -> "PartialSymbol | None":
        """Pointwise conjunction, or ``None`` when contradictory."""
        pos, neg = self.pos | other.pos, self.neg | other.neg
        if pos & neg:
            return None
        return PartialSymbol(pos, neg)

    def format(self, alphabet: Alphabet) -> str:
        return " & ".join(
            (p if pol else "!" + p) for k, pol in self.literals() for p in [alphabet.propositions[k]]
        )


def symbol_satisfies(sym: int, ps: PartialSymbol, alphabet: Alphabet | None = None) -> bool:
    if alphabet is not None and (ps.pos | ps.neg) >> len(alphabet):
        raise AlphabetMismatchError("partial symbol uses propositions outside the alphabet")
    return sym & ps.pos == ps.pos and not sym & ps.neg


def enumerate_partial_symbols(sample: Sample, width: int) -> list[PartialSymbol]:
    """Width-``width`` partial symbols satisfied somewhere in a positive trace."""
    if width < 1:
        raise ValueError("width must be at least 1")
    k = len(sample.alphabet)
    if width > k:
        return []
    seen = {s for t in sample.positives for s in t.symbols}
    out = []
    for props in itertools.combinations(range(k), width):
        # polarity tuples in lexicographic order, positive before negative
        for pols in itertools.product((True, False), repeat=width):
            pos = sum(1 << p for p, pol in zip(props, pols) if pol)
            neg = sum(1 << p for p, pol in zip(props, pols) if not pol)
            if any(s & pos == pos and not s & neg for s in seen):
                out.append(PartialSymbol(pos, neg))
    return out


class IndexTable:
    """Sorted occurrence positions per (trace id, partial symbol).

    ``query(t, s, i)`` is the suffix of the stored list strictly after ``i``.
    """

    def __init__(self, occurrences: dict[tuple[int, PartialSymbol], tuple[int, ...]]):
        self._occ = occurrences

    def occurrences(self, trace_id: int, ps: PartialSymbol) -> tuple[int, ...]:
        return self._occ[trace_id, ps]

    def query(self, trace_id: int, ps: PartialSymbol, i: int) -> tuple[int, ...]:
        occ = self._occ[trace_id, ps]
        return occ[bisect.bisect_right(occ, i):]

    def __contains__(self, key) -> bool:
        return key in self._occ

    def __len__(self) -> int:
        return len(self._occ)


def build_index(sample: Sample, partial_symbols: Iterable[PartialSymbol]) -> IndexTable:
    partial_symbols = list(partial_symbols)
    occ = {}
    for tid, t in enumerate(sample.traces):
        for ps in partial_symbols:
            occ[tid, ps] = tuple(
                j for j, s in enumerate(t.symbols, start=1) if s & ps.pos == ps.pos and not s & ps.neg
            )
    return IndexTable(occ)


# -- trace file format -------------------------------------------------------

def _parse_trace(text: str, lineno: int, width: int | None) -> tuple[tuple[int, ...], int]:
    symbols = []
    for chunk in text.strip().rstrip(";").split(";"):
        bits = [b.strip() for b in chunk.split(",")]
        if not chunk.strip() or any(b not in ("0", "1") for b in bits):
            raise SampleParseError(f"malformed position {chunk!r}", lineno)
        if width is not None and len(bits) != width:
            raise SampleParseError(f"ragged bit-vector: expected {width} bits, got {len(bits)}", lineno)
        width = len(bits)
        symbols.append(sum(1 << k for k, b in enumerate(bits) if b == "1"))
    if not symbols:
        raise SampleParseError("empty trace", lineno)
    return tuple(symbols), width


def parse_sample(text: str) -> Sample:
    """Parse the ``;``/``,`` trace-file format (see README)."""
    names = None
    sections: list[list[tuple[int, str]]] = [[]]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("@props"):
            if len(sections) > 1 or sections[0] or names is not None:
                raise SampleParseError("@props must be the first line", lineno)
            names = [p.strip() for p in line[len("@props"):].split(",") if p.strip()]
            continue
        if line == "---":
            sections.append([])
            continue
        sections[-1].append((lineno, line))
    if len(sections) < 2:
        raise SampleParseError("missing '---' separator between positive and negative traces")

    width = len(names) if names is not None else None
    pos, neg = [], []
    first_line = {}
    for bucket, section, label in ((pos, sections[0], "positive"), (neg, sections[1], "negative")):
        for lineno, line in section:
            trace, width = _parse_trace(line, lineno, width)
            if trace in first_line and first_line[trace][1] != label:
                raise SampleParseError(
                    f"trace appears as both positive (line {first_line[trace][0]}) and negative",
                    lineno,
                )
            first_line.setdefault(trace, (lineno, label))
            bucket.append(trace)
    if width is None:
        raise SampleParseError("sample contains no traces")
    alphabet = Alphabet(tuple(names)) if names is not None else Alphabet.default(width)
    return Sample(
        alphabet,
        tuple(Trace(s, alphabet) for s in pos),
        tuple(Trace(s, alphabet) for s in neg),
    )


def _format_trace(t: Trace) -> str:
    k = len(t.alphabet)
    return ";".join(",".join(str(s >> b & 1) for b in range(k)) for s in t.symbols)


def serialize_sample(sample: Sample, *, props_header: bool = True, trailer: str | None = None) -> str:
    lines = []
    if props_header:
        lines.append("@props " + ",".join(sample.alphabet.propositions))
    lines.extend(_format_trace(t) for t in sample.positives)
    lines.append("---")
    lines.extend(_format_trace(t) for t in sample.negatives)
    if trailer is not None:
        lines.append("---")
        lines.append(trailer)
    return "\n".join(lines) + "\n"


def load_sample(path) -> Sample:
    with open(path, encoding="utf-8") as fh:
        return parse_sample(fh.read())
