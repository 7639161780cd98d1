"""Brute-force baseline: every NNF formula by increasing size.

Formulas are built bottom-up from literals with ``&``, ``|``, ``X``, ``F``
and ``G``; trees are distinct as trees (``p & q`` and ``q & p`` both
appear), no semantic deduplication happens.  Use it to certify minimal
sizes on small samples, not for speed.
"""

from __future__ import annotations

from typing import Iterator

from .formula import And, Atom, Finally, Formula, Globally, NegAtom, Next, Or
from .semantics import _allowed, is_separating, sat_mask
from .traces import Alphabet, Sample

__all__ = ["OracleGuardError", "enumerate_formulas", "count_formulas", "minimal_separating_size", "check_guard"]

# formula evaluations (formulas x traces) above which the oracle refuses
WORK_LIMIT = 20_000_000


class OracleGuardError(ValueError):
    pass


def count_formulas(max_size: int, n_props: int) -> int:
    """Number of formulas :func:`enumerate_formulas` yields."""
    a = [0] * (max_size + 1)
    for s in range(1, max_size + 1):
        a[s] = (n_props if s == 1 else 0) + (n_props if s == 2 else 0) + 3 * a[s - 1]
        a[s] += 2 * sum(a[ls] * a[s - 1 - ls] for ls in range(1, s - 1))
    return sum(a)


def check_guard(sample: Sample, max_size: int) -> None:
    """Refuse inputs where brute force would clearly take too long."""
    work = count_formulas(max_size, len(sample.alphabet)) * len(sample.traces)
    if work > WORK_LIMIT:
        raise OracleGuardError(
            f"oracle input too large: about {work:,} formula evaluations "
            f"(limit {WORK_LIMIT:,}); pass force=True to override"
        )


def _grow(max_size: int, alphabet: Alphabet, tables=None) -> Iterator[tuple[int, Formula, tuple | None]]:
    """Yield ``(size, formula, per-trace tables)`` in non-decreasing size.

    ``tables`` is ``(prop_masks, fulls)`` for a sample, or None to skip
    evaluation.
    """
    by_size: dict[int, list[tuple[Formula, tuple | None]]] = {}

    def leaf(name: str, positive: bool):
        if tables is None:
            return None
        k = alphabet.index(name)
        props, fulls = tables
        return tuple(pm[k] if positive else full & ~pm[k] for pm, full in zip(props, fulls))

    fulls = tables[1] if tables is not None else None
    for size in range(1, max_size + 1):
        level: list[tuple[Formula, tuple | None]] = []
        if size == 1:
            level += [(Atom(p), leaf(p, True)) for p in alphabet.propositions]
        if size == 2:
            level += [(NegAtom(p), leaf(p, False)) for p in alphabet.propositions]
        for f, tab in by_size.get(size - 1, ()):
            if tables is None:
                level += [(Next(f), None), (Finally(f), None), (Globally(f), None)]
                continue
            level.append((Next(f), tuple(m >> 1 for m in tab)))
            level.append((Finally(f), tuple((1 << m.bit_length()) - 1 for m in tab)))
            level.append((Globally(f), tuple(
                full & ~((1 << (full & ~m).bit_length()) - 1) for m, full in zip(tab, fulls)
            )))
        for ls in range(1, size - 1):
            rs = size - 1 - ls
            for f, tf in by_size.get(ls, ()):
                for g, tg in by_size.get(rs, ()):
                    if tables is None:
                        level += [(And(f, g), None), (Or(f, g), None)]
                    else:
                        level.append((And(f, g), tuple(a & b for a, b in zip(tf, tg))))
                        level.append((Or(f, g), tuple(a | b for a, b in zip(tf, tg))))
        by_size[size] = level
        for f, tab in level:
            yield size, f, tab


def enumerate_formulas(max_size: int, alphabet: Alphabet) -> Iterator[Formula]:
    """Every fragment formula of size at most ``max_size``, smallest first."""
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    for _, f, _ in _grow(max_size, alphabet):
        yield f


def _sample_tables(sample: Sample):
    props, fulls = [], []
    k = len(sample.alphabet)
    for t in sample.traces:
        pm = [0] * k
        for pos, sym in enumerate(t.symbols):
            for b in range(k):
                if sym >> b & 1:
                    pm[b] |= 1 << pos
        props.append(pm)
        fulls.append((1 << len(t)) - 1)
    return props, fulls


def minimal_separating_size(sample: Sample, max_size: int, epsilon: float = 0.0,
                            force: bool = False) -> tuple[int, Formula] | None:
    """Smallest ``(size, witness)`` with an epsilon-separating formula, or None."""
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    if not 0 <= epsilon < 1:
        raise ValueError("epsilon must lie in [0, 1)")
    if not force:
        check_guard(sample, max_size)
    n_pos = len(sample.positives)
    n_neg = len(sample.negatives)
    allow_pos = _allowed(epsilon, n_pos)
    allow_neg = _allowed(epsilon, n_neg)
    for size, f, tab in _grow(max_size, sample.alphabet, _sample_tables(sample)):
        missed = sum(1 for m in tab[:n_pos] if not m & 1)
        if missed > allow_pos:
            continue
        accepted = sum(1 for m in tab[n_pos:] if m & 1)
        if accepted > allow_neg:
            continue
        if not is_separating(sat_mask(f, sample), epsilon):  # pragma: no cover - table bug guard
            raise AssertionError(f"oracle tables disagree with evaluation on {f}")
        return size, f
    return None
