"""Greedy Boolean subset cover over satisfaction masks."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

from .formula import And, Formula, Or, print_formula
from .semantics import SatMask, is_separating

__all__ = ["score", "ScoredFormula", "Pool", "greedy_combine", "cover_combine"]


def score(mask: SatMask, size: int) -> float:
    if size < 1:
        raise ValueError("formula size is at least 1")
    correct = mask.pos_count + (mask.n_neg - mask.neg_count)
    return correct / (math.sqrt(size) + 1)


@dataclass(eq=False)
class ScoredFormula:
    formula: Formula
    mask: SatMask
    size: int
    score: float = field(init=False)

    def __post_init__(self):
        self.score = score(self.mask, self.size)

    @property
    def text(self) -> str:
        t = getattr(self, "_text", None)
        if t is None:
            t = self._text = print_formula(self.formula)
        return t

    def rank_key(self) -> tuple:
        """Sort key: best first (high score, small size, lexicographic text)."""
        return (-self.score, self.size, self.text)


class Pool:
    """Bounded formula store keyed by satisfaction mask.

    Only the smallest formula per mask is kept; past ``capacity`` the lowest
    scoring entry is evicted.
    """

    def __init__(self, capacity: int = 200):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._by_mask: dict[tuple[int, int], ScoredFormula] = {}

    def __len__(self) -> int:
        return len(self._by_mask)

    def __iter__(self):
        return iter(self._by_mask.values())

    def entries(self) -> list[ScoredFormula]:
        return sorted(self._by_mask.values(), key=ScoredFormula.rank_key)

    def _worst(self) -> ScoredFormula:
        return max(self._by_mask.values(), key=ScoredFormula.rank_key)

    def insert(self, sf: ScoredFormula) -> bool:
        key = (sf.mask.pos_bits, sf.mask.neg_bits)
        old = self._by_mask.get(key)
        if old is not None:
            if (sf.size, sf.text) >= (old.size, old.text):
                return False
            self._by_mask[key] = sf
            return True
        if len(self._by_mask) >= self.capacity:
            worst = self._worst()
            if sf.rank_key() >= worst.rank_key():
                return False
            del self._by_mask[(worst.mask.pos_bits, worst.mask.neg_bits)]
        self._by_mask[key] = sf
        return True

    def min_score(self) -> float:
        return min(e.score for e in self._by_mask.values()) if self._by_mask else -math.inf

    def full(self) -> bool:
        return len(self._by_mask) >= self.capacity


def _best_separating(pool: Pool, epsilon: float) -> ScoredFormula | None:
    seps = [e for e in pool if is_separating(e.mask, epsilon)]
    if not seps:
        return None
    return min(seps, key=lambda e: (e.size, _errors(e.mask), e.text))


def _errors(mask: SatMask) -> int:
    return mask.n_pos - mask.pos_count + mask.neg_count


def greedy_combine(pool: Pool, epsilon: float = 0.0, size_bound: int | None = None,
                   deadline: float | None = None, k: int = 5,
                   clock: Callable[[], float] = time.monotonic) -> ScoredFormula | None:
    """Grow ``pool`` with conjunctions/disjunctions until one separates.

    Each round takes the ``k`` best-scoring entries and, for each of them,
    the single best combination with any other pool entry; it is added when
    it beats the entry it was built from.  Returns the best separating entry
    (below ``size_bound`` if given), or ``None`` once a round adds nothing
    or the deadline passes.
    """
    if not len(pool):
        return None
    while True:
        found = _best_separating(pool, epsilon)
        if found is not None and (size_bound is None or found.size < size_bound):
            return found
        if deadline is not None and clock() > deadline:
            return None
        top = pool.entries()[:k]
        others = list(pool)
        n_pos, n_neg = top[0].mask.n_pos, top[0].mask.n_neg
        sqrt = math.sqrt
        inserted = False
        for phi in top:
            best = None
            best_key = None
            pb, nb = phi.mask.pos_bits, phi.mask.neg_bits
            for psi in others:
                if psi is phi:
                    continue
                size = phi.size + psi.size + 1
                if size_bound is not None and size >= size_bound:
                    continue
                denom = sqrt(size) + 1
                for op in (And, Or):
                    if op is And:
                        p, n = pb & psi.mask.pos_bits, nb & psi.mask.neg_bits
                    else:
                        p, n = pb | psi.mask.pos_bits, nb | psi.mask.neg_bits
                    s = (p.bit_count() + n_neg - n.bit_count()) / denom
                    key = (-s, size)
                    if best_key is not None and key > best_key:
                        continue
                    cand = (op, psi, p, n, s, size)
                    if best_key is not None and key == best_key:
                        if _text(cand, phi) >= _text(best, phi):
                            continue
                    best, best_key = cand, key
            if best is None or best[4] <= phi.score:
                continue
            op, psi, p, n, s, size = best
            sf = ScoredFormula(op(phi.formula, psi.formula), SatMask(p, n, n_pos, n_neg), size)
            if pool.insert(sf):
                inserted = True
        if not inserted:
            found = _best_separating(pool, epsilon)
            if found is not None and (size_bound is None or found.size < size_bound):
                return found
            found = cover_combine(pool, epsilon, size_bound, k)
            if found is not None:
                pool.insert(found)
            return found


def cover_combine(pool: Pool, epsilon: float = 0.0, size_bound: int | None = None,
                  k: int = 5) -> ScoredFormula | None:
    """Classical greedy set cover over the pool, in both polarities.

    Conjunctive: start from an entry that keeps (almost) all positives and
    repeatedly conjoin the entry rejecting the most still-accepted negatives
    per unit of size, never dropping positives past the allowance.  The
    disjunctive pass is the mirror image.  The score-driven pass cannot take
    such steps when each partial conjunction scores below its seed.
    """
    entries = pool.entries()
    if not entries:
        return None
    n_pos, n_neg = entries[0].mask.n_pos, entries[0].mask.n_neg
    best = None
    for conjunctive in (True, False):
        seeds = [e for e in entries if _keeps(e.mask, epsilon, conjunctive)][:k]
        for seed in seeds:
            found = _cover_from(seed, entries, epsilon, size_bound, conjunctive, n_pos, n_neg)
            if found is not None and (best is None or (found.size, found.text) < (best.size, best.text)):
                best = found
    return best


def _keeps(mask: SatMask, epsilon: float, conjunctive: bool) -> bool:
    """The side a cover must preserve is within the error allowance."""
    if conjunctive:
        return is_separating(SatMask(mask.pos_bits, 0, mask.n_pos, mask.n_neg), epsilon)
    return is_separating(SatMask((1 << mask.n_pos) - 1, mask.neg_bits, mask.n_pos, mask.n_neg), epsilon)


def _cover_from(seed: ScoredFormula, entries: list[ScoredFormula], epsilon: float,
                size_bound: int | None, conjunctive: bool, n_pos: int, n_neg: int) -> ScoredFormula | None:
    cur = seed
    used = {id(seed)}
    while not is_separating(cur.mask, epsilon):
        pick, pick_key = None, None
        for psi in entries:
            if id(psi) in used:
                continue
            size = cur.size + psi.size + 1
            if size_bound is not None and size >= size_bound:
                continue
            mask = cur.mask & psi.mask if conjunctive else cur.mask | psi.mask
            if not _keeps(mask, epsilon, conjunctive):
                continue
            if conjunctive:
                gain = cur.mask.neg_count - mask.neg_count
            else:
                gain = mask.pos_count - cur.mask.pos_count
            if gain <= 0:
                continue
            key = (-gain / psi.size, psi.size, psi.text)
            if pick_key is None or key < pick_key:
                pick, pick_key = (psi, mask, size), key
        if pick is None:
            return None
        psi, mask, size = pick
        used.add(id(psi))
        op = And if conjunctive else Or
        cur = ScoredFormula(op(cur.formula, psi.formula), mask, size)
    return cur if cur is not seed else None


def _text(cand, phi: ScoredFormula) -> str:
    op, psi = cand[0], cand[1]
    return print_formula(op(phi.formula, psi.formula))
