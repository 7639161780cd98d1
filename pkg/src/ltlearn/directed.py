"""Directed formulas and their dynamic-programming enumeration.

A directed formula is a sequence of blocks ``(mode, offset, symbol)``.  The
first block reads ``X^n s`` (exact) or ``F X^n s`` (event); every further
block replaces the previous rightmost symbol ``s'`` by ``s' & X^n s`` or
``s' & F X^n s``.  A *matching* of a formula on a trace is a sequence of
positions ``p_1 < ... < p_l`` obeying the offsets; the witness table of the
formula on the trace is the set of reachable ``p_l``.

Witness sets are stored as position bitmasks (bit ``p-1`` for position
``p``), one machine word per trace, so that extending a whole level of
formulas is a handful of numpy operations over a ``(formulas, traces)``
array.  Traces longer than 64 fall back to Python integers in an object
array.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .formula import (
    And, Atom, Finally, Formula, NegAtom, conj, negate, next_n,
)
from .traces import Alphabet, IndexTable, PartialSymbol, Sample, Trace

__all__ = [
    "EXACT",
    "EVENT",
    "Block",
    "DirectedFormula",
    "witness_ends",
    "to_ltl",
    "dualize_learned",
    "directed_size",
    "dual_size",
    "init_atoms",
    "extend_length",
    "extend_width",
    "parameter_schedule",
    "Level",
    "Enumerator",
]

EXACT = 0
EVENT = 1


@dataclass(frozen=True, order=True)
class Block:
    mode: int
    offset: int
    symbol: PartialSymbol


@dataclass(frozen=True, order=True)
class DirectedFormula:
    blocks: tuple[Block, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if not self.blocks:
            raise ValueError("a directed formula has at least one block")
        for k, b in enumerate(self.blocks):
            if b.mode not in (EXACT, EVENT):
                raise ValueError(f"bad block mode {b.mode}")
            if b.offset < (0 if k == 0 else 1):
                raise ValueError(f"block {k} has offset {b.offset}")

    @classmethod
    def build(cls, alphabet: Alphabet, *blocks) -> "DirectedFormula":
        """``build(ab, ("F", 0, "o"), ("F", 1, ["c", "!w"]))``; mode is "X" or "F"."""
        out = []
        for mode, offset, lits in blocks:
            if isinstance(lits, str):
                lits = [lits]
            out.append(Block(EVENT if mode == "F" else EXACT, offset, PartialSymbol.of(alphabet, lits)))
        return cls(tuple(out))

    @property
    def length(self) -> int:
        return len(self.blocks)

    @property
    def width(self) -> int:
        return max(b.symbol.width for b in self.blocks)

    @property
    def shape(self) -> tuple[tuple[int, int], ...]:
        return tuple((b.mode, b.offset) for b in self.blocks)

    def extend(self, mode: int, offset: int, symbol: PartialSymbol) -> "DirectedFormula":
        """``s &_{=k} D`` (exact) or ``s &_{>=k} D`` (event)."""
        return DirectedFormula(self.blocks + (Block(mode, offset, symbol),))

    def pointwise_and(self, other: "DirectedFormula") -> "DirectedFormula | None":
        if self.shape != other.shape:
            return None
        blocks = []
        for a, b in zip(self.blocks, other.blocks):
            s = a.symbol.conjoin(b.symbol)
            if s is None:
                return None
            blocks.append(Block(a.mode, a.offset, s))
        return DirectedFormula(tuple(blocks))


def _sat(sym: int, ps: PartialSymbol) -> bool:
    return sym & ps.pos == ps.pos and not sym & ps.neg


def witness_ends(d: DirectedFormula, t: Trace) -> tuple[int, ...]:
    """All positions at which the last block can be matched on ``t``."""
    n = len(t)
    first = d.blocks[0]
    if first.mode == EXACT:
        cand = [first.offset + 1] if first.offset + 1 <= n else []
    else:
        cand = range(first.offset + 1, n + 1)
    cur = [p for p in cand if _sat(t[p], first.symbol)]
    for b in d.blocks[1:]:
        if not cur:
            break
        if b.mode == EXACT:
            cand = [p + b.offset for p in cur if p + b.offset <= n]
        else:
            cand = range(min(cur) + b.offset, n + 1)
        cur = [p for p in cand if _sat(t[p], b.symbol)]
    return tuple(cur)


def _symbol_formula(ps: PartialSymbol, alphabet: Alphabet) -> Formula:
    names = alphabet.propositions
    return conj(Atom(names[k]) if pol else NegAtom(names[k]) for k, pol in ps.literals())


def to_ltl(d: DirectedFormula, alphabet: Alphabet) -> Formula:
    f = None
    for b in reversed(d.blocks):
        body = _symbol_formula(b.symbol, alphabet)
        if f is not None:
            body = And(body, f)
        f = next_n(body, b.offset)
        if b.mode == EVENT:
            f = Finally(f)
    return f


def dualize_learned(d: DirectedFormula, alphabet: Alphabet) -> Formula:
    """Negation of a formula learned on the label-swapped sample (G/X/last/| fragment)."""
    return negate(to_ltl(d, alphabet))


def _symbol_size(ps: PartialSymbol) -> int:
    return ps.pos.bit_count() + 2 * ps.neg.bit_count() + ps.width - 1


def directed_size(d: DirectedFormula) -> int:
    """Equals ``formula_size(to_ltl(d))`` without building the tree."""
    return sum(b.mode + b.offset + _symbol_size(b.symbol) for b in d.blocks) + d.length - 1


def dual_size(d: DirectedFormula) -> int:
    """Equals ``formula_size(dualize_learned(d))``; each ``X`` becomes ``last | X``."""
    total = 0
    for b in d.blocks:
        ps = b.symbol
        total += b.mode + 5 * b.offset + 2 * ps.pos.bit_count() + ps.neg.bit_count() + ps.width - 1
    return total + d.length - 1


# -- per-formula steps over an IndexTable --------------------------------------
#
# These follow the textbook formulation (anchors, Index lookups) one formula
# at a time.  They are slow but independent of the vectorised engine below,
# which makes them useful as a cross-check.

Rows = dict  # trace id -> tuple of witness positions


def init_atoms(sample: Sample, index: IndexTable, symbols) -> list[tuple[DirectedFormula, Rows]]:
    out = []
    cap = sample.length - 1
    for s in symbols:
        for n in range(cap + 1):
            exact, event = {}, {}
            for tid, t in enumerate(sample.traces):
                occ = index.query(tid, s, n)  # positions >= n + 1
                if occ and occ[0] == n + 1:
                    exact[tid] = (n + 1,)
                if occ:
                    event[tid] = occ
            if exact:
                out.append((DirectedFormula((Block(EXACT, n, s),)), exact))
            if event:
                out.append((DirectedFormula((Block(EVENT, n, s),)), event))
    return out


def extend_length(d: DirectedFormula, rows: Rows, index: IndexTable, symbols
                  ) -> list[tuple[DirectedFormula, Rows]]:
    acc: dict[DirectedFormula, dict[int, set[int]]] = {}
    for s in symbols:
        for tid, anchors in rows.items():
            for i in anchors:
                J = index.query(tid, s, i)
                if not J:
                    continue
                for j in J:
                    acc.setdefault(d.extend(EXACT, j - i, s), {}).setdefault(tid, set()).add(j)
                # offsets beyond the last occurrence contribute nothing
                lo = 0
                for dd in range(1, J[-1] - i + 1):
                    while J[lo] < i + dd:
                        lo += 1
                    acc.setdefault(d.extend(EVENT, dd, s), {}).setdefault(tid, set()).update(J[lo:])
    return [
        (f, {tid: tuple(sorted(ps)) for tid, ps in sorted(r.items())})
        for f, r in sorted(acc.items())
    ]


def extend_width(d1: DirectedFormula, rows1: Rows, d2: DirectedFormula, rows2: Rows,
                 sample: Sample) -> tuple[DirectedFormula, Rows] | None:
    combined = d1.pointwise_and(d2)
    if combined is None:
        return None
    out = {}
    traces = sample.traces
    for tid in set(rows1) & set(rows2):
        if not set(rows1[tid]) & set(rows2[tid]):
            continue
        # the intersection over-approximates once event gaps are involved
        ends = witness_ends(combined, traces[tid])
        if ends:
            out[tid] = ends
    return combined, out


def parameter_schedule(max_length: int | None = None, max_width: int | None = None
                       ) -> Iterator[tuple[int, int]]:
    """(1,1), (2,1), (1,2), (3,1), (2,2), (4,1), (1,3), (3,2), ...

    Pairs are ordered by ``length + 2 * (width - 1)``, wider first on ties.
    Infinite unless both caps are given.
    """
    top = None
    if max_length is not None and max_width is not None:
        top = max_length + 2 * (max_width - 1)
    cost = 1
    while top is None or cost <= top:
        for w in range((cost + 1) // 2, 0, -1):
            ell = cost - 2 * (w - 1)
            if max_width is not None and w > max_width:
                continue
            if max_length is not None and ell > max_length:
                continue
            yield ell, w
        cost += 1


# -- vectorised engine -------------------------------------------------------

@dataclass
class Level:
    """All directed formulas of one (length, width) pair as parallel arrays.

    Symbols are literal codes: bit ``k`` requires proposition ``k``, bit
    ``k + nprops`` forbids it.
    """

    modes: np.ndarray     # (n, length) int64
    offsets: np.ndarray   # (n, length) int64
    codes: np.ndarray     # (n, length) int64
    masks: np.ndarray     # (n, traces) witness bitmasks
    sizes: np.ndarray     # (n,) formula sizes
    dual_sizes: np.ndarray

    def __len__(self) -> int:
        return len(self.sizes)

    def take(self, idx) -> "Level":
        return Level(self.modes[idx], self.offsets[idx], self.codes[idx], self.masks[idx],
                     self.sizes[idx], self.dual_sizes[idx])

    @staticmethod
    def concat(levels: list["Level"], length: int, n_traces: int, dtype) -> "Level":
        levels = [lv for lv in levels if len(lv)]
        if not levels:
            return Level(*(np.zeros((0, length), np.int64) for _ in range(3)),
                         np.zeros((0, n_traces), dtype), np.zeros(0, np.int64), np.zeros(0, np.int64))
        return Level(*(np.concatenate([getattr(lv, f) for lv in levels])
                       for f in ("modes", "offsets", "codes", "masks", "sizes", "dual_sizes")))


class EnumerationTimeout(Exception):
    pass


class EnumerationBudgetExceeded(MemoryError):
    """A level would push the cached witness tables past the memory budget."""


def _mask_dtype(max_len: int):
    for dt in (np.uint8, np.uint16, np.uint32, np.uint64):
        if max_len <= np.iinfo(dt).bits:
            return dt
    return object


class Enumerator:
    """Generates directed formulas level by level with their witness tables.

    ``role`` selects which traces must be matched for a formula to be kept:
    ``"pos"`` keeps formulas satisfied by some positive trace, ``"neg"`` does
    the same for negatives (the label-swapped run whose results get negated).
    ``size_limit`` prunes formulas of that size or more, measured as the
    directed size for ``"pos"`` and the dual size for ``"neg"``.
    """

    chunk_cells = 4_000_000

    def __init__(self, sample: Sample, role: str = "pos", max_width: int = 3,
                 memory_budget: int | None = None):
        if role not in ("pos", "neg"):
            raise ValueError("role is 'pos' or 'neg'")
        self.sample = sample
        self.alphabet = sample.alphabet
        self.role = role
        self.max_width = max_width
        self.nprops = len(sample.alphabet)
        traces = sample.traces
        self.n_traces = len(traces)
        self.n_pos = len(sample.positives)
        self.max_len = sample.length
        self.dtype = _mask_dtype(self.max_len)
        self.memory_budget = memory_budget
        self.full = np.array([(1 << len(t)) - 1 for t in traces], dtype=self.dtype)
        k = self.nprops
        lit = []
        for b in range(2 * k):
            prop, positive = b % k, b < k
            row = []
            for t in traces:
                m = 0
                for p, s in enumerate(t.symbols):
                    if bool(s >> prop & 1) == positive:
                        m |= 1 << p
                row.append(m)
            lit.append(row)
        self.lit_occ = np.array(lit, dtype=self.dtype).reshape(2 * k, self.n_traces)
        if role == "pos":
            self.role_cols = slice(0, self.n_pos)
        else:
            self.role_cols = slice(self.n_pos, self.n_traces)
        self.size_limit: int | None = None
        self.deadline: float | None = None
        self._clock = None
        self._new: dict[tuple[int, int], Level] = {}
        self._one = self._cast(1)

    # small helpers -----------------------------------------------------------

    def _cast(self, x):
        if self.dtype is object:
            return np.asarray(x, dtype=object) if np.ndim(x) else int(x)
        return np.asarray(x, dtype=self.dtype) if np.ndim(x) else self.dtype(x)

    def _check_time(self):
        if self.deadline is not None and self._clock() > self.deadline:
            raise EnumerationTimeout

    def _alive(self, masks: np.ndarray) -> np.ndarray:
        return (masks[:, self.role_cols] != 0).any(axis=1)

    def _event(self, shifted: np.ndarray) -> np.ndarray:
        # positions at or after the lowest set bit
        low = shifted & (~shifted + self._one)
        return self.full & ~(low - self._one)

    def _occ_of(self, codes: np.ndarray) -> np.ndarray:
        occ = np.broadcast_to(self.full, (len(codes), self.n_traces)).copy()
        for b in range(2 * self.nprops):
            sel = ((codes >> b) & 1).astype(bool)
            if sel.any():
                occ[sel] &= self.lit_occ[b]
        return occ

    def _popcount(self, codes: np.ndarray, lo: int, hi: int) -> np.ndarray:
        out = np.zeros(codes.shape, np.int64)
        for b in range(lo, hi):
            out += (codes >> b) & 1
        return out

    def _sizes(self, modes, offsets, codes) -> tuple[np.ndarray, np.ndarray]:
        k = self.nprops
        npos = self._popcount(codes, 0, k)
        nneg = self._popcount(codes, k, 2 * k)
        w = npos + nneg
        ell = modes.shape[1]
        size = (modes + offsets + npos + 2 * nneg + w - 1).sum(axis=1) + ell - 1
        dsize = (modes + 5 * offsets + 2 * npos + nneg + w - 1).sum(axis=1) + ell - 1
        return size, dsize

    def _prune_size(self, level: Level) -> Level:
        if self.size_limit is None or not len(level):
            return level
        sizes = level.sizes if self.role == "pos" else level.dual_sizes
        keep = sizes < self.size_limit
        return level if keep.all() else level.take(keep)

    def _row_bytes(self, length: int) -> int:
        item = 8 if self.dtype is object else np.dtype(self.dtype).itemsize
        return self.n_traces * item + 3 * length * 8 + 16

    def cached_bytes(self) -> int:
        return sum(len(lv) * self._row_bytes(lv.modes.shape[1]) for lv in self._new.values())

    def _charge(self, parts: list[Level], length: int) -> None:
        if self.memory_budget is None:
            return
        pending = sum(len(p) for p in parts) * self._row_bytes(length)
        if self.cached_bytes() + pending > self.memory_budget:
            raise EnumerationBudgetExceeded(
                f"length-{length} level exceeds the {self.memory_budget >> 20} MiB table budget"
            )

    def _empty(self, length: int) -> Level:
        return Level.concat([], length, self.n_traces, self.dtype)

    # level construction ------------------------------------------------------

    def new_formulas(self, length: int, width: int) -> Level:
        """Formulas of exactly this length and width, subject to ``size_limit``."""
        key = (length, width)
        if key not in self._new:
            if width > min(self.max_width, self.nprops):
                level = self._empty(length)
            elif length == 1 and width == 1:
                level = self._init_level()
            elif width == 1:
                level = self._length_step(self.new_formulas(length - 1, 1))
            else:
                level = self._width_step(self.new_formulas(length, width - 1),
                                         self.new_formulas(length, 1), width)
            self._new[key] = level
        level = self._prune_size(self._new[key])
        self._new[key] = level
        return level

    def _init_level(self) -> Level:
        k2 = 2 * self.nprops
        parts = []
        full = self.full
        for mode in (EXACT, EVENT):
            for n in range(self.max_len):
                if mode == EXACT:
                    start = full & self._cast(1 << n)
                else:
                    start = full & self._cast(~((1 << n) - 1) & ((1 << self.max_len) - 1))
                masks = start[None, :] & self.lit_occ
                keep = self._alive(masks)
                if not keep.any():
                    continue
                codes = (np.int64(1) << np.arange(k2, dtype=np.int64))[keep][:, None]
                m = len(codes)
                modes = np.full((m, 1), mode, np.int64)
                offsets = np.full((m, 1), n, np.int64)
                size, dsize = self._sizes(modes, offsets, codes)
                parts.append(Level(modes, offsets, codes, masks[keep], size, dsize))
        return self._prune_size(Level.concat(parts, 1, self.n_traces, self.dtype))

    def _length_step(self, parent: Level) -> Level:
        ell = parent.modes.shape[1] + 1
        parts = []
        if not len(parent):
            return self._empty(ell)
        k = self.nprops
        lit_size = np.array([1] * k + [2] * k, np.int64)
        dlit_size = np.array([2] * k + [1] * k, np.int64)
        for mode in (EXACT, EVENT):
            for d in range(1, self.max_len):
                self._check_time()
                shifted = parent.masks << self._cast(d)
                stepped = shifted & self.full if mode == EXACT else self._event(shifted)
                rows = np.nonzero(self._alive(stepped))[0]
                if not len(rows):
                    continue
                stepped = stepped[rows]
                for b in range(2 * k):
                    add = 1 + mode + d + lit_size[b]
                    dadd = 1 + mode + 5 * d + dlit_size[b]
                    sizes = parent.sizes[rows] + add
                    dsizes = parent.dual_sizes[rows] + dadd
                    if self.size_limit is not None:
                        within = (sizes if self.role == "pos" else dsizes) < self.size_limit
                    else:
                        within = np.ones(len(rows), bool)
                    if not within.any():
                        continue
                    masks = stepped & self.lit_occ[b]
                    keep = self._alive(masks) & within
                    if not keep.any():
                        continue
                    sel = rows[keep]
                    m = len(sel)
                    parts.append(Level(
                        np.hstack([parent.modes[sel], np.full((m, 1), mode, np.int64)]),
                        np.hstack([parent.offsets[sel], np.full((m, 1), d, np.int64)]),
                        np.hstack([parent.codes[sel], np.full((m, 1), 1 << b, np.int64)]),
                        masks[keep], sizes[keep], dsizes[keep],
                    ))
                    self._charge(parts, ell)
        return Level.concat(parts, ell, self.n_traces, self.dtype)

    def _recompute(self, modes, offsets, codes) -> np.ndarray:
        """Exact witness masks by the forward matching recurrence."""
        n, ell = modes.shape
        cur = None
        for j in range(ell):
            occ = self._occ_of(codes[:, j])
            off = self._cast(offsets[:, j])[:, None]
            ev = modes[:, j].astype(bool)[:, None]
            if j == 0:
                exact = self.full[None, :] & (self._one << off)
                event = self.full[None, :] & ~((self._one << off) - self._one)
            else:
                shifted = cur << off
                exact = shifted & self.full
                event = self._event(shifted)
            cur = np.where(ev, event, exact) & occ
        return cur

    def _pair_chunks(self, wider: Level, narrow: Level):
        """Index pairs ``(a, b)`` of rows with equal shape, in bounded chunks.

        Pairs are never materialised all at once: a wide level can hold
        hundreds of millions of them.  When both levels are the same object
        only pairs with ``a < b`` are produced.
        """
        same = wider is narrow
        na = len(wider)
        shapes = np.vstack([np.hstack([wider.modes, wider.offsets]),
                            np.hstack([narrow.modes, narrow.offsets])])
        _, inv = np.unique(shapes, axis=0, return_inverse=True)
        inv = inv.ravel()
        ga, gb = inv[:na], inv[na:]
        oa, ob = np.argsort(ga, kind="stable"), np.argsort(gb, kind="stable")
        n_groups = int(inv.max()) + 1
        sa = np.searchsorted(ga[oa], np.arange(n_groups + 1))
        sb = np.searchsorted(gb[ob], np.arange(n_groups + 1))
        step = max(1, self.chunk_cells // max(1, self.n_traces))
        for g in range(n_groups):
            rows_a, rows_b = oa[sa[g]:sa[g + 1]], ob[sb[g]:sb[g + 1]]
            if not len(rows_a) or not len(rows_b):
                continue
            for lo_b in range(0, len(rows_b), step):
                bs = rows_b[lo_b:lo_b + step]
                per = max(1, step // len(bs))
                for lo_a in range(0, len(rows_a), per):
                    as_ = rows_a[lo_a:lo_a + per]
                    a = np.repeat(as_, len(bs))
                    b = np.tile(bs, len(as_))
                    if same:
                        keep = a < b
                        a, b = a[keep], b[keep]
                    if len(a):
                        yield a, b

    def _width_step(self, wider: Level, narrow: Level, width: int) -> Level:
        ell = narrow.modes.shape[1]
        if not len(wider) or not len(narrow):
            return self._empty(ell)
        k = self.nprops
        low = (1 << k) - 1
        parts = []
        for a, b in self._pair_chunks(wider, narrow):
            self._check_time()
            codes = wider.codes[a] | narrow.codes[b]
            ok = ((codes & low) & (codes >> k)) == 0
            ok = ok.all(axis=1)
            widths = self._popcount(codes, 0, 2 * k).max(axis=1)
            ok &= widths == width
            if not ok.any():
                continue
            a, b, codes = a[ok], b[ok], codes[ok]
            # necessary condition: a common witness end on some kept trace
            inter = wider.masks[a][:, self.role_cols] & narrow.masks[b][:, self.role_cols]
            ok = (inter != 0).any(axis=1)
            if not ok.any():
                continue
            a, codes = a[ok], codes[ok]
            modes, offsets = wider.modes[a], wider.offsets[a]
            size, dsize = self._sizes(modes, offsets, codes)
            if self.size_limit is not None:
                within = (size if self.role == "pos" else dsize) < self.size_limit
                if not within.any():
                    continue
                modes, offsets, codes, size, dsize = (x[within] for x in (modes, offsets, codes, size, dsize))
            masks = self._recompute(modes, offsets, codes)
            keep = self._alive(masks)
            parts.append(Level(modes[keep], offsets[keep], codes[keep], masks[keep], size[keep], dsize[keep]))
            self._charge(parts, ell)
        level = Level.concat(parts, ell, self.n_traces, self.dtype)
        if not len(level):
            return level
        keys = np.hstack([level.modes, level.offsets, level.codes])
        _, first = np.unique(keys, axis=0, return_index=True)
        return level.take(np.sort(first))

    # conversions -------------------------------------------------------------

    def formula(self, level: Level, i: int) -> DirectedFormula:
        k = self.nprops
        low = (1 << k) - 1
        blocks = []
        for mode, off, code in zip(level.modes[i], level.offsets[i], level.codes[i]):
            code = int(code)
            blocks.append(Block(int(mode), int(off), PartialSymbol(code & low, code >> k)))
        return DirectedFormula(tuple(blocks))

    def rows(self, level: Level, i: int) -> Rows:
        """Witness sets of row ``i`` as ``{trace id: positions}``."""
        out = {}
        for tid, m in enumerate(level.masks[i]):
            m = int(m)
            if m:
                out[tid] = tuple(p + 1 for p in range(m.bit_length()) if m >> p & 1)
        return out

    def satisfied(self, level: Level) -> np.ndarray:
        """``(n, traces)`` boolean matrix: trace satisfies the directed formula."""
        return level.masks != 0
