"""Anytime learner: directed enumeration interleaved with greedy combination."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .combine import Pool, ScoredFormula, greedy_combine
from .directed import Enumerator, EnumerationBudgetExceeded, EnumerationTimeout, Level, dualize_learned, parameter_schedule, to_ltl
from .formula import Formula, formula_size, print_formula
from .semantics import SatMask, _allowed, error_rates, is_separating, sat_mask
from .traces import Sample

__all__ = ["InvalidSampleError", "LearnerConfig", "Emission", "LearnResult", "learn"]

log = logging.getLogger(__name__)


class InvalidSampleError(ValueError):
    pass


@dataclass
class LearnerConfig:
    epsilon: float = 0.0
    k: int = 5
    pool_capacity: int = 200
    max_length: int = 6
    max_width: int = 3
    timeout: float | None = None
    seed: int = 0  # recorded only; the search is deterministic
    emit_intermediate: bool = True
    use_dual: bool = True
    memory_budget_mb: int | None = 1024  # per polarity, for cached witness tables

    def __post_init__(self):
        if not 0 <= self.epsilon < 1:
            raise ValueError("epsilon must lie in [0, 1)")
        if min(self.k, self.pool_capacity, self.max_length, self.max_width) < 1:
            raise ValueError("k, pool_capacity, max_length and max_width must be positive")
        if self.timeout is not None and self.timeout < 0:
            raise ValueError("timeout must be non-negative")


@dataclass(frozen=True)
class Emission:
    elapsed: float
    formula: Formula
    size: int


@dataclass
class LearnResult:
    formula: Formula | None
    size: int | None
    missed_pos_rate: float | None
    accepted_neg_rate: float | None
    time_to_first: float | None
    time_to_best: float | None
    total_time: float
    timed_out: bool
    emissions: list[Emission] = field(default_factory=list)

    @property
    def text(self) -> str | None:
        return None if self.formula is None else print_formula(self.formula)


def _bits(row: np.ndarray) -> int:
    if not len(row):
        return 0
    return int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")


class _Run:
    def __init__(self, sample: Sample, config: LearnerConfig, emit, clock):
        self.sample = sample
        self.config = config
        self.emit = emit
        self.clock = clock
        self.start = clock()
        self.deadline = None if config.timeout is None else self.start + config.timeout
        self.n_pos = len(sample.positives)
        self.n_neg = len(sample.negatives)
        self.allowed_pos = _allowed(config.epsilon, self.n_pos)
        self.allowed_neg = _allowed(config.epsilon, self.n_neg)
        self.pool = Pool(config.pool_capacity)
        self.best: ScoredFormula | None = None
        self.best_errors = None
        self.emissions: list[Emission] = []
        self.time_to_best = None

    def elapsed(self) -> float:
        return self.clock() - self.start

    def expired(self) -> bool:
        return self.deadline is not None and self.clock() > self.deadline

    def consider(self, formula: Formula, size: int) -> None:
        if self.best is not None and size > self.best.size:
            return
        mask = sat_mask(formula, self.sample)  # fresh evaluation, never trust cached masks
        if not is_separating(mask, self.config.epsilon):
            log.warning("candidate %s failed re-verification", print_formula(formula))
            return
        errors = self.n_pos - mask.pos_count + mask.neg_count
        if self.best is not None:
            if size == self.best.size and errors >= self.best_errors:
                return
        improved = self.best is None or size < self.best.size
        self.best = ScoredFormula(formula, mask, size)
        self.best_errors = errors
        self.time_to_best = self.elapsed()
        if improved:
            em = Emission(self.time_to_best, formula, size)
            self.emissions.append(em)
            if self.emit is not None and self.config.emit_intermediate:
                self.emit(em.elapsed, formula, size)

    def absorb(self, enum: Enumerator, level: Level, dual: bool) -> None:
        if not len(level):
            return
        sat = level.masks != 0
        if dual:
            sat = ~sat
        sizes = level.dual_sizes if dual else level.sizes
        pos_sat = sat[:, : self.n_pos].sum(axis=1)
        neg_sat = sat[:, self.n_pos :].sum(axis=1)
        alphabet = self.sample.alphabet

        def build(i: int) -> Formula:
            d = enum.formula(level, int(i))
            return dualize_learned(d, alphabet) if dual else to_ltl(d, alphabet)

        sep = (self.n_pos - pos_sat <= self.allowed_pos) & (neg_sat <= self.allowed_neg)
        if self.best is not None:
            sep &= sizes <= self.best.size
        if sep.any():
            idx = np.nonzero(sep)[0]
            errors = (self.n_pos - pos_sat[idx]) + neg_sat[idx]
            order = np.lexsort((idx, errors, sizes[idx]))
            i = idx[order[0]]
            f = build(i)
            assert formula_size(f) == sizes[i]
            self.consider(f, int(sizes[i]))

        scores = (pos_sat + self.n_neg - neg_sat) / (np.sqrt(sizes) + 1)
        order = np.lexsort((np.arange(len(sizes)), sizes, -scores))
        for i in order[: self.config.pool_capacity]:
            if self.pool.full() and scores[i] < self.pool.min_score():
                break
            if self.best is not None and sizes[i] >= self.best.size:
                continue
            mask = SatMask(_bits(sat[i, : self.n_pos]), _bits(sat[i, self.n_pos :]), self.n_pos, self.n_neg)
            self.pool.insert(ScoredFormula(build(i), mask, int(sizes[i])))

    def run(self) -> LearnResult:
        cfg = self.config
        timed_out = False
        budget = None if cfg.memory_budget_mb is None else cfg.memory_budget_mb << 20
        enums = [(Enumerator(self.sample, "pos", cfg.max_width, budget), False)]
        if cfg.use_dual:
            enums.append((Enumerator(self.sample, "neg", cfg.max_width, budget), True))
        for enum, _ in enums:
            enum.deadline = self.deadline
            enum._clock = self.clock
        try:
            for ell, w in parameter_schedule(cfg.max_length, cfg.max_width):
                if self.expired():
                    timed_out = True
                    break
                exhausted = False
                for enum, dual in enums:
                    if self.best is not None:
                        enum.size_limit = self.best.size
                    try:
                        level = enum.new_formulas(ell, w)
                    except EnumerationBudgetExceeded as exc:
                        log.info("stopping enumeration: %s", exc)
                        exhausted = True
                        break
                    self.absorb(enum, level, dual)
                    if self.expired():
                        raise EnumerationTimeout
                log.debug("(%d,%d) done at %.3fs, pool %d", ell, w, self.elapsed(), len(self.pool))
                bound = None if self.best is None else self.best.size
                found = greedy_combine(self.pool, cfg.epsilon, bound, self.deadline, cfg.k, self.clock)
                if found is not None:
                    self.consider(found.formula, found.size)
                if exhausted or self.best is not None and self.best.size <= 1:
                    break
                if self.expired():
                    timed_out = True
                    break
        except EnumerationTimeout:
            timed_out = True
        total = self.elapsed()
        if self.best is None:
            return LearnResult(None, None, None, None, None, None, total, timed_out, self.emissions)
        mask = sat_mask(self.best.formula, self.sample)
        assert is_separating(mask, cfg.epsilon)
        missed, accepted = error_rates(mask)
        return LearnResult(
            self.best.formula, self.best.size, missed, accepted,
            self.emissions[0].elapsed, self.time_to_best, total, timed_out, self.emissions,
        )


def learn(sample: Sample, config: LearnerConfig | None = None,
          emit: Callable[[float, Formula, int], None] | None = None,
          clock: Callable[[], float] = time.monotonic) -> LearnResult:
    """Search for a small (epsilon-)separating formula; anytime.

    ``emit(elapsed, formula, size)`` is called each time the incumbent
    strictly shrinks.  With ``config.timeout`` set, whatever incumbent exists
    at the deadline is returned.
    """
    config = config or LearnerConfig()
    if not sample.positives or not sample.negatives:
        raise InvalidSampleError("learning needs at least one positive and one negative trace")
    return _Run(sample, config, emit, clock).run()
