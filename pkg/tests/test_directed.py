import itertools

import pytest
from hypothesis import given, settings

from ltlearn.directed import (
    EVENT, EXACT, Block, DirectedFormula, Enumerator, EnumerationBudgetExceeded, directed_size,
    dual_size, dualize_learned, extend_length, extend_width, init_atoms, parameter_schedule,
    to_ltl, witness_ends,
)
from ltlearn.formula import formula_size, parse_formula
from ltlearn.semantics import evaluate
from ltlearn.traces import Alphabet, PartialSymbol, Sample, Trace, build_index, enumerate_partial_symbols

from conftest import ROBOT, U1, V1
from strategies import PQ, samples, traces

AB = Alphabet(tuple(ROBOT))


def robot_trace(word):
    return Trace.from_word(word, AB)


def D(*blocks, alphabet=AB):
    return DirectedFormula.build(alphabet, *blocks)


# -- representation ------------------------------------------------------------

@pytest.mark.parametrize("d, text, size", [
    (D(("F", 0, "o"), ("F", 1, "c")), "F(o & F X c)", 6),
    (D(("X", 4, "o")), "X X X X o", 5),
    (D(("F", 0, ["h", "!c"])), "F(h & !c)", 5),
    (D(("X", 1, "o"), ("X", 1, "h"), ("X", 2, "c")), "X(o & X(h & X X c))", 9),
])
def test_to_ltl_and_size(d, text, size):
    f = to_ltl(d, AB)
    assert str(f) == text
    assert formula_size(f) == size == directed_size(d)


def test_length_extension_example():
    # c &_{=2} X(a & X b) = X(a & X(b & X^2 c))
    ab = Alphabet(("a", "b", "c"))
    d = D(("X", 1, "a"), ("X", 1, "b"), alphabet=ab).extend(EXACT, 2, PartialSymbol.of(ab, ["c"]))
    assert to_ltl(d, ab) == parse_formula("X(a & X(b & X X c))")


def test_width_extension_example():
    ab = Alphabet(("a", "b", "c"))
    d1 = D(("X", 1, "a"), ("X", 1, "b"), alphabet=ab)
    d2 = D(("X", 1, "b"), ("X", 1, "c"), alphabet=ab)
    assert to_ltl(d1.pointwise_and(d2), ab) == parse_formula("X((a & b) & X(b & c))")
    assert D(("F", 0, "a"), alphabet=ab).pointwise_and(D(("X", 0, "a"), alphabet=ab)) is None
    assert D(("F", 0, "a"), alphabet=ab).pointwise_and(D(("F", 0, "!a"), alphabet=ab)) is None


def test_offsets_validated():
    with pytest.raises(ValueError):
        D(("F", 0, "o"), ("F", 0, "c"))
    with pytest.raises(ValueError):
        DirectedFormula(())


@pytest.mark.parametrize("d, dual", [
    (D(("F", 0, "w")), "G !w"),
    (D(("X", 1, "o")), "!X true | X !o"),
])
def test_dualize_examples(d, dual):
    assert str(dualize_learned(d, AB)) == dual


def test_dual_of_nested_event():
    ab = Alphabet(("a", "b"))
    d = D(("F", 0, "a"), ("F", 1, "b"), alphabet=ab)
    g = dualize_learned(d, ab)
    for n in range(1, 5):
        for w in itertools.product(range(4), repeat=n):
            t = Trace(w, ab)
            assert evaluate(g, t) != evaluate(to_ltl(d, ab), t)


# -- witness ends ---------------------------------------------------------------

def test_witness_end_examples():
    u1, v1 = robot_trace(U1), robot_trace(V1)
    assert witness_ends(D(("F", 0, "o"), ("F", 1, "c")), u1) == (7,)
    assert witness_ends(D(("F", 0, "o"), ("F", 1, "c")), v1) == ()
    assert witness_ends(D(("X", 0, "h")), u1) == (1,)
    assert witness_ends(D(("F", 0, "h")), u1) == (1, 2, 3, 4, 6, 8)
    assert witness_ends(D(("X", 4, "o")), u1) == (5,)
    assert witness_ends(D(("X", 4, "o")), v1) == ()


def test_width_intersection_would_over_approximate():
    ab = Alphabet(("a", "b", "c", "d"))
    t = Trace.from_sets([{"a"}, {"c"}, {"b", "d"}], ab)
    d1 = D(("F", 0, "a"), ("F", 1, "b"), alphabet=ab)
    d2 = D(("F", 0, "c"), ("F", 1, "d"), alphabet=ab)
    assert witness_ends(d1, t) == witness_ends(d2, t) == (3,)
    both = d1.pointwise_and(d2)
    assert witness_ends(both, t) == ()
    s = Sample(ab, (t,), (Trace.from_sets([set()], ab),))
    assert extend_width(d1, {0: (3,)}, d2, {0: (3,)}, s) == (both, {})


def test_width_with_no_common_position():
    ab = Alphabet(("a", "b"))
    t = Trace.from_sets([{"a"}, {"b"}], ab)
    s = Sample(ab, (t,), (Trace.from_sets([set()], ab),))
    combined, rows = extend_width(D(("F", 0, "a"), alphabet=ab), {0: (1,)},
                                  D(("F", 0, "b"), alphabet=ab), {0: (2,)}, s)
    assert rows == {}


@given(traces(max_len=7))
def test_bridging_against_evaluation(t):
    ab = t.alphabet
    syms = [PartialSymbol.of(ab, l) for l in (["p"], ["!q"], ["p", "q"])]
    for blocks in itertools.product([(EXACT, 0), (EVENT, 0), (EXACT, 2), (EVENT, 1)], syms, repeat=2):
        (m1, o1), s1, (m2, o2), s2 = blocks
        d = DirectedFormula((Block(m1, o1, s1), Block(m2, max(o2, 1), s2)))
        ends = witness_ends(d, t)
        f = to_ltl(d, ab)
        assert bool(ends) == evaluate(f, t)
        for i in range(1, len(t) + 1):
            assert (bool(ends) and min(ends) <= i) == evaluate(f, t.infix(1, i))


# -- per-formula steps ---------------------------------------------------------

def test_init_and_extend_on_u1(robot_v1):
    syms = enumerate_partial_symbols(robot_v1, 1)
    o, c = PartialSymbol.of(AB, ["o"]), PartialSymbol.of(AB, ["c"])
    idx = build_index(robot_v1, syms)
    atoms = dict(init_atoms(robot_v1, idx, [o]))
    assert atoms[D(("F", 0, "o"))] == {0: (5,), 1: (8,)}
    assert atoms[D(("X", 4, "o"))] == {0: (5,)}
    ext = dict(extend_length(D(("F", 0, "o")), {0: (5,)}, idx, [c]))
    assert ext == {
        D(("F", 0, "o"), ("X", 2, "c")): {0: (7,)},
        D(("F", 0, "o"), ("F", 1, "c")): {0: (7,)},
        D(("F", 0, "o"), ("F", 2, "c")): {0: (7,)},
    }
    # anchored at the final position: nothing to extend
    assert extend_length(D(("F", 0, "h")), {0: (8,)}, idx, [c]) == []


def _reference_levels(sample, max_len, max_width):
    """Per-formula closure up to (max_len, max_width), keyed by (length, width)."""
    syms = {w: enumerate_partial_symbols(sample, w) for w in range(1, max_width + 1)}
    idx = build_index(sample, [s for ss in syms.values() for s in ss])
    levels = {(1, 1): dict(init_atoms(sample, idx, syms[1]))}
    for ell in range(2, max_len + 1):
        acc = {}
        for d, rows in levels[(ell - 1, 1)].items():
            for e, r in extend_length(d, rows, idx, syms[1]):
                merged = acc.setdefault(e, {})
                for tid, ps in r.items():
                    merged[tid] = tuple(sorted(set(merged.get(tid, ())) | set(ps)))
        levels[(ell, 1)] = acc
    for ell in range(1, max_len + 1):
        for w in range(2, max_width + 1):
            acc = {}
            for d1, r1 in levels[(ell, w - 1)].items():
                for d2, r2 in levels[(ell, 1)].items():
                    out = extend_width(d1, r1, d2, r2, sample)
                    if out is not None and out[0].width == w:
                        acc[out[0]] = out[1]
            levels[(ell, w)] = acc
    return levels


def _engine_rows(enum, level):
    return {enum.formula(level, i): enum.rows(level, i) for i in range(len(level))}


@settings(max_examples=10)
@given(samples(max_traces=4, max_len=5))
def test_per_formula_steps_exact_and_equal_to_engine(sample):
    ref = _reference_levels(sample, 3, 2)
    for level in ref.values():
        for d, rows in level.items():
            for tid, t in enumerate(sample.traces):
                assert rows.get(tid, ()) == witness_ends(d, t)
    enum = Enumerator(sample, "pos", max_width=2)
    n_pos = len(sample.positives)
    for key, level in ref.items():
        alive = {d: r for d, r in level.items() if any(tid < n_pos for tid in r)}
        assert _engine_rows(enum, enum.new_formulas(*key)) == alive, key


def _all_directed(ab, max_len, trace_len):
    syms = []
    for w in (1, 2):
        for props in itertools.combinations(range(len(ab)), w):
            for pols in itertools.product((True, False), repeat=w):
                pos = sum(1 << p for p, v in zip(props, pols) if v)
                neg = sum(1 << p for p, v in zip(props, pols) if not v)
                syms.append(PartialSymbol(pos, neg))
    first = [(m, n) for m in (EXACT, EVENT) for n in range(trace_len)]
    cont = [(m, n) for m in (EXACT, EVENT) for n in range(1, trace_len)]
    for ell in range(1, max_len + 1):
        for shape in itertools.product(first, *[cont] * (ell - 1)):
            for ss in itertools.product(syms, repeat=ell):
                yield DirectedFormula(tuple(Block(m, n, s) for (m, n), s in zip(shape, ss)))


def test_enumeration_is_complete_and_duplicate_free():
    sample = Sample(PQ, (Trace((1, 3, 2), PQ), Trace((2, 0, 1), PQ)), (Trace((0, 0, 3), PQ),))
    enum = Enumerator(sample, "pos", max_width=2)
    produced = {}
    for ell in (1, 2, 3):
        for w in (1, 2):
            level = enum.new_formulas(ell, w)
            keys = [enum.formula(level, i) for i in range(len(level))]
            assert len(keys) == len(set(keys))
            produced[(ell, w)] = set(keys)
    for d in _all_directed(PQ, 3, 3):
        if any(witness_ends(d, t) for t in sample.positives):
            assert d in produced[(d.length, d.width)], d


@given(samples(max_traces=5, max_len=6))
@settings(max_examples=20)
def test_fast_sizes_and_dual_masks(sample):
    for role in ("pos", "neg"):
        enum = Enumerator(sample, role, max_width=2)
        for key in [(1, 1), (2, 1), (1, 2), (2, 2)]:
            level = enum.new_formulas(*key)
            for i in range(len(level)):
                d = enum.formula(level, i)
                assert level.sizes[i] == directed_size(d) == formula_size(to_ltl(d, sample.alphabet))
                g = dualize_learned(d, sample.alphabet)
                assert level.dual_sizes[i] == dual_size(d) == formula_size(g)
                for tid, t in enumerate(sample.traces):
                    assert evaluate(g, t) == (level.masks[i, tid] == 0)


def test_size_limit_prunes():
    s = Sample(PQ, (Trace((1, 3, 2, 0), PQ),), (Trace((0, 0, 3, 1), PQ),))
    enum = Enumerator(s, "pos")
    enum.size_limit = 5
    for key in [(1, 1), (2, 1), (1, 2), (3, 1)]:
        assert (enum.new_formulas(*key).sizes < 5).all()


def test_memory_budget_raises():
    s = Sample(PQ, (Trace((1, 3, 2, 0, 1, 2), PQ),), (Trace((0, 0, 3, 1), PQ),))
    enum = Enumerator(s, "pos", memory_budget=2000)
    with pytest.raises(EnumerationBudgetExceeded):
        for key in [(1, 1), (2, 1), (1, 2), (3, 1)]:
            enum.new_formulas(*key)


def test_long_traces_use_python_integers():
    ab = Alphabet(("a",))
    long = Trace(tuple([0] * 69 + [1]), ab)
    s = Sample(ab, (long,), (Trace((0,) * 70, ab),))
    enum = Enumerator(s, "pos", max_width=1)
    level = enum.new_formulas(1, 1)
    assert level.masks.dtype == object
    rows = _engine_rows(enum, level)
    assert rows[D(("X", 69, "a"), alphabet=ab)] == {0: (70,)}
    assert rows[D(("F", 0, "a"), alphabet=ab)] == {0: (70,)}


def test_schedule_order():
    got = list(itertools.islice(parameter_schedule(), 10))
    assert got == [(1, 1), (2, 1), (1, 2), (3, 1), (2, 2), (4, 1), (1, 3), (3, 2), (5, 1), (2, 3)]
    capped = list(parameter_schedule(3, 2))
    assert capped == [(1, 1), (2, 1), (1, 2), (3, 1), (2, 2), (3, 2)]
    assert len(set(capped)) == len(capped)
