import pytest
from hypothesis import given

from ltlearn.formula import (
    FALSE, LAST, TRUE, And, Atom, Finally, FormulaSyntaxError, Globally, Implies, NegAtom, Next,
    Not, Or, UnsupportedOperatorError, formula_size, is_nnf, negate, parse_formula, print_formula,
    to_nnf,
)

from strategies import formulas

SECTION1 = Finally(And(Atom("o"), Finally(Next(Atom("c")))))


def test_parse_running_formula():
    assert parse_formula("F(o & F(X(c)))") == SECTION1
    assert parse_formula("F(o & F X c)") == SECTION1
    assert print_formula(SECTION1) == "F(o & F X c)"


@pytest.mark.parametrize("f, size", [
    (SECTION1, 6),
    (Atom("p"), 1),
    (NegAtom("w"), 2),
    (LAST, 3),
    (TRUE, 1),
    (And(SECTION1, Globally(NegAtom("w"))), 10),
])
def test_sizes(f, size):
    assert formula_size(f) == size


def test_precedence_and_associativity():
    f = parse_formula("a | b & c -> d -> e", nnf=False)
    assert f == Implies(Or(Atom("a"), And(Atom("b"), Atom("c"))), Implies(Atom("d"), Atom("e")))
    assert parse_formula("a & b & c", nnf=False) == And(And(Atom("a"), Atom("b")), Atom("c"))
    assert parse_formula("!X a & b", nnf=False) == And(Not(Next(Atom("a"))), Atom("b"))
    assert parse_formula("a => b", nnf=False) == parse_formula("a -> b", nnf=False)
    assert parse_formula("~a") == NegAtom("a")


def test_keywords():
    assert parse_formula("true") == TRUE
    assert parse_formula("false") == FALSE
    assert parse_formula("last") == LAST
    assert parse_formula("!X true") == LAST


def test_implication_desugared():
    f = parse_formula("G(q -> G(!p))")
    assert f == Globally(Or(NegAtom("q"), Globally(NegAtom("p"))))
    assert is_nnf(f)


@pytest.mark.parametrize("text", ["a U b", "a R b", "(a W b)"])
def test_until_family_unsupported(text):
    with pytest.raises(UnsupportedOperatorError):
        parse_formula(text)


@pytest.mark.parametrize("text, pos", [("a &", 3), ("(a", 2), ("a b", 2), ("a $ b", 2), ("", 0)])
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(FormulaSyntaxError) as exc:
        parse_formula(text)
    assert exc.value.position == pos


@pytest.mark.parametrize("src, nnf", [
    ("!F w", "G !w"),
    ("!X p", "!X true | X !p"),
    ("!(a & b)", "!a | !b"),
    ("!G(a | X b)", "F(!a & (!X true | X !b))"),
    ("!last", "X true"),
])
def test_nnf_dual_identities(src, nnf):
    assert print_formula(parse_formula(src)) == nnf


def test_last_prints_in_derived_form():
    assert print_formula(LAST) == "!X true"
    assert print_formula(Next(LAST)) == "X(!X true)"
    assert parse_formula(print_formula(Next(LAST))) == Next(LAST)


@given(formulas())
def test_print_parse_round_trip(f):
    g = to_nnf(f)
    assert parse_formula(print_formula(g)) == g


@given(formulas())
def test_nnf_output_is_nnf(f):
    assert is_nnf(to_nnf(f))
    assert is_nnf(negate(f))
