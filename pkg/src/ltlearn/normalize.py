"""Rewriting LTL(F, X, &, |) into Boolean combinations of directed formulas.

The rewriting follows the usual induction: ``X`` and ``F`` are pushed
through disjunctions, and a conjunction of two directed formulas is split
into a disjunction over the possible interleavings, e.g.
``F a & F b == F(a & F b) | F(b & F a)``.  The output can be exponentially
larger than the input, so a node cap guards it.

Offsets of 0 are allowed anywhere here (``F(a & F b)`` is directed in this
sense); the learner's enumeration uses the stricter block form.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .formula import (
    And, Atom, Bottom, Finally, Formula, NegAtom, Next, Or, UnsupportedOperatorError,
    conj, disj, formula_size, next_n,
)

__all__ = ["NormalizationBlowup", "normalize_to_directed_bc", "is_directed", "is_directed_combination"]


class NormalizationBlowup(RuntimeError):
    pass


@dataclass(frozen=True)
class _Dir:
    """``F? X^n (lits & tail)``; ``tail`` is evaluated where ``lits`` is."""

    event: bool
    n: int
    lits: frozenset  # of (name, polarity)
    tail: "_Dir | None"


def _consistent(lits: frozenset) -> bool:
    return not any((name, not pol) in lits for name, pol in lits)


def _next(d: _Dir) -> _Dir:
    return replace(d, n=d.n + 1)


def _fin(d: _Dir) -> _Dir:
    return replace(d, event=True)


def _exact(d: _Dir) -> _Dir:
    return replace(d, event=False)


def _dec(d: _Dir) -> _Dir:
    return replace(d, n=d.n - 1)


def _attach(lits: frozenset, g: _Dir | None) -> _Dir | None:
    """``lits & g`` at the current position."""
    if g is None:
        return _Dir(False, 0, lits, None)
    if not g.event and g.n == 0:
        merged = lits | g.lits
        return _Dir(False, 0, merged, g.tail) if _consistent(merged) else None
    return _Dir(False, 0, lits, g)


def _and(a: _Dir, b: _Dir, memo: dict) -> tuple[_Dir, ...]:
    """Disjunction of directed formulas equivalent to ``a & b``."""
    key = (a, b)
    if key in memo:
        return memo[key]
    out: list[_Dir | None] = []
    if a.event and b.event:
        out += [_fin(g) for g in _and(_exact(a), b, memo)]
        out += [_fin(g) for g in _and(_exact(b), a, memo)]
    elif not a.event and a.n == 0:
        if a.tail is None:
            out.append(_attach(a.lits, b))
        else:
            out += [_attach(a.lits, g) for g in _and(a.tail, b, memo)]
    elif not b.event and b.n == 0:
        out += list(_and(b, a, memo))
    elif not a.event and not b.event:
        out += [_next(g) for g in _and(_dec(a), _dec(b), memo)]
    else:
        x, f = (a, b) if not a.event else (b, a)
        # X d1 & F d2 == (X d1 & d2) | X(d1 & F d2)
        out += list(_and(x, _exact(f), memo))
        out += [_next(g) for g in _and(_dec(x), f, memo)]
    result = tuple(dict.fromkeys(g for g in out if g is not None))
    memo[key] = result
    return result


def _parse_dir(f: Formula) -> _Dir:
    """Inverse of :func:`_to_formula` on inputs accepted by :func:`is_directed`."""
    event = isinstance(f, Finally)
    if event:
        f = f.arg
    n = 0
    while isinstance(f, Next):
        f, n = f.arg, n + 1
    parts = _flatten(f, And)
    lits = frozenset((p.name, isinstance(p, Atom)) for p in parts if isinstance(p, (Atom, NegAtom)))
    rest = [p for p in parts if not isinstance(p, (Atom, NegAtom))]
    return _Dir(event, n, lits, _parse_dir(rest[0]) if rest else None)


def _merge(c: tuple[_Dir, ...], memo: dict) -> list[_Dir]:
    """A conjunction of directed formulas as a disjunction of directed formulas."""
    gammas = [c[0]]
    for d in c[1:]:
        gammas = list(dict.fromkeys(g for x in gammas for g in _and(x, d, memo)))
    return gammas


def _dnf(f: Formula, memo: dict) -> list[tuple[_Dir, ...]]:
    if is_directed(f):
        return [(_parse_dir(f),)]
    if isinstance(f, Atom):
        return [(_Dir(False, 0, frozenset({(f.name, True)}), None),)]
    if isinstance(f, NegAtom):
        return [(_Dir(False, 0, frozenset({(f.name, False)}), None),)]
    if isinstance(f, Or):
        return _dedup(_dnf(f.left, memo) + _dnf(f.right, memo))
    if isinstance(f, And):
        left, right = _dnf(f.left, memo), _dnf(f.right, memo)
        return _dedup([tuple(dict.fromkeys(a + b)) for a in left for b in right])
    if isinstance(f, Next):
        return [tuple(_next(d) for d in c) for c in _dnf(f.arg, memo)]
    if isinstance(f, Finally):
        return _dedup([(_fin(g),) for c in _dnf(f.arg, memo) for g in _merge(c, memo)])
    raise UnsupportedOperatorError(
        f"{type(f).__name__} is outside LTL(F, X, &, |) with literals"
    )


def _dedup(cs):
    return list(dict.fromkeys(cs))


def _to_formula(d: _Dir) -> Formula:
    lits = sorted(d.lits)
    body = conj(Atom(n) if pol else NegAtom(n) for n, pol in lits)
    if d.tail is not None:
        body = And(body, _to_formula(d.tail))
    body = next_n(body, d.n)
    return Finally(body) if d.event else body


def normalize_to_directed_bc(f: Formula, max_nodes: int = 10_000) -> Formula:
    """Equivalent disjunction of directed formulas (a Boolean combination).

    Conjunctions are merged into their interleavings everywhere, not only
    under ``F``, so ``F p & F q`` becomes ``F(p & F q) | F(q & F p)``.
    """
    memo: dict = {}
    ds = list(dict.fromkeys(g for c in _dnf(f, memo) for g in _merge(c, memo)))
    if not ds:
        return Bottom()
    out = disj(_to_formula(d) for d in ds)
    if formula_size(out) > max_nodes:
        raise NormalizationBlowup(f"normal form exceeds {max_nodes} nodes")
    return out


def _flatten(f: Formula, kind) -> list[Formula]:
    if isinstance(f, kind):
        return _flatten(f.left, kind) + _flatten(f.right, kind)
    return [f]


def is_directed(f: Formula) -> bool:
    """Membership in ``X^n s | F X^n s | X^n(s & d) | F X^n(s & d)``, n >= 0."""
    if isinstance(f, Finally):
        f = f.arg
    while isinstance(f, Next):
        f = f.arg
    parts = _flatten(f, And)
    lits = [p for p in parts if isinstance(p, (Atom, NegAtom))]
    rest = [p for p in parts if not isinstance(p, (Atom, NegAtom))]
    if not lits or len(rest) > 1:
        return False
    return not rest or isinstance(rest[0], (Finally, Next)) and is_directed(rest[0])


def is_directed_combination(f: Formula) -> bool:
    """Disjunction of conjunctions of directed formulas (``false`` when empty)."""
    if isinstance(f, Bottom):
        return True
    return all(
        is_directed(c) for d in _flatten(f, Or) for c in _flatten(d, And)
    )
