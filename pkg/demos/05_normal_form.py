"""Every F/X formula is a Boolean combination of directed formulas.

This is why enumerating directed formulas and combining them loses no
generality for the F/X fragment.  The rewrite below produces the
combination explicitly; equivalence is checked on all short traces.
"""

import itertools

from ltlearn import Alphabet, Trace, evaluate, normalize_to_directed_bc, parse_formula, print_formula
from ltlearn.normalize import is_directed, is_directed_combination

PQ = Alphabet(("p", "q"))
short = [Trace(w, PQ) for n in range(1, 6) for w in itertools.product(range(4), repeat=n)]
for text in ("F p & F q", "X(p | F q)", "F(p & F q) & X X q", "F(F p & X F q)"):
    f = parse_formula(text)
    g = normalize_to_directed_bc(f)
    same = all(evaluate(f, t) == evaluate(g, t) for t in short)
    print(f"{text}\n  -> {print_formula(g)}")
    print(f"  directed: {is_directed(g)}, combination of directed: {is_directed_combination(g)}, "
          f"equivalent on {len(short)} traces: {same}")
