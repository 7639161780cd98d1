"""Generate a sample from a known formula, then learn it back.

Samples are drawn uniformly from the traces of a fixed length that satisfy
(positives) or violate (negatives) the source formula.  The learner sees
only the labelled traces.
"""

from ltlearn import Alphabet, LearnerConfig, count_words, generate_sample, learn, parse_formula, print_formula
from ltlearn.semantics import evaluate

alphabet = Alphabet(("a1", "a2", "a3"))
for text in ("F a1 & F a2 & F a3", "F(a1 & F(a2 & F a3))"):
    source = parse_formula(text)
    n_sat = count_words(source, 10, alphabet)
    print(f"== {text}: {n_sat} of {8 ** 10} traces of length 10 satisfy it")
    sample = generate_sample(source, 10, 100, 100, seed=1, alphabet=alphabet)
    result = learn(sample, LearnerConfig(timeout=30),
                   emit=lambda t, f, n: print(f"  [t={t:.2f}s] size={n} {print_formula(f)}"))
    print(f"  learned {result.text} (size {result.size}), timed out: {result.timed_out}")
    # does the learned formula agree with the source on fresh traces?
    fresh = generate_sample(source, 12, 200, 200, seed=2, alphabet=alphabet)
    agree = sum(evaluate(result.formula, t) == evaluate(source, t) for t in fresh.traces)
    print(f"  agreement with the source on 400 fresh traces of length 12: {agree}/400")
