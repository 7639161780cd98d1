"""Learning with mislabelled traces.

A few labels are flipped on purpose.  No formula separates the noisy
sample exactly, but allowing a 10% error rate per side recovers a small
formula close to the source.
"""

import random

from ltlearn import Alphabet, LearnerConfig, Sample, generate_sample, learn, parse_formula
from ltlearn.semantics import error_rates, sat_mask

source = parse_formula("F a1 & F a2 & F a3")
clean = generate_sample(source, 10, 100, 100, seed=5, alphabet=Alphabet(("a1", "a2", "a3")))
rng = random.Random(5)
pos, neg = list(clean.positives), list(clean.negatives)
flip = 5
moved_p = [pos.pop(rng.randrange(len(pos))) for _ in range(flip)]
moved_n = [neg.pop(rng.randrange(len(neg))) for _ in range(flip)]
noisy = Sample(clean.alphabet, tuple(pos + moved_n), tuple(neg + moved_p))
print(f"flipped {flip} labels on each side")
for eps in (0.0, 0.05, 0.1):
    r = learn(noisy, LearnerConfig(epsilon=eps, timeout=60))
    if r.formula is None:
        why = "time budget reached" if r.timed_out else "search space exhausted"
        print(f"epsilon {eps}: no formula ({why})")
        continue
    missed, accepted = error_rates(sat_mask(r.formula, noisy))
    print(f"epsilon {eps}: {r.text} (size {r.size}), missed {missed:.2f}, accepted {accepted:.2f}")
