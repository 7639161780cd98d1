"""Compare learned sizes with certified minimal sizes on small samples.

The oracle enumerates every formula by increasing size, so it certifies the
minimum; the learner is much faster but may return something larger.
"""

import random

from ltlearn import Alphabet, generate_sample, learn, minimal_separating_size, print_formula
from ltlearn.oracle import enumerate_formulas

PQ = Alphabet(("p", "q"))
rng = random.Random(0)
candidates = list(enumerate_formulas(4, PQ))
print(f"{'source':<18}{'oracle':<22}{'learner':<26}")
shown = 0
while shown < 10:
    source = rng.choice(candidates)
    try:
        sample = generate_sample(source, 6, 4, 4, seed=rng.randrange(1000), alphabet=PQ)
    except ValueError:
        continue
    found = minimal_separating_size(sample, 5)
    if found is None:
        continue
    result = learn(sample)
    print(f"{print_formula(source):<18}{found[0]:>2} {print_formula(found[1]):<19}"
          f"{result.size:>2} {result.text:<23}")
    shown += 1
