"""A robot trace learning problem, solved anytime.

Propositions: h (home), o (open door), c (closed door), w (work).
One positive trace u1 and three negative traces v1, v2, v3.  The learner
prints every strictly smaller separating formula it finds, and the final
answer is checked again by plain evaluation.
"""

from pathlib import Path

from ltlearn import learn, load_sample, parse_formula, print_formula, sat_mask
from ltlearn.semantics import evaluate

DATA = Path(__file__).parent / "data"


def show(label, sample):
    print(f"== {label}: {len(sample.positives)} positive, {len(sample.negatives)} negative")
    result = learn(sample, emit=lambda t, f, n: print(f"  [t={t:.3f}s] size={n} {print_formula(f)}"))
    print(f"  best: {result.text} (size {result.size}) in {result.total_time:.3f}s")
    mask = sat_mask(result.formula, sample)
    print(f"  positives accepted {mask.pos_count}/{mask.n_pos}, negatives accepted {mask.neg_count}/{mask.n_neg}")
    return result


show("u1 against v1", load_sample(DATA / "running_example_v1.trace"))
full = load_sample(DATA / "running_example.trace")
show("u1 against v1, v2, v3", full)

# a hand-written classifier, for comparison: "the door opens and is later closed, and no work"
hand = parse_formula("F(o & F X c) & G !w")
print("== hand-written:", print_formula(hand))
for label, traces in (("u", full.positives), ("v", full.negatives)):
    for i, t in enumerate(traces, 1):
        print(f"  {label}{i}: {'accepted' if evaluate(hand, t) else 'rejected'}")
