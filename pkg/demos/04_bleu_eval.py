"""Corpus BLEU and multi-system comparison.

Scores a worked single-pair example, shows what smoothing changes, then
compares two synthetic "systems" across two test sets the way the CLI's
compare subcommand does.
"""

import random

from corpusforge import EvalSet, compare_systems, corpus_bleu

# One hypothesis against one reference. Precisions are the clipped
# n-gram matches for orders 1-4; the brevity penalty kicks in because
# the hypothesis is a token short.
hyp = ["the cat sat on mat"]
ref = ["the cat sat on the mat"]
r = corpus_bleu(hyp, ref, smoothing="none")
print(f"score      {r.score:.4f}")
print(f"precisions {[round(p, 4) for p in r.precisions]}")
print(f"bp         {r.brevity_penalty:.4f}  (hyp {r.hyp_length} vs ref {r.ref_length} tokens)\n")

# With no 3-gram match anywhere, unsmoothed BLEU collapses to zero;
# epsilon smoothing substitutes 1/(2*total) for the empty orders so the
# score stays informative.
hyp2 = ["a b c d e"]
ref2 = ["a b x c d"]
print(f"unsmoothed  {corpus_bleu(hyp2, ref2, smoothing='none').score:.4f}")
print(f"epsilon     {corpus_bleu(hyp2, ref2, smoothing='epsilon').score:.4f}\n")

# System comparison. "copy" returns the references verbatim; "scramble"
# shuffles each sentence's tokens, keeping unigrams but wrecking order.
refs_dev = (
    "وہ بازار سے پھل لے کر آیا",
    "بارش کے بعد موسم خوشگوار ہو گیا",
    "بچوں نے میدان میں کرکٹ کھیلی",
    "استاد نے سبق دوبارہ سمجھایا",
)
refs_test = (
    "گاڑی وقت پر اسٹیشن پہنچ گئی",
    "اس نے خط لکھ کر روانہ کیا",
)

rng = random.Random(3)


def scramble(sentence):
    toks = sentence.split()
    rng.shuffle(toks)
    return " ".join(toks)


sets = [
    EvalSet(
        name="dev",
        references=refs_dev,
        hypotheses={"copy": refs_dev, "scramble": tuple(scramble(s) for s in refs_dev)},
    ),
    EvalSet(
        name="test",
        references=refs_test,
        hypotheses={"copy": refs_test, "scramble": tuple(scramble(s) for s in refs_test)},
    ),
]

print(compare_systems(sets, smoothing="epsilon", fmt="table"))
print("\nThe * marks the best score in each column.")
