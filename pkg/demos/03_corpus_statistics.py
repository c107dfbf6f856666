"""
Style statistics: tokens, hapaxes, and shallow chunks
=====================================================

The stats module measures whether synthetic comments look like real ones
without any model in the loop: token frequencies, vocabulary diversity,
per-sentence hapax ratios, and the NP/VP/PP/SBAR phrase distribution from
a naive tagger.
"""
from slurg.corpus_stats import (
    chunk_phrases,
    compute_stats,
    hapax_ratio,
    naive_pos_tag,
    tokenize,
    vocab_diversity,
)
from slurg.spans import AnnotatedSample, Corpus

comments = [
    "The old guard betrayed us. Everyone knows the old guard lies!",
    "If we allow this, next they will ban everything we love.",
    "My grandfather fought for this land and he never complained once.",
]
corpus = Corpus(
    tuple(
        AnnotatedSample(f"d{i}", text, frozenset(), "demo")
        for i, text in enumerate(comments)
    )
)

print("tokens of comment 0:", tokenize(comments[0]))
print("vocab diversity:", round(vocab_diversity(corpus), 3))

# Hapax ratio is per sentence: a token counts if it appears exactly once
# in its sentence after stopword removal.
hapax = hapax_ratio(corpus)
for i, ratio in enumerate(hapax.per_sentence):
    print(f"  sentence {i}: hapax ratio {ratio:.2f}")
print("mean hapax ratio:", round(hapax.mean, 3))

# The tagger is a handful of closed-class lists and suffix rules; good
# enough to chunk, not a real parser.
tagged = naive_pos_tag(tokenize("the angry mob ran through the old town"))
print("\ntagged:", tagged)
print("chunks:", dict(chunk_phrases(tagged)))

# compute_stats bundles everything, including the checksum of the
# stopword list the numbers depend on.
report = compute_stats(corpus, k=5)
print("\ntop-5 tokens:", list(report.top_k))
print("phrase distribution:", {k: round(v, 3) for k, v in report.phrase_dist.items()})
print("stopword checksum:", report.stopword_checksum[:16], "...")
