"""
From raw annotations to an F1 table
===================================

The full desk-scale loop on a synthetic corpus: pairwise agreement,
gold selection, few-shot splits, mock-transport annotation, and strict
vs relaxed span F1.
"""
from slurg.agreement import pairwise_agreement, select_gold
from slurg.dataset_ops import STANDARD_SPLITS, SplitSpec, make_split
from slurg.llm_gateway import EchoGoldTransport, annotate_batch
from slurg.prompts import DEFAULT_GUIDELINES
from slurg.span_eval import evaluate_split, reports_to_csv
from slurg.spans import CREDIBILITY, EMOTIONAL, AnnotatedSample, Corpus, Span

# Two annotators over twenty comments. They agree everywhere except the
# last five comments, where the second annotator picks the other label.
samples = []
for i in range(20):
    text = f"comment {i:02d}: " + " ".join(["lorem ipsum dolor sit amet"] * 2)
    label = CREDIBILITY if i % 2 else EMOTIONAL
    samples.append(AnnotatedSample(f"c{i:02d}", text, frozenset({Span(12, 30, label)}), "ann-a"))
    if i >= 15:
        label = EMOTIONAL if i % 2 else CREDIBILITY
    samples.append(AnnotatedSample(f"c{i:02d}", text, frozenset({Span(12, 30, label)}), "ann-b"))
annotations = Corpus(tuple(samples), provenance="demo")

report = pairwise_agreement(annotations)
print("pairwise agreement:")
for pair, score in report.pair_scores.items():
    print(f"  {pair[0]} vs {pair[1]}: {score.overall:.3f}")

# Keep only samples whose agreement clears 0.80; pick one annotator's
# version of each at random (seeded).
gold = select_gold(annotations, threshold=0.80, rng_seed=0)
print(f"gold: {len(gold)} of 20 samples survived the threshold")

# Four standard splits, then annotate the gold half of each with the echo
# transport (it replays the gold markup, so F1 is 1.0 by construction --
# swap in an HttpTransport to measure a real model).
transport = EchoGoldTransport(annotations)
reports = []
for spec_str in STANDARD_SPLITS:
    split = make_split(gold, SplitSpec.parse(spec_str))
    result = annotate_batch(split, transport, DEFAULT_GUIDELINES)
    reports.append(evaluate_split(split.gold, result.predictions, spec_str))

print("\n" + reports_to_csv(reports))
