"""
Annotating spans and round-tripping the inline markup
=====================================================

Build a couple of annotated samples by hand, render them to the inline
tag format, parse them back, and see what the lenient parser does with
broken markup.
"""
from slurg.spans import CREDIBILITY, EMOTIONAL, LOGICAL, AnnotatedSample, Span
from slurg.tag_codec import Strictness, parse_tagged, render_tagged

# A comment with one credibility attack nested inside a larger emotional
# appeal. Offsets index the plain text, end-exclusive.
text = "he is a Russian troll so do not listen to anything he says"
sample = AnnotatedSample(
    sample_id="demo-1",
    text=text,
    spans=frozenset({
        Span(0, len(text), EMOTIONAL),
        Span(8, 21, CREDIBILITY),
    }),
    annotator_id="me",
)

tagged = render_tagged(sample)
print("tagged form:")
print(" ", tagged)

# Parsing strips the tags and recovers the same spans.
report = parse_tagged(tagged, sample_id="demo-1", annotator_id="me")
print("round-trip ok:", report.sample.text == text and report.sample.spans == sample.spans)

# Same extent, two labels: the renderer picks a fixed nesting order so
# the output is deterministic.
double = AnnotatedSample(
    sample_id="demo-2",
    text="pure whataboutism",
    spans=frozenset({Span(0, 17, EMOTIONAL), Span(0, 17, LOGICAL)}),
    annotator_id="me",
)
print("\nsame extent, two labels:")
print(" ", render_tagged(double))

# Strict parsing refuses malformed markup; lenient parsing repairs it and
# tells you what it did.
broken = "<emotional_fallacy>never closed, and <bogus>an unknown tag</bogus> too"
lenient = parse_tagged(broken, Strictness.LENIENT)
print("\nlenient parse of broken markup:")
print("  recovered text:", lenient.sample.text)
print("  recovered spans:", sorted((s.start, s.end) for s in lenient.sample.spans))
for repair in lenient.repairs:
    print("  repair:", repair.kind, "at", repair.position)
